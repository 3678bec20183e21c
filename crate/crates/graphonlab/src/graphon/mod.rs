//! Graphon representations and their evaluation.
//!
//! A graphon is a symmetric measurable function `W: [0,1]^2 -> [0,1]`. This
//! module provides three concrete families:
//!
//! * [`AnalyticGraphon`] — closed-form kernels from a fixed registry, so
//!   symmetry holds by construction;
//! * [`StepGraphon`] — block-constant kernels over an interval partition,
//!   including the kernel induced by a graph's adjacency matrix;
//! * [`PiecewiseLipschitzGraphon`] — a grid of smooth sub-kernels over a
//!   partition, Lipschitz within each piece and possibly discontinuous
//!   across piece boundaries.
//!
//! All values are immutable after construction and evaluation is pure, so a
//! graphon can be shared freely across threads.

mod analytic;
mod piecewise;
mod step;

pub use analytic::AnalyticGraphon;
pub use piecewise::{Partition, PieceKernel, PiecewiseLipschitzGraphon};
pub use step::StepGraphon;

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Tolerance for the symmetry/range grid audit in [`Graphon::validate`].
pub const AUDIT_TOL: f64 = 1e-12;

/// A symmetric kernel `W: [0,1]^2 -> [0,1]` in one of the supported forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Graphon {
    Analytic(AnalyticGraphon),
    Step(StepGraphon),
    PiecewiseLipschitz(PiecewiseLipschitzGraphon),
}

impl Graphon {
    pub fn constant(p: f64) -> Graphon {
        Graphon::Analytic(AnalyticGraphon::Constant { p })
    }

    pub fn product() -> Graphon {
        Graphon::Analytic(AnalyticGraphon::Product)
    }

    /// Evaluates `W(u, v)`.
    ///
    /// Fails with a domain error if either coordinate lies outside `[0,1]`.
    pub fn evaluate(&self, u: f64, v: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain { u, v });
        }
        Ok(self.value(u, v))
    }

    /// Evaluation without the domain check; callers must keep `u, v` in `[0,1]`.
    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
        match self {
            Graphon::Analytic(g) => g.value(u, v),
            Graphon::Step(g) => g.value(u, v),
            Graphon::PiecewiseLipschitz(g) => g.value(u, v),
        }
    }

    /// Evaluates the kernel on the `m`-point midpoint grid, returning the
    /// symmetric `m x m` matrix `[W((i+1/2)/m, (j+1/2)/m)]`.
    pub fn grid_matrix(&self, m: usize) -> Array2<f64> {
        let mut a = Array2::zeros((m, m));
        let h = 1.0 / m as f64;
        for i in 0..m {
            let u = (i as f64 + 0.5) * h;
            for j in i..m {
                let v = (j as f64 + 0.5) * h;
                let w = self.value(u, v);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
        a
    }

    /// Audits symmetry and range over a uniform grid (endpoints included).
    ///
    /// The report passes iff the worst symmetry violation and the worst
    /// range excursion are both within [`AUDIT_TOL`].
    pub fn validate(&self, grid_resolution: usize) -> Result<ValidationReport> {
        if grid_resolution < 2 {
            return Err(Error::Parameter(format!(
                "grid_resolution must be at least 2, got {grid_resolution}"
            )));
        }
        let g = grid_resolution;
        let coord = |i: usize| i as f64 / (g - 1) as f64;
        let mut max_sym = 0.0f64;
        let mut max_range = 0.0f64;
        for i in 0..g {
            let u = coord(i);
            for j in i..g {
                let v = coord(j);
                let w = self.value(u, v);
                let wt = self.value(v, u);
                max_sym = max_sym.max((w - wt).abs());
                max_range = max_range.max((-w).max(w - 1.0).max(0.0));
                max_range = max_range.max((-wt).max(wt - 1.0).max(0.0));
            }
        }
        Ok(ValidationReport {
            grid_resolution,
            max_symmetry_violation: max_sym,
            max_range_violation: max_range,
            passed: max_sym <= AUDIT_TOL && max_range <= AUDIT_TOL,
        })
    }

    /// A short human-readable identifier, used to label spectra and CSV rows.
    pub fn describe(&self) -> String {
        match self {
            Graphon::Analytic(g) => format!("analytic:{}", g.name()),
            Graphon::Step(g) => format!("step:{}", g.block_count()),
            Graphon::PiecewiseLipschitz(g) => {
                format!("piecewise:K={}:L={}", g.piece_count(), g.max_lipschitz())
            }
        }
    }

    /// A global Lipschitz constant under the `|du| + |dv|` metric, when one
    /// is known analytically for this kernel.
    pub fn declared_lipschitz(&self) -> Option<f64> {
        match self {
            Graphon::Analytic(g) => g.analytic_lipschitz(),
            Graphon::Step(_) => None,
            Graphon::PiecewiseLipschitz(g) => {
                if g.piece_count() == 1 {
                    Some(g.max_lipschitz())
                } else {
                    None
                }
            }
        }
    }

    /// Declared piecewise-Lipschitz structure `(K, L)`, when available.
    pub fn declared_pieces(&self) -> Option<(usize, f64)> {
        match self {
            Graphon::Analytic(g) => g.analytic_lipschitz().map(|l| (1, l)),
            Graphon::Step(_) => None,
            Graphon::PiecewiseLipschitz(g) => Some((g.piece_count(), g.max_lipschitz())),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Graphon> {
        Ok(serde_json::from_str(text)?)
    }
}

impl From<StepGraphon> for Graphon {
    fn from(g: StepGraphon) -> Self {
        Graphon::Step(g)
    }
}

impl From<AnalyticGraphon> for Graphon {
    fn from(g: AnalyticGraphon) -> Self {
        Graphon::Analytic(g)
    }
}

impl From<PiecewiseLipschitzGraphon> for Graphon {
    fn from(g: PiecewiseLipschitzGraphon) -> Self {
        Graphon::PiecewiseLipschitz(g)
    }
}

/// Outcome of the symmetry/range grid audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub grid_resolution: usize,
    pub max_symmetry_violation: f64,
    pub max_range_violation: f64,
    pub passed: bool,
}
