//! The three a-priori eigenvalue perturbation bounds.
//!
//! Each bound is a closed-form function of the sample size `n` and a small
//! parameter set, paired with the probability at which it holds:
//!
//! * the standard bound `sqrt(176 / sqrt(ln n))` needs no smoothness at all
//!   and decays extremely slowly;
//! * the Lipschitz bound trades a global smoothness constant `L` for a
//!   `sqrt(ln n / n)` rate;
//! * the piecewise-Lipschitz bound allows jumps across a `K`-interval
//!   partition and decays like `(ln n / n)^(1/4)`.
//!
//! Natural logarithms are used throughout. Precondition violations in the
//! Lipschitz and piecewise families produce reports flagged `valid = false`
//! with a reason rather than errors, so a sweep over an `n`-grid can record
//! infeasible cells and keep going. The formulas are still evaluated with
//! plain float semantics in that case; consumers must gate on `valid`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which bound family a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    Standard,
    Lipschitz,
    Piecewise,
}

impl BoundFamily {
    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Standard => "standard",
            BoundFamily::Lipschitz => "lipschitz",
            BoundFamily::Piecewise => "piecewise",
        }
    }
}

/// Parameters shared by the Lipschitz and piecewise bounds.
///
/// `delta` plays the roles of both the quantile parameter inside `d_n` and
/// the failure budget in the piecewise probability (the two are not linked
/// by any stated constraint, so a single knob is used).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundParams {
    pub chi: f64,
    pub x1: f64,
    pub x2: f64,
    pub delta: f64,
    /// Global (or max per-piece) Lipschitz constant of the graphon.
    pub l: f64,
    /// Piece count of the partition, 1 for globally Lipschitz graphons.
    pub k: usize,
}

impl Default for BoundParams {
    fn default() -> BoundParams {
        BoundParams {
            chi: 0.05,
            x1: 0.3,
            x2: 0.3,
            delta: 0.05,
            l: 1.0,
            k: 1,
        }
    }
}

impl BoundParams {
    pub fn with_lipschitz(l: f64) -> BoundParams {
        BoundParams {
            l,
            ..BoundParams::default()
        }
    }

    pub fn with_pieces(l: f64, k: usize) -> BoundParams {
        BoundParams {
            l,
            k,
            ..BoundParams::default()
        }
    }
}

/// One evaluated bound: value, probability guarantee, and feasibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: BoundFamily,
    pub n: usize,
    pub value: f64,
    pub probability: f64,
    pub params: BoundParams,
    /// False when a precondition of the bound fails at this `n`.
    pub valid: bool,
    /// Why `valid` is false, when it is.
    pub reason: Option<String>,
    /// True when the piecewise radicand term `L^2 - K^2` was negative and
    /// clamped to zero (only loosens the bound).
    pub clamped: bool,
}

/// The sampling term `(1/n) * sqrt(4 n ln(2n / chi))` shared by the
/// Lipschitz and piecewise bounds.
fn sampling_term(n: usize, chi: f64) -> f64 {
    let nf = n as f64;
    (4.0 * nf * (2.0 * nf / chi).ln()).sqrt() / nf
}

/// The assumption-free bound `sqrt(176 / sqrt(ln n))`, holding with
/// probability `1 - exp(-n / (2 ln n))`.
///
/// The constant composes the cut-distance sampling rate `22 / sqrt(ln n)`
/// with the norm comparison `||T_K|| <= sqrt(8 ||K||_box)`.
pub fn standard_bound(n: usize) -> Result<BoundReport> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "standard bound needs n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    let value = (176.0 / nf.ln().sqrt()).sqrt();
    let probability = 1.0 - (-nf / (2.0 * nf.ln())).exp();
    Ok(BoundReport {
        family: BoundFamily::Standard,
        n,
        value,
        probability,
        params: BoundParams::default(),
        valid: true,
        reason: None,
        clamped: false,
    })
}

/// The globally Lipschitz bound
/// `(2L/n) ln((n+1)^2 / ln(1/(1-x1))) + (1/n) sqrt(4 n ln(2n/chi))`,
/// holding with probability `1 - chi (1 - 2 x1)(1 - x2)` (computed exactly
/// as printed in its source, where the monotonicity in `chi` looks like a
/// typo; see the crate guide).
pub fn lipschitz_bound(n: usize, params: &BoundParams) -> BoundReport {
    let mut reasons: Vec<String> = Vec::new();
    if !(params.x1 > 0.0 && params.x1 <= 0.3) {
        reasons.push(format!("x1 = {} outside (0, 0.3]", params.x1));
    }
    if !(params.x2 > 0.0 && params.x2 <= 0.3) {
        reasons.push(format!("x2 = {} outside (0, 0.3]", params.x2));
    }
    if !(params.chi > 0.0) {
        reasons.push(format!("chi = {} must be positive", params.chi));
    }
    if !(params.l > 0.0) {
        reasons.push(format!("L = {} must be positive", params.l));
    }
    if (n as f64) < 4.0 / params.x2 {
        reasons.push(format!("n = {n} below 4/x2 = {}", 4.0 / params.x2));
    }

    let nf = n as f64;
    let smoothing = (2.0 * params.l / nf) * ((nf + 1.0).powi(2) / (1.0 / (1.0 - params.x1)).ln()).ln();
    let value = smoothing + sampling_term(n, params.chi);
    let probability = 1.0 - params.chi * (1.0 - 2.0 * params.x1) * (1.0 - params.x2);
    BoundReport {
        family: BoundFamily::Lipschitz,
        n,
        value,
        probability,
        params: *params,
        valid: reasons.is_empty(),
        reason: if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        },
        clamped: false,
    }
}

/// The latent-spacing scale `d_n = 1/n + sqrt(8 ln(n/delta) / (n+1))` of the
/// piecewise bound.
pub fn piecewise_dn(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    1.0 / nf + (8.0 * (nf / delta).ln() / (nf + 1.0)).sqrt()
}

/// The piecewise-Lipschitz bound
/// `2 sqrt(max(L^2 - K^2, 0) d_n^2 + K d_n) + (1/n) sqrt(4 n ln(2n/chi))`,
/// holding with probability `(1 - chi)(1 - delta)` for
/// `delta` in `(n e^{-n/5}, e^{-1})`.
pub fn piecewise_bound(n: usize, params: &BoundParams) -> BoundReport {
    let nf = n as f64;
    let mut reasons: Vec<String> = Vec::new();
    let delta_floor = nf * (-nf / 5.0).exp();
    let delta_ceil = (-1.0f64).exp();
    if !(params.delta > delta_floor && params.delta < delta_ceil) {
        reasons.push(format!(
            "delta = {} outside (n e^(-n/5), e^(-1)) = ({delta_floor:.6e}, {delta_ceil:.6e})",
            params.delta
        ));
    }
    if !(params.chi > 0.0) {
        reasons.push(format!("chi = {} must be positive", params.chi));
    }
    if params.k < 1 {
        reasons.push("K must be at least 1".into());
    }
    if !(params.l > 0.0) {
        reasons.push(format!("L = {} must be positive", params.l));
    }

    let kf = params.k as f64;
    let dn = piecewise_dn(n, params.delta);
    let radicand_term = params.l * params.l - kf * kf;
    let clamped = radicand_term < 0.0;
    let value =
        2.0 * (radicand_term.max(0.0) * dn * dn + kf * dn).sqrt() + sampling_term(n, params.chi);
    let probability = (1.0 - params.chi) * (1.0 - params.delta);
    BoundReport {
        family: BoundFamily::Piecewise,
        n,
        value,
        probability,
        params: *params,
        valid: reasons.is_empty(),
        reason: if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        },
        clamped,
    }
}

/// All three bounds evaluated at one `n`.
///
/// The same `L` feeds the Lipschitz and piecewise families; the standard
/// bound ignores the parameters entirely.
pub fn all_bounds(n: usize, params: &BoundParams) -> Result<Vec<BoundReport>> {
    Ok(vec![
        standard_bound(n)?,
        lipschitz_bound(n, params),
        piecewise_bound(n, params),
    ])
}

/// One row of a bound-comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub n: usize,
    pub standard: BoundReport,
    pub lipschitz: BoundReport,
    pub piecewise: BoundReport,
}

/// Bound values over an `n`-grid plus the first grid point where the
/// piecewise bound drops below the standard one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverTable {
    pub rows: Vec<CrossoverRow>,
    /// Smallest grid `n` with `piecewise.value < standard.value` (both
    /// valid); `None` when the grid never reaches the crossover.
    pub crossover_n: Option<usize>,
}

/// Evaluates the three bounds across `n_grid` and locates the crossover.
pub fn crossover_table(n_grid: &[usize], params: &BoundParams) -> Result<CrossoverTable> {
    if n_grid.is_empty() {
        return Err(Error::Parameter("n grid must not be empty".into()));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        rows.push(CrossoverRow {
            n,
            standard: standard_bound(n)?,
            lipschitz: lipschitz_bound(n, params),
            piecewise: piecewise_bound(n, params),
        });
    }
    let crossover_n = rows
        .iter()
        .find(|r| {
            r.piecewise.valid && r.standard.valid && r.piecewise.value < r.standard.value
        })
        .map(|r| r.n);
    Ok(CrossoverTable { rows, crossover_n })
}
