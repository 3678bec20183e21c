//! Piecewise-Lipschitz graphons over an interval partition.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// An ordered partition of `[0,1]` into half-open intervals
/// `[b_0, b_1), ..., [b_{k-1}, b_k]` with `b_0 = 0` and `b_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Partition> {
        if breakpoints.len() < 2 {
            return Err(Error::Validation(
                "a partition needs at least two breakpoints".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::Validation(
                "partition breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Validation("partition breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "partition breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Partition { breakpoints })
    }

    /// `k` intervals of equal width.
    pub fn uniform(k: usize) -> Result<Partition> {
        if k == 0 {
            return Err(Error::Parameter("partition needs at least one interval".into()));
        }
        Partition::new((0..=k).map(|i| i as f64 / k as f64).collect())
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the interval containing `x`; `x = 1` maps to the last one.
    pub fn index_of(&self, x: f64) -> usize {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.len() - 1)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn widths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = Error;

    fn try_from(breakpoints: Vec<f64>) -> Result<Partition> {
        Partition::new(breakpoints)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Vec<f64> {
        p.breakpoints
    }
}

/// The smooth kernel used on a single partition cell.
///
/// Both variants are symmetric in `(u, v)` because they depend on the
/// coordinates only through `u + v`, so mirroring the kernel grid across its
/// diagonal is enough to make the whole graphon symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PieceKernel {
    Constant {
        value: f64,
    },
    /// `offset + amplitude * sin(frequency * (u + v))`.
    SinSum {
        offset: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl PieceKernel {
    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        match *self {
            PieceKernel::Constant { value } => value,
            PieceKernel::SinSum {
                offset,
                amplitude,
                frequency,
            } => offset + amplitude * (frequency * (u + v)).sin(),
        }
    }

    /// Exact Lipschitz constant under the `|du| + |dv|` metric.
    ///
    /// For the sine kernel each partial derivative is
    /// `amplitude * frequency * cos(frequency * (u + v))`, so the constant is
    /// `|amplitude * frequency|`.
    pub fn lipschitz_constant(&self) -> f64 {
        match *self {
            PieceKernel::Constant { .. } => 0.0,
            PieceKernel::SinSum {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency).abs(),
        }
    }

    /// Conservative value range `[lo, hi]` over all of `[0,1]^2`.
    fn range(&self) -> (f64, f64) {
        match *self {
            PieceKernel::Constant { value } => (value, value),
            PieceKernel::SinSum {
                offset, amplitude, ..
            } => (offset - amplitude.abs(), offset + amplitude.abs()),
        }
    }

    fn check(&self) -> Result<()> {
        let params_ok = match *self {
            PieceKernel::Constant { value } => value.is_finite(),
            PieceKernel::SinSum {
                offset,
                amplitude,
                frequency,
            } => offset.is_finite() && amplitude.is_finite() && frequency.is_finite(),
        };
        if !params_ok {
            return Err(Error::Validation("piece kernel parameters must be finite".into()));
        }
        let (lo, hi) = self.range();
        if lo < 0.0 || hi > 1.0 {
            return Err(Error::Validation(format!(
                "piece kernel range [{lo}, {hi}] leaves [0, 1]"
            )));
        }
        Ok(())
    }
}

/// A graphon that is Lipschitz on every cell `I_i x I_j` of a product
/// partition, with jumps allowed across cell boundaries.
///
/// `kernels[i][j]` is the sub-kernel on `I_i x I_j`; the grid must be
/// symmetric (`kernels[i][j] == kernels[j][i]`). `declared_lipschitz` is the
/// constant the graphon advertises to the bound machinery; it is at least
/// the largest exact per-piece constant but may deliberately be looser, the
/// way an a-priori smoothness assumption would be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRaw")]
pub struct PiecewiseLipschitzGraphon {
    partition: Partition,
    kernels: Vec<Vec<PieceKernel>>,
    declared_lipschitz: f64,
}

#[derive(Deserialize)]
struct PiecewiseRaw {
    partition: Partition,
    kernels: Vec<Vec<PieceKernel>>,
    #[serde(default)]
    declared_lipschitz: Option<f64>,
}

impl TryFrom<PiecewiseRaw> for PiecewiseLipschitzGraphon {
    type Error = Error;

    fn try_from(raw: PiecewiseRaw) -> Result<PiecewiseLipschitzGraphon> {
        let g = PiecewiseLipschitzGraphon::new(raw.partition, raw.kernels)?;
        match raw.declared_lipschitz {
            Some(l) => g.with_declared_lipschitz(l),
            None => Ok(g),
        }
    }
}

impl PiecewiseLipschitzGraphon {
    /// Builds the graphon and declares the exact per-piece maximum as its
    /// Lipschitz constant.
    pub fn new(
        partition: Partition,
        kernels: Vec<Vec<PieceKernel>>,
    ) -> Result<PiecewiseLipschitzGraphon> {
        let k = partition.len();
        if kernels.len() != k || kernels.iter().any(|row| row.len() != k) {
            return Err(Error::Validation(format!(
                "kernel grid must be {k}x{k} to match the partition"
            )));
        }
        for i in 0..k {
            for j in 0..k {
                kernels[i][j].check()?;
                if kernels[i][j] != kernels[j][i] {
                    return Err(Error::Validation(format!(
                        "kernel grid is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let declared = kernels
            .iter()
            .flatten()
            .map(PieceKernel::lipschitz_constant)
            .fold(0.0, f64::max);
        Ok(PiecewiseLipschitzGraphon {
            partition,
            kernels,
            declared_lipschitz: declared,
        })
    }

    /// Replaces the advertised Lipschitz constant with a looser one.
    pub fn with_declared_lipschitz(mut self, l: f64) -> Result<PiecewiseLipschitzGraphon> {
        let exact = self.exact_lipschitz();
        if !l.is_finite() || l < exact {
            return Err(Error::Validation(format!(
                "declared Lipschitz constant {l} is below the exact per-piece maximum {exact}"
            )));
        }
        self.declared_lipschitz = l;
        Ok(self)
    }

    /// A random member of the family: `k` equal intervals and a sine kernel
    /// on every cell, each with slope exactly `l_max / 2`, so `l_max` is an
    /// honest declared constant with slack left for finite-sample estimates.
    pub fn random(k: usize, l_max: f64, seed: u64) -> Result<PiecewiseLipschitzGraphon> {
        if k == 0 {
            return Err(Error::Parameter("piece count must be positive".into()));
        }
        if !(l_max > 0.0) || !l_max.is_finite() {
            return Err(Error::Parameter(format!(
                "l_max must be positive and finite, got {l_max}"
            )));
        }
        let partition = Partition::uniform(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut kernels = vec![vec![PieceKernel::Constant { value: 0.0 }; k]; k];
        for i in 0..k {
            for j in i..k {
                // Frequencies start above 1.25 * l_max so the amplitude
                // stays below 0.4 and the offset always has room in [0,1].
                let frequency: f64 = rng.gen_range(1.25 * l_max..2.0 * l_max);
                // Slope |amplitude * frequency| comes out to exactly l_max / 2.
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let amplitude = sign * l_max / (2.0 * frequency);
                let offset: f64 = rng.gen_range(amplitude.abs()..1.0 - amplitude.abs());
                let kernel = PieceKernel::SinSum {
                    offset,
                    amplitude,
                    frequency,
                };
                kernels[i][j] = kernel.clone();
                kernels[j][i] = kernel;
            }
        }
        PiecewiseLipschitzGraphon::new(partition, kernels)?.with_declared_lipschitz(l_max)
    }

    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        let i = self.partition.index_of(u);
        let j = self.partition.index_of(v);
        self.kernels[i][j].value(u, v)
    }

    /// Number of intervals in the underlying partition.
    pub fn piece_count(&self) -> usize {
        self.partition.len()
    }

    /// The advertised Lipschitz constant.
    pub fn max_lipschitz(&self) -> f64 {
        self.declared_lipschitz
    }

    /// Largest exact per-piece Lipschitz constant.
    pub fn exact_lipschitz(&self) -> f64 {
        self.kernels
            .iter()
            .flatten()
            .map(PieceKernel::lipschitz_constant)
            .fold(0.0, f64::max)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn kernel(&self, i: usize, j: usize) -> &PieceKernel {
        &self.kernels[i][j]
    }
}
