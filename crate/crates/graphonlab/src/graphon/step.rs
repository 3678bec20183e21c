//! Block-constant (step) graphons.

use crate::error::{Error, Result};
use crate::serde_util::array2_rows;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// A step graphon: constant on each cell of a product partition of `[0,1]^2`.
///
/// The partition is described by `breakpoints` `0 = b_0 < b_1 < ... < b_k = 1`;
/// block `i` is the half-open interval `[b_i, b_{i+1})`, except the last which
/// also contains `1`. `blocks[(i, j)]` is the kernel value on block `i x j`.
///
/// The graphon induced by a simple graph on `n` vertices is the special case
/// with uniform breakpoints `j / n` and the adjacency matrix as block values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepGraphonRaw")]
pub struct StepGraphon {
    #[serde(with = "array2_rows")]
    blocks: Array2<f64>,
    breakpoints: Vec<f64>,
}

#[derive(Deserialize)]
struct StepGraphonRaw {
    #[serde(with = "array2_rows")]
    blocks: Array2<f64>,
    breakpoints: Vec<f64>,
}

impl TryFrom<StepGraphonRaw> for StepGraphon {
    type Error = Error;

    fn try_from(raw: StepGraphonRaw) -> Result<StepGraphon> {
        StepGraphon::new(raw.blocks, raw.breakpoints)
    }
}

impl StepGraphon {
    /// Builds a step graphon, checking that the block matrix is square and
    /// symmetric, values lie in `[0,1]`, and the breakpoints are a strictly
    /// increasing sequence from 0 to 1 with one interval per block row.
    pub fn new(blocks: Array2<f64>, breakpoints: Vec<f64>) -> Result<StepGraphon> {
        let k = blocks.nrows();
        if k == 0 {
            return Err(Error::Validation("step graphon needs at least one block".into()));
        }
        if blocks.ncols() != k {
            return Err(Error::Validation(format!(
                "block matrix must be square, got {}x{}",
                k,
                blocks.ncols()
            )));
        }
        if breakpoints.len() != k + 1 {
            return Err(Error::Validation(format!(
                "expected {} breakpoints for {k} blocks, got {}",
                k + 1,
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints[k] != 1.0 {
            return Err(Error::Validation(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        for i in 0..k {
            for j in 0..k {
                let w = blocks[(i, j)];
                if !(0.0..=1.0).contains(&w) || !w.is_finite() {
                    return Err(Error::Validation(format!(
                        "block value {w} at ({i}, {j}) is outside [0, 1]"
                    )));
                }
                if blocks[(i, j)] != blocks[(j, i)] {
                    return Err(Error::Validation(format!(
                        "block matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(StepGraphon { blocks, breakpoints })
    }

    /// A step graphon over `k` equal-width blocks.
    pub fn uniform(blocks: Array2<f64>) -> Result<StepGraphon> {
        let k = blocks.nrows();
        if k == 0 {
            return Err(Error::Validation("step graphon needs at least one block".into()));
        }
        let breakpoints = (0..=k).map(|i| i as f64 / k as f64).collect();
        StepGraphon::new(blocks, breakpoints)
    }

    /// The graphon induced by an adjacency matrix: uniform blocks `j / n`
    /// whose values are the matrix entries.
    pub fn from_adjacency(adjacency: &Array2<f64>) -> Result<StepGraphon> {
        StepGraphon::uniform(adjacency.clone())
    }

    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        self.blocks[(self.block_index(u), self.block_index(v))]
    }

    /// Index of the half-open block containing `x`; `x = 1` maps to the last.
    pub fn block_index(&self, x: f64) -> usize {
        let k = self.block_count();
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(k - 1)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.nrows()
    }

    pub fn blocks(&self) -> &Array2<f64> {
        &self.blocks
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Widths `b_{i+1} - b_i` of the partition intervals.
    pub fn widths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// True when all intervals have width `1 / k` exactly up to float noise.
    pub fn is_uniform(&self) -> bool {
        let k = self.block_count() as f64;
        self.widths().iter().all(|&w| (w - 1.0 / k).abs() <= 1e-15)
    }

    /// Refines both step graphons onto their common partition, returning the
    /// merged breakpoints and the two refined block matrices, which then share
    /// the same block structure and can be compared cell by cell.
    pub fn common_refinement(a: &StepGraphon, b: &StepGraphon) -> (Vec<f64>, Array2<f64>, Array2<f64>) {
        let mut merged: Vec<f64> = a
            .breakpoints
            .iter()
            .chain(b.breakpoints.iter())
            .copied()
            .collect();
        merged.sort_by(|x, y| x.partial_cmp(y).unwrap());
        merged.dedup();
        let k = merged.len() - 1;
        let mut ra = Array2::zeros((k, k));
        let mut rb = Array2::zeros((k, k));
        // Sample each refined cell at its midpoint; cells never straddle an
        // original breakpoint, so the midpoint determines the block value.
        let mids: Vec<f64> = merged.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        for i in 0..k {
            for j in 0..k {
                ra[(i, j)] = a.value(mids[i], mids[j]);
                rb[(i, j)] = b.value(mids[i], mids[j]);
            }
        }
        (merged, ra, rb)
    }
}
