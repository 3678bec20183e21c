//! Latent positions and graph sampling from a graphon.
//!
//! A sample is produced in two stages: draw latent positions `u_1..u_n`
//! (see [`sample_latents`]), then fill an adjacency matrix either with the
//! kernel values themselves ([`sample_weighted`]) or with Bernoulli draws at
//! those probabilities ([`sample_stochastic`]). Splitting the stages lets a
//! weighted and a stochastic sample share the exact same latents, which is
//! what makes their spectra comparable trial by trial.
//!
//! Graphs are simple: the diagonal is always zero and the matrix is
//! symmetric by construction, with one random draw per unordered pair.

use crate::error::{Error, Result};
use crate::graphon::{Graphon, StepGraphon};
use crate::serde_util::array2_rows;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How latent positions are assigned to nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatentMode {
    /// Independent draws from `Uniform[0,1]`, in draw order.
    IidUniform,
    /// The same draws, sorted nondecreasing.
    SortedIidUniform,
    /// The deterministic midpoint grid `u_i = (i - 1/2) / n`.
    FixedGrid,
}

/// Latent node positions together with how they were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentAssignment {
    pub positions: Vec<f64>,
    pub mode: LatentMode,
    pub seed: u64,
}

impl LatentAssignment {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Whether adjacency entries are kernel values or Bernoulli draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Weighted,
    Stochastic,
}

/// A graph sampled from a graphon, with full provenance for reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGraph {
    #[serde(with = "array2_rows")]
    pub adjacency: Array2<f64>,
    pub latents: LatentAssignment,
    pub kind: SampleKind,
    /// Identifier of the source graphon, from [`Graphon::describe`].
    pub source: String,
    /// The edge seed for stochastic samples, the latent seed otherwise.
    pub seed: u64,
}

impl SampledGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.nrows()
    }

    /// The step graphon induced by this graph's adjacency matrix.
    pub fn induced_graphon(&self) -> Result<StepGraphon> {
        induced_graphon(&self.adjacency)
    }
}

/// Derives an independent child seed from a master seed and a coordinate
/// triple, so a sweep can re-run any single `(n, trial)` cell in isolation
/// and so edits to the grid never shift the seeds of other cells.
///
/// The mixer is the splitmix64 finalizer applied after each absorbed word.
pub fn derive_seed(master: u64, n: u64, trial: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    let mut h = mix(master.wrapping_add(0x9e3779b97f4a7c15));
    h = mix(h ^ n.wrapping_mul(0xa0761d6478bd642f));
    h = mix(h ^ trial.wrapping_mul(0xe7037ed1a0b428db));
    mix(h ^ stream.wrapping_mul(0x8ebc6af09c88c6e3))
}

/// Draws `n` latent positions. `FixedGrid` ignores the seed but records it.
pub fn sample_latents(n: usize, mode: LatentMode, seed: u64) -> Result<LatentAssignment> {
    if n == 0 {
        return Err(Error::Parameter("sample size must be positive".into()));
    }
    let positions = match mode {
        LatentMode::FixedGrid => (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect(),
        LatentMode::IidUniform | LatentMode::SortedIidUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            if mode == LatentMode::SortedIidUniform {
                u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
            u
        }
    };
    Ok(LatentAssignment {
        positions,
        mode,
        seed,
    })
}

/// The weighted sample: `A_ij = W(u_i, u_j)` for `i != j`, zero diagonal.
pub fn sample_weighted(graphon: &Graphon, latents: &LatentAssignment) -> Result<SampledGraph> {
    let n = latents.len();
    if n == 0 {
        return Err(Error::Parameter("latent assignment is empty".into()));
    }
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let w = graphon.evaluate(latents.positions[i], latents.positions[j])?;
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
    }
    Ok(SampledGraph {
        adjacency: a,
        latents: latents.clone(),
        kind: SampleKind::Weighted,
        source: graphon.describe(),
        seed: latents.seed,
    })
}

/// The stochastic sample: `A_ij ~ Bernoulli(W(u_i, u_j))`, one draw per
/// unordered pair in row-major order, mirrored below the diagonal.
pub fn sample_stochastic(
    graphon: &Graphon,
    latents: &LatentAssignment,
    seed: u64,
) -> Result<SampledGraph> {
    let n = latents.len();
    if n == 0 {
        return Err(Error::Parameter("latent assignment is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let p = graphon.evaluate(latents.positions[i], latents.positions[j])?;
            let edge = if rng.gen::<f64>() < p { 1.0 } else { 0.0 };
            a[(i, j)] = edge;
            a[(j, i)] = edge;
        }
    }
    Ok(SampledGraph {
        adjacency: a,
        latents: latents.clone(),
        kind: SampleKind::Stochastic,
        source: graphon.describe(),
        seed,
    })
}

/// The step graphon induced by an adjacency matrix: uniform blocks `j / n`
/// carrying the matrix entries, so evaluating it on block midpoints gives
/// the matrix back.
pub fn induced_graphon(adjacency: &Array2<f64>) -> Result<StepGraphon> {
    StepGraphon::from_adjacency(adjacency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::AnalyticGraphon;

    #[test]
    fn fixed_grid_matches_midpoints() {
        let l = sample_latents(4, LatentMode::FixedGrid, 99).unwrap();
        assert_eq!(l.positions, vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn sorted_mode_sorts_the_same_draws() {
        let iid = sample_latents(100, LatentMode::IidUniform, 5).unwrap();
        let sorted = sample_latents(100, LatentMode::SortedIidUniform, 5).unwrap();
        let mut expect = iid.positions.clone();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(sorted.positions, expect);
        assert!(sorted.positions.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn latents_are_deterministic_in_seed() {
        let a = sample_latents(50, LatentMode::IidUniform, 7).unwrap();
        let b = sample_latents(50, LatentMode::IidUniform, 7).unwrap();
        let c = sample_latents(50, LatentMode::IidUniform, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.positions, c.positions);
    }

    #[test]
    fn zero_nodes_is_a_parameter_error() {
        assert!(sample_latents(0, LatentMode::FixedGrid, 0).is_err());
    }

    #[test]
    fn weighted_sample_evaluates_the_kernel() {
        let g = Graphon::product();
        let l = sample_latents(4, LatentMode::FixedGrid, 0).unwrap();
        let s = sample_weighted(&g, &l).unwrap();
        assert_eq!(s.adjacency[(0, 1)], 0.125 * 0.375);
        assert_eq!(s.adjacency[(1, 0)], 0.125 * 0.375);
        for i in 0..4 {
            assert_eq!(s.adjacency[(i, i)], 0.0);
        }

        let c = Graphon::constant(0.5);
        let s = sample_weighted(&c, &sample_latents(3, LatentMode::IidUniform, 1).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.adjacency[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn stochastic_extremes_give_complete_and_empty_graphs() {
        let l = sample_latents(20, LatentMode::IidUniform, 3).unwrap();
        let full = sample_stochastic(&Graphon::constant(1.0), &l, 4).unwrap();
        let empty = sample_stochastic(&Graphon::constant(0.0), &l, 4).unwrap();
        let off_diag = 20.0 * 19.0;
        assert_eq!(full.adjacency.sum(), off_diag);
        assert_eq!(empty.adjacency.sum(), 0.0);
    }

    #[test]
    fn stochastic_density_concentrates() {
        // Binomial(n(n-1)/2, p) with n = 500: 3 sigma on the density scale.
        let n = 500;
        let p = 0.3;
        let l = sample_latents(n, LatentMode::IidUniform, 11).unwrap();
        let s = sample_stochastic(&Graphon::constant(p), &l, 12).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let density = s.adjacency.sum() / 2.0 / pairs;
        let sigma = (p * (1.0 - p) / pairs).sqrt();
        assert!(
            (density - p).abs() <= 3.0 * sigma,
            "density {density} strays from {p} by more than 3 sigma ({sigma})"
        );
    }

    #[test]
    fn stochastic_sampling_is_bit_reproducible() {
        let g = Graphon::Analytic(AnalyticGraphon::Min);
        let l = sample_latents(40, LatentMode::SortedIidUniform, 21).unwrap();
        let a = sample_stochastic(&g, &l, 22).unwrap();
        let b = sample_stochastic(&g, &l, 22).unwrap();
        assert_eq!(a, b);
        let c = sample_stochastic(&g, &l, 23).unwrap();
        assert_ne!(a.adjacency, c.adjacency);
    }

    #[test]
    fn sorted_weighted_rows_respect_the_lipschitz_constant() {
        // For W(u,v) = uv the constant is 1: adjacent sorted rows differ by
        // at most the latent spacing, column by column.
        let g = Graphon::product();
        let l = sample_latents(60, LatentMode::SortedIidUniform, 13).unwrap();
        let s = sample_weighted(&g, &l).unwrap();
        for i in 0..59 {
            let du = l.positions[i + 1] - l.positions[i];
            for j in 0..60 {
                if j == i || j == i + 1 {
                    continue;
                }
                let da = (s.adjacency[(i + 1, j)] - s.adjacency[(i, j)]).abs();
                assert!(da <= du + 1e-15);
            }
        }
    }

    #[test]
    fn induced_graphon_round_trips_block_values() {
        let blocks = ndarray::array![[0.6, 0.3], [0.3, 0.9]];
        let step: Graphon = StepGraphon::uniform(blocks).unwrap().into();
        // Sample on the step graphon's own grid midpoints: n = 2.
        let l = sample_latents(2, LatentMode::FixedGrid, 0).unwrap();
        let s = sample_weighted(&step, &l).unwrap();
        let induced = s.induced_graphon().unwrap();
        // Off-diagonal blocks carry the original values; diagonal is zeroed.
        assert_eq!(induced.blocks()[(0, 1)], 0.3);
        assert_eq!(induced.blocks()[(1, 0)], 0.3);
        assert_eq!(induced.blocks()[(0, 0)], 0.0);
        assert_eq!(induced.breakpoints(), [0.0, 0.5, 1.0]);
    }

    #[test]
    fn derived_seeds_differ_across_coordinates() {
        let base = derive_seed(42, 100, 0, 0);
        assert_ne!(base, derive_seed(42, 100, 0, 1));
        assert_ne!(base, derive_seed(42, 100, 1, 0));
        assert_ne!(base, derive_seed(42, 200, 0, 0));
        assert_ne!(base, derive_seed(43, 100, 0, 0));
        assert_eq!(base, derive_seed(42, 100, 0, 0));
    }
}
