//! Spectra of graphon operators and signed-index eigenvalue matching.
//!
//! The operator `T_W` of a kernel `W` acts on square-integrable functions by
//! `(T_W x)(v) = integral of W(u, v) x(u) du`. It is compact and
//! self-adjoint, so its spectrum is real, accumulates only at zero, and
//! splits into a positive branch (sorted descending) and a negative branch
//! (sorted ascending). Matching eigenvalues of two operators by signed index
//! within those branches is what makes Weyl gaps well defined.
//!
//! Step graphons get their exact spectrum from a weighted block matrix;
//! analytic kernels are discretized on a midpoint grid that is refined until
//! the watched eigenvalues settle.

mod dense;
mod lanczos;

pub use dense::symmetric_eigenvalues;
pub use lanczos::extremal_eigenvalues;

use crate::error::{Error, Result};
use crate::graphon::{Graphon, StepGraphon};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Largest matrix handed to the dense eigensolver; bigger problems use the
/// iterative extremal solver and only resolve the branch tips.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Eigenvalues at most this far from zero belong to the zero part.
pub const ZERO_TOL: f64 = 1e-12;

/// Resolution doubling stops once the watched eigenvalues move less than this.
pub const REFINE_TOL: f64 = 1e-6;

/// Hard cap on the midpoint-grid resolution (a 16384 x 16384 dense grid is
/// the largest that fits desk-scale memory).
pub const RESOLUTION_CAP: usize = 16384;

/// Smallest grid the refinement schedule may start from.
pub const MIN_RESOLUTION: usize = 64;

/// Default starting resolution for [`graphon_spectrum`].
pub const DEFAULT_START_RESOLUTION: usize = 512;

/// Branch depth used across the crate when none is specified.
pub const DEFAULT_TOP_K: usize = 3;

/// The signed-branch spectrum of one operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Positive eigenvalues, descending, at most `top_k` of them.
    pub positive: Vec<f64>,
    /// Negative eigenvalues, ascending (most negative first), at most `top_k`.
    pub negative: Vec<f64>,
    /// How many computed eigenvalues fell within [`ZERO_TOL`] of zero. For
    /// iterative solves only the branch tips are computed, so this counts
    /// zeros among those, not the full null space.
    pub zero_mass: usize,
    /// Identifier of the operator this spectrum belongs to.
    pub source: String,
    /// Grid resolution used, when the operator was discretized.
    pub resolution: Option<usize>,
    /// False when the refinement schedule hit its cap before settling.
    pub converged: bool,
}

impl Spectrum {
    fn from_eigenvalues(
        values: &[f64],
        top_k: usize,
        source: String,
        resolution: Option<usize>,
    ) -> Spectrum {
        let mut positive: Vec<f64> = values.iter().copied().filter(|&v| v > ZERO_TOL).collect();
        let mut negative: Vec<f64> = values.iter().copied().filter(|&v| v < -ZERO_TOL).collect();
        let zero_mass = values.len() - positive.len() - negative.len();
        positive.sort_by(|a, b| b.partial_cmp(a).unwrap());
        positive.truncate(top_k);
        negative.sort_by(|a, b| a.partial_cmp(b).unwrap());
        negative.truncate(top_k);
        Spectrum {
            positive,
            negative,
            zero_mass,
            source,
            resolution,
            converged: true,
        }
    }

    /// The eigenvalue at a signed index: `i >= 1` counts down the positive
    /// branch, `i <= -1` along the negative branch. Indices beyond the
    /// computed depth return 0, the accumulation point of compact-operator
    /// spectra.
    pub fn signed(&self, index: i64) -> f64 {
        if index == 0 {
            return 0.0;
        }
        let branch = if index > 0 { &self.positive } else { &self.negative };
        branch
            .get(index.unsigned_abs() as usize - 1)
            .copied()
            .unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude over both branches.
    pub fn spectral_radius(&self) -> f64 {
        let p = self.positive.first().copied().unwrap_or(0.0);
        let n = self.negative.first().copied().unwrap_or(0.0);
        p.abs().max(n.abs())
    }
}

/// One matched eigenvalue pair and its Weyl gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylGapRecord {
    /// Signed branch index: `1..=top_k` or `-1..=-top_k`.
    pub index: i64,
    pub lambda_graphon: f64,
    pub lambda_sample: f64,
    /// `|lambda_graphon - lambda_sample|`.
    pub gap: f64,
}

/// Exact spectrum of a step graphon's operator.
///
/// With block values `M` and block widths `w`, `T_W` has the eigenvalues of
/// `S M S` where `S = diag(sqrt(w))` (for uniform widths this is `eig(M)/k`).
pub fn step_spectrum(g: &StepGraphon, top_k: usize) -> Result<Spectrum> {
    let k = g.block_count();
    let s: Vec<f64> = g.widths().iter().map(|w| w.sqrt()).collect();
    let mut b = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            b[(i, j)] = s[i] * g.blocks()[(i, j)] * s[j];
        }
    }
    let values = if k <= DENSE_EIGEN_LIMIT {
        symmetric_eigenvalues(&b)?
    } else {
        extremal_eigenvalues(&b, top_k)?
    };
    Ok(Spectrum::from_eigenvalues(
        &values,
        top_k,
        format!("step:{k}"),
        None,
    ))
}

/// Spectrum of the graphon induced by an adjacency matrix, which for an
/// `n`-node graph is `eig(A) / n`.
pub fn sample_spectrum(adjacency: &Array2<f64>, top_k: usize) -> Result<Spectrum> {
    let induced = StepGraphon::from_adjacency(adjacency)?;
    let mut spec = step_spectrum(&induced, top_k)?;
    spec.source = format!("sample:n={}", adjacency.nrows());
    Ok(spec)
}

/// Spectrum at one fixed grid resolution: eigenvalues of the midpoint-grid
/// matrix divided by `m`. Step graphons skip the grid and use their exact
/// block form.
pub fn graphon_spectrum_at(g: &Graphon, top_k: usize, m: usize) -> Result<Spectrum> {
    if let Graphon::Step(step) = g {
        return step_spectrum(step, top_k);
    }
    if m < MIN_RESOLUTION {
        return Err(Error::Parameter(format!(
            "grid resolution must be at least {MIN_RESOLUTION}, got {m}"
        )));
    }
    if m > RESOLUTION_CAP {
        return Err(Error::Parameter(format!(
            "grid resolution {m} exceeds the cap {RESOLUTION_CAP}"
        )));
    }
    let grid = g.grid_matrix(m);
    let mut values = if m <= DENSE_EIGEN_LIMIT {
        symmetric_eigenvalues(&grid)?
    } else {
        extremal_eigenvalues(&grid, top_k)?
    };
    let scale = 1.0 / m as f64;
    for v in &mut values {
        *v *= scale;
    }
    Ok(Spectrum::from_eigenvalues(
        &values,
        top_k,
        g.describe(),
        Some(m),
    ))
}

/// Spectrum with an automatic resolution schedule: evaluate at `m_start`,
/// double until the top `top_k` eigenvalues of each branch move less than
/// [`REFINE_TOL`], and report the final resolution. Hitting
/// [`RESOLUTION_CAP`] before settling clears the `converged` flag instead of
/// failing.
pub fn graphon_spectrum(g: &Graphon, top_k: usize, m_start: usize) -> Result<Spectrum> {
    if let Graphon::Step(step) = g {
        return step_spectrum(step, top_k);
    }
    let mut m = m_start.max(MIN_RESOLUTION);
    let mut current = graphon_spectrum_at(g, top_k, m)?;
    loop {
        if 2 * m > RESOLUTION_CAP {
            current.converged = false;
            return Ok(current);
        }
        m *= 2;
        let finer = graphon_spectrum_at(g, top_k, m)?;
        let movement = (1..=top_k as i64)
            .flat_map(|i| [i, -i])
            .map(|i| (current.signed(i) - finer.signed(i)).abs())
            .fold(0.0, f64::max);
        if movement < REFINE_TOL {
            return Ok(finer);
        }
        current = finer;
    }
}

/// Grid resolution for comparing an analytic graphon against an `n`-node
/// sample: `max(2048, 8n)`, capped, so discretization error stays an order
/// below sampling error.
pub fn comparison_resolution(n: usize) -> usize {
    (8 * n).max(2048).min(RESOLUTION_CAP)
}

/// Matches two spectra at signed indices `1..=top_k` and `-1..=-top_k`,
/// treating missing entries as 0.
pub fn weyl_gaps(spec_w: &Spectrum, spec_g: &Spectrum, top_k: usize) -> Vec<WeylGapRecord> {
    let mut records = Vec::with_capacity(2 * top_k);
    for index in (1..=top_k as i64).chain((1..=top_k as i64).map(|i| -i)) {
        let lambda_graphon = spec_w.signed(index);
        let lambda_sample = spec_g.signed(index);
        records.push(WeylGapRecord {
            index,
            lambda_graphon,
            lambda_sample,
            gap: (lambda_graphon - lambda_sample).abs(),
        });
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn complete_graph(n: usize) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { 1.0 })
    }

    #[test]
    fn complete_graph_spectrum_is_closed_form() {
        // eig(K_n adjacency) = {n-1, -1 x(n-1)}; induced graphon divides by n.
        let spec = sample_spectrum(&complete_graph(4), 3).unwrap();
        assert_eq!(spec.positive.len(), 1);
        assert!((spec.positive[0] - 0.75).abs() < 1e-12);
        assert_eq!(spec.negative.len(), 3);
        for v in &spec.negative {
            assert!((v + 0.25).abs() < 1e-12);
        }
        assert_eq!(spec.zero_mass, 0);
    }

    #[test]
    fn uniform_two_block_spectrum_divides_by_k() {
        let g = StepGraphon::uniform(array![[0.8, 0.2], [0.2, 0.8]]).unwrap();
        let spec = step_spectrum(&g, 3).unwrap();
        assert_eq!(spec.positive.len(), 2);
        assert!((spec.positive[0] - 0.5).abs() < 1e-14);
        assert!((spec.positive[1] - 0.3).abs() < 1e-14);
        assert!(spec.negative.is_empty());
    }

    #[test]
    fn constant_block_is_rank_one() {
        let g = StepGraphon::uniform(array![[0.7]]).unwrap();
        let spec = step_spectrum(&g, 3).unwrap();
        assert_eq!(spec.positive, vec![0.7]);
    }

    #[test]
    fn non_uniform_blocks_use_width_weighting() {
        // Closed form for the 2x2 weighted matrix S M S.
        let m = array![[0.8, 0.2], [0.2, 0.8]];
        let widths = [0.25f64, 0.75f64];
        let g = StepGraphon::new(m.clone(), vec![0.0, 0.25, 1.0]).unwrap();
        let spec = step_spectrum(&g, 2).unwrap();

        let (a, c) = (m[(0, 0)] * widths[0], m[(1, 1)] * widths[1]);
        let b = m[(0, 1)] * (widths[0] * widths[1]).sqrt();
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0f64).powi(2) + b * b).sqrt();
        assert!((spec.positive[0] - (mid + rad)).abs() < 1e-14);
        assert!((spec.positive[1] - (mid - rad)).abs() < 1e-14);
    }

    #[test]
    fn step_vs_quadrature_on_aligned_grid() {
        // For a step kernel whose breakpoints align with the grid, the
        // quadrature matrix has exactly the block spectrum.
        let g = StepGraphon::new(
            array![[0.9, 0.1], [0.1, 0.4]],
            vec![0.0, 0.25, 1.0],
        )
        .unwrap();
        let exact = step_spectrum(&g, 2).unwrap();
        let grid = Graphon::Step(g).grid_matrix(64);
        let mut vals = symmetric_eigenvalues(&grid).unwrap();
        for v in &mut vals {
            *v /= 64.0;
        }
        let quad = Spectrum::from_eigenvalues(&vals, 2, "quad".into(), Some(64));
        for i in [1i64, 2] {
            assert!((exact.signed(i) - quad.signed(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_blocks_scales_eigenvalues() {
        let blocks = array![[0.8, 0.2, 0.4], [0.2, 0.6, 0.1], [0.4, 0.1, 0.9]];
        let g1 = StepGraphon::uniform(blocks.clone()).unwrap();
        let g2 = StepGraphon::uniform(blocks.mapv(|x| 0.5 * x)).unwrap();
        let s1 = step_spectrum(&g1, 3).unwrap();
        let s2 = step_spectrum(&g2, 3).unwrap();
        for i in (1..=3i64).chain([-1, -2, -3]) {
            assert!((0.5 * s1.signed(i) - s2.signed(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn permuting_uniform_blocks_preserves_spectrum() {
        let blocks = array![[0.8, 0.2, 0.4], [0.2, 0.6, 0.1], [0.4, 0.1, 0.9]];
        // Permutation (2, 0, 1) applied to rows and columns.
        let perm = [2usize, 0, 1];
        let permuted = Array2::from_shape_fn((3, 3), |(i, j)| blocks[(perm[i], perm[j])]);
        let s1 = step_spectrum(&StepGraphon::uniform(blocks).unwrap(), 3).unwrap();
        let s2 = step_spectrum(&StepGraphon::uniform(permuted).unwrap(), 3).unwrap();
        for i in (1..=3i64).chain([-1, -2, -3]) {
            assert!((s1.signed(i) - s2.signed(i)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_diagonal_blocks_have_zero_trace() {
        let spec = sample_spectrum(&complete_graph(7), 7).unwrap();
        let total: f64 = spec.positive.iter().sum::<f64>() + spec.negative.iter().sum::<f64>();
        assert!(total.abs() < 1e-10);
    }

    #[test]
    fn product_graphon_spectrum_is_rank_one() {
        let spec = graphon_spectrum(&Graphon::product(), 3, 64).unwrap();
        assert!(spec.converged);
        assert_eq!(spec.resolution, Some(512));
        assert_eq!(spec.positive.len(), 1);
        assert!((spec.positive[0] - 1.0 / 3.0).abs() < 1e-4);
        assert!(spec.negative.is_empty());
    }

    #[test]
    fn spectral_radius_is_bounded_by_sup() {
        let g: Graphon = crate::graphon::PiecewiseLipschitzGraphon::random(4, 4.0, 7)
            .unwrap()
            .into();
        let spec = graphon_spectrum_at(&g, 3, 256).unwrap();
        assert!(spec.spectral_radius() <= 1.0);
    }

    #[test]
    fn refinement_crosses_into_the_iterative_solver() {
        // Starting just below the dense limit forces the next doubling onto
        // the Lanczos path; the constant kernel settles there immediately.
        let spec = graphon_spectrum(&Graphon::constant(0.5), 2, 4096).unwrap();
        assert!(spec.converged);
        assert_eq!(spec.resolution, Some(8192));
        assert!((spec.positive[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn weyl_gap_matching_pads_with_zero() {
        let a = Spectrum {
            positive: vec![1.0 / 3.0],
            negative: vec![],
            zero_mass: 0,
            source: "a".into(),
            resolution: None,
            converged: true,
        };
        let b = Spectrum {
            positive: vec![0.31, 0.02],
            negative: vec![-0.05],
            zero_mass: 0,
            source: "b".into(),
            resolution: None,
            converged: true,
        };
        let gaps = weyl_gaps(&a, &b, 2);
        assert_eq!(gaps.len(), 4);
        assert!((gaps[0].gap - (1.0 / 3.0 - 0.31)).abs() < 1e-12);
        assert!((gaps[1].gap - 0.02).abs() < 1e-12, "missing graphon entry matches 0");
        assert!((gaps[2].gap - 0.05).abs() < 1e-12);
        assert_eq!(gaps[3].gap, 0.0);

        let zero_gaps = weyl_gaps(&a, &a, 2);
        assert!(zero_gaps.iter().all(|r| r.gap == 0.0));
    }

    #[test]
    fn complete_graph_gap_against_constant_one() {
        // K_n sampled from the constant-1 graphon: gap at i = 1 is 1/n.
        let n = 50;
        let g_spec = graphon_spectrum(&Graphon::constant(1.0), 1, 64).unwrap();
        let s_spec = sample_spectrum(&complete_graph(n), 1).unwrap();
        let gaps = weyl_gaps(&g_spec, &s_spec, 1);
        assert!((gaps[0].gap - 1.0 / n as f64).abs() < 1e-10);
    }
}
