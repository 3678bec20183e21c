//! Sort-and-smooth estimation of graphon structure from one graph.
//!
//! The pipeline mirrors how a graphon is recovered empirically: rescale
//! the adjacency matrix into [0,1], order nodes by degree, average the
//! sorted matrix over histogram bins, fit a smooth surface to the bin
//! means, and read Lipschitz constants off the fitted surface with
//! finite differences. All Lipschitz constants here use the
//! `|u-u'| + |v-v'|` metric on the domain, under which the constant is
//! the larger of the two per-coordinate slopes.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::graphon::{Graphon, Partition};

/// Default bin-width exponent: bins of width `n^(-1/2)`.
pub const DEFAULT_BIN_EXPONENT: f64 = 0.5;

/// Largest polynomial degree accepted by the global fit.
pub const MAX_POLY_DEGREE: usize = 8;

/// Smallest surface grid on which Lipschitz estimation is meaningful.
pub const MIN_SURFACE_GRID: usize = 32;

/// Bin radius of the moving window used by the local-linear fit.
const LOCAL_WINDOW_RADIUS: usize = 2;

/// Smoothing model fitted to the histogram bin means.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// Weighted linear fit over a moving window of nearby bins.
    LocalLinear,
    /// Global least-squares fit in the basis `u^p v^q` with `p, q <= degree`.
    Polynomial { degree: usize },
}

/// Parameters of the smoothing step.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EstimationConfig {
    /// Bins have width `n^(-bin_width_exponent)`.
    pub bin_width_exponent: f64,
    pub fit: FitKind,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            bin_width_exponent: DEFAULT_BIN_EXPONENT,
            fit: FitKind::LocalLinear,
        }
    }
}

impl EstimationConfig {
    /// Checks the exponent range and the polynomial degree cap.
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width_exponent > 0.0 && self.bin_width_exponent < 1.0) {
            return Err(Error::Parameter(format!(
                "bin width exponent must lie in (0, 1), got {}",
                self.bin_width_exponent
            )));
        }
        if let FitKind::Polynomial { degree } = self.fit {
            if degree > MAX_POLY_DEGREE {
                return Err(Error::Parameter(format!(
                    "polynomial degree {degree} exceeds the cap {MAX_POLY_DEGREE}"
                )));
            }
        }
        Ok(())
    }
}

/// Scale factors recorded by [`l1_normalize`].
///
/// The original matrix is recovered as
/// `normalized * mean_abs * peak_ratio`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormalizationRecord {
    /// Mean absolute entry of the input.
    pub mean_abs: f64,
    /// Largest entry remaining after division by the mean.
    pub peak_ratio: f64,
}

/// Divides the matrix by its mean absolute entry, then rescales into
/// [0,1] by the resulting maximum, recording both factors.
pub fn l1_normalize(adjacency: &Array2<f64>) -> Result<(Array2<f64>, NormalizationRecord)> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n || n == 0 {
        return Err(Error::Parameter(format!(
            "adjacency must be square and non-empty, got {}x{}",
            n,
            adjacency.ncols()
        )));
    }
    let mean_abs = adjacency.iter().map(|a| a.abs()).sum::<f64>() / (n * n) as f64;
    if mean_abs == 0.0 {
        return Err(Error::Degenerate(
            "cannot normalize an all-zero adjacency matrix".into(),
        ));
    }
    let rescaled = adjacency.mapv(|a| a / mean_abs);
    let peak_ratio = rescaled.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let normalized = rescaled.mapv(|a| a / peak_ratio);
    Ok((
        normalized,
        NormalizationRecord {
            mean_abs,
            peak_ratio,
        },
    ))
}

/// Permutes rows and columns into nondecreasing row-sum order, breaking
/// ties by original index, and returns the permutation alongside.
///
/// `permutation[r]` is the original index of the node placed at row `r`.
pub fn degree_sort(adjacency: &Array2<f64>) -> (Array2<f64>, Vec<usize>) {
    let n = adjacency.nrows();
    let degrees = adjacency.sum_axis(Axis(1));
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.sort_by(|&a, &b| {
        degrees[a]
            .partial_cmp(&degrees[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sorted = Array2::from_shape_fn((n, n), |(i, j)| {
        adjacency[[permutation[i], permutation[j]]]
    });
    (sorted, permutation)
}

/// A symmetric surface on [0,1]^2, stored as values at the centers of a
/// one-dimensional bin grid and extended to the square by lookup.
#[derive(Clone, Debug)]
pub struct GridSurface {
    values: Array2<f64>,
    /// Bin edges on [0,1]; `edges.len() = bin_count + 1`.
    edges: Vec<f64>,
    /// Fraction of grid cells clamped into [0,1] by the range audit.
    pub clip_fraction: f64,
    /// Smoothing parameters, when the surface came from [`smooth`].
    pub smoothing: Option<EstimationConfig>,
}

impl GridSurface {
    /// Wraps raw values on a uniform grid, clamping them into [0,1] and
    /// recording the clipped fraction.
    pub fn from_values(values: Array2<f64>) -> Result<GridSurface> {
        let b = values.nrows();
        if values.ncols() != b || b < 2 {
            return Err(Error::Parameter(format!(
                "surface values must be square with at least 2 bins, got {}x{}",
                b,
                values.ncols()
            )));
        }
        let edges = (0..=b).map(|i| i as f64 / b as f64).collect();
        Ok(Self::audited(values, edges, None))
    }

    /// Evaluates a graphon exactly at the midpoints of an `m`-cell grid.
    pub fn from_graphon(graphon: &Graphon, m: usize) -> Result<GridSurface> {
        if m < 2 {
            return Err(Error::Parameter(format!(
                "surface grid needs at least 2 cells per axis, got {m}"
            )));
        }
        let values = graphon.grid_matrix(m);
        let edges = (0..=m).map(|i| i as f64 / m as f64).collect();
        Ok(Self::audited(values, edges, None))
    }

    fn audited(
        mut values: Array2<f64>,
        edges: Vec<f64>,
        smoothing: Option<EstimationConfig>,
    ) -> GridSurface {
        let total = values.len();
        let mut clipped = 0usize;
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                clipped += 1;
            } else if *v > 1.0 {
                *v = 1.0;
                clipped += 1;
            }
        }
        GridSurface {
            values,
            edges,
            clip_fraction: clipped as f64 / total as f64,
            smoothing,
        }
    }

    /// Number of bins per axis.
    pub fn bin_count(&self) -> usize {
        self.values.nrows()
    }

    /// Fitted values at the bin-center grid.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Center position of bin `i`.
    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Surface value at a point of the square, by bin lookup.
    pub fn value(&self, u: f64, v: f64) -> f64 {
        let i = self.bin_of(u);
        let j = self.bin_of(v);
        self.values[[i, j]]
    }

    fn bin_of(&self, u: f64) -> usize {
        let u = u.clamp(0.0, 1.0);
        let idx = self.edges.partition_point(|&e| e <= u);
        idx.saturating_sub(1).min(self.bin_count() - 1)
    }

    /// Returns a copy with every value multiplied by `factor`.
    ///
    /// The range audit is reapplied, so factors above 1 may clip.
    pub fn scaled(&self, factor: f64) -> GridSurface {
        Self::audited(
            self.values.mapv(|v| v * factor),
            self.edges.clone(),
            self.smoothing,
        )
    }
}

/// Histogram-bins the sorted adjacency matrix and fits the configured
/// smoothing model, yielding a surface on the bin-center grid.
///
/// Nodes are placed at positions `(i + 1/2) / n` and binned into
/// intervals of width `n^(-a)`; diagonal entries are excluded from the
/// bin means so the zeroed self-loops of sampled graphs do not bias the
/// fit. The caller is expected to pass an adjacency already permuted
/// into degree order (see [`degree_sort`]); binning itself is
/// order-agnostic.
pub fn smooth(adjacency: &Array2<f64>, config: &EstimationConfig) -> Result<GridSurface> {
    config.validate()?;
    let n = adjacency.nrows();
    if adjacency.ncols() != n || n == 0 {
        return Err(Error::Parameter(format!(
            "adjacency must be square and non-empty, got {}x{}",
            n,
            adjacency.ncols()
        )));
    }
    let inv_width = (n as f64).powf(config.bin_width_exponent);
    let bins = inv_width.ceil() as usize;
    if bins < 2 {
        return Err(Error::Degenerate(format!(
            "smoothing needs at least 2 bins, got {bins} (n = {n})"
        )));
    }
    // Bin edges at multiples of the width; the last bin absorbs the
    // remainder and may be narrower.
    let mut edges: Vec<f64> = (0..bins).map(|b| b as f64 / inv_width).collect();
    edges.push(1.0);

    let bin_of_node = |i: usize| -> usize {
        let u = (i as f64 + 0.5) / n as f64;
        ((u * inv_width).floor() as usize).min(bins - 1)
    };
    let mut sums = Array2::<f64>::zeros((bins, bins));
    let mut counts = Array2::<f64>::zeros((bins, bins));
    for i in 0..n {
        let bi = bin_of_node(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let bj = bin_of_node(j);
            sums[[bi, bj]] += adjacency[[i, j]];
            counts[[bi, bj]] += 1.0;
        }
    }
    let means = Array2::from_shape_fn((bins, bins), |(a, b)| {
        if counts[[a, b]] > 0.0 {
            sums[[a, b]] / counts[[a, b]]
        } else {
            0.0
        }
    });
    let centers: Vec<f64> = (0..bins).map(|b| 0.5 * (edges[b] + edges[b + 1])).collect();

    let mut fitted = match config.fit {
        FitKind::LocalLinear => local_linear_fit(&means, &counts, &centers),
        FitKind::Polynomial { degree } => polynomial_fit(&means, &counts, &centers, degree)?,
    };
    // The data are symmetric; symmetrizing sheds the last bits of
    // floating-point asymmetry from the solver.
    for a in 0..bins {
        for b in (a + 1)..bins {
            let avg = 0.5 * (fitted[[a, b]] + fitted[[b, a]]);
            fitted[[a, b]] = avg;
            fitted[[b, a]] = avg;
        }
    }
    Ok(GridSurface::audited(fitted, edges, Some(*config)))
}

/// Weighted linear fit over a window of nearby bins, evaluated at the
/// window's focal bin center.
fn local_linear_fit(means: &Array2<f64>, counts: &Array2<f64>, centers: &[f64]) -> Array2<f64> {
    let bins = centers.len();
    let r = LOCAL_WINDOW_RADIUS;
    Array2::from_shape_fn((bins, bins), |(a, b)| {
        let lo_a = a.saturating_sub(r);
        let hi_a = (a + r).min(bins - 1);
        let lo_b = b.saturating_sub(r);
        let hi_b = (b + r).min(bins - 1);
        // Normal equations for the basis (1, du, dv) with weights given
        // by the pair counts behind each bin mean.
        let mut m = [[0.0f64; 3]; 3];
        let mut rhs = [0.0f64; 3];
        for i in lo_a..=hi_a {
            for j in lo_b..=hi_b {
                let w = counts[[i, j]];
                if w == 0.0 {
                    continue;
                }
                let x = [1.0, centers[i] - centers[a], centers[j] - centers[b]];
                for p in 0..3 {
                    for q in 0..3 {
                        m[p][q] += w * x[p] * x[q];
                    }
                    rhs[p] += w * x[p] * means[[i, j]];
                }
            }
        }
        match solve3(m, rhs) {
            Some(beta) => beta[0],
            // A rank-deficient window (single populated cell) falls back
            // to its weighted mean.
            None => {
                if m[0][0] > 0.0 {
                    rhs[0] / m[0][0]
                } else {
                    0.0
                }
            }
        }
    })
}

/// Solves a symmetric 3x3 system by Gaussian elimination with partial
/// pivoting; `None` signals near-singularity.
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut beta = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut acc = rhs[col];
        for k in (col + 1)..3 {
            acc -= m[col][k] * beta[k];
        }
        beta[col] = acc / m[col][col];
    }
    Some(beta)
}

/// Global weighted least-squares fit in the basis `u^p v^q`.
fn polynomial_fit(
    means: &Array2<f64>,
    counts: &Array2<f64>,
    centers: &[f64],
    degree: usize,
) -> Result<Array2<f64>> {
    use faer::linalg::solvers::SolveLstsq;

    let bins = centers.len();
    if bins < degree + 1 {
        return Err(Error::Parameter(format!(
            "polynomial fit of degree {degree} needs at least {} bins, got {bins}",
            degree + 1
        )));
    }
    let terms = (degree + 1) * (degree + 1);
    // Rows are populated bin pairs, scaled by sqrt(weight) so the plain
    // least-squares solve realizes the weighted fit.
    let powers: Vec<Vec<f64>> = centers
        .iter()
        .map(|&c| (0..=degree).map(|p| c.powi(p as i32)).collect())
        .collect();
    let mut rows = Vec::new();
    for a in 0..bins {
        for b in 0..bins {
            let w = counts[[a, b]];
            if w > 0.0 {
                rows.push((a, b, w.sqrt()));
            }
        }
    }
    if rows.len() < terms {
        return Err(Error::Degenerate(format!(
            "polynomial fit of degree {degree} needs {terms} populated bin pairs, got {}",
            rows.len()
        )));
    }
    let design = faer::Mat::from_fn(rows.len(), terms, |r, t| {
        let (a, b, sw) = rows[r];
        let (p, q) = (t / (degree + 1), t % (degree + 1));
        sw * powers[a][p] * powers[b][q]
    });
    let rhs = faer::Mat::from_fn(rows.len(), 1, |r, _| {
        let (a, b, sw) = rows[r];
        sw * means[[a, b]]
    });
    let coefficients = design.qr().solve_lstsq(&rhs);
    Ok(Array2::from_shape_fn((bins, bins), |(a, b)| {
        let mut value = 0.0;
        for t in 0..terms {
            let (p, q) = (t / (degree + 1), t % (degree + 1));
            value += coefficients[(t, 0)] * powers[a][p] * powers[b][q];
        }
        value
    }))
}

/// Lipschitz constants read off a smoothed surface.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LipschitzEstimate {
    /// Largest per-coordinate central-difference quotient on the grid.
    pub global_l: f64,
    /// Per-piece constants, present when a partition was supplied;
    /// quotients whose stencil crosses a piece boundary are excluded.
    pub per_piece: Option<Array2<f64>>,
    pub partition_used: Partition,
    /// Smoothing parameters inherited from the surface; `None` marks an
    /// exactly evaluated surface.
    pub config: Option<EstimationConfig>,
    /// Clip fraction inherited from the surface's range audit.
    pub clip_fraction: f64,
    /// Grid resolution the quotients were taken on.
    pub bin_count: usize,
}

impl LipschitzEstimate {
    /// Largest per-piece constant, when pieces were estimated.
    pub fn per_piece_max(&self) -> Option<f64> {
        self.per_piece
            .as_ref()
            .map(|m| m.iter().fold(0.0f64, |acc, &x| acc.max(x)))
    }
}

/// Estimates Lipschitz constants of the surface by central differences
/// under the `|du| + |dv|` metric, where the constant is the larger of
/// the two coordinate slopes.
///
/// With a partition, per-piece constants are computed from quotients
/// whose three-point stencil stays inside one piece.
pub fn estimate_lipschitz(
    surface: &GridSurface,
    partition: Option<&Partition>,
) -> Result<LipschitzEstimate> {
    let bins = surface.bin_count();
    if bins < MIN_SURFACE_GRID {
        return Err(Error::Parameter(format!(
            "Lipschitz estimation needs a surface with at least {MIN_SURFACE_GRID} grid points per axis, got {bins}"
        )));
    }
    let values = surface.values();
    let centers: Vec<f64> = (0..bins).map(|i| surface.center(i)).collect();
    let piece_of: Option<Vec<usize>> =
        partition.map(|p| centers.iter().map(|&c| p.index_of(c)).collect());
    let k = partition.map(|p| p.len()).unwrap_or(1);
    let mut per_piece = partition.map(|_| Array2::<f64>::zeros((k, k)));
    let mut global = 0.0f64;

    for i in 1..bins - 1 {
        let span = centers[i + 1] - centers[i - 1];
        for j in 0..bins {
            // Quotient in the u coordinate; the v case follows by the
            // symmetry of the surface.
            let quotient = (values[[i + 1, j]] - values[[i - 1, j]]).abs() / span;
            global = global.max(quotient);
            if let (Some(pieces), Some(matrix)) = (&piece_of, per_piece.as_mut()) {
                if pieces[i - 1] == pieces[i] && pieces[i] == pieces[i + 1] {
                    let cell = [pieces[i], pieces[j]];
                    matrix[cell] = matrix[cell].max(quotient);
                    let mirror = [pieces[j], pieces[i]];
                    matrix[mirror] = matrix[mirror].max(quotient);
                }
            }
        }
    }
    Ok(LipschitzEstimate {
        global_l: global,
        per_piece,
        partition_used: partition
            .cloned()
            .unwrap_or_else(|| Partition::uniform(1).expect("one piece is always valid")),
        config: surface.smoothing,
        clip_fraction: surface.clip_fraction,
        bin_count: bins,
    })
}

/// Scans the surface's row means for change points and returns a
/// partition with up to `k_max - 1` detected breakpoints.
///
/// A boundary between adjacent bins is accepted when its jump exceeds
/// three times the median jump (a noise floor for smooth variation) and
/// it sits at least two bins away from every stronger accepted
/// boundary. A surface with no accepted jumps yields the single-piece
/// partition.
pub fn detect_partition(surface: &GridSurface, k_max: usize) -> Result<Partition> {
    if k_max < 1 {
        return Err(Error::Parameter(
            "partition detection needs k_max >= 1".into(),
        ));
    }
    let bins = surface.bin_count();
    let row_means: Array1<f64> = surface.values().mean_axis(Axis(1)).expect("bins >= 2");
    let scores: Vec<f64> = (0..bins - 1)
        .map(|b| (row_means[b + 1] - row_means[b]).abs())
        .collect();
    let mut sorted_scores = scores.clone();
    sorted_scores.sort_by(f64::total_cmp);
    let median = sorted_scores[sorted_scores.len() / 2];
    let threshold = (3.0 * median).max(1e-9);

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut accepted: Vec<usize> = Vec::new();
    for b in order {
        if accepted.len() + 1 >= k_max {
            break;
        }
        if scores[b] <= threshold {
            break;
        }
        if accepted.iter().any(|&other| b.abs_diff(other) < 2) {
            continue;
        }
        accepted.push(b);
    }
    accepted.sort_unstable();

    let mut breakpoints = vec![0.0];
    // The boundary after bin b sits at edge b + 1 of the surface grid.
    breakpoints.extend(accepted.iter().map(|&b| surface.edges[b + 1]));
    breakpoints.push(1.0);
    Partition::new(breakpoints)
}
