//! Homomorphism densities of small motifs in graphs and graphons.
//!
//! The density `t(F, G)` of a motif `F` in a weighted graph `G` on `n`
//! nodes is the average over all vertex maps (injective or not) of the
//! product of edge weights along the motif edges, normalised by
//! `n^|V(F)|`. For a graphon the sum becomes an integral over the unit
//! cube. Densities are cut-norm continuous, so sampled graphs inherit
//! the densities of their source graphon as `n` grows.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graphon::{AnalyticGraphon, Graphon};

/// Grid resolution used when a graphon density has no closed form.
pub const DEFAULT_DENSITY_RESOLUTION: usize = 256;

/// Smallest quadrature grid accepted for graphon densities.
pub const MIN_DENSITY_RESOLUTION: usize = 64;

/// Connected motifs on at most four nodes tracked by the laboratory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Motif {
    /// Single edge on two nodes.
    Edge,
    /// Path with two edges on three nodes.
    Path2,
    /// Triangle on three nodes.
    Triangle,
    /// Four-cycle on four nodes.
    Cycle4,
}

impl Motif {
    /// Every supported motif, in increasing size order.
    pub fn all() -> [Motif; 4] {
        [Motif::Edge, Motif::Path2, Motif::Triangle, Motif::Cycle4]
    }

    /// Stable lowercase name used in CSV output and CLI arguments.
    pub fn name(self) -> &'static str {
        match self {
            Motif::Edge => "edge",
            Motif::Path2 => "path2",
            Motif::Triangle => "triangle",
            Motif::Cycle4 => "cycle4",
        }
    }

    /// Parses the name produced by [`Motif::name`].
    pub fn parse(name: &str) -> Result<Motif> {
        match name {
            "edge" => Ok(Motif::Edge),
            "path2" => Ok(Motif::Path2),
            "triangle" => Ok(Motif::Triangle),
            "cycle4" => Ok(Motif::Cycle4),
            other => Err(Error::Parameter(format!(
                "unknown motif {other:?}; expected edge, path2, triangle, or cycle4"
            ))),
        }
    }

    /// Number of nodes in the motif.
    pub fn node_count(self) -> usize {
        match self {
            Motif::Edge => 2,
            Motif::Path2 => 3,
            Motif::Triangle => 3,
            Motif::Cycle4 => 4,
        }
    }

    /// Edges of the motif over nodes `0..node_count()`.
    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            Motif::Edge => &[(0, 1)],
            Motif::Path2 => &[(0, 1), (1, 2)],
            Motif::Triangle => &[(0, 1), (1, 2), (0, 2)],
            Motif::Cycle4 => &[(0, 1), (1, 2), (2, 3), (0, 3)],
        }
    }

    /// Degree sequence of the motif, indexed by node.
    fn degrees(self) -> Vec<usize> {
        let mut degrees = vec![0usize; self.node_count()];
        for &(a, b) in self.edges() {
            degrees[a] += 1;
            degrees[b] += 1;
        }
        degrees
    }
}

/// Homomorphism density of `motif` in the weighted graph `adjacency`.
///
/// The sum over vertex maps collapses to a matrix expression for every
/// supported motif, so the cost is one or two matrix products instead
/// of `n^4` map enumerations.
pub fn hom_density_graph(motif: Motif, adjacency: &Array2<f64>) -> Result<f64> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n || n == 0 {
        return Err(Error::Parameter(format!(
            "adjacency must be square and non-empty, got {}x{}",
            n,
            adjacency.ncols()
        )));
    }
    let nf = n as f64;
    let value = match motif {
        Motif::Edge => adjacency.sum() / nf.powi(2),
        Motif::Path2 => {
            // Summing over the middle node turns the map sum into the
            // sum of squared degrees.
            let degrees = adjacency.sum_axis(ndarray::Axis(1));
            degrees.iter().map(|d| d * d).sum::<f64>() / nf.powi(3)
        }
        Motif::Triangle => {
            // tr(A^3) written as an entrywise product with A^2; the
            // transpose is free because adjacency is symmetric.
            let squared = adjacency.dot(adjacency);
            (&squared * adjacency).sum() / nf.powi(3)
        }
        Motif::Cycle4 => {
            let squared = adjacency.dot(adjacency);
            squared.iter().map(|x| x * x).sum::<f64>() / nf.powi(4)
        }
    };
    Ok(value)
}

/// Homomorphism density of `motif` in the graphon `graphon`.
///
/// Constant and product graphons use their closed forms; everything
/// else is integrated by midpoint quadrature on an `m` by `m` grid,
/// with `m` at least [`MIN_DENSITY_RESOLUTION`].
pub fn hom_density_graphon(motif: Motif, graphon: &Graphon, m: usize) -> Result<f64> {
    if let Graphon::Analytic(analytic) = graphon {
        match analytic {
            AnalyticGraphon::Constant { p } => {
                return Ok(p.powi(motif.edges().len() as i32));
            }
            AnalyticGraphon::Product => {
                // Each node integrates independently: a node of degree d
                // contributes the moment integral of u^d, which is 1/(d+1).
                let value = motif
                    .degrees()
                    .iter()
                    .map(|&d| 1.0 / (d as f64 + 1.0))
                    .product();
                return Ok(value);
            }
            _ => {}
        }
    }
    if m < MIN_DENSITY_RESOLUTION {
        return Err(Error::Parameter(format!(
            "density quadrature needs at least {MIN_DENSITY_RESOLUTION} grid points per axis, got {m}"
        )));
    }
    // Midpoint quadrature reduces the integral to the graph formula on
    // the grid matrix with n replaced by the grid resolution.
    let grid = graphon.grid_matrix(m);
    hom_density_graph(motif, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::StepGraphon;
    use crate::sampling::{sample_latents, sample_stochastic, LatentMode};
    use ndarray::arr2;

    /// Literal definition of the density: average over all vertex maps.
    fn brute_force_density(motif: Motif, adjacency: &Array2<f64>) -> f64 {
        let n = adjacency.nrows();
        let v = motif.node_count();
        let mut total = 0.0;
        let mut map = vec![0usize; v];
        let count = n.pow(v as u32);
        for code in 0..count {
            let mut rest = code;
            for slot in map.iter_mut() {
                *slot = rest % n;
                rest /= n;
            }
            let mut weight = 1.0;
            for &(a, b) in motif.edges() {
                weight *= adjacency[[map[a], map[b]]];
            }
            total += weight;
        }
        total / count as f64
    }

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let w = rng.gen::<f64>();
                a[[i, j]] = w;
                a[[j, i]] = w;
            }
        }
        a
    }

    #[test]
    fn matrix_formulas_match_the_map_sum() {
        for seed in 0..4 {
            let a = random_symmetric(5 + seed as usize, seed);
            for motif in Motif::all() {
                let fast = hom_density_graph(motif, &a).unwrap();
                let slow = brute_force_density(motif, &a);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "{}: fast {fast} vs brute force {slow}",
                    motif.name()
                );
            }
        }
    }

    #[test]
    fn triangle_density_of_the_complete_graph_on_three_nodes() {
        let a = arr2(&[[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]);
        let edge = hom_density_graph(Motif::Edge, &a).unwrap();
        let triangle = hom_density_graph(Motif::Triangle, &a).unwrap();
        assert!((edge - 2.0 / 3.0).abs() < 1e-15);
        // Six of the 27 maps trace a triangle.
        assert!((triangle - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn empty_graph_has_zero_densities() {
        let a = Array2::zeros((4, 4));
        for motif in Motif::all() {
            assert_eq!(hom_density_graph(motif, &a).unwrap(), 0.0);
        }
    }

    #[test]
    fn product_graphon_closed_forms() {
        let w = Graphon::product();
        let expected = [
            (Motif::Edge, 0.25),
            (Motif::Path2, 1.0 / 12.0),
            (Motif::Triangle, 1.0 / 27.0),
            (Motif::Cycle4, 1.0 / 81.0),
        ];
        for (motif, value) in expected {
            let closed = hom_density_graphon(motif, &w, MIN_DENSITY_RESOLUTION).unwrap();
            assert!(
                (closed - value).abs() < 1e-15,
                "{}: {closed} vs {value}",
                motif.name()
            );
        }
    }

    #[test]
    fn constant_graphon_closed_forms() {
        let w = Graphon::constant(0.4);
        assert!((hom_density_graphon(Motif::Edge, &w, 64).unwrap() - 0.4).abs() < 1e-15);
        assert!(
            (hom_density_graphon(Motif::Triangle, &w, 64).unwrap() - 0.4f64.powi(3)).abs() < 1e-15
        );
        assert!(
            (hom_density_graphon(Motif::Cycle4, &w, 64).unwrap() - 0.4f64.powi(4)).abs() < 1e-15
        );
    }

    #[test]
    fn quadrature_agrees_with_closed_forms_on_a_step_graphon() {
        // A step graphon's densities are exact under quadrature once the
        // grid aligns with the blocks, so the generic path can be checked
        // against the same formulas evaluated on the block matrix.
        let blocks = arr2(&[[0.8, 0.2], [0.2, 0.5]]);
        let step = StepGraphon::uniform(blocks.clone()).unwrap();
        let w = Graphon::from(step);
        for motif in Motif::all() {
            let quadrature = hom_density_graphon(motif, &w, 128).unwrap();
            let block_value = hom_density_graph(motif, &blocks).unwrap();
            assert!(
                (quadrature - block_value).abs() < 1e-12,
                "{}: quadrature {quadrature} vs blocks {block_value}",
                motif.name()
            );
        }
    }

    #[test]
    fn quadrature_approaches_the_product_closed_form() {
        // Force the quadrature path by wrapping the product kernel in a
        // non-analytic representation at fine resolution.
        let w = Graphon::product();
        let grid = w.grid_matrix(256);
        let quadrature = hom_density_graph(Motif::Triangle, &grid).unwrap();
        assert!(
            (quadrature - 1.0 / 27.0).abs() < 1e-4,
            "quadrature {quadrature}"
        );
    }

    #[test]
    fn sampled_triangle_density_tracks_the_graphon() {
        let w = Graphon::product();
        let target = 1.0 / 27.0;
        let latents = sample_latents(400, LatentMode::IidUniform, 11).unwrap();
        let graph = sample_stochastic(&w, &latents, 12).unwrap();
        let density = hom_density_graph(Motif::Triangle, &graph.adjacency).unwrap();
        assert!(
            (density - target).abs() < 0.01,
            "density {density} vs {target}"
        );
    }

    #[test]
    fn motif_names_round_trip() {
        for motif in Motif::all() {
            assert_eq!(Motif::parse(motif.name()).unwrap(), motif);
        }
        assert!(Motif::parse("pentagon").is_err());
    }

    #[test]
    fn coarse_quadrature_is_rejected() {
        let w = Graphon::from(StepGraphon::uniform(arr2(&[[0.3, 0.1], [0.1, 0.6]])).unwrap());
        assert!(hom_density_graphon(Motif::Edge, &w, 32).is_err());
    }
}
