//! A numerical laboratory for graphons and the graphs they generate.
//!
//! The crate covers one workflow end to end:
//!
//! 1. define a graphon ([`graphon`]),
//! 2. sample weighted or simple graphs from it ([`sampling`]),
//! 3. compare operator spectra of the graph and the graphon ([`spectral`]),
//! 4. measure kernel distances (cut, operator, Hilbert–Schmidt norms in
//!    [`norms`]) and homomorphism densities ([`densities`]),
//! 5. evaluate a-priori eigenvalue perturbation bounds and check them
//!    against the observed gaps ([`bounds`]),
//! 6. estimate a graphon back from a single sampled graph ([`estimation`]).
//!
//! The [`harness`] module batches these steps into reproducible sweeps, and
//! [`io`]/[`plot`] read and write the on-disk formats (dense matrices, edge
//! lists, CSV tables, SVG charts).
//!
//! Everything is deterministic given a seed: the same configuration always
//! produces byte-identical outputs.
//!
//! ```
//! use graphonlab::graphon::Graphon;
//! use graphonlab::sampling::{sample_latents, sample_weighted, LatentMode};
//! use graphonlab::spectral::sample_spectrum;
//!
//! let w = Graphon::product();
//! let latents = sample_latents(128, LatentMode::FixedGrid, 0)?;
//! let graph = sample_weighted(&w, &latents)?;
//! let spectrum = sample_spectrum(&graph.adjacency, 3)?;
//! // The top eigenvalue of W(u, v) = uv is 1/3; the scaled graph follows it.
//! assert!((spectrum.positive[0] - 1.0 / 3.0).abs() < 0.01);
//! # Ok::<(), graphonlab::Error>(())
//! ```

pub mod bounds;
pub mod densities;
mod error;
pub mod estimation;
pub mod graphon;
pub mod harness;
pub mod io;
pub mod norms;
pub mod plot;
pub mod sampling;
mod serde_util;
pub mod spectral;

pub use error::{Error, Result};
