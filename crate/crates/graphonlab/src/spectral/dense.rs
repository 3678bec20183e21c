//! Dense symmetric eigendecomposition, delegated to faer.

use crate::error::{Error, Result};
use faer::{Mat, Side};
use ndarray::Array2;

/// All eigenvalues of a symmetric matrix, in nondecreasing order.
///
/// Only the lower triangle is read, so tiny asymmetries from accumulated
/// rounding never reach the solver.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Numerical(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let m = Mat::from_fn(n, n, |i, j| a[(i, j)]);
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigendecomposition failed: {e:?}")))
}
