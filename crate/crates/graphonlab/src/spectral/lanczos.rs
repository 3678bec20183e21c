//! Extremal eigenvalues of large symmetric matrices.
//!
//! Plain Lanczos with full reorthogonalization: at desk scale the basis fits
//! comfortably in memory, and reorthogonalizing against every previous
//! vector removes the ghost-eigenvalue failure mode entirely, which matters
//! more here than the extra dot products. Kernel matrices of bounded
//! graphons have rapidly decaying spectra, so both ends converge in far
//! fewer iterations than the cap.

use crate::error::{Error, Result};
use crate::spectral::dense::symmetric_eigenvalues;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed seed for the starting vector; any full-support unit vector works,
/// and a seeded random one avoids accidental orthogonality to an extremal
/// eigenvector while keeping runs bit-reproducible.
const START_SEED: u64 = 0x6772_6170_686f_6e;

/// Ritz values must move less than this between checks to count as settled.
const SETTLE_TOL: f64 = 1e-11;

/// Both spectral ends of a symmetric matrix: the `k` smallest eigenvalues
/// (ascending) followed by the `k` largest (ascending), concatenated into
/// one ascending list of at most `2k` values.
///
/// Interior eigenvalues are not computed; callers that need them must use
/// the dense path.
pub fn extremal_eigenvalues(a: &Array2<f64>, k: usize) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Numerical(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    // Small problems: the dense solve is both exact and faster.
    if n <= 4 * k.max(8) {
        let vals = symmetric_eigenvalues(a)?;
        return Ok(take_extremes(&vals, k));
    }

    let max_iter = n.min((8 * k).max(120));
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut q = Array1::from_iter((0..n).map(|_| rng.gen::<f64>() - 0.5));
    let norm = q.dot(&q).sqrt();
    q.mapv_inplace(|x| x / norm);

    let mut basis: Vec<Array1<f64>> = vec![q.clone()];
    let mut alphas: Vec<f64> = Vec::with_capacity(max_iter);
    let mut betas: Vec<f64> = Vec::with_capacity(max_iter);
    let mut previous_ritz: Option<Vec<f64>> = None;

    for step in 0..max_iter {
        let mut w = a.dot(&basis[step]);
        let alpha = basis[step].dot(&w);
        alphas.push(alpha);
        // Two-pass reorthogonalization against the whole basis keeps the
        // Krylov vectors orthogonal to machine precision.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.scaled_add(-c, b);
            }
        }
        let beta = w.dot(&w).sqrt();
        // An invariant subspace was found; the tridiagonal matrix already
        // carries the exact eigenvalues of the restriction.
        if beta < 1e-13 {
            break;
        }

        let done = step + 1 == max_iter;
        let check = step + 1 >= 2 * k + 2 && (step + 1) % 10 == 0;
        if check || done {
            let ritz = tridiagonal_eigenvalues(&alphas, &betas)?;
            let current = take_extremes(&ritz, k);
            if let Some(prev) = &previous_ritz {
                if prev.len() == current.len()
                    && prev
                        .iter()
                        .zip(&current)
                        .all(|(p, c)| (p - c).abs() <= SETTLE_TOL)
                {
                    return Ok(current);
                }
            }
            previous_ritz = Some(current);
        }
        if done {
            break;
        }

        betas.push(beta);
        basis.push(w.mapv(|x| x / beta));
    }

    let ritz = tridiagonal_eigenvalues(&alphas, &betas)?;
    Ok(take_extremes(&ritz, k))
}

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and off-diagonal, ascending.
fn tridiagonal_eigenvalues(alphas: &[f64], betas: &[f64]) -> Result<Vec<f64>> {
    let m = alphas.len();
    let mut t = Array2::zeros((m, m));
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().enumerate().take(m.saturating_sub(1)) {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    symmetric_eigenvalues(&t)
}

/// The `k` smallest and `k` largest of an ascending list, deduplicating the
/// overlap when the list is shorter than `2k`.
fn take_extremes(ascending: &[f64], k: usize) -> Vec<f64> {
    if ascending.len() <= 2 * k {
        return ascending.to_vec();
    }
    let mut out = Vec::with_capacity(2 * k);
    out.extend_from_slice(&ascending[..k]);
    out.extend_from_slice(&ascending[ascending.len() - k..]);
    out
}
