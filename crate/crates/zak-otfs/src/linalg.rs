//! Thin wrappers over the dense solvers used by the toolkit.
//!
//! All heavy factorizations (Cholesky solves, Hermitian eigendecomposition,
//! least squares) go through here so the rest of the crate works with plain
//! `Vec<C64>` buffers and converts at this boundary only.

use crate::error::Error;
use crate::{Result, C64};
use faer::Mat;

pub type CMat = Mat<C64>;

/// Build a faer matrix from a row-major closure.
pub fn mat_from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> CMat {
    Mat::from_fn(rows, cols, |i, j| f(i, j))
}

/// Column vector from a slice.
pub fn col_from_slice(v: &[C64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

/// Extract a column vector into a `Vec`.
pub fn col_to_vec(m: &CMat) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// `A * A^H` (Hermitian result, computed densely).
pub fn aah(a: &CMat) -> CMat {
    a * a.adjoint()
}

/// `A * x` for a vector `x`.
pub fn matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    let xm = col_from_slice(x);
    col_to_vec(&(a * &xm))
}

/// `A^H * x` for a vector `x`.
pub fn adjoint_matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    let xm = col_from_slice(x);
    col_to_vec(&(a.adjoint() * &xm))
}

/// Solve the Hermitian positive-definite system `A z = b` via Cholesky.
pub fn hermitian_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let llt = a
        .llt(faer::Side::Lower)
        .map_err(|_| Error::Singular("Cholesky factorization failed".into()))?;
    Ok(llt.solve(b))
}

/// Least-squares solve `min |A x - b|` via QR. `A` must have full column rank.
pub fn lstsq(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() < a.ncols() {
        return Err(Error::Singular(format!(
            "least squares needs nrows >= ncols, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let qr = a.qr();
    Ok(qr.solve_lstsq(b))
}

/// Symmetric factor of a Hermitian PSD matrix: `F = U diag(sqrt(max(lam, 0)))`
/// so that `F F^H = A` up to eigenvalue clipping. Small negative eigenvalues
/// (roundoff) are clipped at zero; anything below `-tol_scale * trace / n`
/// is reported as a PSD violation.
pub fn psd_factor(a: &CMat, tol_scale: f64) -> Result<(CMat, f64)> {
    let n = a.nrows();
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Singular("eigendecomposition failed".into()))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    let floor = -tol_scale * trace.max(0.0) / n as f64;
    let mut min_eig = f64::INFINITY;
    for i in 0..n {
        min_eig = min_eig.min(s[i].re);
    }
    if min_eig < floor {
        return Err(Error::NotPsd { min_eig });
    }
    let f = Mat::from_fn(n, n, |i, j| u[(i, j)] * s[j].re.max(0.0).sqrt());
    Ok((f, min_eig))
}

/// Squared Frobenius norm of `A - B`.
pub fn frobenius_diff_sq(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    acc
}

/// Squared Frobenius norm.
pub fn frobenius_sq(a: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_mat(n: usize, m: usize, seed: u64) -> CMat {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Mat::from_fn(n, m, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn hermitian_solve_roundtrip() {
        let n = 12;
        let a = random_mat(n, n, 1);
        let spd = &aah(&a) + CMat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let x = random_mat(n, 1, 2);
        let b = &spd * &x;
        let got = hermitian_solve(&spd, &b).unwrap();
        for i in 0..n {
            assert!((got[(i, 0)] - x[(i, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn lstsq_consistent_system() {
        let a = random_mat(20, 5, 3);
        let x = random_mat(5, 1, 4);
        let b = &a * &x;
        let got = lstsq(&a, &b).unwrap();
        for i in 0..5 {
            assert!((got[(i, 0)] - x[(i, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn psd_factor_reconstructs() {
        let n = 10;
        let a = random_mat(n, n, 5);
        let c = aah(&a);
        let (f, min_eig) = psd_factor(&c, 1e-8).unwrap();
        assert!(min_eig >= -1e-10);
        let back = aah(&f);
        assert!(frobenius_diff_sq(&back, &c).sqrt() < 1e-9 * frobenius_sq(&c).sqrt().max(1.0));
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let n = 4;
        let mut c = CMat::zeros(n, n);
        for i in 0..n {
            c[(i, i)] = C64::new(1.0, 0.0);
        }
        c[(3, 3)] = C64::new(-0.5, 0.0);
        assert!(matches!(psd_factor(&c, 1e-8), Err(Error::NotPsd { .. })));
    }
}
