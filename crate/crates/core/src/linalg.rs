//! Dense complex matrix plumbing shared by every other module.
//!
//! Matrices are plain `nalgebra` dynamic matrices over `Complex64`; the
//! helpers here add the checked operations (inversion, principal square
//! root) whose failure modes the rest of the crate reports.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

/// Relative singular-value floor below which `invert` refuses.
pub const SINGULAR_RATIO: f64 = 1e-12;
/// Relative Hermiticity tolerance for positive-definite inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn multiply(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            actual: b.nrows(),
        });
    }
    Ok(a * b)
}

pub fn adjoint(m: &Matrix) -> Matrix {
    m.adjoint()
}

pub fn norm_fro(m: &Matrix) -> f64 {
    m.norm()
}

/// Builds a matrix from real-valued rows; convenient in tests and models.
pub fn from_real_rows(rows: &[&[f64]]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Matrix::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn diag_real(values: &[f64]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))))
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn require_square(m: &Matrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidArgument("matrix must have dim >= 1".into()));
    }
    Ok(m.nrows())
}

/// `‖M − M†‖ / ‖M‖`, zero for the zero matrix.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}

pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number σ_max/σ_min (infinite when singular).
pub fn condition_number(m: &Matrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

pub fn invert(m: &Matrix) -> Result<Matrix> {
    require_square(m)?;
    let s = singular_values(m);
    let ratio = if s[0] > 0.0 { s[s.len() - 1] / s[0] } else { 0.0 };
    if !(ratio >= SINGULAR_RATIO) {
        return Err(Error::SingularMatrix { ratio });
    }
    m.clone().try_inverse().ok_or(Error::SingularMatrix { ratio })
}

/// Unique Hermitian positive-definite square root of a Hermitian
/// positive-definite matrix.
pub fn principal_sqrt(p: &Matrix) -> Result<Matrix> {
    require_square(p)?;
    let residual = hermiticity_residual(p);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual, t: 0.0 });
    }
    let eig = hermitian_part(p).symmetric_eigen();
    let (min_eig, max_eig) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(max_eig > 0.0 && min_eig > HERMITIAN_TOL * max_eig) {
        return Err(Error::NotPositiveDefinite { min_eig, max_eig });
    }
    let roots = Vector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&v| c(v.sqrt(), 0.0)));
    let v = &eig.eigenvectors;
    let s = v * Matrix::from_diagonal(&roots) * v.adjoint();
    Ok(hermitian_part(&s))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Dirac product `⟨a|b⟩ = Σ a*_j b_j`.
pub fn dirac(a: &Vector, b: &Vector) -> Complex64 {
    a.dotc(b)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
