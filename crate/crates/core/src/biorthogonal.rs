//! Biorthogonal eigendecomposition of diagonalizable, possibly non-normal,
//! complex matrices.
//!
//! Right eigenvectors come from back-substitution on the complex Schur form.
//! Left vectors are the columns of `(V⁻¹)†`, so `⟨Ψ_j|Φ_k⟩ = δ_jk` holds by
//! construction and each `|Ψ_j⟩` is an eigenvector of `M†` with eigenvalue
//! `ε_j*`.

use nalgebra::Schur;
use num_complex::Complex64;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Tolerance used by callers that have no reason to pick their own.
pub const DEFAULT_TOL: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct BiorthonormalSystem {
    eigenvalues: Vec<Complex64>,
    right: Matrix,
    left: Matrix,
    condition_estimate: f64,
}

impl BiorthonormalSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Columns are the right vectors |Φ_j⟩ (unit 2-norm).
    pub fn right_vectors(&self) -> &Matrix {
        &self.right
    }

    /// Columns are the left vectors |Ψ_j⟩.
    pub fn left_vectors(&self) -> &Matrix {
        &self.left
    }

    pub fn right(&self, j: usize) -> Vector {
        self.right.column(j).into_owned()
    }

    pub fn left(&self, j: usize) -> Vector {
        self.left.column(j).into_owned()
    }

    /// Condition number of the right eigenvector matrix.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Largest imaginary part among the eigenvalues.
    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.re).collect()
    }

    /// `Σ_j |Φ_j⟩ ε_j ⟨Ψ_j|`.
    pub fn reconstruct(&self) -> Matrix {
        let d = Matrix::from_diagonal(&Vector::from_vec(self.eigenvalues.clone()));
        &self.right * d * self.left.adjoint()
    }

    /// `max_{j,k} |⟨Ψ_j|Φ_k⟩ − δ_jk|`.
    pub fn biorthonormality_residual(&self) -> f64 {
        let n = self.dim();
        let gram = self.left.adjoint() * &self.right;
        linalg::max_abs_diff(&gram, &linalg::identity(n))
    }

    /// `‖Σ_j |Φ_j⟩⟨Ψ_j| − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.dim();
        (&self.right * self.left.adjoint() - linalg::identity(n)).norm()
    }
}

fn eigen_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvectors of an upper-triangular matrix by back-substitution.
/// Near-zero pivots are lifted to `eps·‖T‖`, which turns a defective
/// block into a pair of nearly parallel columns rather than a division by
/// zero; the caller detects that through the condition estimate.
fn triangular_eigenvectors(t: &Matrix) -> Matrix {
    let n = t.nrows();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = Matrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = linalg::ONE;
        for j in (0..k).rev() {
            let mut acc = linalg::ZERO;
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[(j, k)] = -acc / d;
        }
    }
    y
}

/// Decomposes `m` as `Σ_j |Φ_j⟩ ε_j ⟨Ψ_j|`.
///
/// Eigenvalues are sorted by real part, then imaginary part, with the
/// original Schur index as the final tie-break. Fails with
/// `DefectiveMatrix` when the right eigenvector matrix has
/// `σ_min < tol·σ_max`.
pub fn biorthogonal_decompose(m: &Matrix, tol: f64) -> Result<BiorthonormalSystem> {
    let n = linalg::require_square(m)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be > 0, got {tol}")));
    }
    if !linalg::is_finite(m) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }

    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let y = triangular_eigenvectors(&t);
    let raw = q * y;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen_order(&t[(a, a)], &t[(b, b)]).then(a.cmp(&b)));

    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| t[(k, k)]).collect();
    let mut right = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = raw.column(k);
        let norm = v.norm();
        right.set_column(col, &(v / Complex64::new(norm, 0.0)));
    }

    let s = linalg::singular_values(&right);
    let condition = s[0] / s[n - 1];
    if !(s[n - 1] >= tol * s[0]) {
        return Err(Error::DefectiveMatrix { condition });
    }
    let inverse = right
        .clone()
        .try_inverse()
        .ok_or(Error::DefectiveMatrix { condition })?;
    let left = inverse.adjoint();

    Ok(BiorthonormalSystem {
        eigenvalues,
        right,
        left,
        condition_estimate: condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real, from_real_rows};

    fn parallel(v: &Vector, w: &[f64]) -> bool {
        let w = Vector::from_iterator(w.len(), w.iter().map(|&x| c(x, 0.0)));
        let overlap = v.dotc(&w).norm();
        (overlap - v.norm() * w.norm()).abs() < 1e-12
    }

    #[test]
    fn hermitian_diagonal() {
        let sys = biorthogonal_decompose(&diag_real(&[2.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(sys.eigenvalues(), &[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(parallel(&sys.right(0), &[0.0, 1.0]));
        assert!(parallel(&sys.right(1), &[1.0, 0.0]));
        assert!(linalg::max_abs_diff(sys.right_vectors(), sys.left_vectors()) < 1e-14);
    }

    #[test]
    fn non_normal_two_by_two() {
        // roots of (1-ε)² = 4 are 3 and -1
        let m = from_real_rows(&[&[1.0, 1.0], &[4.0, 1.0]]);
        let sys = biorthogonal_decompose(&m, DEFAULT_TOL).unwrap();
        assert!((sys.eigenvalues()[0] - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((sys.eigenvalues()[1] - c(3.0, 0.0)).norm() < 1e-13);
        assert!(parallel(&sys.right(0), &[1.0, -2.0]));
        assert!(parallel(&sys.right(1), &[1.0, 2.0]));
        assert!((sys.right(0).norm() - 1.0).abs() < 1e-14);
        assert!(sys.biorthonormality_residual() < 1e-12);
        assert!(sys.completeness_residual() < 1e-12);
        assert!((sys.reconstruct() - &m).norm() < 1e-12 * m.norm());
        // left vectors are eigenvectors of M† with conjugate eigenvalue
        for j in 0..2 {
            let psi = sys.left(j);
            let r = m.adjoint() * &psi - &psi * sys.eigenvalues()[j].conj();
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn jordan_block_is_defective() {
        let m = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let err = biorthogonal_decompose(&m, DEFAULT_TOL).unwrap_err();
        assert_eq!(err.name(), "DefectiveMatrix");
    }

    #[test]
    fn repeated_eigenvalue_diagonalizable_is_accepted() {
        let sys = biorthogonal_decompose(&linalg::identity(3), DEFAULT_TOL).unwrap();
        assert!(sys.biorthonormality_residual() < 1e-14);
    }

    #[test]
    fn complex_spectrum_ordering() {
        // rotation generator: eigenvalues ±i
        let m = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let sys = biorthogonal_decompose(&m, DEFAULT_TOL).unwrap();
        assert!(sys.eigenvalues()[0].im < 0.0);
        assert!(sys.eigenvalues()[1].im > 0.0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(biorthogonal_decompose(&linalg::identity(2), 0.0).is_err());
    }
}
