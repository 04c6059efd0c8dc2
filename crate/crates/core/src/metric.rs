//! Metrics Θ, Dyson maps Ω and the physical inner product built from them.

use num_complex::Complex64;
use serde::Serialize;

use crate::biorthogonal::BiorthonormalSystem;
use crate::dyson::DysonFamily;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Above this condition number of Θ (i.e. cond(Ω) > 1e6) residual bounds
/// are no longer guaranteed and the metric carries a warning.
pub const ILL_CONDITIONED_THETA: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Warning {
    IllConditioned,
}

/// Hermitian positive-definite kernel of the physical inner product.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    matrix: Matrix,
    min_eig: f64,
    max_eig: f64,
}

impl MetricOperator {
    /// Validates Hermiticity (relative 1e-12) and positivity
    /// (`min_eig > 1e-12·max_eig`). The stored matrix is the Hermitian part.
    pub fn new(matrix: Matrix) -> Result<Self> {
        linalg::require_square(&matrix)?;
        if !linalg::is_finite(&matrix) {
            return Err(Error::PositivityFailure {
                reason: "non-finite entries".into(),
            });
        }
        let residual = linalg::hermiticity_residual(&matrix);
        if residual > linalg::HERMITIAN_TOL {
            return Err(Error::PositivityFailure {
                reason: format!("not Hermitian, relative residual {residual:.3e}"),
            });
        }
        let matrix = linalg::hermitian_part(&matrix);
        let eig = linalg::hermitian_eigenvalues(&matrix);
        let (min_eig, max_eig) = (eig[0], eig[eig.len() - 1]);
        if !(max_eig > 0.0 && min_eig > linalg::HERMITIAN_TOL * max_eig) {
            return Err(Error::PositivityFailure {
                reason: format!("eigenvalues span [{min_eig:.3e}, {max_eig:.3e}]"),
            });
        }
        Ok(Self {
            matrix,
            min_eig,
            max_eig,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: linalg::identity(n),
            min_eig: 1.0,
            max_eig: 1.0,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn max_eig(&self) -> f64 {
        self.max_eig
    }

    pub fn condition(&self) -> f64 {
        self.max_eig / self.min_eig
    }

    pub fn warning(&self) -> Option<Warning> {
        (self.condition() > ILL_CONDITIONED_THETA).then_some(Warning::IllConditioned)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }

    /// Scales Θ by a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            min_eig: self.min_eig * factor,
            max_eig: self.max_eig * factor,
        }
    }
}

/// `‖H†Θ − ΘH‖ / (‖H‖·‖Θ‖)`, the relative quasi-Hermiticity residual.
pub fn quasi_hermiticity_residual(h: &Matrix, theta: &MetricOperator) -> f64 {
    let t = theta.matrix();
    let denom = h.norm() * t.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (h.adjoint() * t - t * h).norm() / denom
}

/// `Θ = Σ_n |Ψ_n⟩ κ_n ⟨Ψ_n|` for strictly positive weights κ.
pub fn metric_from_spectral(sys: &BiorthonormalSystem, kappa: &[f64]) -> Result<MetricOperator> {
    if kappa.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: kappa.len(),
        });
    }
    if let Some((index, &value)) = kappa.iter().enumerate().find(|(_, k)| !(k.is_finite() && **k > 0.0)) {
        return Err(Error::InvalidWeights { index, value });
    }
    let w = sys.left_vectors();
    let k = linalg::diag_real(kappa);
    MetricOperator::new(w * k * w.adjoint())
}

/// `Θ(t) = Ω†(t)·Ω(t)`.
pub fn metric_from_dyson(fam: &dyn DysonFamily, t: f64) -> Result<MetricOperator> {
    let omega = fam.omega(t);
    linalg::invert(&omega)?;
    let theta = omega.adjoint() * &omega;
    MetricOperator::new(theta)
}

/// The Hermitian Dyson map `Ω = Θ^{1/2}`.
pub fn dyson_from_metric(theta: &MetricOperator) -> Result<Matrix> {
    linalg::principal_sqrt(theta.matrix())
}

/// `U·Θ^{1/2}` for a caller-chosen unitary gauge `U`.
pub fn dyson_from_metric_with_gauge(theta: &MetricOperator, unitary: &Matrix) -> Result<Matrix> {
    let n = theta.dim();
    if unitary.nrows() != n || unitary.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: unitary.nrows(),
        });
    }
    let defect = (unitary.adjoint() * unitary - linalg::identity(n)).norm();
    if defect > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "gauge is not unitary (‖U†U − I‖ = {defect:.3e})"
        )));
    }
    Ok(unitary * dyson_from_metric(theta)?)
}

/// `h = Ω·H·Ω⁻¹`.
pub fn hermitize(h: &Matrix, omega: &Matrix) -> Result<Matrix> {
    if h.shape() != omega.shape() {
        return Err(Error::DimensionMismatch {
            expected: omega.nrows(),
            actual: h.nrows(),
        });
    }
    let inv = linalg::invert(omega)?;
    Ok(omega * h * inv)
}

fn check_len(v: &Vector, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    Ok(())
}

/// `⟨a|Θ|b⟩`.
pub fn physical_inner(a: &Vector, b: &Vector, theta: &MetricOperator) -> Result<Complex64> {
    check_len(a, theta.dim())?;
    check_len(b, theta.dim())?;
    Ok(a.dotc(&theta.apply(b)))
}

fn nonzero_overlap(phi: &Vector, psi: &Vector) -> Result<Complex64> {
    if phi.len() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            actual: psi.len(),
        });
    }
    let overlap = psi.dotc(phi);
    if overlap.norm() <= 1e-12 * phi.norm() * psi.norm() {
        return Err(Error::DegenerateOverlap {
            overlap: overlap.norm(),
        });
    }
    Ok(overlap)
}

/// `Π = |Φ⟩⟨Ψ| / ⟨Ψ|Φ⟩`.
pub fn projector_pair(phi: &Vector, psi: &Vector) -> Result<Matrix> {
    let overlap = nonzero_overlap(phi, psi)?;
    Ok(phi * psi.adjoint() / overlap)
}

/// `⟨Ψ|Λ|Φ⟩ / ⟨Ψ|Φ⟩`.
pub fn expectation(lambda: &Matrix, phi: &Vector, psi: &Vector) -> Result<Complex64> {
    let overlap = nonzero_overlap(phi, psi)?;
    if lambda.ncols() != phi.len() || lambda.nrows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            actual: lambda.ncols(),
        });
    }
    Ok(psi.dotc(&(lambda * phi)) / overlap)
}
