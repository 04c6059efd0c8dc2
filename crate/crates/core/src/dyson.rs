//! Time-parametrized Dyson maps Ω(t).
//!
//! Each family is a [`DysonFamily`] trait object so that propagators can
//! take whichever parametrization a model or configuration selects.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Relative step of the central difference used for tabulated families.
pub const FD_RELATIVE_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Exact,
    FiniteDifference,
}

pub trait DysonFamily: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn omega(&self, t: f64) -> Matrix;

    fn omega_dot(&self, t: f64) -> Matrix;

    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::Exact
    }

    /// `Ω⁻¹(t)·Ω̇(t)`, the connection entering the covariant generator.
    fn connection(&self, t: f64) -> Result<Matrix> {
        let inv = linalg::invert(&self.omega(t))?;
        Ok(inv * self.omega_dot(t))
    }

    /// Fails with `SingularMatrix` if Ω is not invertible at `t`.
    fn check_invertible(&self, t: f64) -> Result<()> {
        linalg::invert(&self.omega(t)).map(|_| ())
    }
}

/// Time-independent map; Ω̇ = 0.
#[derive(Debug, Clone)]
pub struct ConstantDyson {
    omega: Matrix,
}

impl ConstantDyson {
    pub fn new(omega: Matrix) -> Self {
        Self { omega }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(linalg::identity(n))
    }
}

impl DysonFamily for ConstantDyson {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn dim(&self) -> usize {
        self.omega.nrows()
    }

    fn omega(&self, _t: f64) -> Matrix {
        self.omega.clone()
    }

    fn omega_dot(&self, _t: f64) -> Matrix {
        Matrix::zeros(self.dim(), self.dim())
    }

    fn connection(&self, t: f64) -> Result<Matrix> {
        self.check_invertible(t)?;
        Ok(Matrix::zeros(self.dim(), self.dim()))
    }
}

/// `Ω(t) = exp(θ(t)·G)` with a real polynomial θ.
#[derive(Debug, Clone)]
pub struct ExpPolyDyson {
    generator: Matrix,
    theta: Vec<f64>,
}

impl ExpPolyDyson {
    pub fn new(generator: Matrix, theta: Vec<f64>) -> Result<Self> {
        linalg::require_square(&generator)?;
        if theta.is_empty() || theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "theta must be a non-empty list of finite coefficients".into(),
            ));
        }
        Ok(Self { generator, theta })
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn theta_coefficients(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.theta.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn theta_prime(&self, t: f64) -> f64 {
        self.theta
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (m, &c)| acc * t + m as f64 * c)
    }
}

impl DysonFamily for ExpPolyDyson {
    fn kind(&self) -> &'static str {
        "exp_poly"
    }

    fn dim(&self) -> usize {
        self.generator.nrows()
    }

    fn omega(&self, t: f64) -> Matrix {
        (&self.generator * Complex64::new(self.theta(t), 0.0)).exp()
    }

    fn omega_dot(&self, t: f64) -> Matrix {
        &self.generator * self.omega(t) * Complex64::new(self.theta_prime(t), 0.0)
    }

    /// G commutes with exp(θG), so the connection is exactly θ′(t)·G.
    fn connection(&self, t: f64) -> Result<Matrix> {
        Ok(&self.generator * Complex64::new(self.theta_prime(t), 0.0))
    }

    fn check_invertible(&self, _t: f64) -> Result<()> {
        Ok(())
    }
}

/// User-supplied Ω(t) without an analytic derivative; Ω̇ is taken by a
/// central difference and the output is flagged accordingly.
#[derive(Clone)]
pub struct TabulatedDyson {
    dim: usize,
    source: Arc<dyn Fn(f64) -> Matrix + Send + Sync>,
}

impl TabulatedDyson {
    pub fn new(dim: usize, source: impl Fn(f64) -> Matrix + Send + Sync + 'static) -> Self {
        Self {
            dim,
            source: Arc::new(source),
        }
    }
}

impl fmt::Debug for TabulatedDyson {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TabulatedDyson").field("dim", &self.dim).finish()
    }
}

impl DysonFamily for TabulatedDyson {
    fn kind(&self) -> &'static str {
        "tabulated"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn omega(&self, t: f64) -> Matrix {
        (self.source)(t)
    }

    fn omega_dot(&self, t: f64) -> Matrix {
        let h = FD_RELATIVE_STEP * t.abs().max(1.0);
        ((self.source)(t + h) - (self.source)(t - h)) / Complex64::new(2.0 * h, 0.0)
    }

    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::FiniteDifference
    }
}
