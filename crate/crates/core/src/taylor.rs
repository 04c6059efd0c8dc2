//! Hamiltonians given as matrix polynomials in time.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// `H(t) = Σ_m t^m H₍m₎`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorHamiltonian {
    coefficients: Vec<Matrix>,
}

impl TaylorHamiltonian {
    pub fn new(coefficients: Vec<Matrix>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidArgument("at least one coefficient is required".into()))?;
        let n = linalg::require_square(first)?;
        for m in &coefficients {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: m.nrows().max(m.ncols()),
                });
            }
            if !linalg::is_finite(m) {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
        }
        Ok(Self { coefficients })
    }

    pub fn constant(h: Matrix) -> Result<Self> {
        Self::new(vec![h])
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: usize) -> Option<&Matrix> {
        self.coefficients.get(m)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, t: f64) -> Matrix {
        let t = Complex64::new(t, 0.0);
        let mut iter = self.coefficients.iter().rev();
        let mut acc = iter.next().expect("non-empty").clone();
        for c in iter {
            acc = acc * t + c;
        }
        acc
    }

    /// Appends a higher-order coefficient.
    pub fn extended(&self, next: Matrix) -> Result<Self> {
        let mut coefficients = self.coefficients.clone();
        coefficients.push(next);
        Self::new(coefficients)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = Complex64::new(factor, 0.0);
        Self {
            coefficients: self.coefficients.iter().map(|m| m * f).collect(),
        }
    }
}
