use std::sync::Arc;

use crate::dyson::DysonFamily;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::registry::{Named, Registry};
use crate::taylor::TaylorHamiltonian;

/// How the dual vector of a doublet is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualRule {
    /// Ψ evolves under the adjoint of the picture's generator.
    Adjoint,
    /// Ψ(t) = Θ(t)·Φ(t) with Θ = Ω†Ω taken from the Dyson family.
    MetricPullback,
}

/// A law of motion for the upper-case state |Φ(t)⟩.
pub trait Picture: Named + Send + Sync {
    fn generator(&self, h: &TaylorHamiltonian, fam: &dyn DysonFamily, t: f64) -> Result<Matrix>;

    fn dual(&self) -> DualRule;
}

/// `H_gen = H − iΩ⁻¹Ω̇` acting on both members of the doublet.
#[derive(Debug, Clone, Copy, Default)]
pub struct Covariant;

impl Named for Covariant {
    fn name(&self) -> &'static str {
        "covariant"
    }
}

impl Picture for Covariant {
    fn generator(&self, h: &TaylorHamiltonian, fam: &dyn DysonFamily, t: f64) -> Result<Matrix> {
        super::generator(h, fam, t)
    }

    fn dual(&self) -> DualRule {
        DualRule::Adjoint
    }
}

/// The non-Hermitian `H(t)` used as if it generated the evolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Naive;

impl Named for Naive {
    fn name(&self) -> &'static str {
        "naive"
    }
}

impl Picture for Naive {
    fn generator(&self, h: &TaylorHamiltonian, fam: &dyn DysonFamily, t: f64) -> Result<Matrix> {
        fam.check_invertible(t)?;
        Ok(h.evaluate(t))
    }

    fn dual(&self) -> DualRule {
        DualRule::MetricPullback
    }
}

pub fn pictures() -> Registry<dyn Picture> {
    let mut reg: Registry<dyn Picture> = Registry::new("picture");
    reg.register(Arc::new(Covariant)).register(Arc::new(Naive));
    reg
}
