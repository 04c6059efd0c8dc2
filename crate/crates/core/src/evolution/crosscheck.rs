use serde::Serialize;

use super::{evolution_operators, propagate_h, propagate_naive, propagate_pair, TimeGrid};
use crate::dyson::DysonFamily;
use crate::error::Result;
use crate::linalg::{self, Vector};
use crate::metric::hermitize;
use crate::taylor::TaylorHamiltonian;

/// Pairwise maximum deviations `max_k ‖Φ_a(t_k) − Φ_b(t_k)‖₂` between the
/// three routes to |Φ(t)⟩, plus the naive law for contrast.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub pair_vs_lower: f64,
    pub pair_vs_operator: f64,
    pub lower_vs_operator: f64,
    pub pair_vs_naive: f64,
    pub covariant_drift: f64,
    pub naive_drift: f64,
    pub lower_norm_drift: f64,
}

impl CrosscheckReport {
    /// Largest deviation among the three consistent routes.
    pub fn max_pairwise(&self) -> f64 {
        self.pair_vs_lower
            .max(self.pair_vs_operator)
            .max(self.lower_vs_operator)
    }
}

fn max_dev(a: &[Vector], b: &[Vector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Computes |Φ(t)⟩ from the covariant doublet, from the lower-case
/// Hermitian evolution pulled back through Ω⁻¹(t), and from `U_R(t)·φ₀`.
/// The dual starts at `Θ(0)·φ₀`.
pub fn crosscheck_pictures(
    h: &TaylorHamiltonian,
    fam: &dyn DysonFamily,
    phi0: &Vector,
    grid: &TimeGrid,
    step: f64,
) -> Result<CrosscheckReport> {
    let pair = propagate_pair(h, fam, phi0, None, grid, step)?;

    let lower_start = fam.omega(grid.start()) * phi0;
    let lower = propagate_h(|t| hermitize(&h.evaluate(t), &fam.omega(t)), &lower_start, grid, step)?;
    let pulled: Vec<Vector> = lower
        .phi
        .iter()
        .zip(grid.times())
        .map(|(v, &t)| Ok(linalg::invert(&fam.omega(t))? * v))
        .collect::<Result<_>>()?;

    let ops = evolution_operators(h, fam, grid, step)?;
    let by_operator: Vec<Vector> = ops.u_right.iter().map(|u| u * phi0).collect();

    let naive = propagate_naive(h, fam, phi0, grid, step)?;

    Ok(CrosscheckReport {
        pair_vs_lower: max_dev(&pair.phi, &pulled),
        pair_vs_operator: max_dev(&pair.phi, &by_operator),
        lower_vs_operator: max_dev(&pulled, &by_operator),
        pair_vs_naive: max_dev(&pair.phi, &naive.phi),
        covariant_drift: pair.max_norm_drift,
        naive_drift: naive.max_norm_drift,
        lower_norm_drift: lower.max_norm_drift,
    })
}
