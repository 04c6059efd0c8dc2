//! Time propagation in the upper-case (covariant), lower-case (Hermitian)
//! and naive pictures.

mod crosscheck;
mod grid;
pub mod integrator;
mod picture;

use num_complex::Complex64;

pub use crosscheck::{crosscheck_pictures, CrosscheckReport};
pub use grid::TimeGrid;
pub use picture::{pictures, Covariant, DualRule, Naive, Picture};

use crate::dyson::{DerivativeSource, DysonFamily};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::metric::metric_from_dyson;
use crate::taylor::TaylorHamiltonian;
use integrator::{integrate, Side};

/// Relative Hermiticity tolerance for samples of the lower-case generator.
pub const LOWER_HERMITIAN_TOL: f64 = 1e-10;

/// `H_gen(t) = H(t) − i·Ω⁻¹(t)·Ω̇(t)`.
pub fn generator(h: &TaylorHamiltonian, fam: &dyn DysonFamily, t: f64) -> Result<Matrix> {
    check_dims(h, fam)?;
    let connection = fam.connection(t)?;
    Ok(h.evaluate(t) - connection * linalg::I)
}

fn check_dims(h: &TaylorHamiltonian, fam: &dyn DysonFamily) -> Result<()> {
    if h.dim() != fam.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: fam.dim(),
        });
    }
    Ok(())
}

fn check_vector(v: &Vector, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    Ok(())
}

/// Sampled pull-back doublet `(|Φ(t)⟩, |Ψ(t)⟩)` and its overlap.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub picture: &'static str,
    pub derivative_source: DerivativeSource,
    pub times: Vec<f64>,
    pub phi: Vec<Vector>,
    pub psi: Vec<Vector>,
    pub overlap: Vec<Complex64>,
    pub max_norm_drift: f64,
}

impl StateTrajectory {
    fn assemble(
        picture: &'static str,
        derivative_source: DerivativeSource,
        times: Vec<f64>,
        phi: Vec<Vector>,
        psi: Vec<Vector>,
    ) -> Self {
        let overlap: Vec<Complex64> = psi.iter().zip(&phi).map(|(p, f)| p.dotc(f)).collect();
        let max_norm_drift = overlap.iter().map(|o| (o - overlap[0]).norm()).fold(0.0, f64::max);
        Self {
            picture,
            derivative_source,
            times,
            phi,
            psi,
            overlap,
            max_norm_drift,
        }
    }

    /// Running maximum of `|⟨Ψ(t_j)|Φ(t_j)⟩ − ⟨Ψ(t_0)|Φ(t_0)⟩|` up to each sample.
    pub fn cumulative_drift(&self) -> Vec<f64> {
        let mut running = 0.0_f64;
        self.overlap
            .iter()
            .map(|o| {
                running = running.max((o - self.overlap[0]).norm());
                running
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.phi.first().map_or(0, |v| v.len())
    }
}

fn column(v: &Vector) -> Matrix {
    Matrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn as_vector(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

/// Propagates a doublet under the chosen picture.
///
/// With [`DualRule::Adjoint`] the dual vector evolves under the adjoint
/// generator starting from `psi0` (default `Θ(0)·φ₀`). With
/// [`DualRule::MetricPullback`] it is re-derived as `Θ(t)·Φ(t)` at every
/// sample and `psi0` is ignored.
pub fn propagate_with(
    picture: &dyn Picture,
    h: &TaylorHamiltonian,
    fam: &dyn DysonFamily,
    phi0: &Vector,
    psi0: Option<&Vector>,
    grid: &TimeGrid,
    step: f64,
) -> Result<StateTrajectory> {
    check_dims(h, fam)?;
    let n = h.dim();
    check_vector(phi0, n)?;
    let times = grid.times().to_vec();
    let source = fam.derivative_source();

    match picture.dual() {
        DualRule::Adjoint => {
            let psi0 = match psi0 {
                Some(p) => {
                    check_vector(p, n)?;
                    p.clone()
                }
                None => metric_from_dyson(fam, grid.start())?.apply(phi0),
            };
            let mut phi = Vec::with_capacity(times.len());
            let mut psi = Vec::with_capacity(times.len());
            integrate(
                |t| picture.generator(h, fam, t),
                vec![(column(phi0), Side::Direct), (column(&psi0), Side::Adjoint)],
                grid,
                step,
                |_, _, states| {
                    phi.push(as_vector(&states[0].0));
                    psi.push(as_vector(&states[1].0));
                    Ok(())
                },
            )?;
            Ok(StateTrajectory::assemble(picture.name(), source, times, phi, psi))
        }
        DualRule::MetricPullback => {
            let mut phi = Vec::with_capacity(times.len());
            let mut psi = Vec::with_capacity(times.len());
            integrate(
                |t| picture.generator(h, fam, t),
                vec![(column(phi0), Side::Direct)],
                grid,
                step,
                |_, t, states| {
                    let v = as_vector(&states[0].0);
                    psi.push(metric_from_dyson(fam, t)?.apply(&v));
                    phi.push(v);
                    Ok(())
                },
            )?;
            Ok(StateTrajectory::assemble(picture.name(), source, times, phi, psi))
        }
    }
}

/// Covariant doublet: `i∂ₜΦ = H_gen·Φ`, `i∂ₜΨ = H_gen†·Ψ`.
pub fn propagate_pair(
    h: &TaylorHamiltonian,
    fam: &dyn DysonFamily,
    phi0: &Vector,
    psi0: Option<&Vector>,
    grid: &TimeGrid,
    step: f64,
) -> Result<StateTrajectory> {
    propagate_with(&Covariant, h, fam, phi0, psi0, grid, step)
}

/// Naive law `i∂ₜΦ = H(t)·Φ`, with the dual taken as `Θ(t)·Φ(t)` so that
/// the overlap is the physical norm.
pub fn propagate_naive(
    h: &TaylorHamiltonian,
    fam: &dyn DysonFamily,
    phi0: &Vector,
    grid: &TimeGrid,
    step: f64,
) -> Result<StateTrajectory> {
    propagate_with(&Naive, h, fam, phi0, None, grid, step)
}

/// Trajectory of the lower-case state `|φ(t)⟩`.
#[derive(Debug, Clone)]
pub struct LowerTrajectory {
    pub times: Vec<f64>,
    pub phi: Vec<Vector>,
    pub norms: Vec<f64>,
    pub max_norm_drift: f64,
    /// Largest relative anti-Hermitian part removed from a generator sample.
    pub max_hermiticity_residual: f64,
}

/// `i∂ₜφ = h(t)·φ` for a Hermitian generator source.
///
/// Each sample must be Hermitian within `1e-10` relative; the residual
/// anti-Hermitian part is dropped before stepping.
pub fn propagate_h<F>(h_of_t: F, phi0: &Vector, grid: &TimeGrid, step: f64) -> Result<LowerTrajectory>
where
    F: Fn(f64) -> Result<Matrix>,
{
    let max_residual = std::cell::Cell::new(0.0_f64);
    let source = |t: f64| -> Result<Matrix> {
        let h = h_of_t(t)?;
        if h.nrows() != phi0.len() || h.ncols() != phi0.len() {
            return Err(Error::DimensionMismatch {
                expected: phi0.len(),
                actual: h.nrows(),
            });
        }
        let residual = linalg::hermiticity_residual(&h);
        if residual > LOWER_HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual, t });
        }
        if residual > max_residual.get() {
            max_residual.set(residual);
        }
        Ok(linalg::hermitian_part(&h))
    };
    let mut phi = Vec::with_capacity(grid.len());
    integrate(
        source,
        vec![(column(phi0), Side::Direct)],
        grid,
        step,
        |_, _, states| {
            phi.push(as_vector(&states[0].0));
            Ok(())
        },
    )?;
    let norms: Vec<f64> = phi.iter().map(|v| v.norm_squared()).collect();
    let max_norm_drift = norms.iter().map(|n| (n - norms[0]).abs()).fold(0.0, f64::max);
    let max_hermiticity_residual = max_residual.get();
    log::debug!("propagate_h: max anti-Hermitian residual {max_hermiticity_residual:.3e}");
    Ok(LowerTrajectory {
        times: grid.times().to_vec(),
        phi,
        norms,
        max_norm_drift,
        max_hermiticity_residual,
    })
}

/// Sampled `U_R(t)` and `U_L†(t)`.
#[derive(Debug, Clone)]
pub struct OperatorTrajectory {
    pub times: Vec<f64>,
    pub u_right: Vec<Matrix>,
    pub u_left_dagger: Vec<Matrix>,
}

impl OperatorTrajectory {
    pub fn u_left(&self, k: usize) -> Matrix {
        self.u_left_dagger[k].adjoint()
    }

    /// `max_k ‖U_L(t_k)·U_R(t_k) − U_L(t_0)·U_R(t_0)‖_F`.
    pub fn max_product_defect(&self) -> f64 {
        let reference = self.u_left(0) * &self.u_right[0];
        (0..self.times.len())
            .map(|k| (self.u_left(k) * &self.u_right[k] - &reference).norm())
            .fold(0.0, f64::max)
    }
}

/// Integrates `i∂ₜU_R = H_gen·U_R` and `i∂ₜU_L† = H_gen†·U_L†` from the
/// identity.
pub fn evolution_operators(
    h: &TaylorHamiltonian,
    fam: &dyn DysonFamily,
    grid: &TimeGrid,
    step: f64,
) -> Result<OperatorTrajectory> {
    check_dims(h, fam)?;
    let n = h.dim();
    let mut u_right = Vec::with_capacity(grid.len());
    let mut u_left_dagger = Vec::with_capacity(grid.len());
    integrate(
        |t| generator(h, fam, t),
        vec![
            (linalg::identity(n), Side::Direct),
            (linalg::identity(n), Side::Adjoint),
        ],
        grid,
        step,
        |_, _, states| {
            u_right.push(states[0].0.clone());
            u_left_dagger.push(states[1].0.clone());
            Ok(())
        },
    )?;
    Ok(OperatorTrajectory {
        times: grid.times().to_vec(),
        u_right,
        u_left_dagger,
    })
}
