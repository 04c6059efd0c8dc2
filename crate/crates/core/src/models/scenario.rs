//! Named demonstration setups.

use rand::Rng;
use std::sync::Arc;

use super::{pull_back_polynomial, random_hermitian, random_nilpotent, random_unit_vector, rng_from_seed};
use crate::dyson::{ConstantDyson, DysonFamily, ExpPolyDyson};
use crate::error::Result;
use crate::evolution::TimeGrid;
use crate::linalg::{c, from_real_rows, Matrix, Vector};
use crate::registry::{Named, Registry};
use crate::taylor::TaylorHamiltonian;

/// A ready-to-propagate model.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub hamiltonian: TaylorHamiltonian,
    pub dyson: Arc<dyn DysonFamily>,
    pub phi0: Vector,
    pub grid: TimeGrid,
    pub step: f64,
}

pub trait ScenarioBuilder: Named + Send + Sync {
    fn description(&self) -> &'static str;

    /// Fixed scenarios ignore the seed.
    fn build(&self, seed: u64) -> Result<Scenario>;
}

fn default_grid() -> TimeGrid {
    TimeGrid::uniform(0.0, 1.0, 11).expect("static grid")
}

fn diagonal_phi0() -> Vector {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    Vector::from_vec(vec![c(a, 0.0), c(a, 0.0)])
}

/// 2×2 model with `Ω(t) = exp(t·G)`, `G = g·E₁₂` nilpotent, and
/// `H(t) = e^{−tG}·diag(1, −1)·e^{tG} = H₍₀₎ + t·H₍₁₎`. The connection
/// `Ω⁻¹Ω̇ = G` has norm `g = 1.5` and does not commute with `H`.
pub struct Falsification;

pub const FALSIFICATION_COUPLING: f64 = 1.5;

impl Named for Falsification {
    fn name(&self) -> &'static str {
        "falsification"
    }
}

impl ScenarioBuilder for Falsification {
    fn description(&self) -> &'static str {
        "2x2 linear H(t) with time-dependent Dyson map exp(tG); naive law breaks the physical norm"
    }

    fn build(&self, _seed: u64) -> Result<Scenario> {
        let lower = vec![from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])];
        let g = from_real_rows(&[&[0.0, FALSIFICATION_COUPLING], &[0.0, 0.0]]);
        let theta = vec![0.0, 1.0];
        let hamiltonian = pull_back_polynomial(&lower, &g, &theta)?;
        Ok(Scenario {
            name: self.name().into(),
            hamiltonian,
            dyson: Arc::new(ExpPolyDyson::new(g, theta)?),
            phi0: diagonal_phi0(),
            grid: default_grid(),
            step: 1e-3,
        })
    }
}

/// The falsification model with `G = 0`: constant Ω = I.
pub struct FalsificationStatic;

impl Named for FalsificationStatic {
    fn name(&self) -> &'static str {
        "falsification-static"
    }
}

impl ScenarioBuilder for FalsificationStatic {
    fn description(&self) -> &'static str {
        "falsification model with G = 0; covariant and naive laws coincide"
    }

    fn build(&self, _seed: u64) -> Result<Scenario> {
        let h0 = from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        Ok(Scenario {
            name: self.name().into(),
            hamiltonian: TaylorHamiltonian::constant(h0)?,
            dyson: Arc::new(ConstantDyson::identity(2)),
            phi0: diagonal_phi0(),
            grid: default_grid(),
            step: 1e-3,
        })
    }
}

/// Time-dependent Hermitian `H(t) = h₀ + t·h₁` with Ω = I.
pub struct HermitianLimit;

impl Named for HermitianLimit {
    fn name(&self) -> &'static str {
        "hermitian"
    }
}

impl ScenarioBuilder for HermitianLimit {
    fn description(&self) -> &'static str {
        "random Hermitian linear H(t) with identity metric"
    }

    fn build(&self, seed: u64) -> Result<Scenario> {
        let mut rng = rng_from_seed(seed);
        let n = 3;
        let hamiltonian = TaylorHamiltonian::new(vec![random_hermitian(&mut rng, n), random_hermitian(&mut rng, n)])?;
        Ok(Scenario {
            name: self.name().into(),
            hamiltonian,
            dyson: Arc::new(ConstantDyson::identity(n)),
            phi0: random_unit_vector(&mut rng, n),
            grid: default_grid(),
            step: 1e-3,
        })
    }
}

/// Random 4×4 cryptohermitian dynamics: Hermitian quadratic
/// `h(t) = h₀ + t·h₁ + t²·h₂`, nilpotent `G`, quadratic θ(t), and
/// `H(t) = Ω⁻¹(t)·h(t)·Ω(t)`. The scales keep the step-1e-3 integration
/// error well above roundoff.
pub struct RandomCovariant;

impl RandomCovariant {
    pub const DIM: usize = 4;

    pub fn build_dim(&self, n: usize, seed: u64) -> Result<Scenario> {
        let mut rng = rng_from_seed(seed);
        let lower: Vec<Matrix> = vec![
            random_hermitian(&mut rng, n) * c(3.0, 0.0),
            random_hermitian(&mut rng, n) * c(6.0, 0.0),
            random_hermitian(&mut rng, n) * c(6.0, 0.0),
        ];
        let g = random_nilpotent(&mut rng, n, 0.5, 10.0)?;
        let theta = vec![0.0, rng.gen_range(0.5..1.0), rng.gen_range(0.5..1.0)];
        let hamiltonian = pull_back_polynomial(&lower, &g, &theta)?;
        let phi0 = random_unit_vector(&mut rng, n);
        Ok(Scenario {
            name: format!("{}-{seed}", self.name()),
            hamiltonian,
            dyson: Arc::new(ExpPolyDyson::new(g, theta)?),
            phi0,
            grid: default_grid(),
            step: 1e-3,
        })
    }
}

impl Named for RandomCovariant {
    fn name(&self) -> &'static str {
        "random-covariant"
    }
}

impl ScenarioBuilder for RandomCovariant {
    fn description(&self) -> &'static str {
        "seeded random 4x4 cryptohermitian H(t) with exp_poly Dyson family"
    }

    fn build(&self, seed: u64) -> Result<Scenario> {
        self.build_dim(Self::DIM, seed)
    }
}

pub fn scenarios() -> Registry<dyn ScenarioBuilder> {
    let mut reg: Registry<dyn ScenarioBuilder> = Registry::new("scenario");
    reg.register(Arc::new(Falsification))
        .register(Arc::new(FalsificationStatic))
        .register(Arc::new(HermitianLimit))
        .register(Arc::new(RandomCovariant));
    reg
}
