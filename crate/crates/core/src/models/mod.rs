//! Reference model builders.

mod scenario;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use scenario::{
    scenarios, Falsification, FalsificationStatic, HermitianLimit, RandomCovariant, Scenario, ScenarioBuilder,
    FALSIFICATION_COUPLING,
};

use crate::error::{Error, Result};
use crate::linalg::{self, c, Matrix, Vector};
use crate::taylor::TaylorHamiltonian;

pub type ModelRng = ChaCha8Rng;

pub const DEFAULT_COND_CAP: f64 = 100.0;
pub const MAX_RESAMPLE: usize = 100;

pub fn rng_from_seed(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform 1D grid `x_min, …, x_max` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument("grid requires x_min < x_max".into()));
        }
        if n_points < 3 {
            return Err(Error::InvalidArgument("grid requires n_points >= 3".into()));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points).map(|k| self.x_min + dx * k as f64).collect()
    }

    /// Samples a potential on the grid nodes.
    pub fn sample(&self, v: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.points().into_iter().map(v).collect()
    }
}

/// `H = −D₂ + diag(V)` with the three-point Laplacian and Dirichlet
/// boundaries (ħ = 1, m = 1/2).
pub fn discretize_schrodinger(grid: &GridSpec, potential: &[Complex64]) -> Result<Matrix> {
    let n = grid.n_points();
    if potential.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: potential.len(),
        });
    }
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut h = Matrix::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = c(2.0 * inv_h2, 0.0) + potential[j];
        if j + 1 < n {
            h[(j, j + 1)] = c(-inv_h2, 0.0);
            h[(j + 1, j)] = c(-inv_h2, 0.0);
        }
    }
    Ok(h)
}

/// Ad hoc two-level family for examples and tests:
/// `[[r·e^{iφ}, s], [s, r·e^{−iφ}]]`, eigenvalues `r·cosφ ± √(s² − r²sin²φ)`.
pub fn model_2x2(r: f64, s: f64, phi: f64) -> Result<Matrix> {
    if s == 0.0 {
        return Err(Error::InvalidArgument("model_2x2 requires s != 0".into()));
    }
    let diag = Complex64::from_polar(r, phi);
    Ok(Matrix::from_row_slice(2, 2, &[diag, c(s, 0.0), c(s, 0.0), diag.conj()]))
}

/// Complex matrix with independent standard-normal real and imaginary parts.
pub fn random_complex(rng: &mut ModelRng, rows: usize, cols: usize) -> Matrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

pub fn random_hermitian(rng: &mut ModelRng, n: usize) -> Matrix {
    linalg::hermitian_part(&random_complex(rng, n, n))
}

pub fn random_unit_vector(rng: &mut ModelRng, n: usize) -> Vector {
    let v = random_complex(rng, n, 1);
    let norm = v.norm();
    Vector::from_column_slice((v / c(norm, 0.0)).as_slice())
}

/// Random similarity `S` with `cond(S) ≤ cond_cap`.
pub fn random_similarity(rng: &mut ModelRng, n: usize, cond_cap: f64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    if !(cond_cap >= 1.0) {
        return Err(Error::InvalidArgument("cond_cap must be >= 1".into()));
    }
    for _ in 0..MAX_RESAMPLE {
        let s = random_complex(rng, n, n);
        if linalg::condition_number(&s) <= cond_cap {
            return Ok(s);
        }
    }
    Err(Error::ResampleExhausted { attempts: MAX_RESAMPLE })
}

/// `S·diag(spectrum)·S⁻¹` drawn from an existing generator.
pub fn random_cryptohermitian_with(rng: &mut ModelRng, spectrum: &[f64], cond_cap: f64) -> Result<Matrix> {
    let s = random_similarity(rng, spectrum.len(), cond_cap)?;
    similar(&s, spectrum)
}

/// `S·diag(spectrum)·S⁻¹`.
pub fn similar(s: &Matrix, spectrum: &[f64]) -> Result<Matrix> {
    if s.nrows() != spectrum.len() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            actual: spectrum.len(),
        });
    }
    Ok(s * linalg::diag_real(spectrum) * linalg::invert(s)?)
}

/// Seeded sampler of diagonalizable matrices with a prescribed real
/// spectrum; bitwise reproducible for a given seed.
pub fn random_cryptohermitian(n: usize, spectrum: &[f64], seed: u64, cond_cap: f64) -> Result<Matrix> {
    if spectrum.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: spectrum.len(),
        });
    }
    random_cryptohermitian_with(&mut rng_from_seed(seed), spectrum, cond_cap)
}

/// Real spectrum with unit mean spacing and jitter; levels stay at least
/// 0.4 apart.
pub fn random_spectrum(rng: &mut ModelRng, n: usize) -> Vec<f64> {
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n).map(|k| k as f64 - centre + rng.gen_range(-0.3..0.3)).collect()
}

/// Strictly upper-triangular matrix conjugated by a random similarity;
/// nilpotent, so `exp(θG)` is a finite polynomial in θ.
pub fn random_nilpotent(rng: &mut ModelRng, n: usize, scale: f64, cond_cap: f64) -> Result<Matrix> {
    let mut u = random_complex(rng, n, n) * c(scale, 0.0);
    for i in 0..n {
        for j in 0..=i {
            u[(i, j)] = linalg::ZERO;
        }
    }
    let p = random_similarity(rng, n, cond_cap)?;
    Ok(&p * u * linalg::invert(&p)?)
}

type MatPoly = Vec<Matrix>;

fn poly_mul(a: &[Matrix], b: &[Matrix]) -> MatPoly {
    let n = a[0].nrows();
    let mut out = vec![Matrix::zeros(n, n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn scalar_poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients in t of `exp(sign·θ(t)·G)` for nilpotent `G`.
fn nilpotent_exp_poly(g: &Matrix, theta: &[f64], sign: f64) -> MatPoly {
    let n = g.nrows();
    let mut result: MatPoly = vec![linalg::identity(n)];
    let mut power = linalg::identity(n);
    let mut theta_pow = vec![1.0];
    let mut factorial = 1.0;
    for k in 1..n {
        power = &power * g;
        theta_pow = scalar_poly_mul(&theta_pow, theta);
        factorial *= k as f64;
        let weight = sign.powi(k as i32) / factorial;
        if result.len() < theta_pow.len() {
            result.resize(theta_pow.len(), Matrix::zeros(n, n));
        }
        for (m, &tc) in theta_pow.iter().enumerate() {
            result[m] += &power * c(weight * tc, 0.0);
        }
    }
    result
}

/// Taylor coefficients of `e^{−θ(t)G}·h(t)·e^{θ(t)G}` for nilpotent `G` and
/// a Hermitian matrix polynomial `h(t)`. The result is quasi-Hermitian with
/// respect to `Θ(t) = Ω†(t)Ω(t)`, `Ω(t) = exp(θ(t)G)`, at every `t`.
pub fn pull_back_polynomial(lower: &[Matrix], g: &Matrix, theta: &[f64]) -> Result<TaylorHamiltonian> {
    if lower.is_empty() {
        return Err(Error::InvalidArgument("lower-case polynomial is empty".into()));
    }
    let n = g.nrows();
    let residual = (0..n).fold(linalg::identity(n), |acc, _| acc * g).norm();
    if residual > 1e-10 * g.norm().max(1.0).powi(n as i32) {
        return Err(Error::InvalidArgument("generator is not nilpotent".into()));
    }
    let forward = nilpotent_exp_poly(g, theta, 1.0);
    let backward = nilpotent_exp_poly(g, theta, -1.0);
    let coefficients = poly_mul(&poly_mul(&backward, lower), &forward);
    // drop trailing coefficients that vanish identically
    let scale = coefficients.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let mut keep = coefficients.len();
    while keep > 1 && coefficients[keep - 1].norm() <= 1e-14 * scale {
        keep -= 1;
    }
    TaylorHamiltonian::new(coefficients[..keep].to_vec())
}
