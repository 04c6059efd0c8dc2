//! Decision procedure for a time-independent metric compatible with every
//! Taylor coefficient of `H(t)`.
//!
//! The order-0 coefficient fixes the admissible metrics up to N positive
//! weights, `Θ = Σ_n |Ψ₀,ₙ⟩ κ_n ⟨Ψ₀,ₙ|`. The order-1 coefficient enters
//! through `M = A·F·A⁻¹`, where `A_jk = ⟨Ψ₀,j|Φ₁,k⟩` and `F = diag(ε₁,k)`;
//! compatibility at order 1 is `κ_j M_jk = κ_k M*_kj` for all j, k. One row
//! of that relation determines the weights, the remaining entries are the
//! compatibility conditions, and every higher coefficient is a pure
//! residual check against the metric so found.

mod scan;

use num_complex::Complex64;
use serde::Serialize;
use std::collections::VecDeque;

pub use scan::{qs_scan, samplers, IndependentSimilarity, ModelSampler, ScanStatistics, SharedSimilarity};

use crate::biorthogonal::{biorthogonal_decompose, BiorthonormalSystem, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::metric::{metric_from_spectral, quasi_hermiticity_residual, MetricOperator};
use crate::taylor::TaylorHamiltonian;

pub const DEFAULT_TOL_QS: f64 = 1e-8;
/// Relative bound on imaginary parts for a spectrum to count as real.
pub const REAL_SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QsStatus {
    Compatible,
    Incompatible,
    Exceptional,
}

#[derive(Debug, Clone)]
pub struct QsCertificate {
    pub status: QsStatus,
    /// Normalized so that the first weight is 1.
    pub kappa: Option<Vec<f64>>,
    pub metric: Option<MetricOperator>,
    pub first_violation_order: Option<usize>,
    /// `‖H₍m₎†Θ − ΘH₍m₎‖ / (‖H₍m₎‖‖Θ‖)` for each evaluated order.
    pub residuals: Vec<f64>,
    /// Weights as extracted, before the reality/positivity check.
    pub extracted_weights: Vec<Complex64>,
    pub detail: String,
}

impl QsCertificate {
    fn without_metric(status: QsStatus, weights: Vec<Complex64>, detail: String) -> Self {
        Self {
            status,
            kappa: None,
            metric: None,
            first_violation_order: None,
            residuals: Vec::new(),
            extracted_weights: weights,
            detail,
        }
    }
}

fn real_spectrum(h: &Matrix, which: &str) -> Result<BiorthonormalSystem> {
    let sys = biorthogonal_decompose(h, DEFAULT_TOL)?;
    let max_imag = sys.max_imag();
    if max_imag > REAL_SPECTRUM_TOL * h.norm().max(1.0) {
        log::debug!("{which} has complex eigenvalues (max |Im| {max_imag:.3e})");
        return Err(Error::ExpectsRealSpectrum { max_imag });
    }
    Ok(sys)
}

fn min_gap(sys: &BiorthonormalSystem) -> f64 {
    let ev = sys.real_eigenvalues();
    ev.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min)
}

/// `M = A·F·A⁻¹` with the overlap matrix `A_jk = ⟨Ψ₀,j|Φ₁,k⟩`.
pub fn overlap_relation(sys0: &BiorthonormalSystem, sys1: &BiorthonormalSystem) -> Result<Matrix> {
    let a = sys0.left_vectors().adjoint() * sys1.right_vectors();
    let b = linalg::invert(&a)?;
    let f = linalg::diag_real(&sys1.real_eigenvalues());
    Ok(a * f * b)
}

/// Row `r` must have every `|M_kr|`, k ≠ r, above the threshold.
fn pivot_row(m: &Matrix, threshold: f64) -> Option<usize> {
    let n = m.nrows();
    let column_floor = |r: usize| {
        (0..n)
            .filter(|&k| k != r)
            .map(|k| m[(k, r)].norm())
            .fold(f64::INFINITY, f64::min)
    };
    if column_floor(0) >= threshold {
        return Some(0);
    }
    let (best, floor) = (0..n)
        .map(|r| (r, column_floor(r)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))?;
    (floor >= threshold).then_some(best)
}

fn weights_from_row(m: &Matrix, r: usize) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|k| {
            if k == r {
                linalg::ONE
            } else {
                m[(r, k)] / m[(k, r)].conj()
            }
        })
        .collect()
}

/// Propagates `κ_k = κ_j M_jk / M*_kj` along every pair where both
/// entries are significant; each disconnected block starts at weight 1.
fn weights_from_graph(m: &Matrix, threshold: f64) -> (Vec<Complex64>, usize) {
    let n = m.nrows();
    let mut weights: Vec<Option<Complex64>> = vec![None; n];
    let mut components = 0;
    for root in 0..n {
        if weights[root].is_some() {
            continue;
        }
        components += 1;
        weights[root] = Some(linalg::ONE);
        let mut queue = VecDeque::from([root]);
        while let Some(j) = queue.pop_front() {
            let kj = weights[j].expect("visited");
            for k in 0..n {
                if weights[k].is_none() && m[(j, k)].norm() >= threshold && m[(k, j)].norm() >= threshold {
                    weights[k] = Some(kj * m[(j, k)] / m[(k, j)].conj());
                    queue.push_back(k);
                }
            }
        }
    }
    (
        weights.into_iter().map(|w| w.expect("all visited")).collect(),
        components,
    )
}

/// Checks reality and positivity; returns the weights normalized to κ₁ = 1.
fn validate_weights(weights: &[Complex64], tol: f64) -> std::result::Result<Vec<f64>, String> {
    let scale = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
    for (k, w) in weights.iter().enumerate() {
        if w.im.abs() > tol * w.norm().max(tol) {
            return Err(format!("weight {k} is not real: {w}"));
        }
        if w.re <= tol * scale {
            return Err(format!("weight {k} is not positive: {w}"));
        }
    }
    let first = weights[0].re;
    Ok(weights.iter().map(|w| w.re / first).collect())
}

/// `max_{j,k} |κ_j M_jk − M*_kj κ_k| / (‖M‖·max κ)`.
pub fn relation_residual(m: &Matrix, kappa: &[f64]) -> f64 {
    let n = m.nrows();
    let scale = m.norm() * kappa.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            let lhs = m[(j, k)] * kappa[j];
            let rhs = m[(k, j)].conj() * kappa[k];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst / scale
}

/// Orders 0–1 of the quasi-stationarity problem.
pub fn qs_solve(h0: &Matrix, h1: &Matrix, tol_qs: f64) -> Result<QsCertificate> {
    if !(tol_qs > 0.0) {
        return Err(Error::InvalidArgument(format!("tol_qs must be > 0, got {tol_qs}")));
    }
    if h0.shape() != h1.shape() {
        return Err(Error::DimensionMismatch {
            expected: h0.nrows(),
            actual: h1.nrows(),
        });
    }
    let sys0 = real_spectrum(h0, "H0")?;
    let sys1 = real_spectrum(h1, "H1")?;
    let n = sys0.dim();

    for (name, sys, h) in [("H0", &sys0, h0), ("H1", &sys1, h1)] {
        if n > 1 && min_gap(sys) <= tol_qs * h.norm().max(f64::MIN_POSITIVE) {
            return Ok(QsCertificate::without_metric(
                QsStatus::Exceptional,
                Vec::new(),
                format!("{name} has a degenerate spectrum"),
            ));
        }
    }

    let m = overlap_relation(&sys0, &sys1)?;
    let threshold = tol_qs * m.norm();

    let (weights, note) = match pivot_row(&m, threshold) {
        Some(r) => (weights_from_row(&m, r), format!("weights from row {}", r + 1)),
        None => {
            let (w, components) = weights_from_graph(&m, threshold);
            (
                w,
                format!("first-row solve degenerate; weights from {components} coupled block(s)"),
            )
        }
    };
    let degenerate_solve = note.starts_with("first-row solve degenerate");

    let kappa = match validate_weights(&weights, tol_qs) {
        Ok(k) => k,
        Err(reason) => {
            let status = if degenerate_solve {
                QsStatus::Exceptional
            } else {
                QsStatus::Incompatible
            };
            return Ok(QsCertificate::without_metric(
                status,
                weights,
                format!("{note}; {reason}"),
            ));
        }
    };

    let metric = metric_from_spectral(&sys0, &kappa)?;
    let residuals = vec![
        quasi_hermiticity_residual(h0, &metric),
        quasi_hermiticity_residual(h1, &metric),
    ];
    let relation = relation_residual(&m, &kappa);

    let violation = if residuals[0] > tol_qs {
        Some(0)
    } else if relation > tol_qs || residuals[1] > tol_qs {
        Some(1)
    } else {
        None
    };
    let status = match violation {
        None => QsStatus::Compatible,
        Some(_) if degenerate_solve => QsStatus::Exceptional,
        Some(_) => QsStatus::Incompatible,
    };
    let detail = match violation {
        None => format!("{note}; all conditions hold"),
        Some(order) => format!("{note}; order {order} condition violated (relation residual {relation:.3e})"),
    };
    Ok(QsCertificate {
        status,
        kappa: Some(kappa),
        metric: Some(metric),
        first_violation_order: if status == QsStatus::Incompatible {
            violation
        } else {
            None
        },
        residuals,
        extracted_weights: weights,
        detail,
    })
}

/// Solves orders 0–1, then checks every higher coefficient against the
/// metric found.
pub fn qs_certify(h: &TaylorHamiltonian, tol_qs: f64) -> Result<QsCertificate> {
    if h.degree() < 1 {
        return Err(Error::InvalidArgument("qs_certify needs degree >= 1".into()));
    }
    let coefficients = h.coefficients();
    let mut cert = qs_solve(&coefficients[0], &coefficients[1], tol_qs)?;
    if cert.status != QsStatus::Compatible {
        return Ok(cert);
    }
    let metric = cert.metric.clone().expect("compatible certificate carries a metric");
    for (m, coefficient) in coefficients.iter().enumerate().skip(2) {
        let residual = quasi_hermiticity_residual(coefficient, &metric);
        cert.residuals.push(residual);
        if residual > tol_qs && cert.first_violation_order.is_none() {
            cert.first_violation_order = Some(m);
            cert.status = QsStatus::Incompatible;
            cert.detail = format!("order {m} coefficient is not quasi-Hermitian for the order 0-1 metric");
        }
    }
    if cert.status == QsStatus::Compatible && h.degree() == 1 {
        cert.detail.push_str("; linear Hamiltonian");
    }
    Ok(cert)
}
