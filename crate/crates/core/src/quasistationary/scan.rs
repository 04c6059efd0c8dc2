use serde::Serialize;
use std::sync::Arc;

use super::{qs_certify, QsStatus};
use crate::error::{Error, Result};
use crate::models::{
    random_cryptohermitian_with, random_similarity, random_spectrum, rng_from_seed, similar, ModelRng, DEFAULT_COND_CAP,
};
use crate::registry::{Named, Registry};
use crate::taylor::TaylorHamiltonian;

/// Source of random `(H₍₀₎, H₍₁₎)` pairs.
pub trait ModelSampler: Named + Send + Sync {
    fn description(&self) -> &'static str;

    fn sample_pair(&self, rng: &mut ModelRng, n: usize) -> Result<TaylorHamiltonian>;
}

/// Each coefficient gets its own random similarity.
pub struct IndependentSimilarity;

impl Named for IndependentSimilarity {
    fn name(&self) -> &'static str {
        "independent"
    }
}

impl ModelSampler for IndependentSimilarity {
    fn description(&self) -> &'static str {
        "H0 = S D0 S^-1, H1 = S' D1 S'^-1 with independent S, S'"
    }

    fn sample_pair(&self, rng: &mut ModelRng, n: usize) -> Result<TaylorHamiltonian> {
        let d0 = random_spectrum(rng, n);
        let h0 = random_cryptohermitian_with(rng, &d0, DEFAULT_COND_CAP)?;
        let d1 = random_spectrum(rng, n);
        let h1 = random_cryptohermitian_with(rng, &d1, DEFAULT_COND_CAP)?;
        TaylorHamiltonian::new(vec![h0, h1])
    }
}

/// Both coefficients share one similarity, so a common metric exists.
pub struct SharedSimilarity;

impl Named for SharedSimilarity {
    fn name(&self) -> &'static str {
        "shared"
    }
}

impl ModelSampler for SharedSimilarity {
    fn description(&self) -> &'static str {
        "H0 = S D0 S^-1, H1 = S D1 S^-1 with one shared S"
    }

    fn sample_pair(&self, rng: &mut ModelRng, n: usize) -> Result<TaylorHamiltonian> {
        let s = random_similarity(rng, n, DEFAULT_COND_CAP)?;
        let d0 = random_spectrum(rng, n);
        let d1 = random_spectrum(rng, n);
        TaylorHamiltonian::new(vec![similar(&s, &d0)?, similar(&s, &d1)?])
    }
}

pub fn samplers() -> Registry<dyn ModelSampler> {
    let mut reg: Registry<dyn ModelSampler> = Registry::new("sampler");
    reg.register(Arc::new(IndependentSimilarity))
        .register(Arc::new(SharedSimilarity));
    reg
}

/// Status counts over sampled pairs and over their degree-2 extensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanStatistics {
    pub sampler: String,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub tol_qs: f64,
    pub pair_compatible: usize,
    pub pair_incompatible: usize,
    pub pair_exceptional: usize,
    pub extended_compatible: usize,
    pub extended_incompatible: usize,
    pub extended_exceptional: usize,
    /// Extensions of compatible pairs that fail first at order 2.
    pub extended_first_violation_2: usize,
}

fn bump(status: QsStatus, compatible: &mut usize, incompatible: &mut usize, exceptional: &mut usize) {
    match status {
        QsStatus::Compatible => *compatible += 1,
        QsStatus::Incompatible => *incompatible += 1,
        QsStatus::Exceptional => *exceptional += 1,
    }
}

/// Trial `i` draws from a generator seeded with `seed + i`: first the pair,
/// then an independent random `H₍₂₎` for the extension.
pub fn qs_scan(sampler: &dyn ModelSampler, trials: usize, n: usize, seed: u64, tol_qs: f64) -> Result<ScanStatistics> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut stats = ScanStatistics {
        sampler: sampler.name().to_string(),
        trials,
        dim: n,
        seed,
        tol_qs,
        pair_compatible: 0,
        pair_incompatible: 0,
        pair_exceptional: 0,
        extended_compatible: 0,
        extended_incompatible: 0,
        extended_exceptional: 0,
        extended_first_violation_2: 0,
    };
    for trial in 0..trials {
        let mut rng = rng_from_seed(seed.wrapping_add(trial as u64));
        let pair = sampler.sample_pair(&mut rng, n)?;
        let d2 = random_spectrum(&mut rng, n);
        let h2 = random_cryptohermitian_with(&mut rng, &d2, DEFAULT_COND_CAP)?;

        let cert = qs_certify(&pair, tol_qs)?;
        bump(
            cert.status,
            &mut stats.pair_compatible,
            &mut stats.pair_incompatible,
            &mut stats.pair_exceptional,
        );

        let extended = qs_certify(&pair.extended(h2)?, tol_qs)?;
        bump(
            extended.status,
            &mut stats.extended_compatible,
            &mut stats.extended_incompatible,
            &mut stats.extended_exceptional,
        );
        if cert.status == QsStatus::Compatible && extended.first_violation_order == Some(2) {
            stats.extended_first_violation_2 += 1;
        }
    }
    Ok(stats)
}
