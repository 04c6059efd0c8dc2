use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack allowed when checking that the integrator step divides a
/// grid interval.
const DIVISIBILITY_TOL: f64 = 1e-9;

/// Strictly increasing output times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("time grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("time grid has non-finite entries".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    /// `n_samples` equally spaced times from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, n_samples: usize) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::InvalidArgument("n_samples must be >= 2".into()));
        }
        if !(end > start) {
            return Err(Error::InvalidArgument("t_end must exceed t_start".into()));
        }
        let span = end - start;
        let last = (n_samples - 1) as f64;
        let times = (0..n_samples)
            .map(|k| {
                if k + 1 == n_samples {
                    end
                } else {
                    start + span * k as f64 / last
                }
            })
            .collect();
        Self::from_times(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of uniform substeps in each interval for a given step.
    pub fn substeps(&self, step: f64) -> Result<Vec<usize>> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be > 0, got {step}")));
        }
        self.times
            .windows(2)
            .map(|w| {
                let span = w[1] - w[0];
                let n = (span / step).round();
                if n < 1.0 || (n * step - span).abs() > DIVISIBILITY_TOL * span {
                    Err(Error::InvalidArgument(format!(
                        "step {step} does not divide interval [{}, {}]",
                        w[0], w[1]
                    )))
                } else {
                    Ok(n as usize)
                }
            })
            .collect()
    }
}
