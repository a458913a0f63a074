//! Exponential decay fits `y ≈ c · e^{-k/ξ}`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slopes above `-NON_DECAY_SLOPE` are reported as non-decaying.
const NON_DECAY_SLOPE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// Upper-envelope prefactor: `c · e^{-k/ξ} ≥ y` for every fitted sample.
    pub c: f64,
    /// Least-squares prefactor `e^{intercept}`.
    pub c_fit: f64,
    /// Decay length; infinite when the data do not decay.
    pub xi: f64,
    pub slope: f64,
    /// Root-mean-square of `ln y − (intercept + slope·k)`.
    pub residual: f64,
    pub max_residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub decaying: bool,
}

impl DecayFit {
    pub fn predict(&self, k: f64) -> f64 {
        self.c * (self.slope * k).exp()
    }
}

/// Least squares on `(k, ln y)`.
pub fn fit_exponential(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!("exponential fit needs >= 3 samples, got {}", samples.len())));
    }
    if let Some(&(k, y)) = samples.iter().find(|(k, y)| !(*y > 0.0) || !y.is_finite() || !k.is_finite()) {
        return Err(Error::invalid(format!("exponential fit needs finite y > 0, got y={y} at k={k}")));
    }
    let n = samples.len() as f64;
    let kbar = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let lbar = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - kbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("exponential fit needs at least two distinct k"));
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - kbar) * (s.1.ln() - lbar)).sum();
    let slope = sxy / sxx;
    let intercept = lbar - slope * kbar;
    let resid: Vec<f64> = samples.iter().map(|s| s.1.ln() - intercept - slope * s.0).collect();
    let residual = (resid.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let max_residual = resid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let decaying = slope < -NON_DECAY_SLOPE;
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit {
        c: (intercept + max_residual.max(0.0)).exp(),
        c_fit: intercept.exp(),
        xi: if decaying { -1.0 / slope } else { f64::INFINITY },
        slope,
        residual,
        max_residual,
        window: (lo, hi),
        samples: samples.len(),
        decaying,
    })
}

/// Fits `values[k]` for `k` in `lo..=hi`.
pub fn fit_window(values: &[f64], lo: usize, hi: usize) -> Result<DecayFit> {
    if hi >= values.len() || lo > hi {
        return Err(Error::invalid(format!("fit window [{lo}, {hi}] outside 0..{}", values.len())));
    }
    let samples: Vec<(f64, f64)> = (lo..=hi).map(|k| (k as f64, values[k])).collect();
    fit_exponential(&samples)
}
