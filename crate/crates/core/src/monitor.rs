//! Real-time modulation-variance monitoring countermeasure.
//!
//! A power tap on Alice's modulator output measures the variance her pulses
//! actually carry. Dividing by the calibrated reference V_A recovers the
//! running index k̂ = V_monitored / V_A, which corrects the naive channel
//! estimates:
//!
//! T_corrected = T̂ / k̂,    ε_corrected = ε̂ · k̂
//!
//! and raises an alarm once |k̂ − 1| exceeds the configured threshold. The
//! tap is essential: from the (x_A, x_B) records alone a variance rescaling
//! is statistically indistinguishable from a genuine transmittance change.

use crate::estimation::{estimate_from_quadratures, EstimationError};
use crate::gmcs_channel::{generate, ChannelError, ChannelParams, QuadratureBatch};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MonitorError {
    #[error("window needs {needed} samples, batch has {got}")]
    WindowTooSmall { needed: usize, got: usize },
    #[error("monitored variance must be > 0, got {0}")]
    NonPositiveVariance(f64),
    #[error("invalid monitor configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Monitoring configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    /// Samples per estimation window, ≥ 100.
    pub window: usize,
    /// Alarm bound on |k̂ − 1|, > 0.
    pub threshold: f64,
    /// Calibrated PE-free baseline parameters.
    pub reference: ChannelParams,
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<(), MonitorError> {
        if self.window < 100 {
            return Err(MonitorError::InvalidConfig(format!(
                "window must be >= 100, got {}",
                self.window
            )));
        }
        if self.threshold <= 0.0 || self.threshold.is_nan() {
            return Err(MonitorError::InvalidConfig(format!(
                "threshold must be > 0, got {}",
                self.threshold
            )));
        }
        self.reference
            .validate()
            .map_err(|e| MonitorError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

/// Outcome of one monitoring window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    /// Estimated PE index from the variance tap.
    pub k_hat: f64,
    /// Transmittance after dividing out k̂.
    pub t_corrected: f64,
    /// Excess noise after multiplying k̂ back in.
    pub eps_corrected: f64,
    /// |k̂ − 1| > threshold.
    pub alarm: bool,
    /// Position of this window in the stream.
    pub window_index: usize,
}

/// Assesses one window: estimates k̂ from the tap variance, corrects the
/// naive channel estimates, and sets the alarm flag.
///
/// Uses the first `window` samples of the batch.
pub fn assess_window(
    cfg: &MonitorConfig,
    batch: &QuadratureBatch,
    monitored_variance: f64,
    window_index: usize,
) -> Result<MonitorVerdict, MonitorError> {
    cfg.validate()?;
    if batch.n < cfg.window {
        return Err(MonitorError::WindowTooSmall {
            needed: cfg.window,
            got: batch.n,
        });
    }
    if monitored_variance <= 0.0 || monitored_variance.is_nan() {
        return Err(MonitorError::NonPositiveVariance(monitored_variance));
    }
    let est = estimate_from_quadratures(
        &batch.x_a[..cfg.window],
        &batch.x_b[..cfg.window],
        &cfg.reference,
    )?;
    let k_hat = monitored_variance / cfg.reference.v_a;
    Ok(MonitorVerdict {
        k_hat,
        t_corrected: est.t_hat / k_hat,
        eps_corrected: est.eps_hat * k_hat,
        alarm: (k_hat - 1.0).abs() > cfg.threshold,
        window_index,
    })
}

/// Simulated tap reading for a batch: the variance Alice's √k-scaled pulses
/// actually carry, k_true·⟨x_A²⟩ over the window.
pub fn tap_variance(batch: &QuadratureBatch, window: usize) -> f64 {
    let w = window.min(batch.n);
    batch.x_a[..w].iter().map(|x| x * x).sum::<f64>() / w as f64 * batch.k_true
}

/// Fraction of independent windows at true index `k` whose verdict raises an
/// alarm. Deterministic per `seed`; windows use seeds `seed`, `seed+1`, ….
///
/// `trials` must be at least 100.
pub fn detection_power(
    cfg: &MonitorConfig,
    k: f64,
    trials: usize,
    seed: u64,
) -> Result<f64, MonitorError> {
    assert!(trials >= 100, "need at least 100 trials, got {trials}");
    cfg.validate()?;
    let mut alarms = 0usize;
    for trial in 0..trials {
        let batch = generate(&cfg.reference, k, cfg.window, seed + trial as u64)?;
        let verdict = assess_window(cfg, &batch, tap_variance(&batch, cfg.window), trial)?;
        if verdict.alarm {
            alarms += 1;
        }
    }
    Ok(alarms as f64 / trials as f64)
}
