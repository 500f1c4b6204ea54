//! Channel parameter estimation from quadrature batches.
//!
//! Legal parties know the calibrated quantities (η, v_el, N₀, V_A) and invert
//! the second moments of their data for the transmittance and excess noise:
//!
//! T̂ = (⟨x_A x_B⟩ / V_A)² / η
//! ε̂ = (⟨x_B²⟩ − η·T̂·V_A − N₀ − v_el) / (η·T̂)
//!
//! When the batch was produced under a photorefractive index k the parties,
//! unaware of the scaling, converge to the biased pair T̂ → k·T, ε̂ → ε/k.

use crate::gmcs_channel::{ChannelParams, QuadratureBatch};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimationError {
    /// The empirical cross moment is not positive; the linear-channel
    /// inversion has no solution.
    #[error("non-positive Alice-Bob correlation ({0}); estimation impossible")]
    NonPositiveCorrelation(f64),
    #[error("need at least 2 samples, got {0}")]
    InsufficientSamples(usize),
}

/// Method-of-moments estimate of (T, ε) with the raw moments it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    /// Estimated channel transmittance.
    pub t_hat: f64,
    /// Estimated excess noise (SNU). May go negative at finite n for small
    /// ε; reported as-is rather than clamped.
    pub eps_hat: f64,
    /// Samples used.
    pub n_used: usize,
    /// Empirical cross moment ⟨x_A x_B⟩.
    pub cov_xa_xb: f64,
    /// Empirical second moment ⟨x_B²⟩.
    pub var_xb: f64,
    /// Whether `t_hat` landed inside the physical range (0, 1].
    pub t_hat_physical: bool,
    /// Whether `eps_hat` came out non-negative.
    pub eps_hat_nonnegative: bool,
}

/// Estimates (T, ε) the way unaware legal parties would, using Alice's
/// reference quadratures.
pub fn estimate_naive(
    batch: &QuadratureBatch,
    c: &ChannelParams,
) -> Result<ParamEstimate, EstimationError> {
    estimate_from_quadratures(&batch.x_a, &batch.x_b, c)
}

/// [`estimate_naive`] over explicit quadrature slices (used by streaming
/// consumers that window a larger batch).
pub fn estimate_from_quadratures(
    x_a: &[f64],
    x_b: &[f64],
    c: &ChannelParams,
) -> Result<ParamEstimate, EstimationError> {
    let n = x_a.len().min(x_b.len());
    if n < 2 {
        return Err(EstimationError::InsufficientSamples(n));
    }
    let inv_n = 1.0 / n as f64;
    let mut cross = 0.0;
    let mut var_b = 0.0;
    for (xa, xb) in x_a.iter().zip(x_b) {
        cross += xa * xb;
        var_b += xb * xb;
    }
    cross *= inv_n;
    var_b *= inv_n;
    if cross <= 0.0 {
        return Err(EstimationError::NonPositiveCorrelation(cross));
    }
    let t_hat = (cross / c.v_a).powi(2) / c.eta;
    let eps_hat = (var_b - c.eta * t_hat * c.v_a - c.n0 - c.v_el) / (c.eta * t_hat);
    Ok(ParamEstimate {
        t_hat,
        eps_hat,
        n_used: n,
        cov_xa_xb: cross,
        var_xb: var_b,
        t_hat_physical: t_hat > 0.0 && t_hat <= 1.0,
        eps_hat_nonnegative: eps_hat >= 0.0,
    })
}

/// Asymptotic limit of [`estimate_naive`] under index `k`: (k·T, ε/k).
pub fn biased_params(c: &ChannelParams, k: f64) -> (f64, f64) {
    assert!(k > 0.0, "PE index must be > 0, got {k}");
    (k * c.t, c.eps / k)
}
