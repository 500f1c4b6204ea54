//! Photorefractive-effect security analysis for GMCS-CVQKD.
//!
//! Lithium-niobate Mach-Zehnder modulators develop a slow, light-induced
//! refractive-index change that shifts their transfer curve in phase. At a
//! fixed bias the output intensity then differs from the calibrated value by
//! a ratio k, which rescales Alice's modulation variance in a
//! Gaussian-modulated coherent-state QKD link. Parties unaware of the shift
//! estimate a transmittance k·T and excess noise ε/k instead of the true
//! (T, ε), so their computed secret key rate drifts away from what the
//! physical system delivers — overestimated for k > 1, underestimated for
//! k < 1. This crate models the chain end to end:
//!
//! * [`pe_model`] — space-charge field, index change, and per-arm phase
//!   deviation of an irradiated LN waveguide
//! * [`mzm`] — modulator transfer functions and the index k
//! * [`gmcs_channel`] — seeded quadrature data through the linear channel
//! * [`estimation`] — the naive parameter estimates and their k-bias
//! * [`keyrate`] — homodyne reverse-reconciliation key rates under
//!   collective attacks
//! * [`scenario`] — nominal/practical/estimated rate comparisons over grids
//! * [`monitor`] — the variance-tap countermeasure
//!
//! All randomness is seeded explicitly; every operation is a pure function
//! of its inputs and safe to call concurrently.

pub mod estimation;
pub mod gmcs_channel;
pub mod keyrate;
pub mod monitor;
pub mod mzm;
pub mod pe_model;
pub mod scenario;

pub use estimation::{biased_params, estimate_naive, ParamEstimate};
pub use gmcs_channel::{generate, ChannelParams, QuadratureBatch};
pub use keyrate::{secret_key_rate, KeyRateReport};
pub use monitor::{assess_window, detection_power, MonitorConfig, MonitorVerdict};
pub use mzm::{pe_index, transfer_nominal, transfer_pe, ModulatorParams, TransferPoint};
pub use pe_model::{arm_phase_deviation, differential_phase, ArmState, MaterialParams};
pub use scenario::{evaluate_point, sweep, ScenarioGrid, ScenarioRow};

/// Formats a float with 12 significant digits for CSV output.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".to_string();
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_sig_twelve_significant_digits() {
        assert_eq!(fmt_sig(0.5), "5.00000000000e-1");
        assert_eq!(fmt_sig(-1.25e-3), "-1.25000000000e-3");
        assert_eq!(fmt_sig(0.0), "0.00000000000e0");
        let round_trip: f64 = fmt_sig(std::f64::consts::PI).parse().unwrap();
        assert!((round_trip - std::f64::consts::PI).abs() < 1e-11);
    }
}
