//! Mach-Zehnder amplitude modulator transfer characteristic.
//!
//! The nominal transfer function is the usual raised cosine
//!
//! I_out = T_mod·(I_in/2)·[1 + cos(π·V_DC/V_π − Δφ₀)]
//!
//! A photorefractive differential phase Δφ_p adds to the fabrication offset
//! Δφ₀ and slides the curve along the voltage axis, so the output at a fixed
//! bias changes while the overall swing stays [0, T_mod·I_in]. The ratio of
//! shifted to nominal output at one bias point is the dimensionless index k.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bracket floor below which the transfer null makes k undefined.
pub const DEFAULT_NULL_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MzmError {
    /// Bias sits at (or numerically too close to) the nominal transfer null,
    /// where the output ratio is undefined.
    #[error("operating point too close to transfer null: 1+cos = {bracket:.3e} < floor {floor:.3e}")]
    NullOperatingPoint { bracket: f64, floor: f64 },
    #[error("invalid modulator parameters: {0}")]
    InvalidParams(String),
}

/// Modulator transfer-function constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatorParams {
    /// Optical transmittance of the device, in (0, 1].
    pub t_mod: f64,
    /// Half-wave voltage V_π (V), > 0.
    pub v_pi: f64,
    /// Fabrication phase offset Δφ₀ between the arms (rad).
    pub dphi0: f64,
}

impl ModulatorParams {
    pub fn validate(&self) -> Result<(), MzmError> {
        if !(self.t_mod > 0.0 && self.t_mod <= 1.0) {
            return Err(MzmError::InvalidParams(format!(
                "t_mod must be in (0, 1], got {}",
                self.t_mod
            )));
        }
        if self.v_pi <= 0.0 || !self.v_pi.is_finite() {
            return Err(MzmError::InvalidParams(format!(
                "v_pi must be finite and > 0, got {}",
                self.v_pi
            )));
        }
        if !self.dphi0.is_finite() {
            return Err(MzmError::InvalidParams("dphi0 must be finite".into()));
        }
        Ok(())
    }
}

/// One operating point of the modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferPoint {
    /// Bias voltage (V).
    pub v_dc: f64,
    /// Input intensity (arbitrary linear power units), ≥ 0.
    pub i_in: f64,
    /// Photorefractive differential phase Δφ_p (rad).
    pub dphi_p: f64,
}

fn bracket(p: &ModulatorParams, v_dc: f64, phase_shift: f64) -> f64 {
    1.0 + (std::f64::consts::PI / p.v_pi * v_dc - phase_shift).cos()
}

/// Nominal output intensity at bias `v_dc`.
pub fn transfer_nominal(p: &ModulatorParams, v_dc: f64, i_in: f64) -> f64 {
    p.t_mod * 0.5 * i_in * bracket(p, v_dc, p.dphi0)
}

/// Output intensity with the cosine argument shifted by Δφ₀ + Δφ_p.
///
/// Reduces to [`transfer_nominal`] at Δφ_p = 0.
pub fn transfer_pe(p: &ModulatorParams, pt: &TransferPoint) -> f64 {
    p.t_mod * 0.5 * pt.i_in * bracket(p, pt.v_dc, p.dphi0 + pt.dphi_p)
}

/// Output ratio k = I'_out / I_out at one bias point:
///
/// k = [1 + cos(πV_DC/V_π − (Δφ₀+Δφ_p))] / [1 + cos(πV_DC/V_π − Δφ₀)]
///
/// Independent of the input intensity. Uses [`DEFAULT_NULL_FLOOR`] for the
/// nominal-null guard.
pub fn pe_index(p: &ModulatorParams, pt: &TransferPoint) -> Result<f64, MzmError> {
    pe_index_with_floor(p, pt, DEFAULT_NULL_FLOOR)
}

/// [`pe_index`] with an explicit floor on the nominal bracket.
pub fn pe_index_with_floor(
    p: &ModulatorParams,
    pt: &TransferPoint,
    floor: f64,
) -> Result<f64, MzmError> {
    let denom = bracket(p, pt.v_dc, p.dphi0);
    if denom < floor {
        return Err(MzmError::NullOperatingPoint {
            bracket: denom,
            floor,
        });
    }
    Ok(bracket(p, pt.v_dc, p.dphi0 + pt.dphi_p) / denom)
}

/// Shifted transfer curve sampled over `v_grid`, preserving grid order.
pub fn transfer_curve(
    p: &ModulatorParams,
    dphi_p: f64,
    v_grid: &[f64],
    i_in: f64,
) -> Vec<(f64, f64)> {
    v_grid
        .iter()
        .map(|&v_dc| {
            let pt = TransferPoint { v_dc, i_in, dphi_p };
            (v_dc, transfer_pe(p, &pt))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_mzm() -> ModulatorParams {
        ModulatorParams {
            t_mod: 1.0,
            v_pi: 3.0,
            dphi0: 0.0,
        }
    }

    #[test]
    fn maximum_at_zero_bias() {
        let p = unit_mzm();
        assert_eq!(transfer_nominal(&p, 0.0, 2.0), 2.0);
    }

    #[test]
    fn minimum_at_half_wave_voltage() {
        let p = unit_mzm();
        let out = transfer_nominal(&p, p.v_pi, 1.0);
        assert!(out.abs() < 1e-15, "got {out}");
    }

    #[test]
    fn half_power_at_quadrature() {
        let p = unit_mzm();
        let out = transfer_nominal(&p, p.v_pi / 2.0, 1.0);
        assert!((out - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pe_reduces_to_nominal_without_shift() {
        let p = ModulatorParams {
            t_mod: 0.8,
            v_pi: 4.2,
            dphi0: 0.3,
        };
        for v in [-5.0, -1.0, 0.0, 0.7, 3.3] {
            let pt = TransferPoint { v_dc: v, i_in: 1.6, dphi_p: 0.0 };
            assert_eq!(transfer_pe(&p, &pt), transfer_nominal(&p, v, 1.6));
        }
    }

    #[test]
    fn pe_periodic_in_two_pi() {
        let p = unit_mzm();
        for v in [0.1, 1.3, 2.9] {
            let shifted = TransferPoint { v_dc: v, i_in: 1.0, dphi_p: 2.0 * std::f64::consts::PI };
            let diff = (transfer_pe(&p, &shifted) - transfer_nominal(&p, v, 1.0)).abs();
            assert!(diff < 1e-14);
        }
    }

    #[test]
    fn quarter_shift_closed_form() {
        let p = unit_mzm();
        let pt = TransferPoint {
            v_dc: p.v_pi / 2.0,
            i_in: 1.0,
            dphi_p: std::f64::consts::FRAC_PI_4,
        };
        let expected = (1.0 + std::f64::consts::FRAC_PI_4.cos()) / 2.0;
        assert!((transfer_pe(&p, &pt) - expected).abs() < 1e-15);
    }

    #[test]
    fn pe_index_unity_without_shift() {
        let p = unit_mzm();
        let pt = TransferPoint { v_dc: 1.0, i_in: 1.0, dphi_p: 0.0 };
        assert_eq!(pe_index(&p, &pt).unwrap(), 1.0);
    }

    #[test]
    fn pe_index_above_and_below_one_within_a_period() {
        // a nonzero shift weakens the attenuation at some bias points and
        // strengthens it at others
        let p = unit_mzm();
        for dphi_p in [0.3, -0.5, 1.2] {
            let (mut above, mut below) = (false, false);
            for j in 0..400 {
                let v_dc = -p.v_pi + 2.0 * p.v_pi * j as f64 / 400.0;
                let pt = TransferPoint { v_dc, i_in: 1.0, dphi_p };
                if let Ok(k) = pe_index(&p, &pt) {
                    above |= k > 1.0;
                    below |= k < 1.0;
                }
            }
            assert!(above && below, "dphi_p={dphi_p}");
        }
    }

    #[test]
    fn pe_index_errors_at_null() {
        let p = unit_mzm();
        let pt = TransferPoint { v_dc: p.v_pi, i_in: 1.0, dphi_p: 0.2 };
        match pe_index(&p, &pt) {
            Err(MzmError::NullOperatingPoint { .. }) => {}
            other => panic!("expected null-operating-point error, got {other:?}"),
        }
    }

    #[test]
    fn curve_preserves_grid_order_and_shift_identity() {
        let p = unit_mzm();
        let grid: Vec<f64> = (0..121).map(|j| -6.0 + 0.1 * j as f64).collect();
        let dphi_p = 0.3;
        let curve = transfer_curve(&p, dphi_p, &grid, 1.0);
        assert_eq!(curve.len(), grid.len());
        // shifted curve equals the nominal one displaced by V_pi*dphi/pi volts
        let dv = p.v_pi * dphi_p / std::f64::consts::PI;
        for (v, i_out) in &curve {
            let nominal = transfer_nominal(&p, v - dv, 1.0);
            assert!((i_out - nominal).abs() < 1e-12, "v={v}");
        }
    }

    proptest! {
        #[test]
        fn output_bounded(
            v_dc in -100.0f64..100.0,
            dphi0 in -6.3f64..6.3,
            dphi_p in -6.3f64..6.3,
            t_mod in 0.05f64..1.0,
            i_in in 0.0f64..1e6,
        ) {
            let p = ModulatorParams { t_mod, v_pi: 3.0, dphi0 };
            let pt = TransferPoint { v_dc, i_in, dphi_p };
            let out = transfer_pe(&p, &pt);
            prop_assert!(out >= 0.0 && out <= t_mod * i_in * (1.0 + 1e-12));
        }

        #[test]
        fn index_times_nominal_is_shifted_output(
            v_dc in -10.0f64..10.0,
            dphi0 in -3.0f64..3.0,
            dphi_p in -3.0f64..3.0,
            i_in in 1e-6f64..1e3,
        ) {
            let p = ModulatorParams { t_mod: 0.85, v_pi: 3.5, dphi0 };
            let pt = TransferPoint { v_dc, i_in, dphi_p };
            if let Ok(k) = pe_index(&p, &pt) {
                let lhs = k * transfer_nominal(&p, v_dc, i_in);
                let rhs = transfer_pe(&p, &pt);
                let scale = lhs.abs().max(rhs.abs()).max(1e-300);
                prop_assert!((lhs - rhs).abs() / scale < 1e-12);
            }
        }

        #[test]
        fn index_invariant_under_input_scaling(
            v_dc in -10.0f64..10.0,
            dphi_p in -3.0f64..3.0,
            scale in 1e-3f64..1e3,
        ) {
            let p = unit_mzm();
            let a = TransferPoint { v_dc, i_in: 1.0, dphi_p };
            let b = TransferPoint { v_dc, i_in: scale, dphi_p };
            let (ka, kb) = (pe_index(&p, &a), pe_index(&p, &b));
            match (ka, kb) {
                (Ok(ka), Ok(kb)) => prop_assert_eq!(ka, kb),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "mismatched results {:?}", other),
            }
        }
    }
}
