//! Steady-state photorefractive response of a lithium-niobate waveguide arm.
//!
//! Uneven irradiation excites carriers out of impurity levels; they migrate
//! (drift, diffusion, bulk photovoltaic transport) and retrap, leaving behind
//! a space-charge field. The field modulates the refractive index through the
//! electro-optic effect:
//!
//! Δn = -½·n₀³·γ_eff·r₃₃·E_sc
//!
//! and the index change accumulates into an optical phase deviation along the
//! arm. Only the saturated (steady-state) response and the single-exponential
//! transient towards it are modelled here; the full carrier-dynamics PDE
//! system is out of scope.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the photorefractive model.
#[derive(Debug, Error, PartialEq)]
pub enum PeError {
    /// Dark and photo conductivity are both zero, so the saturated
    /// space-charge field is undefined.
    #[error("dark and photo conductivity are both zero; saturated field undefined")]
    DegenerateConductivity,
    /// The two arms of a differential pair must share the drive voltage.
    #[error("arms must share the drive voltage (got {0} V and {1} V)")]
    MismatchedVoltage(f64, f64),
    /// A material constant violates its domain.
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
}

/// Lithium-niobate crystal and waveguide constants.
///
/// All constants are SI. The Glass constant `kappa` is treated in A·m/W so
/// that `kappa * alpha * I_ir` is a current density and the photovoltaic
/// field term comes out in V/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Unperturbed refractive index (dimensionless).
    pub n0: f64,
    /// Pockels coefficient r₃₃ (m/V).
    pub r33: f64,
    /// Effective electro-optic overlap coefficient (dimensionless).
    pub gamma_eff: f64,
    /// Dark conductivity σ_d (S/m).
    pub sigma_d: f64,
    /// Glass constant κ (A·m/W).
    pub kappa: f64,
    /// Absorption coefficient α at the irradiation wavelength (1/m).
    pub alpha: f64,
    /// Electronic charge e (C).
    pub e_charge: f64,
    /// Electron mobility μ (m²/V·s).
    pub mu: f64,
    /// Carrier lifetime τ₀ (s).
    pub tau0: f64,
    /// Quantum efficiency η_q of carrier excitation, in (0, 1].
    pub eta_q: f64,
    /// Photon energy hν of the irradiation light (J).
    pub photon_energy: f64,
    /// Relative permittivity ε_r (dimensionless).
    pub eps_r: f64,
    /// Vacuum permittivity ε₀ (F/m).
    pub eps0: f64,
    /// Effective interaction length L of the irradiated waveguide (m).
    pub interaction_len: f64,
    /// Length L_E over which the drive electrodes overlap the waveguide (m).
    pub electrode_len: f64,
    /// Electrode gap d (m); the applied field is V_app / d.
    pub electrode_gap: f64,
    /// Signal wavelength λ (m).
    pub wavelength: f64,
}

impl MaterialParams {
    /// Checks positivity of every constant and `eta_q` ∈ (0, 1].
    pub fn validate(&self) -> Result<(), PeError> {
        let fields = [
            ("n0", self.n0),
            ("r33", self.r33),
            ("gamma_eff", self.gamma_eff),
            ("sigma_d", self.sigma_d),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("e_charge", self.e_charge),
            ("mu", self.mu),
            ("tau0", self.tau0),
            ("eta_q", self.eta_q),
            ("photon_energy", self.photon_energy),
            ("eps_r", self.eps_r),
            ("eps0", self.eps0),
            ("interaction_len", self.interaction_len),
            ("electrode_len", self.electrode_len),
            ("electrode_gap", self.electrode_gap),
            ("wavelength", self.wavelength),
        ];
        for (name, value) in fields {
            if value <= 0.0 || !value.is_finite() {
                return Err(PeError::InvalidParams(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if self.eta_q > 1.0 {
            return Err(PeError::InvalidParams(format!(
                "eta_q must be in (0, 1], got {}",
                self.eta_q
            )));
        }
        let a = self.carrier_grouping();
        if a <= 0.0 || !a.is_finite() {
            return Err(PeError::InvalidParams(format!(
                "carrier grouping e·μ·τ₀·η_q/hν must be finite and > 0, got {a}"
            )));
        }
        Ok(())
    }

    /// Carrier transport grouping a = e·μ·τ₀·η_q / hν (m²/V²).
    pub fn carrier_grouping(&self) -> f64 {
        self.e_charge * self.mu * self.tau0 * self.eta_q / self.photon_energy
    }
}

/// Irradiation and drive state of one interferometer arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmState {
    /// Irradiation intensity on this arm (W/m²), ≥ 0.
    pub i_ir: f64,
    /// Drive voltage applied across the electrode gap (V).
    pub v_app: f64,
}

/// Photoconductivity σ_ph = e·μ·τ₀·η_q·α·I_ir / hν (S/m).
///
/// Linear in the irradiation intensity; zero iff `i_ir` is zero.
pub fn photoconductivity(m: &MaterialParams, i_ir: f64) -> f64 {
    m.carrier_grouping() * m.alpha * i_ir
}

fn total_conductivity(m: &MaterialParams, i_ir: f64) -> Result<f64, PeError> {
    let sigma = m.sigma_d + photoconductivity(m, i_ir);
    if sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(PeError::DegenerateConductivity)
    }
}

/// Saturated space-charge field (V/m):
///
/// E_s = σ_ph/(σ_d+σ_ph)·E_app + κ·α/(σ_d+σ_ph)·I_ir,  E_app = V_app/d
pub fn saturated_field(m: &MaterialParams, arm: &ArmState) -> Result<f64, PeError> {
    let sigma = total_conductivity(m, arm.i_ir)?;
    let sigma_ph = photoconductivity(m, arm.i_ir);
    let e_app = arm.v_app / m.electrode_gap;
    Ok(sigma_ph / sigma * e_app + m.kappa * m.alpha / sigma * arm.i_ir)
}

/// Space-charge field at time `t` relaxing from `e_init` towards `e_s`:
///
/// E_sc(t) = (E_s − E_init)·(1 − exp(−(σ_d+σ_ph)·t/(ε_r·ε₀))) + E_init
///
/// The dielectric relaxation time constant is ε_r·ε₀/(σ_d+σ_ph), so the
/// irradiation intensity sets how fast the field saturates.
pub fn field_transient(m: &MaterialParams, i_ir: f64, e_s: f64, e_init: f64, t: f64) -> f64 {
    let sigma = m.sigma_d + photoconductivity(m, i_ir);
    let rate = sigma / (m.eps_r * m.eps0);
    (e_s - e_init) * (1.0 - (-rate * t).exp()) + e_init
}

/// Electro-optic index change Δn = −½·n₀³·γ_eff·r₃₃·E_sc.
pub fn index_change(m: &MaterialParams, e_sc: f64) -> f64 {
    -0.5 * m.n0.powi(3) * m.gamma_eff * m.r33 * e_sc
}

/// Saturated phase deviation of one arm (rad).
///
/// The photovoltaic space-charge component κ·α·I_ir/(σ_d+σ_ph) builds over
/// the full interaction length L, while the drift component
/// σ_ph·E_app/(σ_d+σ_ph) exists only under the electrodes (length L_E) and
/// acts with the opposite sign along the crystal axis:
///
/// Δφ_d = (2π/λ)·[Δn(E_pv)·L − Δn(E_drift)·L_E]
///
/// The phase is zero without irradiation and flips sign once the drive term
/// overtakes the photovoltaic one, at hν·κ·L = e·μ·τ₀·η_q·L_E·E_app.
pub fn arm_phase_deviation(m: &MaterialParams, arm: &ArmState) -> Result<f64, PeError> {
    let sigma = total_conductivity(m, arm.i_ir)?;
    let sigma_ph = photoconductivity(m, arm.i_ir);
    let e_app = arm.v_app / m.electrode_gap;
    let e_pv = m.kappa * m.alpha / sigma * arm.i_ir;
    let e_drift = sigma_ph / sigma * e_app;
    let wavenumber = 2.0 * std::f64::consts::PI / m.wavelength;
    Ok(wavenumber
        * (index_change(m, e_pv) * m.interaction_len
            - index_change(m, e_drift) * m.electrode_len))
}

/// Single-fraction closed form of [`arm_phase_deviation`]:
///
/// Δφ_d = −α·π·n₀³·r₃₃·γ_eff·I_ir·(κ·L − a·L_E·E_app) / (λ·(σ_d + σ_ph))
///
/// with a = e·μ·τ₀·η_q/hν. Algebraically identical to the composed route;
/// kept as an independent evaluation path for cross-checking.
pub fn arm_phase_deviation_closed(m: &MaterialParams, arm: &ArmState) -> Result<f64, PeError> {
    let sigma = total_conductivity(m, arm.i_ir)?;
    let a = m.carrier_grouping();
    let e_app = arm.v_app / m.electrode_gap;
    let numerator = m.alpha
        * std::f64::consts::PI
        * m.n0.powi(3)
        * m.r33
        * m.gamma_eff
        * arm.i_ir
        * (m.kappa * m.interaction_len - a * m.electrode_len * e_app);
    Ok(-numerator / (m.wavelength * sigma))
}

/// Differential phase deviation Δφ_p = Δφ_d(arm1) − Δφ_d(arm2) (rad).
///
/// The drive is push-pull: both arms share one voltage but see opposite
/// field polarity, so the photovoltaic contributions subtract while the
/// drive contributions add. Errors if the arms carry different voltages.
pub fn differential_phase(
    m: &MaterialParams,
    arm1: &ArmState,
    arm2: &ArmState,
) -> Result<f64, PeError> {
    if arm1.v_app != arm2.v_app {
        return Err(PeError::MismatchedVoltage(arm1.v_app, arm2.v_app));
    }
    let pulled = ArmState {
        i_ir: arm2.i_ir,
        v_app: -arm2.v_app,
    };
    Ok(arm_phase_deviation(m, arm1)? - arm_phase_deviation(m, &pulled)?)
}

/// Grouped closed form of [`differential_phase`]:
///
/// Δφ_p = −(α·π·n₀³·r₃₃·γ_eff)/(λ·σ_d) · [κ·L·(f₁ − f₂) − (a·L_E/d)·V·(f₁ + f₂)]
///
/// with f_j = I_ir_j / (1 + (a·α/σ_d)·I_ir_j). Requires σ_d > 0. Kept as an
/// independent evaluation path for cross-checking.
pub fn differential_phase_grouped(
    m: &MaterialParams,
    arm1: &ArmState,
    arm2: &ArmState,
) -> Result<f64, PeError> {
    if arm1.v_app != arm2.v_app {
        return Err(PeError::MismatchedVoltage(arm1.v_app, arm2.v_app));
    }
    if m.sigma_d <= 0.0 || m.sigma_d.is_nan() {
        return Err(PeError::DegenerateConductivity);
    }
    let a = m.carrier_grouping();
    let f = |i_ir: f64| i_ir / (1.0 + a * m.alpha / m.sigma_d * i_ir);
    let f1 = f(arm1.i_ir);
    let f2 = f(arm2.i_ir);
    let prefactor = m.alpha * std::f64::consts::PI * m.n0.powi(3) * m.r33 * m.gamma_eff
        / (m.wavelength * m.sigma_d);
    let bracket = m.kappa * m.interaction_len * (f1 - f2)
        - a * m.electrode_len / m.electrode_gap * arm1.v_app * (f1 + f2);
    Ok(-prefactor * bracket)
}
