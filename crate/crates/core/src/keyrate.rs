//! Asymptotic secret key rate of GMCS-CVQKD with homodyne detection and
//! reverse reconciliation under collective attacks.
//!
//! All noises are in shot-noise units referred to the channel input:
//!
//! χ_line = 1/T + ε − 1
//! χ_hom  = [(1 − η) + v_el] / η
//! χ_tot  = χ_line + χ_hom / T
//!
//! K = f·(β·I_AB − χ_BE) with I_AB = ½·log₂((V + χ_tot)/(1 + χ_tot)),
//! V = V_A + 1, and χ_BE the Holevo bound evaluated from the symplectic
//! spectra of the shared and measurement-conditioned Gaussian states.
//!
//! # Symplectic spectrum conventions
//!
//! The quadratic invariants A = Δ(γ_AB) and B = det γ_AB of the two-mode
//! state satisfy ν² = ½(A ± √(A²−4B)) for the symplectic eigenvalues ν, so
//! the roots of the quadratic are the *squares* of the spectrum. Reading the
//! roots directly as eigenvalues ("literal" convention) violates the
//! Williamson product identity ν₁·ν₂ = √(det γ) whenever det γ ≠ 1, while
//! pointwise ν ≥ 1 cannot separate the two readings (s ≥ 1 ⟺ √s ≥ 1).
//! [`audit_eigenvalue_convention`] checks both conventions against both
//! identities on a parameter grid; the square-root convention is the one
//! adopted throughout, and every report records it.

use crate::gmcs_channel::ChannelParams;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Discriminants below this are treated as complex (error); tiny negatives
/// above it are rounding residue and clamp to zero.
const DISCRIMINANT_FLOOR: f64 = -1e-9;
/// Symplectic eigenvalues below 1 − this tolerance are unphysical.
const LAMBDA_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum KeyRateError {
    /// A symplectic discriminant went negative beyond rounding residue; the
    /// parameter combination does not describe a Gaussian state.
    #[error("complex symplectic spectrum: discriminant {discriminant:.6e} < {floor:.0e}")]
    ComplexEigenvalue { discriminant: f64, floor: f64 },
    /// An eigenvalue dropped below the vacuum limit.
    #[error("unphysical symplectic eigenvalue {lambda} (must be >= 1)")]
    UnphysicalEigenvalue { lambda: f64 },
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
}

/// Noise budget referred to the channel input (SNU).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBreakdown {
    /// Channel-added noise χ_line.
    pub chi_line: f64,
    /// Detection-added noise χ_hom (referred to Bob's input).
    pub chi_hom: f64,
    /// Total noise χ_tot = χ_line + χ_hom/T.
    pub chi_tot: f64,
}

/// How the roots of the symplectic quadratics are mapped to eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenvalueConvention {
    /// Roots taken as the eigenvalues directly.
    Literal,
    /// Roots taken as the squared eigenvalues (adopted).
    Squared,
}

/// Convention adopted by [`holevo_detail`] and everything above it.
pub const ADOPTED_CONVENTION: EigenvalueConvention = EigenvalueConvention::Squared;

/// Intermediate quantities of the Holevo-bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolevoDetail {
    /// Quadratic invariant A of the shared state.
    pub coeff_a: f64,
    /// Quadratic invariant B = det γ of the shared state.
    pub coeff_b: f64,
    /// Quadratic invariant C of the homodyne-conditioned state.
    pub coeff_c: f64,
    /// Quadratic invariant D of the homodyne-conditioned state.
    pub coeff_d: f64,
    /// Symplectic eigenvalues λ₁..λ₅ (λ₅ = 1 for homodyne detection).
    pub lambdas: [f64; 5],
    /// Holevo bound χ_BE (bits/symbol).
    pub chi_be: f64,
    /// Eigenvalue convention in force.
    pub convention: EigenvalueConvention,
}

/// Secret key rate with every intermediate needed for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    /// Secret key rate K = f·(β·I_AB − χ_BE) (bit/s); negative in the
    /// insecure regime, preserved unclamped.
    pub key_rate: f64,
    /// Mutual information I_AB (bit/symbol).
    pub i_ab: f64,
    /// Holevo bound χ_BE (bit/symbol).
    pub chi_be: f64,
    /// Symplectic eigenvalues λ₁..λ₅.
    pub lambdas: [f64; 5],
    /// Noise budget.
    pub noise: NoiseBreakdown,
    /// Parameters the report was computed from.
    pub params_used: ChannelParams,
    /// Eigenvalue convention recorded for audit.
    pub convention: EigenvalueConvention,
}

fn check_preconditions(c: &ChannelParams) -> Result<(), KeyRateError> {
    // T may exceed 1 here: biased estimates land there and must surface as
    // unphysical spectra, not as input rejection
    let ok = c.t > 0.0
        && c.t.is_finite()
        && c.v_a > 0.0
        && c.eps >= 0.0
        && c.eta > 0.0
        && c.eta <= 1.0
        && c.v_el >= 0.0
        && c.beta > 0.0
        && c.beta < 1.0
        && c.f_rep > 0.0;
    if ok {
        Ok(())
    } else {
        Err(KeyRateError::InvalidParams(format!(
            "need T > 0, V_A > 0, eps >= 0, eta in (0,1], v_el >= 0, beta in (0,1), f > 0; got {c:?}"
        )))
    }
}

/// Channel, detection, and total noise for the given parameters.
pub fn noise_breakdown(c: &ChannelParams) -> NoiseBreakdown {
    let chi_line = 1.0 / c.t + c.eps - 1.0;
    let chi_hom = ((1.0 - c.eta) + c.v_el) / c.eta;
    NoiseBreakdown {
        chi_line,
        chi_hom,
        chi_tot: chi_line + chi_hom / c.t,
    }
}

/// Alice-Bob mutual information I_AB = ½·log₂((V + χ_tot)/(1 + χ_tot)).
pub fn mutual_information(c: &ChannelParams) -> f64 {
    let v = c.v_a + 1.0;
    let chi_tot = noise_breakdown(c).chi_tot;
    0.5 * ((v + chi_tot) / (1.0 + chi_tot)).log2()
}

/// Von Neumann entropy term G(x) = (x+1)·log₂(x+1) − x·log₂x, with
/// G(0) = 0 by the x·log₂x → 0 limit.
pub fn entropy_g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

fn quadratic_roots(coeff_sum: f64, coeff_prod: f64) -> Result<(f64, f64), KeyRateError> {
    let disc = coeff_sum * coeff_sum - 4.0 * coeff_prod;
    if disc < DISCRIMINANT_FLOOR {
        return Err(KeyRateError::ComplexEigenvalue {
            discriminant: disc,
            floor: DISCRIMINANT_FLOOR,
        });
    }
    let root = disc.max(0.0).sqrt();
    Ok((0.5 * (coeff_sum + root), 0.5 * (coeff_sum - root)))
}

fn to_lambda(s: f64, convention: EigenvalueConvention) -> f64 {
    match convention {
        EigenvalueConvention::Literal => s,
        EigenvalueConvention::Squared => s.max(0.0).sqrt(),
    }
}

fn invariants(c: &ChannelParams) -> (f64, f64, f64, f64, NoiseBreakdown) {
    let v = c.v_a + 1.0;
    let noise = noise_breakdown(c);
    let t = c.t;
    let coeff_a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + noise.chi_line).powi(2);
    let coeff_b = (t * (v * noise.chi_line + 1.0)).powi(2);
    let sqrt_b = coeff_b.sqrt();
    let denom = t * (v + noise.chi_tot);
    let coeff_c =
        (coeff_a * noise.chi_hom + v * sqrt_b + t * (v + noise.chi_line)) / denom;
    let coeff_d = sqrt_b * (v + sqrt_b * noise.chi_hom) / denom;
    (coeff_a, coeff_b, coeff_c, coeff_d, noise)
}

fn holevo_with_convention(
    c: &ChannelParams,
    convention: EigenvalueConvention,
) -> Result<HolevoDetail, KeyRateError> {
    check_preconditions(c)?;
    let (coeff_a, coeff_b, coeff_c, coeff_d, _noise) = invariants(c);
    let (s1, s2) = quadratic_roots(coeff_a, coeff_b)?;
    let (s3, s4) = quadratic_roots(coeff_c, coeff_d)?;
    let lambdas = [
        to_lambda(s1, convention),
        to_lambda(s2, convention),
        to_lambda(s3, convention),
        to_lambda(s4, convention),
        1.0,
    ];
    for &lambda in &lambdas {
        if lambda < 1.0 - LAMBDA_TOLERANCE {
            return Err(KeyRateError::UnphysicalEigenvalue { lambda });
        }
    }
    let g = |lambda: f64| entropy_g(((lambda - 1.0) / 2.0).max(0.0));
    let chi_be = g(lambdas[0]) + g(lambdas[1]) - g(lambdas[2]) - g(lambdas[3]) - g(lambdas[4]);
    Ok(HolevoDetail {
        coeff_a,
        coeff_b,
        coeff_c,
        coeff_d,
        lambdas,
        chi_be,
        convention,
    })
}

/// Holevo bound with all intermediates, under the adopted convention.
pub fn holevo_detail(c: &ChannelParams) -> Result<HolevoDetail, KeyRateError> {
    holevo_with_convention(c, ADOPTED_CONVENTION)
}

/// Holevo bound χ_BE (bits/symbol).
pub fn holevo_bound(c: &ChannelParams) -> Result<f64, KeyRateError> {
    Ok(holevo_detail(c)?.chi_be)
}

/// Secret key rate K = f·(β·I_AB − χ_BE) with full audit trail.
pub fn secret_key_rate(c: &ChannelParams) -> Result<KeyRateReport, KeyRateError> {
    let detail = holevo_detail(c)?;
    let i_ab = mutual_information(c);
    Ok(KeyRateReport {
        key_rate: c.f_rep * (c.beta * i_ab - detail.chi_be),
        i_ab,
        chi_be: detail.chi_be,
        lambdas: detail.lambdas,
        noise: noise_breakdown(c),
        params_used: *c,
        convention: detail.convention,
    })
}

/// Verdict of the convention audit for one reading of the quadratic roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionChecks {
    /// Every eigenvalue at least 1 − 1e−6 on the grid.
    pub pointwise_physical: bool,
    /// λ₁·λ₂ = √(det γ) everywhere on the grid (Williamson identity).
    pub product_identity: bool,
}

/// Result of running both conventions over a transmittance grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionAudit {
    pub literal: ConventionChecks,
    pub squared: ConventionChecks,
    pub points_checked: usize,
    /// Convention that satisfied both identities (the adopted one).
    pub adopted: EigenvalueConvention,
}

/// Evaluates both eigenvalue conventions across `t_values` at the remaining
/// parameters of `base` and records which one is physically consistent.
pub fn audit_eigenvalue_convention(base: &ChannelParams, t_values: &[f64]) -> ConventionAudit {
    let mut literal = ConventionChecks {
        pointwise_physical: true,
        product_identity: true,
    };
    let mut squared = literal;
    let mut points = 0;
    for &t in t_values {
        let mut c = *base;
        c.t = t;
        let sqrt_det = invariants(&c).1.sqrt();
        for (convention, checks) in [
            (EigenvalueConvention::Literal, &mut literal),
            (EigenvalueConvention::Squared, &mut squared),
        ] {
            match holevo_with_convention(&c, convention) {
                Ok(detail) => {
                    let product = detail.lambdas[0] * detail.lambdas[1];
                    if (product - sqrt_det).abs() > 1e-9 * sqrt_det.max(1.0) {
                        checks.product_identity = false;
                    }
                }
                Err(_) => {
                    checks.pointwise_physical = false;
                }
            }
        }
        points += 1;
    }
    let adopted = if squared.pointwise_physical && squared.product_identity {
        EigenvalueConvention::Squared
    } else if literal.pointwise_physical && literal.product_identity {
        EigenvalueConvention::Literal
    } else {
        // neither satisfies both; stay with the analytic choice
        ADOPTED_CONVENTION
    };
    ConventionAudit {
        literal,
        squared,
        points_checked: points,
        adopted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_channel(t: f64) -> ChannelParams {
        ChannelParams {
            v_a: 4.0,
            t,
            eps: 0.05,
            eta: 0.6,
            v_el: 0.01,
            n0: 1.0,
            beta: 0.95,
            f_rep: 3.0e8,
        }
    }

    fn ideal_channel(t: f64, eps: f64) -> ChannelParams {
        ChannelParams {
            v_a: 4.0,
            t,
            eps,
            eta: 1.0,
            v_el: 0.0,
            n0: 1.0,
            beta: 0.95,
            f_rep: 3.0e8,
        }
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn noise_breakdown_ideal_system_is_zero() {
        let n = noise_breakdown(&ideal_channel(1.0, 0.0));
        assert_eq!(n.chi_line, 0.0);
        assert_eq!(n.chi_hom, 0.0);
        assert_eq!(n.chi_tot, 0.0);
    }

    #[test]
    fn noise_breakdown_reference_values() {
        let n = noise_breakdown(&fig3_channel(0.5));
        assert!(rel_err(n.chi_hom, 0.41 / 0.6) < 1e-14);
        assert!(rel_err(n.chi_line, 1.05) < 1e-14);
        assert!(rel_err(n.chi_tot, 1.05 + (0.41 / 0.6) / 0.5) < 1e-14);
    }

    #[test]
    fn mutual_information_reference_values() {
        // noiseless: I_AB = 0.5*log2(V) = 0.5*log2(5)
        let i = mutual_information(&ideal_channel(1.0, 0.0));
        assert!(rel_err(i, 1.160964047443681) < 1e-12);
        // modulation switched off: I_AB -> 0
        let mut c = ideal_channel(1.0, 0.0);
        c.v_a = 1e-12;
        assert!(mutual_information(&c) < 1e-11);
        // spreadsheet value at the reference point
        let i = mutual_information(&fig3_channel(0.5));
        assert!(rel_err(i, 0.5590907131741569) < 1e-12, "got {i}");
    }

    #[test]
    fn entropy_g_basics() {
        assert_eq!(entropy_g(0.0), 0.0);
        assert!(entropy_g(1e-18) >= 0.0);
        let mut last = 0.0;
        for j in 1..=1000 {
            let x = j as f64 * 0.01;
            let g = entropy_g(x);
            assert!(g > last, "G must increase, x={x}");
            last = g;
        }
    }

    #[test]
    fn holevo_reference_point() {
        let d = holevo_detail(&fig3_channel(0.5)).unwrap();
        assert!(rel_err(d.lambdas[0], 3.012384255951436) < 1e-12);
        assert!(rel_err(d.lambdas[1], 1.0373842559514357) < 1e-12);
        assert!(rel_err(d.lambdas[2], 2.424134113958022) < 1e-12);
        assert!(rel_err(d.lambdas[3], 1.0115530277163096) < 1e-12);
        assert_eq!(d.lambdas[4], 1.0);
        assert!(rel_err(d.chi_be, 0.4124359200192051) < 1e-11, "{}", d.chi_be);
        assert_eq!(d.convention, EigenvalueConvention::Squared);
    }

    #[test]
    fn holevo_vanishes_for_perfect_channel() {
        // T = 1, eps = 0: Eve has no channel to tap, even with detector noise
        let exact = holevo_bound(&ideal_channel(1.0, 0.0)).unwrap();
        assert_eq!(exact, 0.0);
        let mut c = fig3_channel(1.0);
        c.eps = 0.0;
        let with_detector = holevo_bound(&c).unwrap();
        assert!(with_detector.abs() < 1e-12, "got {with_detector}");
        // approach from below
        let near = holevo_bound(&ideal_channel(1.0 - 1e-8, 0.0)).unwrap();
        assert!(near.abs() < 1e-6, "got {near}");
    }

    #[test]
    fn secret_key_rate_reference_points() {
        let r = secret_key_rate(&fig3_channel(0.5)).unwrap();
        assert!(rel_err(r.key_rate, 35_610_077.24887319) < 1e-9, "{}", r.key_rate);
        let r1 = secret_key_rate(&fig3_channel(1.0)).unwrap();
        assert!(r1.key_rate > 0.0);
        assert!(rel_err(r1.key_rate, 164_049_611.61851117) < 1e-9);
    }

    #[test]
    fn key_rate_linear_in_repetition_frequency() {
        let mut c = fig3_channel(0.5);
        let base = secret_key_rate(&c).unwrap().key_rate;
        c.f_rep *= 2.0;
        let doubled = secret_key_rate(&c).unwrap().key_rate;
        assert!(rel_err(doubled, 2.0 * base) < 1e-12);
    }

    #[test]
    fn key_rate_negative_when_holevo_dominates() {
        // deep loss with heavy excess noise: beta*I_AB < chi_BE
        let mut c = fig3_channel(0.05);
        c.eps = 0.3;
        let r = secret_key_rate(&c).unwrap();
        assert!(r.key_rate < 0.0, "expected insecure regime, K={}", r.key_rate);
    }

    #[test]
    fn key_rate_monotone_in_eps_and_t() {
        // non-increasing in eps on [0, 0.1]
        let mut last = f64::INFINITY;
        for j in 0..=20 {
            let mut c = fig3_channel(0.5);
            c.eps = j as f64 * 0.005;
            let k = secret_key_rate(&c).unwrap().key_rate;
            assert!(k <= last + 1e-9, "eps={} k={k} last={last}", c.eps);
            last = k;
        }
        // non-decreasing in T on (0, 1]
        let mut last = f64::NEG_INFINITY;
        for j in 1..=20 {
            let c = fig3_channel(j as f64 / 20.0);
            let k = secret_key_rate(&c).unwrap().key_rate;
            assert!(k >= last - 1e-9, "T={} k={k} last={last}", c.t);
            last = k;
        }
    }

    #[test]
    fn chi_be_nonnegative_and_lambdas_physical_on_grid() {
        for j in 1..=20 {
            for eps in [0.0, 0.01, 0.03, 0.05, 0.07, 0.1] {
                let mut c = fig3_channel(j as f64 / 20.0);
                c.eps = eps;
                let d = holevo_detail(&c).unwrap();
                assert!(d.chi_be >= 0.0, "chi_be < 0 at T={} eps={eps}", c.t);
                for lam in d.lambdas {
                    assert!(lam >= 1.0 - 1e-6);
                }
            }
        }
    }

    #[test]
    fn unphysical_transmittance_raises_error() {
        // T > 1 mimics a biased estimate beyond the physical range
        let mut c = fig3_channel(1.4);
        c.eps = 0.05 / 1.4;
        match secret_key_rate(&c) {
            Err(KeyRateError::UnphysicalEigenvalue { .. }) => {}
            other => panic!("expected unphysical eigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn convention_audit_adopts_squared() {
        let t_values: Vec<f64> = (1..=20).map(|j| j as f64 / 20.0).collect();
        let audit = audit_eigenvalue_convention(&fig3_channel(0.5), &t_values);
        assert_eq!(audit.adopted, EigenvalueConvention::Squared);
        assert!(audit.squared.pointwise_physical);
        assert!(audit.squared.product_identity);
        // the literal reading cannot satisfy the Williamson product identity
        assert!(!audit.literal.product_identity);
        assert_eq!(audit.points_checked, 20);
    }

    #[test]
    fn report_serializes_with_convention() {
        let r = secret_key_rate(&fig3_channel(0.5)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"convention\":\"squared\""));
    }
}
