//! Nominal, practical, and estimated key rates over parameter grids.
//!
//! At a grid point (T, k, ε) three rates are compared:
//!
//! * `k_nominal`   — rate at (V_A, T, ε): the system without any index shift
//! * `k_practical` — rate at (k·V_A, T, ε): what the physical system, whose
//!   modulation variance the index k has rescaled, actually delivers
//! * `k_estimated` — rate at (V_A, k·T, ε/k): what parties relying on the
//!   biased estimates compute
//!
//! For k > 1 the biased parameters look better than reality, so the
//! estimated rate exceeds the practical one (overestimation, the exploitable
//! side); for k < 1 the estimate falls below it. The gap closes exactly at
//! k = 1. Rates are compared unclamped; display clamping is left to
//! serialization layers.

use crate::gmcs_channel::ChannelParams;
use crate::keyrate::{secret_key_rate, KeyRateError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("need at least 2 distinct PE indices above 1 at some fixed (T, eps); got {0}")]
    InsufficientGrid(usize),
}

/// Cartesian sweep over (T, k, ε).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGrid {
    pub t_values: Vec<f64>,
    pub k_values: Vec<f64>,
    pub eps_values: Vec<f64>,
    /// Source of V_A, η, v_el, β, f; its own T and ε are overridden per point.
    pub base: ChannelParams,
}

impl ScenarioGrid {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.t_values.is_empty() || self.k_values.is_empty() || self.eps_values.is_empty() {
            return Err(ScenarioError::InvalidGrid(
                "t_values, k_values, eps_values must all be nonempty".into(),
            ));
        }
        if let Some(k) = self.k_values.iter().find(|&&k| k <= 0.0 || k.is_nan()) {
            return Err(ScenarioError::InvalidGrid(format!(
                "PE indices must be > 0, got {k}"
            )));
        }
        if let Some(t) = self.t_values.iter().find(|&&t| t <= 0.0 || t.is_nan()) {
            return Err(ScenarioError::InvalidGrid(format!(
                "transmittances must be > 0, got {t}"
            )));
        }
        if let Some(e) = self.eps_values.iter().find(|&&e| e < 0.0 || e.is_nan()) {
            return Err(ScenarioError::InvalidGrid(format!(
                "excess noises must be >= 0, got {e}"
            )));
        }
        Ok(())
    }
}

/// One evaluated grid point. Legs that hit a key-rate error stay `None` and
/// the row is marked partial in `status`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub t: f64,
    pub k: f64,
    pub eps: f64,
    pub k_nominal: Option<f64>,
    pub k_practical: Option<f64>,
    pub k_estimated: Option<f64>,
    /// K_practical − K_estimated when both legs computed.
    pub gap: Option<f64>,
    /// "ok" or a `leg: error` list.
    pub status: String,
}

impl ScenarioRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn leg(c: &ChannelParams) -> Result<f64, KeyRateError> {
    Ok(secret_key_rate(c)?.key_rate)
}

/// Computes the three rates at one grid point.
pub fn evaluate_point(base: &ChannelParams, t: f64, k: f64, eps: f64) -> ScenarioRow {
    let mut nominal = *base;
    nominal.t = t;
    nominal.eps = eps;
    let mut practical = nominal;
    practical.v_a = k * base.v_a;
    let mut estimated = nominal;
    estimated.t = k * t;
    estimated.eps = eps / k;

    let mut failures = Vec::new();
    let mut run = |name: &str, c: &ChannelParams| match leg(c) {
        Ok(rate) => Some(rate),
        Err(e) => {
            failures.push(format!("{name}: {e}"));
            None
        }
    };
    let k_nominal = run("nominal", &nominal);
    let k_practical = run("practical", &practical);
    let k_estimated = run("estimated", &estimated);
    let gap = match (k_practical, k_estimated) {
        (Some(p), Some(e)) => Some(p - e),
        _ => None,
    };
    let status = if failures.is_empty() {
        "ok".to_string()
    } else {
        failures.join("; ")
    };
    ScenarioRow {
        t,
        k,
        eps,
        k_nominal,
        k_practical,
        k_estimated,
        gap,
        status,
    }
}

/// Cartesian-product evaluation in deterministic T-major order
/// (T outer, then k, then ε). Rows with key-rate errors are kept, marked.
pub fn sweep(grid: &ScenarioGrid) -> Result<Vec<ScenarioRow>, ScenarioError> {
    grid.validate()?;
    let mut rows =
        Vec::with_capacity(grid.t_values.len() * grid.k_values.len() * grid.eps_values.len());
    for &t in &grid.t_values {
        for &k in &grid.k_values {
            for &eps in &grid.eps_values {
                rows.push(evaluate_point(&grid.base, t, k, eps));
            }
        }
    }
    Ok(rows)
}

/// A gap-ordering violation at two adjacent indices of one (T, ε) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapViolation {
    pub t: f64,
    pub eps: f64,
    pub k_from: f64,
    pub k_to: f64,
    pub gap_from: f64,
    pub gap_to: f64,
    /// "above_one" or "below_one".
    pub branch: String,
}

/// Summary of the |gap|-vs-k ordering across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapMonotonicityReport {
    /// (T, ε) groups with at least two qualifying points on some branch.
    pub groups_checked: usize,
    /// Points whose gap sign disagreed with sign(1 − k).
    pub sign_mismatches: usize,
    pub violations: Vec<GapViolation>,
}

impl GapMonotonicityReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.sign_mismatches == 0
    }
}

/// Verifies that |gap| grows away from k = 1: non-decreasing in k on the
/// k > 1 branch, non-increasing in k on the k < 1 branch, with
/// sign(gap) = sign(1 − k) pointwise.
pub fn gap_monotonicity_report(
    rows: &[ScenarioRow],
) -> Result<GapMonotonicityReport, ScenarioError> {
    let mut groups: BTreeMap<(u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        if let Some(gap) = row.gap {
            groups
                .entry((row.t.to_bits(), row.eps.to_bits()))
                .or_default()
                .push((row.k, gap));
        }
    }
    let mut qualifying = 0usize;
    let mut groups_checked = 0usize;
    let mut sign_mismatches = 0usize;
    let mut violations = Vec::new();
    let slack = 1e-9;
    for ((t_bits, eps_bits), mut points) in groups {
        let (t, eps) = (f64::from_bits(t_bits), f64::from_bits(eps_bits));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        let above: Vec<_> = points.iter().copied().filter(|&(k, _)| k > 1.0).collect();
        let below: Vec<_> = points.iter().copied().filter(|&(k, _)| k < 1.0).collect();
        qualifying = qualifying.max(above.len());
        if above.len() < 2 && below.len() < 2 {
            continue;
        }
        groups_checked += 1;
        for &(k, gap) in &points {
            if k != 1.0 && gap.signum() != (1.0 - k).signum() && gap != 0.0 {
                sign_mismatches += 1;
            }
        }
        // k > 1: |gap| must not shrink as k grows
        for pair in above.windows(2) {
            let ((k_from, g_from), (k_to, g_to)) = (pair[0], pair[1]);
            if g_to.abs() < g_from.abs() * (1.0 - slack) {
                violations.push(GapViolation {
                    t,
                    eps,
                    k_from,
                    k_to,
                    gap_from: g_from,
                    gap_to: g_to,
                    branch: "above_one".into(),
                });
            }
        }
        // k < 1: |gap| must not grow as k approaches 1
        for pair in below.windows(2) {
            let ((k_from, g_from), (k_to, g_to)) = (pair[0], pair[1]);
            if g_to.abs() > g_from.abs() * (1.0 + slack) {
                violations.push(GapViolation {
                    t,
                    eps,
                    k_from,
                    k_to,
                    gap_from: g_from,
                    gap_to: g_to,
                    branch: "below_one".into(),
                });
            }
        }
    }
    if groups_checked == 0 {
        return Err(ScenarioError::InsufficientGrid(qualifying));
    }
    Ok(GapMonotonicityReport {
        groups_checked,
        sign_mismatches,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_base() -> ChannelParams {
        ChannelParams {
            v_a: 4.0,
            t: 0.5,
            eps: 0.05,
            eta: 0.6,
            v_el: 0.01,
            n0: 1.0,
            beta: 0.95,
            f_rep: 3.0e8,
        }
    }

    #[test]
    fn unit_index_collapses_all_three_rates() {
        let row = evaluate_point(&fig3_base(), 0.5, 1.0, 0.05);
        assert!(row.is_ok());
        let (n, p, e) = (
            row.k_nominal.unwrap(),
            row.k_practical.unwrap(),
            row.k_estimated.unwrap(),
        );
        assert_eq!(n, p);
        assert_eq!(n, e);
        assert_eq!(row.gap.unwrap(), 0.0);
    }

    #[test]
    fn index_above_one_overestimates() {
        // biased parameters look better than reality: estimated > practical
        let row = evaluate_point(&fig3_base(), 0.5, 1.2, 0.05);
        assert!(row.is_ok());
        assert!(row.k_estimated.unwrap() > row.k_practical.unwrap());
        assert!(row.gap.unwrap() < 0.0);
    }

    #[test]
    fn index_below_one_underestimates() {
        let row = evaluate_point(&fig3_base(), 0.5, 0.8, 0.05);
        assert!(row.is_ok());
        assert!(row.k_estimated.unwrap() < row.k_practical.unwrap());
        assert!(row.gap.unwrap() > 0.0);
    }

    #[test]
    fn biased_transmittance_beyond_one_marks_row_partial() {
        let row = evaluate_point(&fig3_base(), 0.9, 1.2, 0.05);
        assert!(!row.is_ok());
        assert!(row.k_estimated.is_none());
        assert!(row.gap.is_none());
        assert!(row.status.contains("estimated"));
        // the defined legs are still reported
        assert!(row.k_nominal.is_some());
        assert!(row.k_practical.is_some());
    }

    #[test]
    fn degenerate_grid_equals_single_point() {
        let grid = ScenarioGrid {
            t_values: vec![0.5],
            k_values: vec![1.2],
            eps_values: vec![0.05],
            base: fig3_base(),
        };
        let rows = sweep(&grid).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0], evaluate_point(&fig3_base(), 0.5, 1.2, 0.05));
    }

    #[test]
    fn sweep_order_is_t_major() {
        let grid = ScenarioGrid {
            t_values: vec![0.3, 0.6],
            k_values: vec![0.9, 1.1],
            eps_values: vec![0.03, 0.05],
            base: fig3_base(),
        };
        let rows = sweep(&grid).unwrap();
        let coords: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.t, r.k, r.eps)).collect();
        assert_eq!(
            coords,
            vec![
                (0.3, 0.9, 0.03),
                (0.3, 0.9, 0.05),
                (0.3, 1.1, 0.03),
                (0.3, 1.1, 0.05),
                (0.6, 0.9, 0.03),
                (0.6, 0.9, 0.05),
                (0.6, 1.1, 0.03),
                (0.6, 1.1, 0.05),
            ]
        );
    }

    #[test]
    fn empty_grid_rejected() {
        let grid = ScenarioGrid {
            t_values: vec![],
            k_values: vec![1.0],
            eps_values: vec![0.05],
            base: fig3_base(),
        };
        assert!(matches!(sweep(&grid), Err(ScenarioError::InvalidGrid(_))));
    }

    #[test]
    fn gap_grows_away_from_unit_index() {
        let grid = ScenarioGrid {
            t_values: vec![0.5],
            k_values: vec![1.1, 1.2, 1.3],
            eps_values: vec![0.05],
            base: fig3_base(),
        };
        let rows = sweep(&grid).unwrap();
        let report = gap_monotonicity_report(&rows).unwrap();
        assert!(report.clean(), "{report:?}");
        assert_eq!(report.groups_checked, 1);
    }

    #[test]
    fn below_one_branch_checked_with_reversed_ordering() {
        let grid = ScenarioGrid {
            t_values: vec![0.5],
            k_values: vec![0.8, 0.9],
            eps_values: vec![0.05],
            base: fig3_base(),
        };
        let rows = sweep(&grid).unwrap();
        let report = gap_monotonicity_report(&rows).unwrap();
        assert!(report.clean(), "{report:?}");
        // both gaps positive on this branch
        for row in &rows {
            assert!(row.gap.unwrap() > 0.0);
        }
    }

    #[test]
    fn single_index_is_insufficient() {
        let grid = ScenarioGrid {
            t_values: vec![0.5],
            k_values: vec![1.2],
            eps_values: vec![0.05],
            base: fig3_base(),
        };
        let rows = sweep(&grid).unwrap();
        assert!(matches!(
            gap_monotonicity_report(&rows),
            Err(ScenarioError::InsufficientGrid(1))
        ));
    }
}
