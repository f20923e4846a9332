//! Exhaustive check that the sign rule picks an optimal policy.

use serde::{Deserialize, Serialize};

use crate::analytics::{boundary, optimal_by_enumeration, policy_value, threshold_rule, RegionLabel};
use crate::error::Result;
use crate::harness::open_grid;
use crate::model::{ModelParams, Policy};

/// Largest acceptable value loss of the rule against enumeration.
pub const VERIFY_TOL: f64 = 1e-10;

/// Cells with `|p_f - B| <` this are boundary cells; region labels are not
/// compared there.
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Negative control: invert the sign rule.
    pub flip_sign: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub goal: usize,
    pub p_c: f64,
    pub p_f: f64,
    pub best_value: f64,
    pub best_policy: String,
    pub rule_threshold: usize,
    /// `best_value - V(rule policy)`.
    pub rule_loss: f64,
    /// `best_value - max(V(threshold 0), V(threshold 1))`.
    pub threshold_loss: f64,
    pub on_boundary: bool,
    pub region_matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub cells: Vec<CellCheck>,
    pub max_discrepancy: f64,
    pub region_mismatches: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_discrepancy <= VERIFY_TOL && self.region_mismatches == 0
    }
}

pub fn check_cell(params: &ModelParams, opts: VerifyOptions) -> Result<CellCheck> {
    let g = params.goal();
    let (best, best_value) = optimal_by_enumeration(params)?;
    let mut tau = threshold_rule(params.p_f(), params.p_c(), g);
    if opts.flip_sign {
        tau = 1 - tau;
    }
    let v0 = policy_value(&Policy::Threshold(0), params).value;
    let v1 = policy_value(&Policy::Threshold(1), params).value;
    let v_rule = if tau == 0 { v0 } else { v1 };
    let on_boundary = (params.p_f() - boundary(params.p_c(), g)).abs() < BOUNDARY_BAND;
    let enum_region = match best {
        Policy::Threshold(0) => Some(RegionLabel::Exploration),
        Policy::Threshold(1) => Some(RegionLabel::NoExploration),
        _ => None,
    };
    Ok(CellCheck {
        goal: g,
        p_c: params.p_c(),
        p_f: params.p_f(),
        best_value,
        best_policy: best.to_string(),
        rule_threshold: tau,
        rule_loss: best_value - v_rule,
        threshold_loss: best_value - v0.max(v1),
        on_boundary,
        region_matches: on_boundary || enum_region == Some(RegionLabel::from_threshold(tau)),
    })
}

/// Run [`check_cell`] over `goals x open_grid(density)^2` with uniform `q`.
pub fn verify_threshold_rule(goals: &[usize], density: usize, opts: VerifyOptions) -> Result<VerifyReport> {
    let grid = open_grid(density);
    let mut cells = Vec::with_capacity(goals.len() * grid.len() * grid.len());
    for &g in goals {
        for &p_c in &grid {
            for &p_f in &grid {
                cells.push(check_cell(&ModelParams::uniform(g, p_c, p_f)?, opts)?);
            }
        }
    }
    let max_discrepancy = cells
        .iter()
        .map(|c| c.rule_loss.max(c.threshold_loss))
        .fold(0.0, f64::max);
    let region_mismatches = cells.iter().filter(|c| !c.region_matches).count();
    Ok(VerifyReport {
        cells,
        max_discrepancy,
        region_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_goal_two_passes() {
        let r = verify_threshold_rule(&[2], 9, VerifyOptions { flip_sign: false }).unwrap();
        assert!(r.passed(), "{}", r.max_discrepancy);
    }

    #[test]
    fn flipped_rule_fails() {
        let r = verify_threshold_rule(&[4], 9, VerifyOptions { flip_sign: true }).unwrap();
        assert!(!r.passed());
        assert!(r.max_discrepancy > 1e-3);
    }

    #[test]
    fn small_goals_pass() {
        let r = verify_threshold_rule(&[3, 4, 5, 6, 7, 8], 9, VerifyOptions { flip_sign: false }).unwrap();
        assert_eq!(r.cells.len(), 6 * 81);
        assert!(r.passed());
    }
}
