//! Exact solution of a known GRBP instance.
//!
//! The optimal policy always has threshold form with threshold 0 or 1, so
//! most of what a learner needs reduces to comparing `p_f` with the boundary
//! `B(r) = (1 - r) / (1 - r^G)`, the probability of reaching the goal from
//! state 1 by continuing forever.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Action, ModelParams, Policy};

/// `|p_c - 0.5|` below this is treated as the fair case `r = 1`.
pub const FAIR_BAND: f64 = 1e-12;

/// Largest goal accepted by [`enumerate_policies`].
pub const MAX_ENUM_GOAL: usize = 16;

/// Dense grid size for the boundary distance search.
pub const DISTANCE_GRID: usize = 10_000;

/// Golden-section tolerance for the boundary distance search.
pub const DISTANCE_TOL: f64 = 1e-8;

/// Values closer than this are considered tied by [`optimal_by_enumeration`].
pub const VALUE_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionLabel {
    /// Threshold 0 is optimal; a learner has to force samples of `F`.
    Exploration,
    /// Threshold 1 is optimal.
    NoExploration,
}

impl RegionLabel {
    pub fn from_threshold(tau: usize) -> Self {
        if tau == 0 {
            RegionLabel::Exploration
        } else {
            RegionLabel::NoExploration
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionLabel::Exploration => "exploration",
            RegionLabel::NoExploration => "no-exploration",
        })
    }
}

pub fn is_fair(p_c: f64) -> bool {
    (p_c - 0.5).abs() < FAIR_BAND
}

/// `r = (1 - p_c) / p_c`.
pub fn failure_ratio(params: &ModelParams) -> f64 {
    params.failure_ratio()
}

fn powi(r: f64, n: usize) -> f64 {
    r.powi(n as i32)
}

/// Probability of reaching the goal from state 1 by always continuing.
///
/// Defined for `p_c` in `[0, 1]`: the limits are 0 at `p_c = 0` and 1 at
/// `p_c = 1`, and `1 / G` inside the fair band.
pub fn boundary(p_c: f64, goal: usize) -> f64 {
    if p_c <= 0.0 {
        return 0.0;
    }
    if is_fair(p_c) {
        return 1.0 / goal as f64;
    }
    let r = (1.0 - p_c) / p_c;
    (1.0 - r) / (1.0 - powi(r, goal))
}

/// Value of threshold 1 (take `F` only in state 1) from state `s`.
pub fn value_pi1(s: usize, params: &ModelParams) -> f64 {
    let g = params.goal();
    let p_f = params.p_f();
    if s == 0 {
        return 0.0;
    }
    if s >= g {
        return 1.0;
    }
    let climb = if is_fair(params.p_c()) {
        (s - 1) as f64 / (g - 1) as f64
    } else {
        let r = params.failure_ratio();
        (1.0 - powi(r, s - 1)) / (1.0 - powi(r, g - 1))
    };
    p_f + (1.0 - p_f) * climb
}

/// Value of threshold 0 (never take `F`) from state `s`: classic gambler's ruin.
pub fn value_pi0(s: usize, params: &ModelParams) -> f64 {
    let g = params.goal();
    if s == 0 {
        return 0.0;
    }
    if s >= g {
        return 1.0;
    }
    if is_fair(params.p_c()) {
        s as f64 / g as f64
    } else {
        let r = params.failure_ratio();
        (1.0 - powi(r, s)) / (1.0 - powi(r, g))
    }
}

/// Per-state values of a policy and their `q`-weighted sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyValue {
    /// `per_state[s - 1]` is the value from state `s`.
    pub per_state: Vec<f64>,
    pub value: f64,
}

impl PolicyValue {
    pub fn at(&self, s: usize) -> f64 {
        self.per_state[s - 1]
    }
}

/// Evaluate any stationary policy by solving its tridiagonal linear system
///
/// `V(s) = p_f` where the policy takes `F`, and
/// `V(s) = p_c V(s+1) + p_d V(s-1)` where it takes `C`, with `V(0) = 0` and
/// `V(G) = 1`.
pub fn policy_value(pi: &Policy, params: &ModelParams) -> PolicyValue {
    let n = params.goal() - 1;
    let (p_c, p_d, p_f) = (params.p_c(), params.p_d(), params.p_f());

    // Thomas algorithm; sub/super diagonals a, c; main diagonal 1.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 0..n {
        let s = i + 1;
        let (a, c, d) = match pi.action(s) {
            Action::F => (0.0, 0.0, p_f),
            Action::C => (
                if i > 0 { -p_d } else { 0.0 },
                if i + 1 < n { -p_c } else { 0.0 },
                if i + 1 == n { p_c } else { 0.0 },
            ),
        };
        let (cp_prev, dp_prev) = if i > 0 {
            (c_prime[i - 1], d_prime[i - 1])
        } else {
            (0.0, 0.0)
        };
        let m = 1.0 - a * cp_prev;
        c_prime[i] = c / m;
        d_prime[i] = (d - a * dp_prev) / m;
    }
    let mut v = vec![0.0; n];
    for i in (0..n).rev() {
        v[i] = d_prime[i] - if i + 1 < n { c_prime[i] * v[i + 1] } else { 0.0 };
    }
    let value = v.iter().zip(params.q()).map(|(x, w)| x * w).sum();
    PolicyValue { per_state: v, value }
}

/// Threshold selected by the sign rule: 1 iff `p_f >= B(p_c, G)`.
///
/// Accepts estimated probabilities on the closed interval `[0, 1]`.
pub fn threshold_rule(p_f: f64, p_c: f64, goal: usize) -> usize {
    usize::from(p_f - boundary(p_c, goal) >= 0.0)
}

/// Optimal threshold (0 or 1) and the region it defines.
pub fn optimal_threshold(params: &ModelParams) -> (usize, RegionLabel) {
    let tau = threshold_rule(params.p_f(), params.p_c(), params.goal());
    (tau, RegionLabel::from_threshold(tau))
}

pub fn optimal_policy(params: &ModelParams) -> Policy {
    Policy::Threshold(optimal_threshold(params).0)
}

/// `V*`, the `q`-weighted value of the optimal policy.
pub fn optimal_value(params: &ModelParams) -> f64 {
    policy_value(&optimal_policy(params), params).value
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `delta_s[s - 1] = |V_pi1(s) - V_pi0(s)|`.
    pub delta_s: Vec<f64>,
    pub delta_max: f64,
    /// Euclidean distance from `(p_c, p_f)` to the decision boundary.
    pub delta_boundary: f64,
}

/// Closed-form gaps between the two threshold policies and the distance to
/// the boundary.
pub fn gap_report(params: &ModelParams) -> GapReport {
    let g = params.goal();
    let delta_max = (params.p_f() - boundary(params.p_c(), g)).abs();
    let fair = is_fair(params.p_c());
    let r = params.failure_ratio();
    let delta_s = params
        .states()
        .map(|s| {
            let weight = if fair {
                (g - s) as f64 / (g - 1) as f64
            } else {
                (powi(r, g - 1) - powi(r, s - 1)) / (powi(r, g - 1) - 1.0)
            };
            weight * delta_max
        })
        .collect();
    GapReport {
        delta_s,
        delta_max,
        delta_boundary: boundary_distance(params.p_c(), params.p_f(), g),
    }
}

/// Minimum Euclidean distance from `(p_c, p_f)` to the curve
/// `x -> (x, boundary(x, G))`, `x` in `(0, 1)`.
///
/// Dense grid search followed by golden-section refinement around the best
/// grid point.
pub fn boundary_distance(p_c: f64, p_f: f64, goal: usize) -> f64 {
    let dist = |x: f64| ((x - p_c).powi(2) + (boundary(x, goal) - p_f).powi(2)).sqrt();
    let h = 1.0 / DISTANCE_GRID as f64;
    let (best_i, _) = (0..DISTANCE_GRID)
        .map(|i| (i, dist((i as f64 + 0.5) * h)))
        .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
    let centre = (best_i as f64 + 0.5) * h;
    let lo = (centre - h).max(f64::EPSILON);
    let hi = (centre + h).min(1.0 - f64::EPSILON);
    let refined = golden_section_min(dist, lo, hi, DISTANCE_TOL);
    // (p_c, B(p_c)) lies on the curve
    refined.min(dist(p_c)).min(dist(centre))
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f((a + b) / 2.0).min(fc).min(fd)
}

/// Probabilities under threshold 1 of taking `C` at least once (`p_c1`)
/// and of taking `F` (`p_f1`) in a round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingProbabilities {
    pub p_c1: f64,
    pub p_f1: f64,
}

pub fn hitting_probabilities(params: &ModelParams) -> HittingProbabilities {
    let g = params.goal();
    let fair = is_fair(params.p_c());
    let r = params.failure_ratio();
    let p_f1 = params
        .states()
        .map(|s| {
            let ruin = if fair {
                (g - s) as f64 / (g - 1) as f64
            } else {
                (powi(r, s - 1) - powi(r, g - 1)) / (1.0 - powi(r, g - 1))
            };
            params.q_of(s) * ruin
        })
        .sum();
    HittingProbabilities {
        p_c1: 1.0 - params.q_of(1),
        p_f1,
    }
}

/// All `2^(G-1)` stationary deterministic policies as general maps.
///
/// Bit `s - 1` of the enumeration index selects `F` in state `s`.
pub fn enumerate_policies(goal: usize) -> Result<Vec<Policy>> {
    if goal > MAX_ENUM_GOAL {
        return Err(Error::EnumerationTooLarge {
            goal,
            max: MAX_ENUM_GOAL,
        });
    }
    if goal < 2 {
        return Err(Error::InvalidParams(format!("goal must be at least 2, got {goal}")));
    }
    let n = goal - 1;
    Ok((0u32..1 << n)
        .map(|mask| {
            Policy::General(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { Action::F } else { Action::C })
                    .collect(),
            )
        })
        .collect())
}

/// Exhaustive search over every stationary policy.
///
/// Ties (within [`VALUE_TIE_TOL`]) prefer threshold-form policies, then
/// policies taking `F` in more states. The winner is returned in canonical
/// form.
pub fn optimal_by_enumeration(params: &ModelParams) -> Result<(Policy, f64)> {
    let g = params.goal();
    let mut best: Option<(Policy, f64)> = None;
    for pi in enumerate_policies(g)? {
        let v = policy_value(&pi, params).value;
        let better = match &best {
            None => true,
            Some((b, bv)) => {
                if v > bv + VALUE_TIE_TOL {
                    true
                } else if v < bv - VALUE_TIE_TOL {
                    false
                } else {
                    let key = |p: &Policy| (p.as_threshold(g).is_some(), p.f_count(g));
                    key(&pi) > key(b)
                }
            }
        };
        if better {
            best = Some((pi, v));
        }
    }
    let (pi, v) = best.expect("at least two policies");
    Ok((pi.canonical(g), v))
}

/// Everything the `solve` command reports about an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub params: ModelParams,
    pub failure_ratio: f64,
    pub tau_star: usize,
    pub region: RegionLabel,
    pub v_star: f64,
    pub v_pi0: Vec<f64>,
    pub v_pi1: Vec<f64>,
    pub gaps: GapReport,
    pub boundary: f64,
    pub hitting: HittingProbabilities,
}

pub fn solve(params: &ModelParams) -> SolveReport {
    let (tau_star, region) = optimal_threshold(params);
    SolveReport {
        params: params.clone(),
        failure_ratio: params.failure_ratio(),
        tau_star,
        region,
        v_star: optimal_value(params),
        v_pi0: params.states().map(|s| value_pi0(s, params)).collect(),
        v_pi1: params.states().map(|s| value_pi1(s, params)).collect(),
        gaps: gap_report(params),
        boundary: boundary(params.p_c(), params.goal()),
        hitting: hitting_probabilities(params),
    }
}
