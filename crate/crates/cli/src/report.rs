//! Plain-text rendering of solve and verify reports.

use std::fmt::Write;

use grbp::analytics::SolveReport;
use grbp::verify::VerifyReport;

pub fn solve_text(r: &SolveReport) -> String {
    let p = &r.params;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "G = {}, p_c = {}, p_f = {}, r = {:.6}",
        p.goal(),
        p.p_c(),
        p.p_f(),
        r.failure_ratio
    );
    let _ = writeln!(out, "tau* = {}", r.tau_star);
    let _ = writeln!(out, "region = {}", r.region);
    let _ = writeln!(out, "V* = {:.12}", r.v_star);
    let _ = writeln!(out, "boundary B(p_c) = {:.12}", r.boundary);
    let _ = writeln!(out, "delta_max = {:.12}", r.gaps.delta_max);
    let _ = writeln!(out, "delta (distance to boundary) = {:.12}", r.gaps.delta_boundary);
    let _ = writeln!(out, "p_C1 = {:.12}", r.hitting.p_c1);
    let _ = writeln!(out, "p_F1 = {:.12}", r.hitting.p_f1);
    let _ = writeln!(out, "{:>4} {:>16} {:>16} {:>16}", "s", "V_pi0", "V_pi1", "Delta");
    for (i, ((v0, v1), d)) in r.v_pi0.iter().zip(&r.v_pi1).zip(&r.gaps.delta_s).enumerate() {
        let _ = writeln!(out, "{:>4} {v0:>16.12} {v1:>16.12} {d:>16.12}", i + 1);
    }
    out
}

pub fn verify_text(r: &VerifyReport, goals: &[usize], density: usize) -> String {
    let mut out = String::new();
    let bad: Vec<_> = r
        .cells
        .iter()
        .filter(|c| c.rule_loss.max(c.threshold_loss) > grbp::verify::VERIFY_TOL || !c.region_matches)
        .collect();
    for c in bad.iter().take(10) {
        let _ = writeln!(
            out,
            "  G = {} p_c = {:.4} p_f = {:.4}: best {} ({:.12}), rule tau = {}, loss {:.3e}",
            c.goal, c.p_c, c.p_f, c.best_policy, c.best_value, c.rule_threshold, c.rule_loss
        );
    }
    if bad.len() > 10 {
        let _ = writeln!(out, "  ... {} more", bad.len() - 10);
    }
    let _ = writeln!(
        out,
        "verify G {}..{} on a {density}x{density} grid: {} cells, max discrepancy {:.3e}, region mismatches {}: {}",
        goals.first().copied().unwrap_or(0),
        goals.last().copied().unwrap_or(0),
        r.cells.len(),
        r.max_discrepancy,
        r.region_mismatches,
        if r.passed() { "PASS" } else { "FAIL" }
    );
    out
}
