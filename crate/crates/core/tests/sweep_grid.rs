use grbp::analytics::{boundary, optimal_threshold, RegionLabel};
use grbp::exec::Execution;
use grbp::harness::{sweep_with, write_sweep_csv, SweepConfig, SWEEP_CSV_HEADER};
use grbp::ModelParams;

fn single_cell(p_c: f64, p_f: f64) -> f64 {
    let mut c = SweepConfig::grid(4, 1);
    c.p_c = vec![p_c];
    c.p_f = vec![p_f];
    sweep_with(&c, Execution::Parallel).unwrap().cells[0].regret_mean
}

#[test]
fn deep_no_exploration_beats_exploration_at_equal_margin() {
    let margin = 0.25;
    let deep = single_cell(0.3, boundary(0.3, 4) + margin);
    let explore = single_cell(0.7, boundary(0.7, 4) - margin);
    assert!(deep <= explore, "{deep} vs {explore}");
}

#[test]
fn nine_by_nine_smoke() {
    let mut c = SweepConfig::grid(4, 9);
    c.horizon = 200;
    c.iterations = 4;
    let r = sweep_with(&c, Execution::Parallel).unwrap();
    assert_eq!(r.cells.len(), 81);
    for cell in &r.cells {
        let (tau, region) = optimal_threshold(&ModelParams::uniform(4, cell.p_c, cell.p_f).unwrap());
        assert_eq!(cell.region, region);
        assert_eq!(region, RegionLabel::from_threshold(tau));
        assert!(cell.regret_mean.is_finite() && cell.regret_mean >= 0.0);
    }
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &r).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some(SWEEP_CSV_HEADER));
    assert_eq!(text.lines().count(), 82);
}
