use crib_transfer::sweep::{optimize_scalar, run_sweep, Axis, AxisName, ScalarVariable, SweepSpec};
use crib_transfer::transfer::{run_staggered, TransferParams};

fn corners() -> SweepSpec {
    let mut spec = SweepSpec::fig2();
    spec.axis1 = Axis::new(AxisName::DeltaIb, 0.0, 2.0, 2);
    spec.axis2 = Axis::new(AxisName::TauR, 0.0, 0.15, 2);
    spec
}

fn csv(spec: &SweepSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    run_sweep(spec).unwrap().write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn two_by_two_grid_peaks_at_the_rephasing_time() {
    let r = run_sweep(&corners()).unwrap();
    assert_eq!(r.efficiency.len(), 4);
    assert!(r.failures.is_empty());
    // tau_R = 0.15 beats tau_R = 0 in both rows, and the clean row is best
    assert!(r.at(0, 1) > r.at(0, 0));
    assert!(r.at(1, 1) > r.at(1, 0));
    assert!(r.at(0, 1) >= r.at(1, 1));
    assert_eq!(r.row_maxima()[0], r.at(0, 1));
}

#[test]
fn reruns_and_worker_counts_give_identical_csv() {
    let mut spec = corners();
    spec.workers = 1;
    let a = csv(&spec);
    spec.workers = 4;
    assert_eq!(a, csv(&spec));
    assert_eq!(a, csv(&spec));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("delta_IB,tau_R,efficiency\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn dephasing_only_hurts_within_each_column() {
    let mut spec = SweepSpec::fig2();
    spec.fixed.ensemble.n_spins = 64;
    spec.axis1 = Axis::new(AxisName::DeltaIb, 0.0, 5.0, 3);
    spec.axis2 = Axis::new(AxisName::TauR, 0.0, 0.5, 5);
    let r = run_sweep(&spec).unwrap();
    assert!(r.efficiency.iter().all(|e| (0.0..=1.0 + 1e-9).contains(e)));
    for j in 0..5 {
        assert!(r.at(0, j) >= r.at(2, j) - 0.01, "column {j}");
    }
}

#[test]
fn swapped_axes_and_other_names_work() {
    let mut spec = SweepSpec::fig2();
    spec.fixed.ensemble.n_spins = 16;
    spec.axis1 = Axis::new(AxisName::TrimS, 0.9, 1.1, 2);
    spec.axis2 = Axis::new(AxisName::Delta, 15.0, 25.0, 2);
    let r = run_sweep(&spec).unwrap();
    assert_eq!(spec.header(), ["trim_S", "Delta", "efficiency"]);
    assert!(r.failures.is_empty());
}

#[test]
fn invalid_axis_name_lists_the_valid_ones() {
    let err = "tau".parse::<AxisName>().unwrap_err().to_string();
    for a in AxisName::ALL {
        assert!(err.contains(a.as_str()), "{err}");
    }
}

#[test]
fn optimal_rephasing_time_at_the_fig3_point() {
    let best = optimize_scalar(&TransferParams::default(), ScalarVariable::TauR, 0.0, 0.5).unwrap();
    assert!((best.argmax - 0.15).abs() <= 0.05, "{best:?}");
    assert!(best.value >= run_staggered(&TransferParams::default()).unwrap().efficiency);
}

#[test]
fn rephasing_time_alone_without_intrinsic_broadening() {
    let mut p = TransferParams::default();
    p.ensemble.intrinsic_half_width = 0.0;
    let default_timing = run_staggered(&p).unwrap().efficiency;
    let best = optimize_scalar(&p, ScalarVariable::TauR, 0.0, 0.5).unwrap();
    assert!(best.value >= default_timing);
    assert!((best.value - 0.9581).abs() < 1e-3, "{best:?}");
    // the induced gradient still acts during the spin swap; trimming it
    // recovers the rest
    p.tau_r = 0.21;
    p.trim_s = 1.19;
    assert!(run_staggered(&p).unwrap().efficiency >= 0.98);
}

#[test]
fn zero_width_range_returns_the_endpoint() {
    let mut p = TransferParams::default();
    p.ensemble.n_spins = 16;
    let best = optimize_scalar(&p, ScalarVariable::TrimC, 1.0, 1.0).unwrap();
    assert_eq!(best.argmax, 1.0);
    p.trim_c = 1.0;
    assert_eq!(best.value, run_staggered(&p).unwrap().efficiency);
}
