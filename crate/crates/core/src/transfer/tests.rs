use std::f64::consts::PI;

use approx::assert_abs_diff_eq;

use super::*;
use crate::model::{symmetric_overlap, DetuningProfile, EnsembleSpec};
use crate::protocol::{ScheduleMetadata, SegmentRole, Variant};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn frame(spin: f64) -> FrequencyFrame {
    FrequencyFrame {
        spin_detuning: spin,
        cavity_offset: 20.0,
        global_shift: 0.0,
    }
}

fn single(duration: f64, cavity: f64, sign: i8) -> ProtocolSchedule {
    ProtocolSchedule {
        segments: vec![Segment::constant(SegmentRole::Park, duration, cavity, sign)],
        metadata: ScheduleMetadata {
            t_s: 0.0,
            t_c: 0.0,
            tau_r: 0.0,
            variant: Variant::Custom,
            reversed: false,
        },
    }
}

fn degenerate(n: usize, coupling: f64) -> SpinEnsemble {
    SpinEnsemble::from_detunings(vec![0.0; n], vec![0.0; n], coupling).unwrap()
}

fn opts(tol: f64) -> EvolveOptions {
    EvolveOptions { tol, samples: 400 }
}

#[test]
fn decoupled_modes_only_rotate() {
    let ens = SpinEnsemble::new(&EnsembleSpec {
        n_spins: 8,
        collective_coupling: 0.0,
        intrinsic_half_width: 1.0,
        intrinsic_profile: DetuningProfile::UniformGrid,
        induced_half_width: 3.0,
        assignment_seed: 1,
    })
    .unwrap();
    let spins: Vec<_> = (0..8).map(|j| c(0.1 * j as f64, 0.05)).collect();
    let init = SingleExcitationState::new(spins, c(0.3, 0.0), c(0.0, 0.2)).unwrap();
    let rec = evolve(&ens, &frame(5.0), 0.0, &single(3.0, 7.0, -1), &init, opts(1e-10)).unwrap();
    for (a, b) in rec.final_state.spin_amps.iter().zip(&init.spin_amps) {
        assert_abs_diff_eq!(a.norm(), b.norm(), epsilon = 1e-10);
    }
    assert_abs_diff_eq!(rec.cavity_population[399], 0.09, epsilon = 1e-10);
    assert_abs_diff_eq!(rec.qubit_population[399], 0.04, epsilon = 1e-10);
}

#[test]
fn zero_hamiltonian_is_identity() {
    let ens = degenerate(4, 0.0);
    let init = SingleExcitationState::dicke(4).unwrap();
    let rec = evolve(&ens, &frame(0.0), 0.0, &single(2.0, 0.0, 1), &init, opts(1e-10)).unwrap();
    assert_eq!(rec.final_state, init);
}

#[test]
fn symmetric_mode_rabi_oscillation() {
    let k = 6.0;
    let ens = degenerate(16, k);
    let init = SingleExcitationState::dicke(16).unwrap();
    let rec = evolve(&ens, &frame(0.0), 0.0, &single(1.5, 0.0, -1), &init, opts(1e-11)).unwrap();
    for (t, p) in rec.times.iter().zip(&rec.cavity_population) {
        assert_abs_diff_eq!(*p, (k * t).sin().powi(2), epsilon = 1e-9);
    }
}

#[test]
fn three_level_eigenfrequencies() {
    // H = [[0,1,0],[1,0,1],[0,1,0]] has eigenvalues 0 and +-sqrt(2)
    let ens = degenerate(1, 1.0);
    let init = SingleExcitationState::dicke(1).unwrap();
    let mut worst = 0.0_f64;
    let w = 2f64.sqrt();
    evolve_observed(
        &ens,
        &frame(0.0),
        1.0,
        &single(10.0, 0.0, -1),
        &init,
        opts(1e-11),
        |t, y| {
            let spin = c(0.5 + 0.5 * (w * t).cos(), 0.0);
            let cav = c(0.0, -(w * t).sin() / w);
            let qubit = c(-0.5 + 0.5 * (w * t).cos(), 0.0);
            worst = worst
                .max((y[0] - spin).norm())
                .max((y[1] - cav).norm())
                .max((y[2] - qubit).norm());
        },
    )
    .unwrap();
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn resonant_spin_swap_fills_the_cavity() {
    let k = 6.0;
    let ens = degenerate(32, k);
    let init = SingleExcitationState::dicke(32).unwrap();
    // qubit 200 G away from the spin line
    let rec = evolve(
        &ens,
        &frame(200.0),
        1.0,
        &single(PI / (2.0 * k), 200.0, -1),
        &init,
        opts(1e-10),
    )
    .unwrap();
    assert!(rec.cavity_population[399] >= 0.999, "{}", rec.cavity_population[399]);
}

#[test]
fn initial_state_and_rephasing() {
    let spec = EnsembleSpec {
        n_spins: 64,
        collective_coupling: 0.0,
        intrinsic_half_width: 0.0,
        intrinsic_profile: DetuningProfile::UniformGrid,
        induced_half_width: 10.0,
        assignment_seed: 0,
    };
    let ens = SpinEnsemble::new(&spec).unwrap();
    let dicke = SingleExcitationState::dicke(64).unwrap();
    assert_eq!(prepare_initial_state(&ens, 0.0).unwrap(), dicke);
    let flat = SpinEnsemble::new(&EnsembleSpec {
        induced_half_width: 0.0,
        ..spec.clone()
    })
    .unwrap();
    assert_eq!(prepare_initial_state(&flat, 0.37).unwrap(), dicke);

    let tau_r = 0.15;
    let init = prepare_initial_state(&ens, tau_r).unwrap();
    assert!(symmetric_overlap(&init) < 0.9);
    let rec = evolve(&ens, &frame(0.0), 0.0, &single(tau_r, 50.0, -1), &init, opts(1e-12)).unwrap();
    assert_abs_diff_eq!(symmetric_overlap(&rec.final_state), 1.0, epsilon = 1e-10);
    assert!(prepare_initial_state(&ens, -1.0).is_err());
}

#[test]
fn tolerance_range_is_enforced() {
    let ens = degenerate(2, 1.0);
    let init = SingleExcitationState::dicke(2).unwrap();
    for tol in [1e-13, 1e-5] {
        assert!(evolve(&ens, &frame(0.0), 1.0, &single(1.0, 0.0, 1), &init, opts(tol)).is_err());
    }
}

#[test]
fn samples_cover_the_schedule() {
    let ens = degenerate(2, 1.0);
    let init = SingleExcitationState::dicke(2).unwrap();
    let rec = evolve(
        &ens,
        &frame(0.0),
        1.0,
        &single(1.0, 0.0, 1),
        &init,
        EvolveOptions { tol: 1e-8, samples: 10 },
    )
    .unwrap();
    assert_eq!(rec.len(), MIN_SAMPLES);
    assert_eq!(rec.times[0], 0.0);
    assert_eq!(*rec.times.last().unwrap(), 1.0);
    assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn rhs_matches_the_equations() {
    let ens = SpinEnsemble::from_detunings(vec![0.5, -0.5], vec![2.0, -2.0], 2f64.sqrt()).unwrap();
    let state = SingleExcitationState::new(vec![c(1.0, 0.0), c(0.0, 1.0)], c(0.5, 0.0), c(0.0, 0.0)).unwrap();
    let d = rhs(&ens, &frame(3.0), 1.0, &single(1.0, 7.0, -1), &state, 0.5).unwrap();
    // i xi_0' = (3 - 2 + 0.5) xi_0 + kappa c with kappa = 1
    assert!((d.spin_amps[0] - c(0.0, -1.0) * (c(1.5, 0.0) + 0.5)).norm() < 1e-15);
    // i c' = 7 c + kappa (xi_0 + xi_1) + G q
    assert!((d.cavity_amp - c(0.0, -1.0) * (c(3.5, 0.0) + c(1.0, 1.0))).norm() < 1e-15);
    assert!((d.qubit_amp - c(0.0, -0.5)).norm() < 1e-15);
}

#[test]
fn dephasing_estimates() {
    let e = eta_t_estimate(0.0, 1.0).unwrap();
    assert_eq!((e.sinc2, e.gaussian), (1.0, 1.0));
    let e = eta_t_estimate(2.0, PI / 12.0).unwrap();
    assert_abs_diff_eq!(e.sinc2, 9.0 / (PI * PI), epsilon = 1e-15);
    assert_abs_diff_eq!(e.sinc2, 0.911_890_652_781_04, epsilon = 1e-12);
    assert_abs_diff_eq!(e.gaussian, (-(PI / 6.0).powi(2) / 3.0).exp(), epsilon = 1e-15);
    let e = eta_t_estimate(1.0, PI).unwrap();
    assert!(e.sinc2 < 1e-30);
    assert_abs_diff_eq!(e.gaussian, 0.037_258_762_247_541, epsilon = 1e-14);
    assert!(eta_t_estimate(-1.0, 1.0).is_err());
    assert!(eta_t_estimate(1.0, 0.0).is_err());
}
