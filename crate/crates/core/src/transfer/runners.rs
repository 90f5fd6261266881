//! Protocol families built on [`evolve`](super::evolve).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{evolve, EvolveOptions, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::model::{
    symmetric_overlap, DetuningProfile, EnsembleSpec, FrequencyFrame, SingleExcitationState, SpinEnsemble,
};
use crate::protocol::{
    self, build_adiabatic, build_reduced_sweep, build_staggered, reverse_schedule, Diagnostic, ProtocolSchedule,
    Segment, SegmentRole, StaggeredSpec,
};

/// Gradient sign during the forward transfer.
const TRANSFER_GRADIENT: i8 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferParams {
    pub ensemble: EnsembleSpec,
    pub frame: FrequencyFrame,
    /// Cavity-qubit coupling; 1 defines the unit system.
    pub qubit_coupling: f64,
    pub tau_r: f64,
    pub trim_s: f64,
    pub trim_c: f64,
    pub ramp: f64,
    pub gap: f64,
    pub park_duration: f64,
    /// Largest acceptable cavity travel, in units of `G`.
    #[serde(default)]
    pub travel_budget: Option<f64>,
    pub evolve: EvolveOptions,
}

impl Default for TransferParams {
    /// The Fig. 3 operating point.
    fn default() -> Self {
        let timing = StaggeredSpec::default();
        Self {
            ensemble: EnsembleSpec {
                n_spins: 128,
                collective_coupling: 6.0,
                intrinsic_half_width: 2.0,
                intrinsic_profile: DetuningProfile::UniformGrid,
                induced_half_width: 10.0,
                assignment_seed: 0,
            },
            frame: timing.frame,
            qubit_coupling: 1.0,
            tau_r: timing.tau_r,
            trim_s: timing.trim_s,
            trim_c: timing.trim_c,
            ramp: timing.ramp,
            gap: timing.gap,
            park_duration: timing.park_duration,
            travel_budget: None,
            evolve: EvolveOptions::default(),
        }
    }
}

impl TransferParams {
    pub fn staggered_spec(&self) -> StaggeredSpec {
        StaggeredSpec {
            collective_coupling: self.ensemble.collective_coupling,
            qubit_coupling: self.qubit_coupling,
            frame: self.frame,
            tau_r: self.tau_r,
            trim_s: self.trim_s,
            trim_c: self.trim_c,
            ramp: self.ramp,
            gap: self.gap,
            park_duration: self.park_duration,
        }
    }

    pub fn build_ensemble(&self) -> Result<SpinEnsemble> {
        SpinEnsemble::new(&self.ensemble)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferOutcome {
    pub efficiency: f64,
    pub trajectory: TrajectoryRecord,
    pub schedule: ProtocolSchedule,
    pub cavity_travel: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// What counts as success at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    QubitPopulation,
    SymmetricOverlap,
}

/// `xi_j = e^{-i s d_inh_j tau_R} / sqrt(N)` is what the forward gradient `s`
/// brings back in phase at `t = tau_R`; here `s = -1`.
pub fn prepare_initial_state(ensemble: &SpinEnsemble, tau_r: f64) -> Result<SingleExcitationState> {
    if !(tau_r >= 0.0 && tau_r.is_finite()) {
        return Err(Error::param("tau_R", format!("must be finite and >= 0, got {tau_r}")));
    }
    let amp = 1.0 / (ensemble.n_spins() as f64).sqrt();
    let s = f64::from(TRANSFER_GRADIENT);
    let spins = ensemble
        .induced_detunings
        .iter()
        .map(|d| Complex64::from_polar(amp, s * d * tau_r))
        .collect();
    let zero = Complex64::new(0.0, 0.0);
    SingleExcitationState::new(spins, zero, zero)
}

/// Runs `schedule` from `initial` and scores the final state.
pub fn run_schedule(
    params: &TransferParams,
    ensemble: &SpinEnsemble,
    schedule: ProtocolSchedule,
    initial: &SingleExcitationState,
    figure: Figure,
) -> Result<TransferOutcome> {
    let trajectory = evolve(
        ensemble,
        &params.frame,
        params.qubit_coupling,
        &schedule,
        initial,
        params.evolve,
    )?;
    let efficiency = match figure {
        Figure::QubitPopulation => trajectory.final_state.qubit_population(),
        Figure::SymmetricOverlap => symmetric_overlap(&trajectory.final_state),
    };
    let diagnostics = protocol::validate(
        &schedule,
        &params.frame,
        ensemble.collective_coupling(),
        params.travel_budget,
    );
    Ok(TransferOutcome {
        efficiency,
        cavity_travel: schedule.cavity_travel(),
        trajectory,
        schedule,
        diagnostics,
    })
}

fn forward(params: &TransferParams, schedule: ProtocolSchedule) -> Result<TransferOutcome> {
    let ensemble = params.build_ensemble()?;
    let initial = prepare_initial_state(&ensemble, params.tau_r)?;
    run_schedule(params, &ensemble, schedule, &initial, Figure::QubitPopulation)
}

/// Staggered pi-pulse transfer: spins to cavity in `T_S`, cavity to qubit in
/// `T_C`. The efficiency is the final qubit population.
pub fn run_staggered(params: &TransferParams) -> Result<TransferOutcome> {
    forward(params, build_staggered(&params.staggered_spec())?)
}

/// Single linear cavity sweep through both resonances.
pub fn run_adiabatic(params: &TransferParams, sweep_duration: f64) -> Result<TransferOutcome> {
    forward(params, build_adiabatic(&params.staggered_spec(), sweep_duration)?)
}

/// Staggered transfer with reduced cavity travel; the spins are parked
/// `spin_park_detuning` away while the cavity meets the qubit.
pub fn run_reduced_sweep_variant(params: &TransferParams, spin_park_detuning: f64) -> Result<TransferOutcome> {
    forward(
        params,
        build_reduced_sweep(&params.staggered_spec(), spin_park_detuning)?,
    )
}

/// Qubit back to the spins: the staggered schedule reversed, then a free
/// rephasing interval `tau_R` with the forward gradient sign. The efficiency is
/// the final population of the symmetric spin mode.
pub fn run_reverse(params: &TransferParams) -> Result<TransferOutcome> {
    let ensemble = params.build_ensemble()?;
    let initial = SingleExcitationState::qubit_excited(ensemble.n_spins())?;
    run_schedule(
        params,
        &ensemble,
        build_reverse(params)?,
        &initial,
        Figure::SymmetricOverlap,
    )
}

/// The staggered schedule reversed, with the rephasing tail appended.
pub fn build_reverse(params: &TransferParams) -> Result<ProtocolSchedule> {
    Ok(reverse_with_rephasing(
        params,
        &build_staggered(&params.staggered_spec())?,
    ))
}

fn reverse_with_rephasing(params: &TransferParams, forward: &ProtocolSchedule) -> ProtocolSchedule {
    let mut schedule = reverse_schedule(forward);
    if params.tau_r > 0.0 && !forward.segments.is_empty() {
        schedule.segments.push(Segment::constant(
            SegmentRole::Rephase,
            params.tau_r,
            params.frame.cavity_park(),
            TRANSFER_GRADIENT,
        ));
    }
    schedule
}

/// Degenerate-ensemble equivalent: the symmetric spin mode as one emitter
/// with coupling `kappa sqrt(N)`, the cavity and the qubit, under the
/// staggered schedule. Broadening in `params` is ignored.
pub fn reduced_three_mode(params: &TransferParams) -> Result<TransferOutcome> {
    let ensemble = SpinEnsemble::from_detunings(vec![0.0], vec![0.0], params.ensemble.collective_coupling)?;
    let schedule = build_staggered(&params.staggered_spec())?;
    let initial = SingleExcitationState::dicke(1)?;
    run_schedule(params, &ensemble, schedule, &initial, Figure::QubitPopulation)
}

/// Closed-form dephasing loss of a flat intrinsic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingEstimate {
    /// `sin^2(x) / x^2` with `x = d_IB T_S`.
    pub sinc2: f64,
    /// `exp(-x^2 / 3)`.
    pub gaussian: f64,
}

pub fn eta_t_estimate(intrinsic_half_width: f64, t_s: f64) -> Result<DephasingEstimate> {
    if !(intrinsic_half_width >= 0.0 && intrinsic_half_width.is_finite()) {
        return Err(Error::param(
            "delta_IB",
            format!("must be finite and >= 0, got {intrinsic_half_width}"),
        ));
    }
    if !(t_s > 0.0 && t_s.is_finite()) {
        return Err(Error::param("T_S", format!("must be positive, got {t_s}")));
    }
    let x = intrinsic_half_width * t_s;
    let sinc2 = if x == 0.0 { 1.0 } else { (x.sin() / x).powi(2) };
    Ok(DephasingEstimate {
        sinc2,
        gaussian: (-x * x / 3.0).exp(),
    })
}
