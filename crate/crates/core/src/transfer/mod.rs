//! Single-excitation dynamics of `N` spins, a tunable cavity and a qubit.
//!
//! In the frame rotating at the qubit frequency, with `G` the cavity-qubit
//! coupling,
//!
//! ```text
//! i dxi_j/dt = [D_s + s(t) d_inh_j + d_IB_j + shift(t)] xi_j + kappa c
//! i dc/dt    = D_c(t) c + kappa sum_j xi_j + G q
//! i dq/dt    = G c
//! ```
//!
//! where `D_s` is the spin-line detuning and the schedule supplies the
//! cavity detuning `D_c`, the gradient sign `s` and the common spin shift.
//!
//! During a [`SegmentRole::Rephase`] segment the spins precess freely under
//! the induced gradient alone, `i dxi_j/dt = s d_inh_j xi_j`, while the
//! cavity and the qubit are held.

mod runners;

use std::cell::Cell;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Dop853Options, OdeSystem, Stats};
use crate::io;
use crate::model::{symmetric_overlap_of, FrequencyFrame, SingleExcitationState, SpinEnsemble};
use crate::protocol::{CavityDetuning, ProtocolSchedule, Segment, SegmentRole};

pub use runners::{
    build_reverse, eta_t_estimate, prepare_initial_state, reduced_three_mode, run_adiabatic, run_reduced_sweep_variant,
    run_reverse, run_schedule, run_staggered, DephasingEstimate, Figure, TransferOutcome, TransferParams,
};

pub const TRAJECTORY_COLUMNS: [&str; 5] = ["t", "spin_pop", "cavity_pop", "qubit_pop", "sym_overlap"];

/// Local error tolerance of each step relative to the requested accuracy.
/// Step errors add up over the many steps of the fast spin-line rotation, so
/// the steps are held three orders tighter than the norm budget.
const STEP_TOL_FACTOR: f64 = 1e-3;

/// Minimum number of trajectory samples.
pub const MIN_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Relative and absolute tolerance of the integrator, in `[1e-12, 1e-6]`.
    pub tol: f64,
    /// Equally spaced samples over the whole schedule, endpoints included;
    /// raised to [`MIN_SAMPLES`] when smaller.
    pub samples: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            samples: MIN_SAMPLES,
        }
    }
}

/// The coupled system during one schedule segment.
struct SegmentSystem<'a> {
    spin_freqs: Vec<f64>,
    kappa: f64,
    g: f64,
    global: f64,
    /// Cavity and qubit held (free rephasing).
    frozen: bool,
    cavity: &'a CavityDetuning,
    t_start: f64,
    duration: f64,
}

impl<'a> SegmentSystem<'a> {
    fn new(
        ensemble: &SpinEnsemble,
        frame: &FrequencyFrame,
        qubit_coupling: f64,
        segment: &'a Segment,
        t_start: f64,
    ) -> Self {
        let s = f64::from(segment.gradient_sign);
        let free = segment.role == SegmentRole::Rephase;
        let base = frame.spin_detuning + segment.common_spin_shift + frame.global_shift;
        let spin_freqs = ensemble
            .intrinsic_detunings
            .iter()
            .zip(&ensemble.induced_detunings)
            .map(|(ib, inh)| if free { s * inh } else { base + s * inh + ib })
            .collect();
        Self {
            spin_freqs,
            kappa: if free { 0.0 } else { ensemble.kappa },
            g: if free { 0.0 } else { qubit_coupling },
            global: frame.global_shift,
            frozen: free,
            cavity: &segment.cavity,
            t_start,
            duration: segment.duration,
        }
    }

    fn cavity_at(&self, t: f64) -> f64 {
        let s = if self.duration > 0.0 {
            ((t - self.t_start) / self.duration).clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.cavity.at(s) + self.global
    }
}

impl OdeSystem for SegmentSystem<'_> {
    fn dim(&self) -> usize {
        self.spin_freqs.len() + 2
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let n = self.spin_freqs.len();
        let c = y[n];
        let q = y[n + 1];
        let mi = Complex64::new(0.0, -1.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..n {
            sum += y[j];
            dy[j] = mi * (self.spin_freqs[j] * y[j] + self.kappa * c);
        }
        if self.frozen {
            dy[n] = Complex64::new(0.0, 0.0);
            dy[n + 1] = Complex64::new(0.0, 0.0);
            return;
        }
        dy[n] = mi * (self.cavity_at(t) * c + self.kappa * sum + self.g * q);
        dy[n + 1] = mi * (self.global * q + self.g * c);
    }
}

/// Time derivative of `state` at time `t` of `schedule`; times past the end
/// use the last segment.
pub fn rhs(
    ensemble: &SpinEnsemble,
    frame: &FrequencyFrame,
    qubit_coupling: f64,
    schedule: &ProtocolSchedule,
    state: &SingleExcitationState,
    t: f64,
) -> Result<SingleExcitationState> {
    let bounds = schedule.boundaries();
    let k = (1..bounds.len())
        .find(|&k| t < bounds[k])
        .unwrap_or(bounds.len() - 1)
        .max(1);
    let segment = schedule
        .segments
        .get(k - 1)
        .ok_or_else(|| Error::Schedule("schedule has no segments".into()))?;
    let sys = SegmentSystem::new(ensemble, frame, qubit_coupling, segment, bounds[k - 1]);
    let y = state.to_flat();
    let mut dy = vec![Complex64::new(0.0, 0.0); y.len()];
    sys.rhs(t, &y, &mut dy);
    SingleExcitationState::from_flat(&dy)
}

/// Population curves of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub spin_population: Vec<f64>,
    pub cavity_population: Vec<f64>,
    pub qubit_population: Vec<f64>,
    pub symmetric_overlap: Vec<f64>,
    pub final_state: SingleExcitationState,
    #[serde(skip)]
    pub stats: Stats,
}

impl TrajectoryRecord {
    fn push(&mut self, t: f64, y: &[Complex64]) {
        let n = y.len() - 2;
        self.times.push(t);
        self.spin_population.push(y[..n].iter().map(|a| a.norm_sqr()).sum());
        self.cavity_population.push(y[n].norm_sqr());
        self.qubit_population.push(y[n + 1].norm_sqr());
        self.symmetric_overlap.push(symmetric_overlap_of(&y[..n]));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest deviation of the total population from `reference`.
    pub fn max_norm_drift(&self, reference: f64) -> f64 {
        (0..self.len())
            .map(|i| (self.spin_population[i] + self.cavity_population[i] + self.qubit_population[i] - reference).abs())
            .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| {
            vec![
                self.times[i],
                self.spin_population[i],
                self.cavity_population[i],
                self.qubit_population[i],
                self.symmetric_overlap[i],
            ]
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        io::write_table(writer, &TRAJECTORY_COLUMNS, self.rows())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        io::write_table_file(path, &TRAJECTORY_COLUMNS, self.rows())
    }
}

fn sample_grid(total: f64, n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..n).map(|i| total * i as f64 / (n - 1) as f64).collect();
    grid[n - 1] = total;
    grid
}

/// Evolves `initial` through `schedule`, restarting the integrator at every
/// segment boundary. `observe` sees the full state at each sample time.
pub fn evolve_observed<F>(
    ensemble: &SpinEnsemble,
    frame: &FrequencyFrame,
    qubit_coupling: f64,
    schedule: &ProtocolSchedule,
    initial: &SingleExcitationState,
    opts: EvolveOptions,
    mut observe: F,
) -> Result<(SingleExcitationState, Stats)>
where
    F: FnMut(f64, &[Complex64]),
{
    if !(1e-12..=1e-6).contains(&opts.tol) {
        return Err(Error::param(
            "tol",
            format!("must lie in [1e-12, 1e-6], got {}", opts.tol),
        ));
    }
    if initial.n_spins() != ensemble.n_spins() {
        return Err(Error::param(
            "initial",
            format!(
                "state has {} spins, ensemble has {}",
                initial.n_spins(),
                ensemble.n_spins()
            ),
        ));
    }
    if !(qubit_coupling.is_finite() && qubit_coupling >= 0.0) {
        return Err(Error::param(
            "G",
            format!("must be finite and >= 0, got {qubit_coupling}"),
        ));
    }
    schedule.check()?;

    let int_opts = Dop853Options::with_tol(opts.tol * STEP_TOL_FACTOR);
    let limit = 100.0 * opts.tol;
    let mut y = initial.to_flat();
    let norm0: f64 = y.iter().map(|a| a.norm_sqr()).sum();
    let drift_at: Cell<Option<(f64, f64)>> = Cell::new(None);
    let check = |t: f64, y: &[Complex64]| {
        let drift = (y.iter().map(|a| a.norm_sqr()).sum::<f64>() - norm0).abs();
        if drift > limit && drift_at.get().is_none() {
            drift_at.set(Some((drift, t)));
        }
    };

    let bounds = schedule.boundaries();
    let total = *bounds.last().unwrap();
    let samples = sample_grid(total, opts.samples.max(MIN_SAMPLES));
    observe(0.0, &y);
    let mut next = 1;
    let mut stats = Stats::default();
    for (k, segment) in schedule.segments.iter().enumerate() {
        let (ta, tb) = (bounds[k], bounds[k + 1]);
        let last = k + 1 == schedule.segments.len();
        let end = samples[next..].partition_point(|&t| t <= tb || (last && t >= tb));
        let slice = &samples[next..next + end];
        next += end;
        if tb <= ta {
            for &t in slice {
                observe(t, &y);
            }
            continue;
        }
        let sys = SegmentSystem::new(ensemble, frame, qubit_coupling, segment, ta);
        let (y_end, seg_stats) = integrator::integrate(&sys, ta, tb, &y, &int_opts, slice, |t, ys| {
            check(t, ys);
            observe(t, ys);
        })?;
        stats += seg_stats;
        y = y_end;
        if let Some((drift, time)) = drift_at.get() {
            return Err(Error::NormDrift { drift, limit, time });
        }
    }
    for &t in &samples[next..] {
        observe(t, &y);
    }
    check(total, &y);
    if let Some((drift, time)) = drift_at.get() {
        return Err(Error::NormDrift { drift, limit, time });
    }
    Ok((SingleExcitationState::from_flat(&y)?, stats))
}

/// Evolves `initial` through `schedule` and records the population curves.
pub fn evolve(
    ensemble: &SpinEnsemble,
    frame: &FrequencyFrame,
    qubit_coupling: f64,
    schedule: &ProtocolSchedule,
    initial: &SingleExcitationState,
    opts: EvolveOptions,
) -> Result<TrajectoryRecord> {
    let cap = opts.samples.max(MIN_SAMPLES);
    let mut record = TrajectoryRecord {
        times: Vec::with_capacity(cap),
        spin_population: Vec::with_capacity(cap),
        cavity_population: Vec::with_capacity(cap),
        qubit_population: Vec::with_capacity(cap),
        symmetric_overlap: Vec::with_capacity(cap),
        final_state: initial.clone(),
        stats: Stats::default(),
    };
    let (final_state, stats) = evolve_observed(ensemble, frame, qubit_coupling, schedule, initial, opts, |t, y| {
        record.push(t, y)
    })?;
    record.final_state = final_state;
    record.stats = stats;
    Ok(record)
}

#[cfg(test)]
mod tests;
