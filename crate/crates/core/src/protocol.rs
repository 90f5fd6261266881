//! Piecewise protocol schedules: construction, reversal and validation.
//!
//! A schedule is a list of segments. Within a segment the cavity detuning is
//! constant or ramps linearly, and the gradient sign and the common spin
//! shift are fixed. Segment boundaries are the only places where anything
//! switches, so the integrator restarts there.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FrequencyFrame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CavityDetuning {
    Constant { value: f64 },
    Ramp { start: f64, end: f64 },
}

impl CavityDetuning {
    /// Detuning at fraction `s` in `[0, 1]` of the segment.
    pub fn at(&self, s: f64) -> f64 {
        match *self {
            CavityDetuning::Constant { value } => value,
            CavityDetuning::Ramp { start, end } => start + (end - start) * s,
        }
    }

    fn mirrored(self) -> Self {
        match self {
            CavityDetuning::Ramp { start, end } => CavityDetuning::Ramp { start: end, end: start },
            c => c,
        }
    }

    fn extremes(&self) -> (f64, f64) {
        match *self {
            CavityDetuning::Constant { value } => (value, value),
            CavityDetuning::Ramp { start, end } => (start.min(end), start.max(end)),
        }
    }
}

/// What a segment is for. Parking and rephasing segments do not count toward
/// the cavity travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentRole {
    SpinSwap,
    QubitSwap,
    Park,
    Gap,
    Retune,
    Sweep,
    /// Free precession of the spins under the induced gradient, decoupled
    /// from the cavity.
    Rephase,
}

impl SegmentRole {
    fn counts_toward_travel(self) -> bool {
        !matches!(self, SegmentRole::Park | SegmentRole::Gap | SegmentRole::Rephase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub role: SegmentRole,
    pub duration: f64,
    pub cavity: CavityDetuning,
    /// Sign of the induced broadening, `+1` or `-1`.
    pub gradient_sign: i8,
    #[serde(default)]
    pub common_spin_shift: f64,
}

impl Segment {
    pub fn constant(role: SegmentRole, duration: f64, cavity: f64, gradient_sign: i8) -> Self {
        Self {
            role,
            duration,
            cavity: CavityDetuning::Constant { value: cavity },
            gradient_sign,
            common_spin_shift: 0.0,
        }
    }

    pub fn ramp(role: SegmentRole, duration: f64, start: f64, end: f64, gradient_sign: i8) -> Self {
        Self {
            role,
            duration,
            cavity: CavityDetuning::Ramp { start, end },
            gradient_sign,
            common_spin_shift: 0.0,
        }
    }

    pub fn with_spin_shift(mut self, shift: f64) -> Self {
        self.common_spin_shift = shift;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Staggered,
    Adiabatic,
    ReducedSweep,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMetadata {
    /// Spin-cavity swap time `pi / (2 kappa sqrt(N))`, before trimming.
    pub t_s: f64,
    /// Cavity-qubit swap time `pi / (2 G)`, before trimming.
    pub t_c: f64,
    pub tau_r: f64,
    pub variant: Variant,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub segments: Vec<Segment>,
    pub metadata: ScheduleMetadata,
}

impl ProtocolSchedule {
    /// Hand-built schedule; timing metadata is zero.
    pub fn custom(segments: Vec<Segment>) -> Self {
        Self {
            segments,
            metadata: ScheduleMetadata {
                t_s: 0.0,
                t_c: 0.0,
                tau_r: 0.0,
                variant: Variant::Custom,
                reversed: false,
            },
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Start time of every segment, plus the end time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// Structural checks: finite non-negative durations, unit gradient signs.
    pub fn check(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration >= 0.0 && s.duration.is_finite()) {
                return Err(Error::Schedule(format!(
                    "segment {i}: duration {} must be finite and >= 0",
                    s.duration
                )));
            }
            if s.gradient_sign != 1 && s.gradient_sign != -1 {
                return Err(Error::Schedule(format!(
                    "segment {i}: gradient_sign must be +1 or -1, got {}",
                    s.gradient_sign
                )));
            }
            let (lo, hi) = s.cavity.extremes();
            if !lo.is_finite() || !hi.is_finite() || !s.common_spin_shift.is_finite() {
                return Err(Error::Schedule(format!("segment {i}: non-finite detuning")));
            }
        }
        Ok(())
    }

    /// Span of cavity detunings visited while the cavity is doing work.
    pub fn cavity_travel(&self) -> f64 {
        let (lo, hi) = self
            .segments
            .iter()
            .filter(|s| s.role.counts_toward_travel() && s.duration > 0.0)
            .map(|s| s.cavity.extremes())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| {
                (a.min(l), b.max(h))
            });
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.check()?;
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Inputs of the staggered protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaggeredSpec {
    /// `kappa sqrt(N)` in units of `G`.
    pub collective_coupling: f64,
    pub qubit_coupling: f64,
    pub frame: FrequencyFrame,
    pub tau_r: f64,
    pub trim_s: f64,
    pub trim_c: f64,
    /// Duration of each linear retuning; 0 switches instantly.
    pub ramp: f64,
    /// Idle time with the cavity parked between the spin and qubit swaps.
    pub gap: f64,
    /// Length of the final parked segment.
    pub park_duration: f64,
}

impl Default for StaggeredSpec {
    fn default() -> Self {
        Self {
            collective_coupling: 6.0,
            qubit_coupling: 1.0,
            frame: FrequencyFrame {
                spin_detuning: 200.0,
                cavity_offset: 20.0,
                global_shift: 0.0,
            },
            tau_r: 0.15,
            trim_s: 1.0,
            trim_c: 1.0,
            ramp: 0.0,
            gap: 0.0,
            park_duration: 1.0,
        }
    }
}

/// Swap times `(T_S, T_C) = (pi / (2 kappa sqrt(N)), pi / (2 G))`.
pub fn swap_times(collective_coupling: f64, qubit_coupling: f64) -> Result<(f64, f64)> {
    if !(collective_coupling > 0.0) {
        return Err(Error::param(
            "kappa_sqrtN",
            format!("must be positive, got {collective_coupling}"),
        ));
    }
    if !(qubit_coupling > 0.0) {
        return Err(Error::param("G", format!("must be positive, got {qubit_coupling}")));
    }
    Ok((PI / (2.0 * collective_coupling), PI / (2.0 * qubit_coupling)))
}

fn check_timing(spec: &StaggeredSpec) -> Result<()> {
    let checks = [
        ("trim_S", spec.trim_s),
        ("trim_C", spec.trim_c),
        ("ramp", spec.ramp),
        ("gap", spec.gap),
        ("park_duration", spec.park_duration),
        ("tau_R", spec.tau_r),
    ];
    for (name, v) in checks {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    Ok(())
}

/// Cavity at the spin line for `T_S`, at the qubit for `T_C`, then parked,
/// with the induced gradient reversed (`-1`) throughout.
pub fn build_staggered(spec: &StaggeredSpec) -> Result<ProtocolSchedule> {
    let (t_s, t_c) = swap_times(spec.collective_coupling, spec.qubit_coupling)?;
    check_timing(spec)?;
    let spin = spec.frame.spin_detuning;
    let park = spec.frame.cavity_park();
    let mut segments = Vec::new();
    if spec.ramp > 0.0 {
        segments.push(Segment::ramp(SegmentRole::Retune, spec.ramp, park, spin, -1));
    }
    segments.push(Segment::constant(SegmentRole::SpinSwap, spec.trim_s * t_s, spin, -1));
    if spec.gap > 0.0 {
        segments.push(Segment::constant(SegmentRole::Gap, spec.gap, park, -1));
    }
    if spec.ramp > 0.0 {
        let from = if spec.gap > 0.0 { park } else { spin };
        segments.push(Segment::ramp(SegmentRole::Retune, spec.ramp, from, 0.0, -1));
    }
    segments.push(Segment::constant(SegmentRole::QubitSwap, spec.trim_c * t_c, 0.0, -1));
    if spec.ramp > 0.0 {
        segments.push(Segment::ramp(SegmentRole::Retune, spec.ramp, 0.0, park, -1));
    }
    segments.push(Segment::constant(SegmentRole::Park, spec.park_duration, park, -1));
    Ok(ProtocolSchedule {
        segments,
        metadata: ScheduleMetadata {
            t_s,
            t_c,
            tau_r: spec.tau_r,
            variant: Variant::Staggered,
            reversed: false,
        },
    })
}

/// Distance of the sweep end points from the nearest resonance, in units of
/// the coupling at that resonance.
const ADIABATIC_MARGIN: f64 = 10.0;

/// One linear cavity sweep from above the spin line to below the qubit. Each
/// end point sits at least `cavity_offset` and at least ten couplings away
/// from its resonance, so the initial spin excitation and the final qubit
/// excitation are close to eigenstates.
pub fn build_adiabatic(spec: &StaggeredSpec, sweep_duration: f64) -> Result<ProtocolSchedule> {
    let (t_s, t_c) = swap_times(spec.collective_coupling, spec.qubit_coupling)?;
    check_timing(spec)?;
    if !(sweep_duration >= 0.0 && sweep_duration.is_finite()) {
        return Err(Error::param(
            "sweep_duration",
            format!("must be finite and >= 0, got {sweep_duration}"),
        ));
    }
    let offset = spec.frame.cavity_offset;
    let start = spec.frame.spin_detuning + offset.max(ADIABATIC_MARGIN * spec.collective_coupling);
    let end = -offset.max(ADIABATIC_MARGIN * spec.qubit_coupling);
    Ok(ProtocolSchedule {
        segments: vec![
            Segment::ramp(SegmentRole::Sweep, sweep_duration, start, end, -1),
            Segment::constant(SegmentRole::Park, spec.park_duration, end, -1),
        ],
        metadata: ScheduleMetadata {
            t_s,
            t_c,
            tau_r: spec.tau_r,
            variant: Variant::Adiabatic,
            reversed: false,
        },
    })
}

/// Staggered transfer with the spins brought down to `cavity_offset` above
/// the qubit by a common shift, so the cavity only travels that far. While
/// the cavity meets the qubit the spins are pushed a further
/// `spin_park_detuning` away.
pub fn build_reduced_sweep(spec: &StaggeredSpec, spin_park_detuning: f64) -> Result<ProtocolSchedule> {
    let (t_s, t_c) = swap_times(spec.collective_coupling, spec.qubit_coupling)?;
    check_timing(spec)?;
    if !spin_park_detuning.is_finite() {
        return Err(Error::param("spin_park_detuning", "must be finite"));
    }
    let meet = spec.frame.cavity_offset;
    let shift = meet - spec.frame.spin_detuning;
    let parked = shift + spin_park_detuning;
    let mut segments =
        vec![Segment::constant(SegmentRole::SpinSwap, spec.trim_s * t_s, meet, -1).with_spin_shift(shift)];
    if spec.gap > 0.0 {
        segments.push(Segment::constant(SegmentRole::Gap, spec.gap, meet, -1).with_spin_shift(parked));
    }
    if spec.ramp > 0.0 {
        segments.push(Segment::ramp(SegmentRole::Retune, spec.ramp, meet, 0.0, -1).with_spin_shift(parked));
    }
    segments.push(Segment::constant(SegmentRole::QubitSwap, spec.trim_c * t_c, 0.0, -1).with_spin_shift(parked));
    if spec.ramp > 0.0 {
        segments.push(Segment::ramp(SegmentRole::Retune, spec.ramp, 0.0, meet, -1).with_spin_shift(parked));
    }
    segments.push(Segment::constant(SegmentRole::Park, spec.park_duration, meet, -1).with_spin_shift(parked));
    Ok(ProtocolSchedule {
        segments,
        metadata: ScheduleMetadata {
            t_s,
            t_c,
            tau_r: spec.tau_r,
            variant: Variant::ReducedSweep,
            reversed: false,
        },
    })
}

/// Segments in reverse order with ramps mirrored and gradient signs negated.
pub fn reverse_schedule(schedule: &ProtocolSchedule) -> ProtocolSchedule {
    let segments = schedule
        .segments
        .iter()
        .rev()
        .map(|s| Segment {
            role: s.role,
            duration: s.duration,
            cavity: s.cavity.mirrored(),
            gradient_sign: -s.gradient_sign,
            common_spin_shift: s.common_spin_shift,
        })
        .collect();
    let mut metadata = schedule.metadata.clone();
    metadata.reversed = !metadata.reversed;
    ProtocolSchedule { segments, metadata }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    /// The cavity has to tune further than the hardware allows.
    TravelExceedsBudget { travel: f64, budget: f64 },
    /// Spins and qubit are not far detuned from each other.
    SpinQubitProximity { spin_detuning: f64, threshold: f64 },
    /// Nothing to run.
    EmptySchedule,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::TravelExceedsBudget { travel, budget } => {
                write!(f, "cavity travel {travel:.4} G exceeds the tuning budget {budget:.4} G")
            }
            Diagnostic::SpinQubitProximity {
                spin_detuning,
                threshold,
            } => write!(
                f,
                "spin line sits {spin_detuning:.4} G from the qubit, below 3 kappa sqrt(N) = {threshold:.4} G"
            ),
            Diagnostic::EmptySchedule => write!(f, "schedule has zero total duration"),
        }
    }
}

/// Soft checks of a schedule against hardware and parameter sanity limits.
pub fn validate(
    schedule: &ProtocolSchedule,
    frame: &FrequencyFrame,
    collective_coupling: f64,
    travel_budget: Option<f64>,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if schedule.total_duration() <= 0.0 {
        out.push(Diagnostic::EmptySchedule);
    }
    if let Some(budget) = travel_budget {
        let travel = schedule.cavity_travel();
        if travel > budget {
            out.push(Diagnostic::TravelExceedsBudget { travel, budget });
        }
    }
    let threshold = 3.0 * collective_coupling;
    if frame.spin_detuning.abs() < threshold {
        out.push(Diagnostic::SpinQubitProximity {
            spin_detuning: frame.spin_detuning,
            threshold,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn swap_times_from_couplings() {
        let s = build_staggered(&StaggeredSpec::default()).unwrap();
        assert_abs_diff_eq!(s.metadata.t_s, PI / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.metadata.t_s, 0.261_799_387_799_149_4, epsilon = 1e-15);
        assert_abs_diff_eq!(s.metadata.t_c, 1.570_796_326_794_896_6, epsilon = 1e-15);
        let roles: Vec<_> = s.segments.iter().map(|x| x.role).collect();
        assert_eq!(
            roles,
            [SegmentRole::SpinSwap, SegmentRole::QubitSwap, SegmentRole::Park]
        );
        assert!(s.segments.iter().all(|x| x.gradient_sign == -1));
    }

    #[test]
    fn trim_only_touches_its_segment() {
        let base = build_staggered(&StaggeredSpec::default()).unwrap();
        let trimmed = build_staggered(&StaggeredSpec {
            trim_s: 1.05,
            ..StaggeredSpec::default()
        })
        .unwrap();
        assert_abs_diff_eq!(
            trimmed.segments[0].duration / base.segments[0].duration,
            1.05,
            epsilon = 1e-15
        );
        assert_eq!(trimmed.segments[1..], base.segments[1..]);
    }

    #[test]
    fn strong_coupling_limit() {
        let spec = StaggeredSpec {
            collective_coupling: 1e12,
            ..StaggeredSpec::default()
        };
        assert!(build_staggered(&spec).unwrap().metadata.t_s < 1e-11);
    }

    #[test]
    fn rejects_non_positive_couplings() {
        for (k, g) in [(0.0, 1.0), (-1.0, 1.0), (6.0, 0.0)] {
            let spec = StaggeredSpec {
                collective_coupling: k,
                qubit_coupling: g,
                ..StaggeredSpec::default()
            };
            assert!(build_staggered(&spec).is_err());
        }
    }

    #[test]
    fn reversal() {
        let s = build_staggered(&StaggeredSpec {
            ramp: 0.1,
            ..StaggeredSpec::default()
        })
        .unwrap();
        let r = reverse_schedule(&s);
        assert_eq!(reverse_schedule(&r), s);
        assert!(r.metadata.reversed);
        assert!(r.segments.iter().all(|x| x.gradient_sign == 1));
        assert_eq!(
            r.segments.last().unwrap().cavity,
            CavityDetuning::Ramp {
                start: 200.0,
                end: 220.0
            }
        );
        assert_abs_diff_eq!(r.total_duration(), s.total_duration(), epsilon = 1e-15);

        let plain = build_staggered(&StaggeredSpec::default()).unwrap();
        let roles: Vec<_> = reverse_schedule(&plain).segments.iter().map(|x| x.role).collect();
        assert_eq!(
            roles,
            [SegmentRole::Park, SegmentRole::QubitSwap, SegmentRole::SpinSwap]
        );

        let empty = ProtocolSchedule {
            segments: vec![],
            metadata: plain.metadata.clone(),
        };
        assert!(reverse_schedule(&empty).segments.is_empty());
    }

    #[test]
    fn travel_budget_diagnostics() {
        // spin line 20 G above the qubit, cavity parked 10 G higher
        let frame = FrequencyFrame {
            spin_detuning: 20.0,
            cavity_offset: 10.0,
            global_shift: 0.0,
        };
        let s = build_staggered(&StaggeredSpec {
            frame,
            ..StaggeredSpec::default()
        })
        .unwrap();
        assert_abs_diff_eq!(s.cavity_travel(), 20.0, epsilon = 1e-15);
        assert!(validate(&s, &frame, 6.0, Some(25.0)).is_empty());
        let d = validate(&s, &frame, 6.0, Some(10.0));
        assert_eq!(
            d,
            vec![Diagnostic::TravelExceedsBudget {
                travel: 20.0,
                budget: 10.0
            }]
        );
    }

    #[test]
    fn proximity_diagnostic() {
        let frame = FrequencyFrame {
            spin_detuning: 6.0,
            cavity_offset: 10.0,
            global_shift: 0.0,
        };
        let s = build_staggered(&StaggeredSpec {
            frame,
            ..StaggeredSpec::default()
        })
        .unwrap();
        let d = validate(&s, &frame, 6.0, None);
        assert!(matches!(d[..], [Diagnostic::SpinQubitProximity { .. }]));
    }

    #[test]
    fn reduced_sweep_travels_less() {
        let spec = StaggeredSpec::default();
        let full = build_staggered(&spec).unwrap();
        let reduced = build_reduced_sweep(&spec, 100.0).unwrap();
        assert_abs_diff_eq!(reduced.cavity_travel(), 20.0, epsilon = 1e-15);
        assert!(reduced.cavity_travel() < full.cavity_travel());
        assert_eq!(reduced.segments[1].common_spin_shift, -180.0 + 100.0);
    }

    #[test]
    fn adiabatic_sweep_crosses_both_resonances() {
        let s = build_adiabatic(&StaggeredSpec::default(), 40.0).unwrap();
        assert_eq!(
            s.segments[0].cavity,
            CavityDetuning::Ramp {
                start: 260.0,
                end: -20.0
            }
        );
        assert!(build_adiabatic(&StaggeredSpec::default(), -1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_checks() {
        let s = build_staggered(&StaggeredSpec {
            ramp: 0.05,
            gap: 0.2,
            ..StaggeredSpec::default()
        })
        .unwrap();
        let text = s.to_json().unwrap();
        assert!(text.contains("\"gradient_sign\": -1"));
        assert_eq!(ProtocolSchedule::from_json(&text).unwrap(), s);
        let bad = text.replacen("\"gradient_sign\": -1", "\"gradient_sign\": 2", 1);
        assert!(ProtocolSchedule::from_json(&bad).is_err());
    }
}
