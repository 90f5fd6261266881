//! Two-axis parameter sweeps of the staggered transfer and scalar
//! optimization of its timing.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::optimize::{maximize, ScalarMaximum, SearchOptions};
use crate::transfer::{run_staggered, TransferParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "delta_IB")]
    DeltaIb,
    #[serde(rename = "tau_R")]
    TauR,
    #[serde(rename = "kappa_sqrtN")]
    KappaSqrtN,
    #[serde(rename = "delta_inh")]
    DeltaInh,
    #[serde(rename = "Delta")]
    Delta,
    #[serde(rename = "trim_S")]
    TrimS,
    #[serde(rename = "trim_C")]
    TrimC,
}

impl AxisName {
    pub const ALL: [AxisName; 7] = [
        AxisName::DeltaIb,
        AxisName::TauR,
        AxisName::KappaSqrtN,
        AxisName::DeltaInh,
        AxisName::Delta,
        AxisName::TrimS,
        AxisName::TrimC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::DeltaIb => "delta_IB",
            AxisName::TauR => "tau_R",
            AxisName::KappaSqrtN => "kappa_sqrtN",
            AxisName::DeltaInh => "delta_inh",
            AxisName::Delta => "Delta",
            AxisName::TrimS => "trim_S",
            AxisName::TrimC => "trim_C",
        }
    }

    /// Writes `value` into the matching field of `params`.
    pub fn apply(self, params: &mut TransferParams, value: f64) {
        match self {
            AxisName::DeltaIb => params.ensemble.intrinsic_half_width = value,
            AxisName::TauR => params.tau_r = value,
            AxisName::KappaSqrtN => params.ensemble.collective_coupling = value,
            AxisName::DeltaInh => params.ensemble.induced_half_width = value,
            AxisName::Delta => params.frame.cavity_offset = value,
            AxisName::TrimS => params.trim_s = value,
            AxisName::TrimC => params.trim_c = value,
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxisName::ALL.into_iter().find(|a| a.as_str() == s).ok_or_else(|| {
            let valid: Vec<_> = AxisName::ALL.iter().map(|a| a.as_str()).collect();
            Error::param("axis", format!("unknown axis `{s}`; valid axes: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, n_points: usize) -> Self {
        Self {
            name,
            min,
            max,
            n_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::param(
                "n_points",
                format!("axis {} needs at least 2 points", self.name),
            ));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::param(
                "range",
                format!("axis {} needs min < max, got [{}, {}]", self.name, self.min, self.max),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.n_points;
        let mut v: Vec<f64> = (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect();
        v[n - 1] = self.max;
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    pub fixed: TransferParams,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub workers: usize,
}

impl SweepSpec {
    /// Fig. 2 layout: `delta_IB` in `[0, 5]` by `tau_R` in `[0, 0.5]`, 40 x 40,
    /// with `delta_inh = 7` and `kappa sqrt(N) = 6`.
    pub fn fig2() -> Self {
        let mut fixed = TransferParams::default();
        fixed.ensemble.induced_half_width = 7.0;
        fixed.ensemble.collective_coupling = 6.0;
        Self {
            axis1: Axis::new(AxisName::DeltaIb, 0.0, 5.0, 40),
            axis2: Axis::new(AxisName::TauR, 0.0, 0.5, 40),
            fixed,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.axis1.name == self.axis2.name {
            return Err(Error::param("axis", format!("both axes are {}", self.axis1.name)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axis1.n_points * self.axis2.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn header(&self) -> [String; 3] {
        [
            self.axis1.name.to_string(),
            self.axis2.name.to_string(),
            "efficiency".to_string(),
        ]
    }

    /// Grid coordinates in row-major order (`axis1` outer).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let v2 = self.axis2.values();
        self.axis1
            .values()
            .into_iter()
            .flat_map(|a| v2.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn params_at(&self, a: f64, b: f64) -> TransferParams {
        let mut p = self.fixed.clone();
        self.axis1.name.apply(&mut p, a);
        self.axis2.name.apply(&mut p, b);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub axis1: f64,
    pub axis2: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Row-major over `(axis1, axis2)`; `NaN` marks a failed point.
    pub efficiency: Vec<f64>,
    pub failures: Vec<PointFailure>,
    /// Points taken over from an earlier partial run.
    pub reused: usize,
    pub wall_time_s: f64,
}

impl SweepResult {
    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.spec
            .points()
            .into_iter()
            .zip(&self.efficiency)
            .map(|((a, b), e)| vec![a, b, *e])
            .collect::<Vec<_>>()
            .into_iter()
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let header = self.spec.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        io::write_table(writer, &header, self.rows())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Efficiency at grid indices `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.efficiency[i * self.spec.axis2.n_points + j]
    }

    /// Maximum over `axis2` for every `axis1` value, ignoring holes.
    pub fn row_maxima(&self) -> Vec<f64> {
        let n2 = self.spec.axis2.n_points;
        self.efficiency
            .chunks(n2)
            .map(|row| row.iter().copied().filter(|x| !x.is_nan()).fold(f64::NAN, f64::max))
            .collect()
    }
}

/// Loads the completed prefix of a heatmap CSV written for `spec`. Rows
/// must match the grid coordinates exactly; reading stops at the first
/// mismatch.
pub fn read_partial(spec: &SweepSpec, path: &Path) -> Result<Vec<f64>> {
    let header = spec.header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = io::read_table_file(path, &header)?;
    Ok(spec
        .points()
        .iter()
        .zip(&rows)
        .take_while(|((a, b), row)| row[0] == *a && row[1] == *b)
        .map(|(_, row)| row[2])
        .collect())
}

fn evaluate(spec: &SweepSpec, a: f64, b: f64) -> std::result::Result<f64, String> {
    let params = spec.params_at(a, b);
    run_staggered(&params).map(|o| o.efficiency).map_err(|e| e.to_string())
}

/// Evaluates the staggered efficiency on every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_resuming(spec, &[])
}

/// As [`run_sweep`], taking the first `prior.len()` points from an earlier
/// run. Failed points become `NaN` holes and never abort the sweep.
pub fn run_sweep_resuming(spec: &SweepSpec, prior: &[f64]) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec.points();
    if prior.len() > points.len() {
        return Err(Error::param("resume", "existing file has more rows than the grid"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    let start = Instant::now();
    let fresh: Vec<std::result::Result<f64, String>> = pool.install(|| {
        points[prior.len()..]
            .par_iter()
            .map(|&(a, b)| evaluate(spec, a, b))
            .collect()
    });
    let mut efficiency = prior.to_vec();
    let mut failures = Vec::new();
    for (k, r) in fresh.into_iter().enumerate() {
        let index = prior.len() + k;
        match r {
            Ok(e) => efficiency.push(e),
            Err(message) => {
                let (axis1, axis2) = points[index];
                failures.push(PointFailure {
                    index,
                    axis1,
                    axis2,
                    message,
                });
                efficiency.push(f64::NAN);
            }
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        efficiency,
        failures,
        reused: prior.len(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Parameter echo written next to a heatmap CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSidecar {
    pub version: String,
    pub seed: u64,
    pub spec: SweepSpec,
    pub points: usize,
    pub reused: usize,
    pub failures: Vec<PointFailure>,
    pub wall_time_s: f64,
    pub note: String,
}

impl SweepSidecar {
    pub fn new(result: &SweepResult) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: result.spec.fixed.ensemble.assignment_seed,
            spec: result.spec.clone(),
            points: result.efficiency.len(),
            reused: result.reused,
            failures: result.failures.clone(),
            wall_time_s: result.wall_time_s,
            note: "axis ranges are choices of this tool, not values read off a figure".into(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarVariable {
    #[serde(rename = "tau_R")]
    TauR,
    #[serde(rename = "trim_S")]
    TrimS,
    #[serde(rename = "trim_C")]
    TrimC,
}

impl ScalarVariable {
    fn axis(self) -> AxisName {
        match self {
            ScalarVariable::TauR => AxisName::TauR,
            ScalarVariable::TrimS => AxisName::TrimS,
            ScalarVariable::TrimC => AxisName::TrimC,
        }
    }
}

impl FromStr for ScalarVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau_R" => Ok(ScalarVariable::TauR),
            "trim_S" => Ok(ScalarVariable::TrimS),
            "trim_C" => Ok(ScalarVariable::TrimC),
            _ => Err(Error::param(
                "variable",
                format!("unknown variable `{s}`; valid: tau_R, trim_S, trim_C"),
            )),
        }
    }
}

/// Maximizes the staggered efficiency over one timing parameter.
pub fn optimize_scalar(params: &TransferParams, variable: ScalarVariable, lo: f64, hi: f64) -> Result<ScalarMaximum> {
    let axis = variable.axis();
    let objective = |x: f64| {
        let mut p = params.clone();
        axis.apply(&mut p, x);
        run_staggered(&p).map(|o| o.efficiency)
    };
    let opts = SearchOptions {
        tol: 1e-5,
        ..SearchOptions::default()
    };
    maximize(objective, lo, hi, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        let mut spec = SweepSpec::fig2();
        spec.fixed.ensemble.n_spins = 24;
        spec.axis1 = Axis::new(AxisName::DeltaIb, 0.0, 2.0, 2);
        spec.axis2 = Axis::new(AxisName::TauR, 0.0, 0.15, 2);
        spec
    }

    #[test]
    fn axis_names_parse_and_list_valid_choices() {
        for a in AxisName::ALL {
            assert_eq!(a.as_str().parse::<AxisName>().unwrap(), a);
        }
        let err = "delta".parse::<AxisName>().unwrap_err().to_string();
        assert!(err.contains("delta_IB") && err.contains("trim_C"), "{err}");
    }

    #[test]
    fn degenerate_axes_are_rejected() {
        let mut spec = small_spec();
        spec.axis1.max = spec.axis1.min;
        assert!(run_sweep(&spec).is_err());
        let mut spec = small_spec();
        spec.axis2.n_points = 1;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn grid_is_row_major_with_exact_endpoints() {
        let spec = small_spec();
        assert_eq!(spec.points(), vec![(0.0, 0.0), (0.0, 0.15), (2.0, 0.0), (2.0, 0.15)]);
        assert_eq!(Axis::new(AxisName::TauR, 0.0, 0.3, 7).values()[6], 0.3);
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let mut spec = small_spec();
        spec.workers = 1;
        let a = run_sweep(&spec).unwrap();
        spec.workers = 3;
        let b = run_sweep(&spec).unwrap();
        let bits = |r: &SweepResult| r.efficiency.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert!(a.efficiency.iter().all(|e| (0.0..=1.0 + 1e-9).contains(e)));
    }

    #[test]
    fn failures_become_holes() {
        let mut spec = small_spec();
        // negative trims are rejected by the schedule builder
        spec.axis2 = Axis::new(AxisName::TrimS, -1.0, 1.0, 2);
        let r = run_sweep(&spec).unwrap();
        assert!(r.efficiency[0].is_nan() && r.efficiency[2].is_nan());
        assert!(!r.efficiency[1].is_nan());
        assert_eq!(r.failures.len(), 2);
        assert!(r.failures[0].message.contains("trim_S"));
    }

    #[test]
    fn resume_reuses_prefix() {
        let spec = small_spec();
        let full = run_sweep(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("partial.csv");
        let mut partial = full.clone();
        partial.efficiency.truncate(3);
        // write only the first three rows
        let header = spec.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        io::write_table_file(&path, &header, full.rows().take(3)).unwrap();
        let prior = read_partial(&spec, &path).unwrap();
        assert_eq!(prior.len(), 3);
        let resumed = run_sweep_resuming(&spec, &prior).unwrap();
        assert_eq!(resumed.reused, 3);
        assert_eq!(resumed.efficiency, full.efficiency);
    }

    #[test]
    fn degenerate_scalar_range() {
        let mut p = TransferParams::default();
        p.ensemble.n_spins = 16;
        let r = optimize_scalar(&p, ScalarVariable::TauR, 0.1, 0.1).unwrap();
        assert_eq!(r.argmax, 0.1);
    }
}
