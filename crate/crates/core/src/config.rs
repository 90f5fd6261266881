//! Run configuration: a versioned TOML (or JSON) document with one section
//! per stage. Missing keys take the defaults below; unknown keys are errors.
//!
//! ```toml
//! version = 1
//!
//! [units]
//! mode = "mhz"        # or "g-units" (default)
//! g_mhz = 5.0
//!
//! [transfer]
//! kappa_sqrtN = 34.0  # MHz in mhz mode
//! delta_IB = 12.0
//! tau_R = 0.15        # always in 1/G
//!
//! [storage]
//! optical_depth = 2.0
//! envelope = { kind = "gaussian", bandwidth = 0.5 }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DetuningProfile, EnsembleSpec, FrequencyFrame};
use crate::storage::{Envelope, EnvelopeTable, PropagationGrid, StorageProblem};
use crate::sweep::{Axis, AxisName, SweepSpec};
use crate::transfer::{EvolveOptions, TransferParams};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub transfer: TransferSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage: Option<StorageSection>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            units: Units::default(),
            transfer: TransferSection::default(),
            storage: None,
            sweep: SweepSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitsMode {
    #[default]
    GUnits,
    Mhz,
}

/// In `mhz` mode every frequency in `[transfer]` is given in MHz and divided
/// by `g_mhz`; times stay in units of `1/G`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default)]
    pub mode: UnitsMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_mhz: Option<f64>,
}

impl Units {
    fn frequency_scale(&self) -> Result<f64> {
        match (self.mode, self.g_mhz) {
            (UnitsMode::GUnits, _) => Ok(1.0),
            (UnitsMode::Mhz, Some(g)) if g > 0.0 && g.is_finite() => Ok(1.0 / g),
            (UnitsMode::Mhz, Some(g)) => Err(Error::Config(format!("units.g_mhz must be positive, got {g}"))),
            (UnitsMode::Mhz, None) => Err(Error::Config("units.mode = \"mhz\" requires units.g_mhz".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    #[default]
    Staggered,
    Adiabatic,
    ReducedSweep,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSection {
    pub n_spins: usize,
    #[serde(rename = "kappa_sqrtN")]
    pub kappa_sqrt_n: f64,
    #[serde(rename = "delta_IB")]
    pub delta_ib: f64,
    pub intrinsic_profile: DetuningProfile,
    pub delta_inh: f64,
    /// Cavity park offset above the spin line.
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// Spin line relative to the qubit.
    pub spin_detuning: f64,
    pub global_shift: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "tau_R")]
    pub tau_r: f64,
    #[serde(rename = "trim_S")]
    pub trim_s: f64,
    #[serde(rename = "trim_C")]
    pub trim_c: f64,
    pub ramp: f64,
    pub gap: f64,
    pub park_duration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub travel_budget: Option<f64>,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub protocol: ProtocolKind,
    pub sweep_duration: f64,
    pub spin_park_detuning: f64,
}

impl Default for TransferSection {
    fn default() -> Self {
        let p = TransferParams::default();
        Self {
            n_spins: p.ensemble.n_spins,
            kappa_sqrt_n: p.ensemble.collective_coupling,
            delta_ib: p.ensemble.intrinsic_half_width,
            intrinsic_profile: p.ensemble.intrinsic_profile,
            delta_inh: p.ensemble.induced_half_width,
            delta: p.frame.cavity_offset,
            spin_detuning: p.frame.spin_detuning,
            global_shift: p.frame.global_shift,
            g: p.qubit_coupling,
            tau_r: p.tau_r,
            trim_s: p.trim_s,
            trim_c: p.trim_c,
            ramp: p.ramp,
            gap: p.gap,
            park_duration: p.park_duration,
            travel_budget: None,
            tol: p.evolve.tol,
            samples: p.evolve.samples,
            seed: p.ensemble.assignment_seed,
            protocol: ProtocolKind::Staggered,
            sweep_duration: 20.0,
            spin_park_detuning: 100.0,
        }
    }
}

impl TransferSection {
    /// Resolves to transfer parameters in units of `G`.
    pub fn params(&self, units: &Units) -> Result<TransferParams> {
        let k = units.frequency_scale()?;
        let mut profile = self.intrinsic_profile;
        if let DetuningProfile::UniformRandom { seed } | DetuningProfile::Lorentzian { seed } = &mut profile {
            *seed = self.seed;
        }
        Ok(TransferParams {
            ensemble: EnsembleSpec {
                n_spins: self.n_spins,
                collective_coupling: self.kappa_sqrt_n * k,
                intrinsic_half_width: self.delta_ib * k,
                intrinsic_profile: profile,
                induced_half_width: self.delta_inh * k,
                assignment_seed: self.seed,
            },
            frame: FrequencyFrame {
                spin_detuning: self.spin_detuning * k,
                cavity_offset: self.delta * k,
                global_shift: self.global_shift * k,
            },
            qubit_coupling: self.g * k,
            tau_r: self.tau_r,
            trim_s: self.trim_s,
            trim_c: self.trim_c,
            ramp: self.ramp,
            gap: self.gap,
            park_duration: self.park_duration,
            travel_budget: self.travel_budget.map(|b| b * k),
            evolve: EvolveOptions {
                tol: self.tol,
                samples: self.samples,
            },
        })
    }

    pub fn spin_park(&self, units: &Units) -> Result<f64> {
        Ok(self.spin_park_detuning * units.frequency_scale()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSection {
    pub optical_depth: f64,
    #[serde(default = "default_envelope")]
    pub envelope: EnvelopeConfig,
    #[serde(default)]
    pub spectral_offset: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default)]
    pub optimize_width: bool,
    #[serde(default = "default_width_range")]
    pub width_range: [f64; 2],
    #[serde(default)]
    pub crosscheck: bool,
    #[serde(default = "default_n_z")]
    pub n_z: usize,
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    /// Propagation end time in pulse durations after the pulse center.
    #[serde(default = "default_t_final")]
    pub t_final_pulses: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvelopeConfig {
    Gaussian {
        bandwidth: f64,
    },
    FlatSpectrum {
        width: f64,
    },
    /// Two-column `time,re,im` CSV; rescaled to unit norm when `normalize`.
    Table {
        path: PathBuf,
        #[serde(default)]
        normalize: bool,
    },
}

fn default_envelope() -> EnvelopeConfig {
    EnvelopeConfig::Gaussian { bandwidth: 0.5 }
}
fn one() -> f64 {
    1.0
}
fn default_width_range() -> [f64; 2] {
    [0.05, 2.0]
}
fn default_n_z() -> usize {
    PropagationGrid::default().n_z
}
fn default_n_t() -> usize {
    PropagationGrid::default().n_t
}
fn default_t_final() -> f64 {
    10.0
}

impl StorageSection {
    /// Builds the storage problem; relative table paths resolve against `base`.
    pub fn problem(&self, base: &Path) -> Result<StorageProblem> {
        let envelope = match &self.envelope {
            EnvelopeConfig::Gaussian { bandwidth } => Envelope::Gaussian { bandwidth: *bandwidth },
            EnvelopeConfig::FlatSpectrum { width } => Envelope::FlatSpectrum { width: *width },
            EnvelopeConfig::Table { path, normalize } => {
                let env = Envelope::Table(EnvelopeTable::read_csv(&base.join(path))?);
                if *normalize {
                    env.normalized()?
                } else {
                    env
                }
            }
        };
        let problem = StorageProblem {
            envelope,
            optical_depth: self.optical_depth,
            coupling: self.coupling,
            spectral_offset: self.spectral_offset,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn grid(&self) -> PropagationGrid {
        PropagationGrid {
            n_z: self.n_z,
            n_t: self.n_t,
            t_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis1: Axis,
    pub axis2: Axis,
    #[serde(default)]
    pub workers: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        let s = SweepSpec::fig2();
        Self {
            axis1: s.axis1,
            axis2: s.axis2,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check_version()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check_version()?;
        Ok(cfg)
    }

    /// Reads `.json` files as JSON and anything else as TOML. A JSON report
    /// written by the CLI is accepted too: its `config` member is used.
    pub fn load(path: &Path) -> Result<Self> {
        let located = |e: Error| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        };
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        if !path.extension().is_some_and(|e| e == "json") {
            return Self::from_toml(&text).map_err(located);
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| located(Error::Config(e.to_string())))?;
        let inner = value.get("config").cloned().unwrap_or(value);
        Self::from_json(&inner.to_string()).map_err(located)
    }

    fn check_version(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        Ok(())
    }

    /// Syncs derived fields and makes table paths absolute against `base`,
    /// so the document reproduces the run from any working directory.
    pub fn resolved(mut self, base: &Path) -> Self {
        match &mut self.transfer.intrinsic_profile {
            DetuningProfile::UniformRandom { seed } | DetuningProfile::Lorentzian { seed } => {
                *seed = self.transfer.seed
            }
            DetuningProfile::UniformGrid => {}
        }
        if let Some(StorageSection {
            envelope: EnvelopeConfig::Table { path, .. },
            ..
        }) = &mut self.storage
        {
            if path.is_relative() {
                let joined = base.join(&*path);
                *path = std::path::absolute(&joined).unwrap_or(joined);
            }
        }
        self
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn transfer_params(&self) -> Result<TransferParams> {
        self.transfer.params(&self.units)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            axis1: self.sweep.axis1,
            axis2: self.sweep.axis2,
            fixed: self.transfer_params()?,
            workers: self.sweep.workers,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Fig. 3: `Delta = 20`, `kappa sqrt(N) = 6`, `delta_IB = 2`,
    /// `delta_inh = 10`, `tau_R = 0.15`, `N = 128`.
    pub fn fig3() -> Self {
        Self::default()
    }

    /// Fig. 2: the default sweep with `delta_inh = 7` and `kappa sqrt(N) = 6`.
    pub fn fig2() -> Self {
        let mut cfg = Self::default();
        cfg.transfer.delta_inh = 7.0;
        cfg.transfer.kappa_sqrt_n = 6.0;
        cfg
    }

    /// Preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fig2" => Ok(Self::fig2()),
            "fig3" => Ok(Self::fig3()),
            other => Err(Error::Config(format!(
                "unknown preset `{other}`; valid presets: fig2, fig3"
            ))),
        }
    }
}

/// Parses `name:min:max:n` into an axis.
pub fn parse_axis(text: &str) -> Result<Axis> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(Error::Config(format!(
            "axis `{text}` must look like name:min:max:n_points"
        )));
    }
    let name: AxisName = parts[0].parse()?;
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Config(format!("axis `{text}`: bad number `{s}`")))
    };
    let n = parts[3]
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("axis `{text}`: bad point count `{}`", parts[3])))?;
    let axis = Axis::new(name, num(parts[1])?, num(parts[2])?, n);
    axis.validate()?;
    Ok(axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minimal_document_takes_defaults() {
        let cfg = RunConfig::from_toml("version = 1\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.transfer_params().unwrap(), TransferParams::default());
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut cfg = RunConfig::fig2();
        cfg.storage = Some(StorageSection {
            optical_depth: 2.0,
            envelope: EnvelopeConfig::FlatSpectrum { width: 1.0 },
            spectral_offset: 0.0,
            coupling: 1.0,
            optimize_width: true,
            width_range: [0.1, 1.5],
            crosscheck: false,
            n_z: 64,
            n_t: 256,
            t_final_pulses: 10.0,
        });
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&json).unwrap(), cfg);
    }

    #[test]
    fn missing_optical_depth_is_named() {
        let err = RunConfig::from_toml("version = 1\n[storage]\nenvelope = { kind = \"gaussian\", bandwidth = 0.4 }\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("optical_depth"), "{err}");
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let err = RunConfig::from_toml("version = 1\n[transfer]\ntau_R = 0.1\nkappa = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("kappa") && err.contains("line 4"), "{err}");
    }

    #[test]
    fn version_is_checked() {
        assert!(RunConfig::from_toml("version = 7\n").is_err());
    }

    #[test]
    fn mhz_mode_divides_frequencies_by_g() {
        let text = "version = 1\n[units]\nmode = \"mhz\"\ng_mhz = 5.0\n[transfer]\nkappa_sqrtN = 34.0\ndelta_IB = 12.0\nG = 5.0\ntau_R = 0.2\n";
        let p = RunConfig::from_toml(text).unwrap().transfer_params().unwrap();
        assert_abs_diff_eq!(p.ensemble.collective_coupling, 6.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.ensemble.intrinsic_half_width, 2.4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.qubit_coupling, 1.0, epsilon = 1e-15);
        assert_eq!(p.tau_r, 0.2);
        let err = RunConfig::from_toml("version = 1\n[units]\nmode = \"mhz\"\n")
            .unwrap()
            .transfer_params()
            .unwrap_err();
        assert!(err.to_string().contains("g_mhz"));
    }

    #[test]
    fn presets() {
        let f2 = RunConfig::preset("fig2").unwrap().sweep_spec().unwrap();
        assert_eq!(
            f2,
            SweepSpec {
                workers: 0,
                ..SweepSpec::fig2()
            }
        );
        assert_eq!(f2.len(), 1600);
        let f3 = RunConfig::preset("fig3").unwrap().transfer_params().unwrap();
        assert_eq!(f3.ensemble.n_spins, 128);
        assert_eq!(f3.frame.cavity_offset, 20.0);
        assert!(RunConfig::preset("fig4").is_err());
    }

    #[test]
    fn axis_flags() {
        let a = parse_axis("tau_R:0:0.5:11").unwrap();
        assert_eq!(a, Axis::new(AxisName::TauR, 0.0, 0.5, 11));
        let err = parse_axis("tauR:0:1:3").unwrap_err().to_string();
        assert!(err.contains("valid axes"));
        assert!(parse_axis("tau_R:1:1:3").is_err());
    }
}
