//! Command-line front end. The binary only parses arguments and calls
//! [`run`]; everything here is usable from tests.
//!
//! Every command resolves one [`RunConfig`] (file or preset, then flag
//! overrides) and writes it into its JSON report or sidecar. Passing that
//! JSON back with `--config` repeats the run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{parse_axis, OutputFormat, ProtocolKind, RunConfig, StorageSection, CONFIG_VERSION};
use crate::error::{Error, Result};
use crate::io;
use crate::model::EfficiencyReport;
use crate::optimize::ScalarMaximum;
use crate::protocol::{self, swap_times, ProtocolSchedule};
use crate::storage::{
    analytic_coherence, optimize_envelope_width, solve_propagation, storage_efficiency, storage_prefactor, Envelope,
    StorageProblem, WidthOptimum, COHERENCE_COLUMNS,
};
use crate::sweep::{optimize_scalar, read_partial, run_sweep_resuming, ScalarVariable, SweepResult, SweepSidecar};
use crate::transfer::{
    build_reverse, eta_t_estimate, run_adiabatic, run_reduced_sweep_variant, run_reverse, run_staggered,
    DephasingEstimate, TransferOutcome, TRAJECTORY_COLUMNS,
};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "crib-transfer",
    version,
    about = "Photon storage and spin-to-qubit transfer simulations"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML config, or a JSON report written by an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sweep worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Format of the data tables (trajectory, heatmap, coherence).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Storage efficiency of the configured envelope.
    Storage {
        /// Also propagate the pulse numerically and compare with the
        /// long-time coherence.
        #[arg(long)]
        crosscheck: bool,
        /// Maximize over the gaussian bandwidth.
        #[arg(long)]
        optimize_width: bool,
        #[arg(long)]
        optical_depth: Option<f64>,
    },
    /// One transfer run with trajectory output.
    Transfer(TransferArgs),
    /// Efficiency heatmap over two parameters.
    Sweep {
        /// Continue from the heatmap already in the output directory.
        #[arg(long)]
        resume: bool,
        /// `name:min:max:n_points`
        #[arg(long)]
        axis1: Option<String>,
        #[arg(long)]
        axis2: Option<String>,
    },
    /// Closed-form dephasing estimates.
    Estimate {
        #[arg(long = "delta-ib")]
        delta_ib: f64,
        #[arg(long = "kappa-sqrtn", default_value_t = 6.0)]
        kappa_sqrt_n: f64,
    },
    /// Maximize the staggered efficiency over one timing parameter.
    Optimize {
        /// tau_R, trim_S or trim_C
        #[arg(long)]
        variable: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
    },
    /// Write the schedule of the configured protocol as JSON.
    Schedule(TransferArgs),
    /// Run a figure preset.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TransferArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolKind>,
    #[arg(long)]
    pub sweep_duration: Option<f64>,
    #[arg(long)]
    pub spin_park: Option<f64>,
    #[arg(long = "tau-r")]
    pub tau_r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Runs the command and maps the outcome to an exit status, reporting
/// errors on stderr.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    std::fs::create_dir_all(&g.out_dir)?;
    match &cli.command {
        Command::Storage {
            crosscheck,
            optimize_width,
            optical_depth,
        } => {
            let mut cfg = load(g)?;
            let section = match (cfg.storage.take(), optical_depth) {
                (Some(mut s), d) => {
                    if let Some(d) = d {
                        s.optical_depth = *d;
                    }
                    s
                }
                (None, Some(d)) => toml::from_str::<StorageSection>(&format!("optical_depth = {d:?}"))
                    .map_err(|e| Error::Config(e.to_string()))?,
                (None, None) => {
                    return Err(Error::Config(
                        "missing [storage] section: field `optical_depth` is required".into(),
                    ))
                }
            };
            cfg.storage = Some(StorageSection {
                crosscheck: section.crosscheck || *crosscheck,
                optimize_width: section.optimize_width || *optimize_width,
                ..section
            });
            let cfg = finish(cfg, g);
            cmd_storage(&cfg, &g.out_dir).map(|r| {
                println!("eta_S {:.6}", r.eta_s);
                if let Some(c) = &r.crosscheck {
                    println!("cross-check relative L2 {:.3e}", c.relative_l2);
                }
            })
        }
        Command::Transfer(args) => {
            let mut cfg = load(g)?;
            apply_transfer_args(&mut cfg, args);
            let cfg = finish(cfg, g);
            report_transfer(cmd_transfer(&cfg, &g.out_dir)?);
            Ok(())
        }
        Command::Schedule(args) => {
            let mut cfg = load(g)?;
            apply_transfer_args(&mut cfg, args);
            let cfg = finish(cfg, g);
            let schedule = build_schedule(&cfg)?;
            let path = g.out_dir.join("schedule.json");
            schedule.write_json(&path)?;
            println!(
                "{} segments, total {:.6} 1/G -> {}",
                schedule.segments.len(),
                schedule.total_duration(),
                path.display()
            );
            Ok(())
        }
        Command::Sweep { resume, axis1, axis2 } => {
            let mut cfg = load(g)?;
            if let Some(a) = axis1 {
                cfg.sweep.axis1 = parse_axis(a)?;
            }
            if let Some(a) = axis2 {
                cfg.sweep.axis2 = parse_axis(a)?;
            }
            let cfg = finish(cfg, g);
            report_sweep(&cmd_sweep(&cfg, &g.out_dir, *resume)?);
            Ok(())
        }
        Command::Estimate { delta_ib, kappa_sqrt_n } => {
            let est = cmd_estimate(*delta_ib, *kappa_sqrt_n)?;
            print!("{}", est.render(g.format.unwrap_or_default())?);
            Ok(())
        }
        Command::Optimize { variable, min, max } => {
            let variable: ScalarVariable = variable.parse()?;
            let cfg = finish(load(g)?, g);
            let max = cmd_optimize(&cfg, &g.out_dir, variable, *min, *max)?;
            println!(
                "argmax {:.6} efficiency {:.6} ({} evaluations)",
                max.argmax, max.value, max.evaluations
            );
            Ok(())
        }
        Command::Reproduce { figure } => {
            if g.config.is_some() {
                return Err(Error::Config(
                    "reproduce uses a fixed preset and takes no --config".into(),
                ));
            }
            match figure {
                Figure::Fig2 => {
                    let cfg = finish(RunConfig::fig2(), g);
                    report_sweep(&cmd_sweep(&cfg, &g.out_dir, false)?);
                }
                Figure::Fig3 => {
                    let cfg = finish(RunConfig::fig3(), g);
                    report_transfer(cmd_transfer(&cfg, &g.out_dir)?);
                }
            }
            Ok(())
        }
    }
}

fn load(g: &GlobalArgs) -> Result<RunConfig> {
    match &g.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn base_dir(g: &GlobalArgs) -> PathBuf {
    g.config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Applies the global flags and resolves paths.
fn finish(mut cfg: RunConfig, g: &GlobalArgs) -> RunConfig {
    if let Some(seed) = g.seed {
        cfg.transfer.seed = seed;
    }
    if let Some(w) = g.workers {
        cfg.sweep.workers = w;
    }
    if let Some(f) = g.format {
        cfg.output.format = f;
    }
    cfg.resolved(&base_dir(g))
}

fn apply_transfer_args(cfg: &mut RunConfig, args: &TransferArgs) {
    if let Some(p) = args.protocol {
        cfg.transfer.protocol = p;
    }
    if let Some(d) = args.sweep_duration {
        cfg.transfer.sweep_duration = d;
    }
    if let Some(d) = args.spin_park {
        cfg.transfer.spin_park_detuning = d;
    }
    if let Some(t) = args.tau_r {
        cfg.transfer.tau_r = t;
    }
}

fn report_transfer(r: TransferReport) {
    println!("{:?} efficiency {:.6}", r.protocol, r.efficiency);
    for d in &r.diagnostics {
        println!("warning: {d}");
    }
    if let Some(s) = &r.storage {
        println!("eta_S {:.6} eta {:.6}", s.eta_s, s.eta_total);
    }
}

fn report_sweep(r: &SweepResult) {
    println!(
        "{} points ({} reused, {} failed) in {:.1} s",
        r.efficiency.len(),
        r.reused,
        r.failures.len(),
        r.wall_time_s
    );
}

/// JSON document with the resolved configuration and the results.
#[derive(Debug, Serialize)]
pub struct Document<'a, T> {
    pub version: u32,
    pub crate_version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub results: &'a T,
}

fn write_report<T: Serialize>(path: &Path, command: &str, cfg: &RunConfig, results: &T) -> Result<()> {
    let doc = Document {
        version: CONFIG_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        results,
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

/// A data table in the configured format; JSON tables carry the config.
/// Returns the file name.
fn write_data<I>(dir: &Path, stem: &str, cfg: &RunConfig, header: &[&str], rows: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    match cfg.output.format {
        OutputFormat::Csv => {
            let path = PathBuf::from(format!("{stem}.csv"));
            io::write_table_file(&dir.join(&path), header, rows)?;
            Ok(path)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                columns: &'a [&'a str],
                rows: Vec<Vec<Option<f64>>>,
            }
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.is_finite().then_some(x)).collect())
                .collect();
            let path = PathBuf::from(format!("{stem}.json"));
            write_report(&dir.join(&path), stem, cfg, &Table { columns: header, rows })?;
            Ok(path)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StorageReport {
    pub optical_depth: f64,
    pub prefactor: f64,
    pub envelope: Envelope,
    pub pulse_duration: f64,
    pub eta_s: f64,
    pub width_optimum: Option<WidthOptimum>,
    pub crosscheck: Option<CrossCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub time: f64,
    pub early_time: bool,
    pub relative_l2: f64,
    pub numeric: PathBuf,
    pub analytic: PathBuf,
}

/// Storage efficiency with the optional width search; with the search the
/// optimized envelope replaces the configured one.
pub fn storage_stage(section: &StorageSection, base: &Path) -> Result<(StorageProblem, Option<WidthOptimum>)> {
    let mut problem = section.problem(base)?;
    let optimum = if section.optimize_width {
        if !matches!(problem.envelope, Envelope::Gaussian { .. }) {
            return Err(Error::Config("optimize_width needs a gaussian envelope".into()));
        }
        let [lo, hi] = section.width_range;
        let opt = optimize_envelope_width(&problem, lo, hi)?;
        problem.envelope = Envelope::Gaussian {
            bandwidth: opt.bandwidth,
        };
        Some(opt)
    } else {
        None
    };
    Ok((problem, optimum))
}

pub fn cmd_storage(cfg: &RunConfig, out_dir: &Path) -> Result<StorageReport> {
    let section = cfg
        .storage
        .as_ref()
        .ok_or_else(|| Error::Config("missing [storage] section: field `optical_depth` is required".into()))?;
    let (problem, width_optimum) = storage_stage(section, Path::new("."))?;
    let eta_s = storage_efficiency(&problem)?;
    let crosscheck = if section.crosscheck {
        let time = section.t_final_pulses * problem.pulse_duration();
        let numeric = solve_propagation(&problem, section.grid(), time)?.coherence;
        let analytic = analytic_coherence(&problem, time, section.n_z)?;
        let rows = |c: &crate::storage::CoherenceField| -> Vec<Vec<f64>> {
            c.grid
                .iter()
                .zip(&c.values)
                .map(|(x, v)| vec![*x, v.re, v.im])
                .collect()
        };
        Some(CrossCheck {
            time,
            early_time: analytic.early_time,
            relative_l2: numeric.relative_l2_distance(&analytic)?,
            numeric: write_data(out_dir, "coherence_numeric", cfg, &COHERENCE_COLUMNS, rows(&numeric))?,
            analytic: write_data(out_dir, "coherence_analytic", cfg, &COHERENCE_COLUMNS, rows(&analytic))?,
        })
    } else {
        None
    };
    let report = StorageReport {
        optical_depth: problem.optical_depth,
        prefactor: storage_prefactor(problem.optical_depth),
        pulse_duration: problem.pulse_duration(),
        envelope: problem.envelope,
        eta_s,
        width_optimum,
        crosscheck,
    };
    write_report(&out_dir.join("storage_report.json"), "storage", cfg, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub protocol: ProtocolKind,
    /// Final qubit population, or the symmetric spin-mode population for
    /// the reverse protocol.
    pub efficiency: f64,
    pub final_spin_population: f64,
    pub final_cavity_population: f64,
    pub final_qubit_population: f64,
    pub max_norm_drift: f64,
    pub cavity_travel: f64,
    pub diagnostics: Vec<String>,
    pub dephasing_estimate: DephasingEstimate,
    pub steps: usize,
    pub trajectory: PathBuf,
    pub schedule: ProtocolSchedule,
    /// Storage times transfer, when a storage section is configured.
    pub storage: Option<EfficiencyReport>,
}

pub fn build_schedule(cfg: &RunConfig) -> Result<ProtocolSchedule> {
    let params = cfg.transfer_params()?;
    let spec = params.staggered_spec();
    match cfg.transfer.protocol {
        ProtocolKind::Staggered => protocol::build_staggered(&spec),
        ProtocolKind::Adiabatic => protocol::build_adiabatic(&spec, cfg.transfer.sweep_duration),
        ProtocolKind::ReducedSweep => protocol::build_reduced_sweep(&spec, cfg.transfer.spin_park(&cfg.units)?),
        ProtocolKind::Reverse => build_reverse(&params),
    }
}

pub fn run_protocol(cfg: &RunConfig) -> Result<TransferOutcome> {
    let params = cfg.transfer_params()?;
    match cfg.transfer.protocol {
        ProtocolKind::Staggered => run_staggered(&params),
        ProtocolKind::Adiabatic => run_adiabatic(&params, cfg.transfer.sweep_duration),
        ProtocolKind::ReducedSweep => run_reduced_sweep_variant(&params, cfg.transfer.spin_park(&cfg.units)?),
        ProtocolKind::Reverse => run_reverse(&params),
    }
}

pub fn cmd_transfer(cfg: &RunConfig, out_dir: &Path) -> Result<TransferReport> {
    let start = Instant::now();
    let params = cfg.transfer_params()?;
    let outcome = run_protocol(cfg)?;
    let (t_s, _) = swap_times(params.ensemble.collective_coupling, params.qubit_coupling)?;
    let storage = match &cfg.storage {
        Some(section) => {
            let (problem, _) = storage_stage(section, Path::new("."))?;
            let eta_s = storage_efficiency(&problem)?;
            Some(EfficiencyReport::new(eta_s, outcome.efficiency)?)
        }
        None => None,
    };
    let traj = &outcome.trajectory;
    let trajectory = write_data(out_dir, "trajectory", cfg, &TRAJECTORY_COLUMNS, traj.rows())?;
    let last = traj.len() - 1;
    let report = TransferReport {
        protocol: cfg.transfer.protocol,
        efficiency: outcome.efficiency,
        final_spin_population: traj.spin_population[last],
        final_cavity_population: traj.cavity_population[last],
        final_qubit_population: traj.qubit_population[last],
        max_norm_drift: traj.max_norm_drift(1.0),
        cavity_travel: outcome.cavity_travel,
        diagnostics: outcome.diagnostics.iter().map(ToString::to_string).collect(),
        dephasing_estimate: eta_t_estimate(params.ensemble.intrinsic_half_width, t_s)?,
        steps: traj.stats.accepted,
        trajectory,
        schedule: outcome.schedule,
        storage,
    };
    write_report(&out_dir.join("transfer_report.json"), "transfer", cfg, &report)?;
    eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
    Ok(report)
}

/// Sidecar of the heatmap: the sweep echo plus the resolved config.
#[derive(Debug, Serialize)]
struct HeatmapSidecar<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    sweep: SweepSidecar,
}

pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path, resume: bool) -> Result<SweepResult> {
    let spec = cfg.sweep_spec()?;
    let csv_path = out_dir.join("heatmap.csv");
    let prior = if resume {
        if cfg.output.format != OutputFormat::Csv {
            return Err(Error::Config(
                "--resume reads heatmap.csv and needs --format csv".into(),
            ));
        }
        if csv_path.exists() {
            read_partial(&spec, &csv_path)?
        } else {
            Vec::new()
        }
    } else {
        Vec::new()
    };
    let result = run_sweep_resuming(&spec, &prior)?;
    let header = spec.header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_data(out_dir, "heatmap", cfg, &header, result.rows())?;
    let sidecar = HeatmapSidecar {
        config: cfg,
        sweep: SweepSidecar::new(&result),
    };
    std::fs::write(
        out_dir.join("heatmap.sidecar.json"),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    Ok(result)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateReport {
    pub delta_ib: f64,
    pub kappa_sqrt_n: f64,
    pub t_s: f64,
    pub sinc2: f64,
    pub gaussian: f64,
}

impl EstimateReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => serde_json::to_string_pretty(self)? + "\n",
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                io::write_table(
                    &mut buf,
                    &["delta_IB", "kappa_sqrtN", "T_S", "sinc2", "gaussian"],
                    [vec![
                        self.delta_ib,
                        self.kappa_sqrt_n,
                        self.t_s,
                        self.sinc2,
                        self.gaussian,
                    ]],
                )?;
                String::from_utf8(buf).expect("csv output is ascii")
            }
        })
    }
}

/// `sinc^2` and gaussian dephasing estimates at `T_S = pi / (2 kappa sqrt(N))`.
pub fn cmd_estimate(delta_ib: f64, kappa_sqrt_n: f64) -> Result<EstimateReport> {
    let (t_s, _) = swap_times(kappa_sqrt_n, 1.0)?;
    let est = eta_t_estimate(delta_ib, t_s)?;
    Ok(EstimateReport {
        delta_ib,
        kappa_sqrt_n,
        t_s,
        sinc2: est.sinc2,
        gaussian: est.gaussian,
    })
}

pub fn cmd_optimize(
    cfg: &RunConfig,
    out_dir: &Path,
    variable: ScalarVariable,
    lo: f64,
    hi: f64,
) -> Result<ScalarMaximum> {
    #[derive(Serialize)]
    struct Results<'a> {
        variable: ScalarVariable,
        range: [f64; 2],
        maximum: &'a ScalarMaximum,
    }
    let max = optimize_scalar(&cfg.transfer_params()?, variable, lo, hi)?;
    let results = Results {
        variable,
        range: [lo, hi],
        maximum: &max,
    };
    write_report(&out_dir.join("optimize_report.json"), "optimize", cfg, &results)?;
    Ok(max)
}
