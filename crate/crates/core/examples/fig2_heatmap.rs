//! Transfer efficiency over intrinsic broadening and rephasing time, with
//! `delta_inh = 7 G` and `kappa sqrt(N) = 6 G` held fixed. Writes the
//! heatmap CSV and its JSON sidecar.
//!
//! ```text
//! cargo run --release --example fig2_heatmap [out.csv] [workers]
//! ```

use std::path::PathBuf;

use crib_transfer::sweep::{run_sweep, SweepSidecar, SweepSpec};

fn main() -> crib_transfer::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "fig2_heatmap.csv".into()));
    let mut spec = SweepSpec::fig2();
    spec.workers = args.next().and_then(|w| w.parse().ok()).unwrap_or(4);

    let result = run_sweep(&spec)?;
    result.write_csv_file(&out)?;
    SweepSidecar::new(&result).write(&out.with_extension("json"))?;

    let taus = spec.axis2.values();
    println!("{:>9} {:>10} {:>9}", "delta_IB", "max eff", "at tau_R");
    for (i, d) in spec.axis1.values().iter().enumerate().step_by(4) {
        let (j, best) = (0..taus.len())
            .map(|j| (j, result.at(i, j)))
            .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        println!("{d:>9.3} {best:>10.5} {:>9.4}", taus[j]);
    }
    println!(
        "{} points, {} failed, {:.1} s on {} workers -> {}",
        result.efficiency.len(),
        result.failures.len(),
        result.wall_time_s,
        spec.workers,
        out.display()
    );
    Ok(())
}
