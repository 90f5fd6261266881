//! Compares the numerically propagated coherence with the long-time
//! analytic form across optical depths.
//!
//! ```text
//! cargo run --release --example storage_crosscheck
//! ```

use crib_transfer::storage::{analytic_coherence, solve_propagation, Envelope, PropagationGrid, StorageProblem};

fn main() -> crib_transfer::Result<()> {
    println!("{:>6} {:>10} {:>12} {:>12}", "d", "bandwidth", "t_final", "rel L2");
    for d in [0.5, 1.0, 2.0] {
        let problem = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, d);
        let t_final = 10.0 * problem.pulse_duration();
        let grid = PropagationGrid::default();
        let numeric = solve_propagation(&problem, grid, t_final)?.coherence;
        let analytic = analytic_coherence(&problem, t_final, grid.n_z)?;
        let err = numeric.relative_l2_distance(&analytic)?;
        println!("{d:>6.2} {:>10.3} {t_final:>12.4} {err:>12.4e}", 0.5);
    }

    let flat = StorageProblem::new(Envelope::FlatSpectrum { width: 1.0 }, 1.0);
    let t_final = 40.0 * flat.pulse_duration();
    let field = solve_propagation(&flat, PropagationGrid::default(), t_final)?.coherence;
    let mags: Vec<f64> = field.values.iter().map(|v| v.norm()).collect();
    let inner = &mags[mags.len() / 8..mags.len() * 7 / 8];
    let (lo, hi) = inner
        .iter()
        .fold((f64::MAX, 0.0_f64), |(a, b), m| (a.min(*m), b.max(*m)));
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    println!(
        "flat spectrum, d = 1: |P| in [{lo:.4}, {hi:.4}], spread {:.2}% of mean",
        100.0 * (hi - lo) / mean
    );
    Ok(())
}
