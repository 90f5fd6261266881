//! Optical storage followed by microwave transfer: the width-optimized
//! gaussian storage efficiency times the Fig. 3 transfer efficiency.
//!
//! ```text
//! cargo run --release --example end_to_end [optical depth]
//! ```

use crib_transfer::storage::{optimize_envelope_width, Envelope, StorageProblem};
use crib_transfer::transfer::{run_staggered, TransferParams};
use crib_transfer::EfficiencyReport;

fn main() -> crib_transfer::Result<()> {
    let d: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let storage = optimize_envelope_width(
        &StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, d),
        0.05,
        2.0,
    )?;
    let transfer = run_staggered(&TransferParams::default())?;
    let report = EfficiencyReport::new(storage.eta_s, transfer.efficiency)?;
    println!("d = {d}, gaussian bandwidth {:.4}", storage.bandwidth);
    println!("eta_S {:.6}", report.eta_s);
    println!("eta_T {:.6}", report.eta_t);
    println!("eta   {:.6}", report.eta_total);
    Ok(())
}
