//! Staggered transfer with the spins parked away while the cavity meets the
//! qubit, so the cavity only travels `Delta` instead of the full spin-qubit
//! separation.
//!
//! ```text
//! cargo run --release --example reduced_sweep_variant
//! ```

use crib_transfer::transfer::{run_reduced_sweep_variant, run_staggered, TransferParams};

fn main() -> crib_transfer::Result<()> {
    let params = TransferParams::default();
    let staggered = run_staggered(&params)?;
    println!(
        "staggered        efficiency {:.6}  cavity travel {:>6.1} G",
        staggered.efficiency, staggered.cavity_travel
    );
    for park in [0.0, 25.0, 50.0, 100.0, 200.0] {
        let variant = run_reduced_sweep_variant(&params, park)?;
        println!(
            "spins parked {park:>5} G  efficiency {:.6}  cavity travel {:>6.1} G",
            variant.efficiency, variant.cavity_travel
        );
    }
    Ok(())
}
