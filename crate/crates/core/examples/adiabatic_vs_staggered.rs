//! A single slow cavity sweep through both resonances against the
//! staggered pi-pulse transfer, with and without intrinsic broadening.
//!
//! ```text
//! cargo run --release --example adiabatic_vs_staggered
//! ```

use crib_transfer::transfer::{run_adiabatic, run_staggered, TransferParams};

fn main() -> crib_transfer::Result<()> {
    for d_ib in [0.0, 2.0] {
        let mut params = TransferParams::default();
        params.ensemble.intrinsic_half_width = d_ib;
        let staggered = run_staggered(&params)?.efficiency;
        println!("delta_IB = {d_ib} G: staggered {staggered:.6}");
        for sweep in [1.0, 5.0, 20.0, 50.0, 100.0, 200.0, 400.0] {
            let adiabatic = run_adiabatic(&params, sweep)?.efficiency;
            println!("  sweep {sweep:>5} / G  adiabatic {adiabatic:.6}");
        }
    }
    Ok(())
}
