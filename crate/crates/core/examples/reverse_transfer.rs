//! Qubit excitation sent back into the symmetric spin mode by the reversed
//! staggered schedule.
//!
//! ```text
//! cargo run --release --example reverse_transfer
//! ```

use crib_transfer::transfer::{run_reverse, run_staggered, TransferParams};

fn main() -> crib_transfer::Result<()> {
    println!("{:>8} {:>10} {:>10}", "delta_IB", "forward", "reverse");
    for d_ib in [0.0, 1.0, 2.0, 3.0] {
        let mut params = TransferParams::default();
        params.ensemble.intrinsic_half_width = d_ib;
        let fwd = run_staggered(&params)?.efficiency;
        let rev = run_reverse(&params)?;
        println!("{d_ib:>8} {fwd:>10.6} {:>10.6}", rev.efficiency);
    }
    let rev = run_reverse(&TransferParams::default())?;
    for s in &rev.schedule.segments {
        println!("  {:?} {:.4} / G, gradient {:+}", s.role, s.duration, s.gradient_sign);
    }
    Ok(())
}
