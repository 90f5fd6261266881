//! Best rephasing time for the staggered transfer, with and without
//! intrinsic broadening, and the best trim of the spin swap.
//!
//! ```text
//! cargo run --release --example optimize_tau_r
//! ```

use crib_transfer::sweep::{optimize_scalar, ScalarVariable};
use crib_transfer::transfer::TransferParams;

fn main() -> crib_transfer::Result<()> {
    for d_ib in [0.0, 2.0] {
        let mut params = TransferParams::default();
        params.ensemble.intrinsic_half_width = d_ib;
        let best = optimize_scalar(&params, ScalarVariable::TauR, 0.0, 0.5)?;
        println!(
            "delta_IB = {d_ib}: tau_R = {:.5} / G, efficiency {:.6} ({:?}, {} runs)",
            best.argmax, best.value, best.method, best.evaluations
        );
    }
    let best = optimize_scalar(&TransferParams::default(), ScalarVariable::TrimS, 0.8, 1.2)?;
    println!("trim_S = {:.5}, efficiency {:.6}", best.argmax, best.value);
    Ok(())
}
