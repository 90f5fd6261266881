//! Storage efficiency of flat and gaussian envelopes, and the gaussian
//! bandwidth that maximizes it.
//!
//! ```text
//! cargo run --release --example storage_efficiency
//! ```

use crib_transfer::storage::{
    optimize_envelope_width, storage_efficiency, storage_prefactor, Envelope, StorageProblem,
};

fn main() -> crib_transfer::Result<()> {
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "d", "1-e^-2pi d", "flat w=1", "best bw", "gauss eta_S"
    );
    for d in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let flat = storage_efficiency(&StorageProblem::new(Envelope::FlatSpectrum { width: 1.0 }, d))?;
        let template = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, d);
        let best = optimize_envelope_width(&template, 0.05, 2.0)?;
        println!(
            "{d:>5.2} {:>12.8} {flat:>12.8} {:>12.6} {:>12.8}",
            storage_prefactor(d),
            best.bandwidth,
            best.eta_s
        );
    }

    println!("\ngaussian at d = 2 against bandwidth");
    for bw in [0.1, 0.3, 0.5, 0.6, 0.8, 1.2] {
        let eta = storage_efficiency(&StorageProblem::new(Envelope::Gaussian { bandwidth: bw }, 2.0))?;
        println!("  bw {bw:>4.2}  eta_S {eta:.6}");
    }
    Ok(())
}
