//! Free dephasing of the symmetric spin mode under intrinsic broadening,
//! simulated with 2000 spins and compared with `sinc^2(d_IB T_S)` and its
//! gaussian approximation.
//!
//! ```text
//! cargo run --release --example dephasing_estimate
//! ```

use std::f64::consts::PI;

use crib_transfer::model::{symmetric_overlap, DetuningProfile, EnsembleSpec, FrequencyFrame, SingleExcitationState};
use crib_transfer::protocol::{ProtocolSchedule, Segment, SegmentRole};
use crib_transfer::transfer::{eta_t_estimate, evolve, EvolveOptions};
use crib_transfer::SpinEnsemble;

fn main() -> crib_transfer::Result<()> {
    let n = 2000;
    let t_s = PI / 12.0;
    let frame = FrequencyFrame {
        spin_detuning: 0.0,
        cavity_offset: 20.0,
        global_shift: 0.0,
    };
    println!("{:>8} {:>12} {:>12} {:>12}", "x", "simulated", "sinc^2", "gaussian");
    for x in [PI / 12.0, PI / 6.0, PI / 3.0, PI / 2.0, PI] {
        let ensemble = SpinEnsemble::new(&EnsembleSpec {
            n_spins: n,
            collective_coupling: 0.0,
            intrinsic_half_width: x / t_s,
            intrinsic_profile: DetuningProfile::UniformGrid,
            induced_half_width: 0.0,
            assignment_seed: 0,
        })?;
        let schedule = ProtocolSchedule::custom(vec![Segment::constant(SegmentRole::Park, t_s, 0.0, -1)]);
        let start = SingleExcitationState::dicke(n)?;
        let rec = evolve(&ensemble, &frame, 0.0, &schedule, &start, EvolveOptions::default())?;
        let est = eta_t_estimate(x / t_s, t_s)?;
        println!(
            "{x:>8.5} {:>12.8} {:>12.8} {:>12.8}",
            symmetric_overlap(&rec.final_state),
            est.sinc2,
            est.gaussian
        );
    }
    Ok(())
}
