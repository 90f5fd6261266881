//! Builds the staggered, adiabatic and reduced-sweep schedules, prints their
//! segments and writes the staggered one as JSON.
//!
//! ```text
//! cargo run --release --example schedule_json [out.json]
//! ```

use crib_transfer::model::FrequencyFrame;
use crib_transfer::protocol::{
    build_adiabatic, build_reduced_sweep, build_staggered, reverse_schedule, validate, ProtocolSchedule, StaggeredSpec,
};

fn show(name: &str, s: &ProtocolSchedule, frame: &FrequencyFrame) {
    println!(
        "{name}: total {:.4} / G, cavity travel {} G",
        s.total_duration(),
        s.cavity_travel()
    );
    for seg in &s.segments {
        println!(
            "  {:<10} {:>8.4}  cavity {:?}  gradient {:+}  spin shift {}",
            format!("{:?}", seg.role),
            seg.duration,
            seg.cavity,
            seg.gradient_sign,
            seg.common_spin_shift
        );
    }
    for d in validate(s, frame, 6.0, Some(100.0)) {
        println!("  warning: {d}");
    }
}

fn main() -> crib_transfer::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "staggered_schedule.json".into());
    let spec = StaggeredSpec::default();
    let staggered = build_staggered(&spec)?;
    show("staggered", &staggered, &spec.frame);
    show("reversed", &reverse_schedule(&staggered), &spec.frame);
    show("adiabatic", &build_adiabatic(&spec, 200.0)?, &spec.frame);
    show("reduced sweep", &build_reduced_sweep(&spec, 100.0)?, &spec.frame);

    staggered.write_json(out.as_ref())?;
    let back = ProtocolSchedule::read_json(out.as_ref())?;
    assert_eq!(back, staggered);
    println!("wrote {out}");
    Ok(())
}
