//! Photon storage in a rare-earth doped crystal and staggered pi-pulse
//! transfer of the stored spin excitation to a superconducting qubit.
//!
//! The crate covers two stages:
//!
//! * [`storage`]: absorption of a single photon into an engineered,
//!   linearly broadened optical line (CRIB), the long-time coherence, and
//!   the storage efficiency functional.
//! * [`transfer`]: Schrodinger dynamics of N spins, a tunable microwave
//!   cavity and a qubit restricted to the single-excitation manifold,
//!   driven by piecewise [`protocol`] schedules.
//!
//! [`sweep`] builds heatmaps and scalar optimizations on top of the
//! transfer stage and [`cli`] wires everything to config files and CSV/JSON
//! outputs. All transfer quantities are expressed in units of the
//! cavity-qubit coupling `G` (time in `1/G`); storage quantities use the
//! dimensionless position `xi = z/L` and time `tau = alpha L t`.

pub mod cli;
pub mod config;
pub mod error;
pub mod integrator;
pub mod io;
pub mod model;
pub mod optimize;
pub mod protocol;
pub mod quadrature;
pub mod special;
pub mod storage;
pub mod sweep;
pub mod transfer;

pub use error::{Error, Result};
pub use model::{
    build_detuning_grid, state_norm, symmetric_overlap, DetuningProfile, EfficiencyReport, FrequencyFrame,
    SingleExcitationState, SpinEnsemble,
};
pub use num_complex::Complex64;
