//! CRIB storage stage in dimensionless units `xi = z/L`, `tau = alpha L t`.
//!
//! The medium occupies `xi` in `[-1/2, 1/2]` and the induced detuning of an
//! atom at `xi` equals `xi`. The linearized equations are
//!
//! ```text
//! dP/dtau = -i xi P + i g E
//! dE/dxi  =  i (d/g) P
//! ```
//!
//! with `d` the optical depth and `g` the coupling in the same units.

mod analytic;
mod efficiency;
mod envelope;
mod propagation;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

pub use analytic::{analytic_coherence, analytic_coherence_at};
pub use efficiency::{optimize_envelope_width, storage_efficiency, storage_prefactor, WidthOptimum};
pub use envelope::{Envelope, EnvelopeTable, ENVELOPE_COLUMNS};
pub use propagation::{solve_propagation, PropagationGrid, PropagationResult};

pub const COHERENCE_COLUMNS: [&str; 3] = ["xi", "re", "im"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageProblem {
    pub envelope: Envelope,
    pub optical_depth: f64,
    /// Light-atom coupling `g` in units of `alpha L`. With `d = 0` and
    /// `g = 0` the medium is fully transparent.
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    /// Carrier offset of the spectrum relative to the center of the line.
    #[serde(default)]
    pub spectral_offset: f64,
}

fn default_coupling() -> f64 {
    1.0
}

impl StorageProblem {
    pub fn new(envelope: Envelope, optical_depth: f64) -> Self {
        Self {
            envelope,
            optical_depth,
            coupling: 1.0,
            spectral_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.envelope.validate()?;
        let d = self.optical_depth;
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::param(
                "optical_depth",
                format!("must be finite and >= 0, got {d}"),
            ));
        }
        if !self.coupling.is_finite() || self.coupling < 0.0 {
            return Err(Error::param(
                "coupling",
                format!("must be finite and >= 0, got {}", self.coupling),
            ));
        }
        if self.coupling == 0.0 && d > 0.0 {
            return Err(Error::param("coupling", "zero coupling requires zero optical depth"));
        }
        if !self.spectral_offset.is_finite() {
            return Err(Error::param("spectral_offset", "must be finite"));
        }
        Ok(())
    }

    /// Spectrum seen by the medium, including the carrier offset.
    pub fn spectrum(&self, xi: f64) -> Complex64 {
        self.envelope.spectrum(xi - self.spectral_offset)
    }

    /// Input field at the entrance, including the carrier offset.
    pub fn input_field(&self, tau: f64) -> Complex64 {
        let e = self.envelope.time_amplitude(tau);
        if self.spectral_offset == 0.0 {
            e
        } else {
            e * Complex64::from_polar(1.0, -self.spectral_offset * tau)
        }
    }

    pub fn pulse_duration(&self) -> f64 {
        self.envelope.pulse_duration()
    }

    /// `d / g`, the field equation's coupling.
    fn back_action(&self) -> f64 {
        if self.optical_depth == 0.0 {
            0.0
        } else {
            self.optical_depth / self.coupling
        }
    }
}

/// Coherence `P(xi)` across the medium at time `time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceField {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub time: f64,
    /// Set when `time` is not well beyond the pulse, where the long-time
    /// form is unreliable.
    #[serde(default)]
    pub early_time: bool,
}

impl CoherenceField {
    /// `n` equally spaced points spanning `[-1/2, 1/2]` exactly.
    pub fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -0.5 + i as f64 / (n - 1) as f64).collect()
    }

    /// `sqrt(int |P|^2 dxi)` by the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(&self.grid, |i| self.values[i].norm_sqr()).sqrt()
    }

    /// `||self - reference|| / ||reference||` in L2 over `xi`.
    pub fn relative_l2_distance(&self, reference: &CoherenceField) -> Result<f64> {
        if self.grid != reference.grid {
            return Err(Error::param("grid", "coherence fields live on different grids"));
        }
        let diff = trapezoid(&self.grid, |i| (self.values[i] - reference.values[i]).norm_sqr()).sqrt();
        Ok(diff / reference.l2_norm())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.grid.iter().zip(&self.values).map(|(x, p)| vec![*x, p.re, p.im]);
        io::write_table_file(path, &COHERENCE_COLUMNS, rows)
    }

    pub fn read_csv(path: &Path, time: f64) -> Result<Self> {
        let rows = io::read_table_file(path, &COHERENCE_COLUMNS)?;
        let (grid, values): (Vec<f64>, Vec<Complex64>) =
            rows.iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).unzip();
        if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Csv {
                context: path.display().to_string(),
                reason: "xi grid must be strictly increasing with at least two points".into(),
            });
        }
        Ok(Self {
            grid,
            values,
            time,
            early_time: false,
        })
    }
}

fn trapezoid(grid: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..grid.len())
        .map(|i| 0.5 * (grid[i] - grid[i - 1]) * (f(i - 1) + f(i)))
        .sum()
}
