use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoherenceField, StorageProblem};
use crate::error::{Error, Result};

/// Magnitude of `P` treated as a blowup. A unit-norm photon keeps `|P|` of
/// order one.
const BLOWUP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationGrid {
    pub n_z: usize,
    pub n_t: usize,
    /// Start of the integration; defaults to `-t_final`.
    #[serde(default)]
    pub t_start: Option<f64>,
}

impl Default for PropagationGrid {
    fn default() -> Self {
        Self {
            n_z: 512,
            n_t: 4096,
            t_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub coherence: CoherenceField,
    /// `(tau, E(1/2, tau))` at every time step.
    pub transmitted: Vec<(f64, Complex64)>,
}

struct Medium<'a> {
    problem: &'a StorageProblem,
    xi: Vec<f64>,
    dxi: f64,
    g: f64,
    back: f64,
}

impl Medium<'_> {
    /// Field along the medium for a given coherence, trapezoid in `xi`.
    fn field(&self, tau: f64, p: &[Complex64], e: &mut [Complex64]) {
        let i_back = Complex64::new(0.0, self.back * 0.5 * self.dxi);
        e[0] = self.problem.input_field(tau);
        for k in 1..p.len() {
            e[k] = e[k - 1] + i_back * (p[k - 1] + p[k]);
        }
    }

    fn rate(&self, tau: f64, p: &[Complex64], e: &mut [Complex64], out: &mut [Complex64]) {
        self.field(tau, p, e);
        let i = Complex64::i();
        for k in 0..p.len() {
            out[k] = i * (self.g * e[k] - self.xi[k] * p[k]);
        }
    }
}

/// Integrates the coupled field and coherence equations from rest up to
/// `t_final`, marching `E` along `xi` at every stage of a classical RK4 step
/// in `tau`. The input pulse is centered at `tau = 0`.
pub fn solve_propagation(problem: &StorageProblem, grid: PropagationGrid, t_final: f64) -> Result<PropagationResult> {
    problem.validate()?;
    if grid.n_z < 16 || grid.n_t < 16 {
        return Err(Error::param(
            "grid",
            format!("n_z and n_t must be >= 16, got {} and {}", grid.n_z, grid.n_t),
        ));
    }
    let duration = problem.pulse_duration();
    if !(t_final >= 3.0 * duration) {
        return Err(Error::param(
            "t_final",
            format!(
                "must be at least 3 pulse durations ({:.6e}), got {t_final}",
                3.0 * duration
            ),
        ));
    }
    let t0 = grid.t_start.unwrap_or(-t_final);
    if !(t0 < t_final) {
        return Err(Error::param("t_start", "must precede t_final"));
    }

    let xi = CoherenceField::grid(grid.n_z);
    let medium = Medium {
        problem,
        dxi: 1.0 / (grid.n_z - 1) as f64,
        xi,
        g: problem.coupling,
        back: problem.back_action(),
    };
    let n = grid.n_z;
    let zero = Complex64::new(0.0, 0.0);
    let mut p = vec![zero; n];
    let mut e = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut k = [vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]];
    let h = (t_final - t0) / grid.n_t as f64;
    let mut transmitted = Vec::with_capacity(grid.n_t + 1);

    medium.field(t0, &p, &mut e);
    transmitted.push((t0, e[n - 1]));
    for step in 0..grid.n_t {
        let tau = t0 + h * step as f64;
        medium.rate(tau, &p, &mut e, &mut k[0]);
        for j in 0..n {
            tmp[j] = p[j] + 0.5 * h * k[0][j];
        }
        medium.rate(tau + 0.5 * h, &tmp, &mut e, &mut k[1]);
        for j in 0..n {
            tmp[j] = p[j] + 0.5 * h * k[1][j];
        }
        medium.rate(tau + 0.5 * h, &tmp, &mut e, &mut k[2]);
        for j in 0..n {
            tmp[j] = p[j] + h * k[2][j];
        }
        medium.rate(tau + h, &tmp, &mut e, &mut k[3]);

        let mut peak = 0.0_f64;
        for j in 0..n {
            p[j] += h / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
            let m = p[j].norm();
            if !m.is_finite() {
                return Err(Error::NonFinite { step, time: tau + h });
            }
            peak = peak.max(m);
        }
        if peak > BLOWUP {
            return Err(Error::Unstable { step, magnitude: peak });
        }
        let t_next = if step + 1 == grid.n_t { t_final } else { tau + h };
        medium.field(t_next, &p, &mut e);
        transmitted.push((t_next, e[n - 1]));
    }

    Ok(PropagationResult {
        coherence: CoherenceField {
            grid: medium.xi,
            values: p,
            time: t_final,
            early_time: false,
        },
        transmitted,
    })
}
