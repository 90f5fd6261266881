use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CoherenceField, StorageProblem};
use crate::error::{Error, Result};
use crate::special::gamma;

/// `d Gamma(-i d)`, which tends to `i` as `d -> 0`.
fn scaled_gamma(d: f64) -> Complex64 {
    if d == 0.0 {
        Complex64::i()
    } else {
        d * gamma(Complex64::new(0.0, -d))
    }
}

/// Long-time coherence at a single position:
///
/// ```text
/// P(xi, tau) = -g e^{-pi d/2} e^{-i d ln(tau/2)} / (d Gamma(-i d)) e^{-i xi tau} sqrt(2 pi) Ebar(xi)
/// ```
///
/// with `tau` measured from the pulse center.
pub fn analytic_coherence_at(problem: &StorageProblem, xi: f64, tau: f64) -> Complex64 {
    let d = problem.optical_depth;
    let phase = Complex64::from_polar(1.0, -d * (0.5 * tau).ln() - xi * tau);
    -problem.coupling * (-0.5 * PI * d).exp() * phase / scaled_gamma(d) * (2.0 * PI).sqrt() * problem.spectrum(xi)
}

/// Long-time coherence on `n_z` points spanning the medium. The result is
/// flagged `early_time` when `tau` does not exceed the pulse duration.
pub fn analytic_coherence(problem: &StorageProblem, tau: f64, n_z: usize) -> Result<CoherenceField> {
    problem.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {tau}")));
    }
    if n_z < 2 {
        return Err(Error::param("n_z", "need at least two grid points"));
    }
    let grid = CoherenceField::grid(n_z);
    let values = grid.iter().map(|&xi| analytic_coherence_at(problem, xi, tau)).collect();
    Ok(CoherenceField {
        grid,
        values,
        time: tau,
        early_time: tau <= problem.pulse_duration(),
    })
}
