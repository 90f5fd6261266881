use serde::{Deserialize, Serialize};

use super::{Envelope, StorageProblem};
use crate::error::{Error, Result};
use crate::optimize::{maximize, ScalarMaximum, SearchOptions};
use crate::quadrature::integrate_complex;

const QUAD_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-6;

/// `1 - e^{-2 pi d}`.
pub fn storage_prefactor(optical_depth: f64) -> f64 {
    -(-2.0 * std::f64::consts::PI * optical_depth).exp_m1()
}

/// `eta_S = (1 - e^{-2 pi d}) |int_{-1/2}^{1/2} Ebar(xi) dxi|^2` for a
/// unit-norm envelope.
pub fn storage_efficiency(problem: &StorageProblem) -> Result<f64> {
    problem.validate()?;
    let norm = problem.envelope.spectral_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::UnnormalizedEnvelope { norm });
    }
    if problem.optical_depth == 0.0 {
        return Ok(0.0);
    }
    // split at the edges of a flat spectrum so every panel is smooth
    let mut cuts = vec![-0.5, 0.5];
    if let Envelope::FlatSpectrum { width } = problem.envelope {
        for edge in [-0.5 * width, 0.5 * width] {
            let x = edge + problem.spectral_offset;
            if x > -0.5 && x < 0.5 {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let panels = (cuts.len() - 1) as f64;
    let mut area = num_complex::Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        area += integrate_complex(|xi| problem.spectrum(xi), w[0], w[1], QUAD_TOL / panels)?;
    }
    Ok(storage_prefactor(problem.optical_depth) * area.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthOptimum {
    pub bandwidth: f64,
    pub eta_s: f64,
    pub search: ScalarMaximum,
}

/// Maximizes `eta_S` over the bandwidth of a gaussian envelope, keeping the
/// rest of `template`.
pub fn optimize_envelope_width(template: &StorageProblem, lo: f64, hi: f64) -> Result<WidthOptimum> {
    if !(lo > 0.0) {
        return Err(Error::param(
            "width range",
            format!("must be positive, got [{lo}, {hi}]"),
        ));
    }
    let eval = |bandwidth: f64| {
        let mut p = template.clone();
        p.envelope = Envelope::Gaussian { bandwidth };
        storage_efficiency(&p)
    };
    let search = maximize(eval, lo, hi, SearchOptions::default())?;
    Ok(WidthOptimum {
        bandwidth: search.argmax,
        eta_s: search.value,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::EnvelopeTable;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_spectrum_filling_the_window() {
        for d in [0.3, 1.0, 2.0] {
            let p = StorageProblem::new(Envelope::FlatSpectrum { width: 1.0 }, d);
            assert_abs_diff_eq!(storage_efficiency(&p).unwrap(), storage_prefactor(d), epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_depth_stores_nothing() {
        let p = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.6 }, 0.0);
        assert_eq!(storage_efficiency(&p).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_window_integral_has_closed_form() {
        // int_{-1/2}^{1/2} A e^{-x^2/(4 s^2)} dx = A s sqrt(4 pi) erf(1/(4 s)); erf by series
        let bw: f64 = 0.5;
        let s = bw / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        let a = (2.0 * std::f64::consts::PI * s * s).powf(-0.25);
        let x = 1.0 / (4.0 * s);
        let mut erf = 0.0;
        let mut term = x;
        for n in 0..80 {
            erf += term / (2 * n + 1) as f64;
            term *= -x * x / (n + 1) as f64;
        }
        erf *= 2.0 / std::f64::consts::PI.sqrt();
        let integral = a * s * (4.0 * std::f64::consts::PI).sqrt() * erf;
        let p = StorageProblem::new(Envelope::Gaussian { bandwidth: bw }, 50.0);
        assert_abs_diff_eq!(storage_efficiency(&p).unwrap(), integral * integral, epsilon = 1e-10);
    }

    #[test]
    fn unnormalized_table_is_rejected_with_its_norm() {
        let t = EnvelopeTable::new(vec![0.0, 1.0, 2.0], vec![num_complex::Complex64::new(1.0, 0.0); 3]).unwrap();
        let p = StorageProblem::new(Envelope::Table(t), 1.0);
        match storage_efficiency(&p) {
            Err(Error::UnnormalizedEnvelope { norm }) => assert_abs_diff_eq!(norm, 2.0, epsilon = 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn offset_spectrum_loses_efficiency() {
        let mut p = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, 1.0);
        let centered = storage_efficiency(&p).unwrap();
        p.spectral_offset = 0.3;
        assert!(storage_efficiency(&p).unwrap() < centered);
    }

    #[test]
    fn width_optimum_matches_dense_scan() {
        let p = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, 1.0);
        let best = optimize_envelope_width(&p, 0.05, 2.0).unwrap();
        let n = 10_000;
        let mut scan_best = 0.0_f64;
        for i in 0..n {
            let bw = 0.05 + 1.95 * i as f64 / (n - 1) as f64;
            let mut q = p.clone();
            q.envelope = Envelope::Gaussian { bandwidth: bw };
            scan_best = scan_best.max(storage_efficiency(&q).unwrap());
        }
        let pre = storage_prefactor(1.0);
        assert!((best.eta_s / pre - scan_best / pre).abs() < 1e-4);
        assert!(best.eta_s >= scan_best - 1e-12);
    }

    #[test]
    fn degenerate_width_range() {
        let p = StorageProblem::new(Envelope::Gaussian { bandwidth: 0.5 }, 1.0);
        let best = optimize_envelope_width(&p, 0.4, 0.4).unwrap();
        assert_eq!(best.bandwidth, 0.4);
    }
}
