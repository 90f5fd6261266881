//! Input photon envelopes in time and in the dimensionless spectral variable.
//!
//! Conventions: `Ebar(xi) = (2 pi)^{-1/2} int e^{i xi tau} E(tau) dtau`, and a
//! single-photon envelope has `int |Ebar|^2 dxi = int |E|^2 dtau = 1`.

use std::f64::consts::{LN_2, PI};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// `x` with `sin(x)^2 / x^2 = 1/2`.
const SINC2_HALF: f64 = 1.391_557_378_251_510_2;

pub const ENVELOPE_COLUMNS: [&str; 3] = ["time", "re", "im"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Envelope {
    /// Gaussian pulse; `bandwidth` is the FWHM of `|Ebar|^2` in units of `alpha L`.
    Gaussian { bandwidth: f64 },
    /// Spectrum constant on `[-width/2, width/2]` and zero elsewhere.
    FlatSpectrum { width: f64 },
    /// Sampled `E(tau)`, linearly interpolated and zero outside the samples.
    Table(EnvelopeTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTable {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl EnvelopeTable {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::param(
                "envelope",
                "table needs at least two samples and matching time/value lengths",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("envelope", "sample times must be strictly increasing"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::param("envelope", "table contains non-finite entries"));
        }
        Ok(Self { times, values })
    }

    /// Reads a `time,re,im` CSV.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let rows = io::read_table_file(path, &ENVELOPE_COLUMNS)?;
        let (times, values) = rows.iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).unzip();
        Self::new(times, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.times.iter().zip(&self.values).map(|(t, v)| vec![*t, v.re, v.im]);
        io::write_table_file(path, &ENVELOPE_COLUMNS, rows)
    }

    /// Samples `envelope` on `n` points of `[t0, t1]`.
    pub fn sample(envelope: &Envelope, t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n < 2 || !(t1 > t0) {
            return Err(Error::param("envelope", "sampling needs n >= 2 and t1 > t0"));
        }
        let times: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let values = times.iter().map(|&t| envelope.time_amplitude(t)).collect();
        Self::new(times, values)
    }

    fn interpolate(&self, t: f64) -> Complex64 {
        let ts = &self.times;
        if t < ts[0] || t > ts[ts.len() - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let k = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
        let (t0, t1) = (ts[k - 1], ts[k]);
        let s = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }

    /// Exact Fourier integral of the piecewise-linear interpolant.
    fn spectrum(&self, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..self.times.len() {
            let (t0, h) = (self.times[k - 1], self.times[k] - self.times[k - 1]);
            let (e0, e1) = (self.values[k - 1], self.values[k]);
            let slope = (e1 - e0) / h;
            let (i0, i1) = linear_moments(xi, h);
            acc += Complex64::from_polar(1.0, xi * t0) * (e0 * i0 + slope * i1);
        }
        acc / (2.0 * PI).sqrt()
    }

    /// `int |E|^2 dtau` of the interpolant.
    fn energy(&self) -> f64 {
        (1..self.times.len())
            .map(|k| {
                let h = self.times[k] - self.times[k - 1];
                let (a, b) = (self.values[k - 1], self.values[k]);
                h * (a.norm_sqr() + (a.conj() * b).re + b.norm_sqr()) / 3.0
            })
            .sum()
    }
}

/// `(int_0^h e^{i k u} du, int_0^h u e^{i k u} du)`.
fn linear_moments(k: f64, h: f64) -> (Complex64, Complex64) {
    let x = k * h;
    if x.abs() < 0.05 {
        // sum_n (ix)^n / n! times 1/(n+1) and 1/(n+2)
        let ix = Complex64::new(0.0, x);
        let mut term = Complex64::new(1.0, 0.0);
        let (mut s0, mut s1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for n in 0..12 {
            s0 += term / (n + 1) as f64;
            s1 += term / (n + 2) as f64;
            term *= ix / (n + 1) as f64;
        }
        (h * s0, h * h * s1)
    } else {
        let ik = Complex64::new(0.0, k);
        let e = Complex64::from_polar(1.0, x);
        let i0 = (e - 1.0) / ik;
        let i1 = h * e / ik - (e - 1.0) / (ik * ik);
        (i0, i1)
    }
}

fn gaussian_sigma(bandwidth: f64) -> f64 {
    bandwidth / (2.0 * (2.0 * LN_2).sqrt())
}

impl Envelope {
    pub fn validate(&self) -> Result<()> {
        match self {
            Envelope::Gaussian { bandwidth } if !(*bandwidth > 0.0 && bandwidth.is_finite()) => {
                Err(Error::param("bandwidth", format!("must be positive, got {bandwidth}")))
            }
            Envelope::FlatSpectrum { width } if !(*width > 0.0 && width.is_finite()) => {
                Err(Error::param("width", format!("must be positive, got {width}")))
            }
            _ => Ok(()),
        }
    }

    /// Dimensionless spectral envelope `Ebar(xi)`.
    pub fn spectrum(&self, xi: f64) -> Complex64 {
        match self {
            Envelope::Gaussian { bandwidth } => {
                let s = gaussian_sigma(*bandwidth);
                let a = (2.0 * PI * s * s).powf(-0.25);
                Complex64::new(a * (-xi * xi / (4.0 * s * s)).exp(), 0.0)
            }
            Envelope::FlatSpectrum { width } => {
                if xi.abs() <= 0.5 * width {
                    Complex64::new(1.0 / width.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Envelope::Table(table) => table.spectrum(xi),
        }
    }

    /// Input field `E(tau)` at the entrance of the medium, centered at `tau = 0`.
    pub fn time_amplitude(&self, tau: f64) -> Complex64 {
        match self {
            Envelope::Gaussian { bandwidth } => {
                let s = gaussian_sigma(*bandwidth);
                let a = (2.0 * PI * s * s).powf(-0.25);
                Complex64::new(a * s * 2f64.sqrt() * (-s * s * tau * tau).exp(), 0.0)
            }
            Envelope::FlatSpectrum { width } => {
                let x = 0.5 * width * tau;
                let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                Complex64::new((width / (2.0 * PI)).sqrt() * sinc, 0.0)
            }
            Envelope::Table(table) => table.interpolate(tau),
        }
    }

    /// `int |Ebar|^2 dxi` over the real line.
    pub fn spectral_norm(&self) -> f64 {
        match self {
            Envelope::Gaussian { .. } | Envelope::FlatSpectrum { .. } => 1.0,
            // Parseval
            Envelope::Table(table) => table.energy(),
        }
    }

    /// FWHM of the temporal intensity `|E(tau)|^2`.
    pub fn pulse_duration(&self) -> f64 {
        match self {
            Envelope::Gaussian { bandwidth } => 4.0 * LN_2 / bandwidth,
            Envelope::FlatSpectrum { width } => 4.0 * SINC2_HALF / width,
            Envelope::Table(table) => {
                let peak = table.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
                let above: Vec<f64> = table
                    .times
                    .iter()
                    .zip(&table.values)
                    .filter(|(_, v)| v.norm_sqr() >= 0.5 * peak)
                    .map(|(t, _)| *t)
                    .collect();
                match (above.first(), above.last()) {
                    (Some(a), Some(b)) if b > a => b - a,
                    _ => table.times[1] - table.times[0],
                }
            }
        }
    }

    /// Rescales a table to unit norm; analytic forms are already normalized.
    pub fn normalized(self) -> Result<Self> {
        match self {
            Envelope::Table(mut table) => {
                let norm = table.energy();
                if !(norm > 0.0) {
                    return Err(Error::UnnormalizedEnvelope { norm });
                }
                let k = norm.sqrt().recip();
                table.values.iter_mut().for_each(|v| *v *= k);
                Ok(Envelope::Table(table))
            }
            other => Ok(other),
        }
    }
}
