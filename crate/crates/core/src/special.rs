//! Complex gamma function via the Lanczos approximation.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` for complex `z`. The imaginary part is determined modulo
/// `2 pi`; use [`gamma`] when the value itself is needed.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z)
    } else {
        let z = z - 1.0;
        let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln sin(pi z)`, evaluated without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), with |e^{2 i pi z}| <= 1
    let i = Complex64::i();
    let e2 = (2.0 * i * PI * z).exp();
    -i * PI * z + ((e2 - 1.0) / (2.0 * i)).ln()
}

/// `|Gamma(-i d)|^2 = pi / (d sinh(pi d))` for real `d > 0`.
pub fn gamma_imaginary_abs_sqr(d: f64) -> f64 {
    PI / (d * (PI * d).sinh())
}
