//! Shared domain types: the single-excitation state, the spin ensemble and
//! its detuning profiles, the rotating frame, and efficiency bookkeeping.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes of one excitation shared by `N` spins, the cavity and the qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleExcitationState {
    pub spin_amps: Vec<Complex64>,
    pub cavity_amp: Complex64,
    pub qubit_amp: Complex64,
}

impl SingleExcitationState {
    pub fn new(spin_amps: Vec<Complex64>, cavity_amp: Complex64, qubit_amp: Complex64) -> Result<Self> {
        if spin_amps.is_empty() {
            return Err(Error::param("spin_amps", "at least one spin is required"));
        }
        Ok(Self {
            spin_amps,
            cavity_amp,
            qubit_amp,
        })
    }

    /// Symmetric Dicke state `sum_j |1_j> / sqrt(N)`.
    pub fn dicke(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n_spins", "at least one spin is required"));
        }
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self::new(vec![amp; n], Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Excitation fully in the qubit.
    pub fn qubit_excited(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n_spins", "at least one spin is required"));
        }
        let zero = Complex64::new(0.0, 0.0);
        Self::new(vec![zero; n], zero, Complex64::new(1.0, 0.0))
    }

    pub fn n_spins(&self) -> usize {
        self.spin_amps.len()
    }

    pub fn spin_population(&self) -> f64 {
        self.spin_amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn cavity_population(&self) -> f64 {
        self.cavity_amp.norm_sqr()
    }

    pub fn qubit_population(&self) -> f64 {
        self.qubit_amp.norm_sqr()
    }

    /// Flat layout used by the integrator: spins, then cavity, then qubit.
    pub fn to_flat(&self) -> Vec<Complex64> {
        let mut y = Vec::with_capacity(self.spin_amps.len() + 2);
        y.extend_from_slice(&self.spin_amps);
        y.push(self.cavity_amp);
        y.push(self.qubit_amp);
        y
    }

    pub fn from_flat(y: &[Complex64]) -> Result<Self> {
        if y.len() < 3 {
            return Err(Error::param("state", "flat state needs at least 3 amplitudes"));
        }
        let n = y.len() - 2;
        Self::new(y[..n].to_vec(), y[n], y[n + 1])
    }
}

/// `sum_j |xi_j|^2 + |c|^2 + |q|^2`.
pub fn state_norm(state: &SingleExcitationState) -> f64 {
    state.spin_population() + state.cavity_population() + state.qubit_population()
}

/// Population of the cavity-coupled symmetric spin mode, `|sum_j xi_j|^2 / N`.
pub fn symmetric_overlap(state: &SingleExcitationState) -> f64 {
    symmetric_overlap_of(&state.spin_amps)
}

pub(crate) fn symmetric_overlap_of(spins: &[Complex64]) -> f64 {
    if spins.is_empty() {
        return 0.0;
    }
    let sum: Complex64 = spins.iter().sum();
    sum.norm_sqr() / spins.len() as f64
}

/// How a set of detunings is laid out over a profile of given half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DetuningProfile {
    /// Equally spaced points on `[-w, +w]`, endpoints included.
    UniformGrid,
    /// Uniform samples on `[-w, +w]`, mirrored so the set is symmetric.
    UniformRandom {
        #[serde(default)]
        seed: u64,
    },
    /// Lorentzian samples with half width at half maximum `w`, mirrored.
    Lorentzian {
        #[serde(default)]
        seed: u64,
    },
}

impl Default for DetuningProfile {
    fn default() -> Self {
        DetuningProfile::UniformGrid
    }
}

/// Detunings over a symmetric profile of the given half-width.
///
/// Random profiles draw `n / 2` samples and mirror them (plus a zero for odd
/// `n`), so every profile is exactly symmetric about zero.
pub fn build_detuning_grid(half_width: f64, n: usize, profile: DetuningProfile) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "detuning grid needs at least one point"));
    }
    if !(half_width >= 0.0) || !half_width.is_finite() {
        return Err(Error::param(
            "half_width",
            format!("must be finite and non-negative, got {half_width}"),
        ));
    }
    match profile {
        DetuningProfile::UniformGrid => {
            if n == 1 {
                return Ok(vec![0.0]);
            }
            let step = 2.0 * half_width / (n - 1) as f64;
            // fill from both ends so the grid is symmetric to the last bit
            let mut grid = vec![0.0; n];
            for i in 0..n / 2 {
                let x = -half_width + step * i as f64;
                grid[i] = x;
                grid[n - 1 - i] = -x;
            }
            Ok(grid)
        }
        DetuningProfile::UniformRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(mirrored(n, || half_width * rng.gen_range(0.0..=1.0)))
        }
        DetuningProfile::Lorentzian { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // |Cauchy| by inversion of the half-line CDF
            Ok(mirrored(n, || {
                let u: f64 = rng.gen_range(0.0..1.0);
                half_width * (0.5 * std::f64::consts::PI * u).tan()
            }))
        }
    }
}

fn mirrored(n: usize, mut draw: impl FnMut() -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let x = draw();
        out.push(-x);
        out.push(x);
    }
    if n % 2 == 1 {
        out.push(0.0);
    }
    out
}

/// Recipe for a [`SpinEnsemble`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_spins: usize,
    /// Collective coupling `kappa * sqrt(N)`.
    pub collective_coupling: f64,
    /// Half-width of the intrinsic (irreversible) broadening.
    pub intrinsic_half_width: f64,
    #[serde(default)]
    pub intrinsic_profile: DetuningProfile,
    /// Half-width of the induced (gradient, reversible) broadening.
    pub induced_half_width: f64,
    /// Seed of the permutation that pairs intrinsic detunings with spins.
    #[serde(default)]
    pub assignment_seed: u64,
}

/// `N` spins with per-spin intrinsic and induced detunings and a common
/// single-spin coupling `kappa`.
///
/// Induced detunings follow spin position (a sorted uniform grid); intrinsic
/// detunings are assigned through a seeded permutation so that the two are
/// uncorrelated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinEnsemble {
    pub intrinsic_detunings: Vec<f64>,
    pub induced_detunings: Vec<f64>,
    pub kappa: f64,
    pub intrinsic_half_width: f64,
    pub induced_half_width: f64,
}

impl SpinEnsemble {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        if spec.n_spins == 0 {
            return Err(Error::param("n_spins", "at least one spin is required"));
        }
        if !(spec.collective_coupling >= 0.0) || !spec.collective_coupling.is_finite() {
            return Err(Error::param(
                "collective_coupling",
                format!("must be finite and non-negative, got {}", spec.collective_coupling),
            ));
        }
        let mut intrinsic = build_detuning_grid(spec.intrinsic_half_width, spec.n_spins, spec.intrinsic_profile)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.assignment_seed);
        intrinsic.shuffle(&mut rng);
        let induced = build_detuning_grid(spec.induced_half_width, spec.n_spins, DetuningProfile::UniformGrid)?;
        Ok(Self {
            kappa: spec.collective_coupling / (spec.n_spins as f64).sqrt(),
            intrinsic_detunings: intrinsic,
            induced_detunings: induced,
            intrinsic_half_width: spec.intrinsic_half_width,
            induced_half_width: spec.induced_half_width,
        })
    }

    /// Ensemble with explicitly given detunings.
    pub fn from_detunings(intrinsic: Vec<f64>, induced: Vec<f64>, collective_coupling: f64) -> Result<Self> {
        if intrinsic.is_empty() || intrinsic.len() != induced.len() {
            return Err(Error::param(
                "detunings",
                "intrinsic and induced detunings must be non-empty and of equal length",
            ));
        }
        let half = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Ok(Self {
            kappa: collective_coupling / (intrinsic.len() as f64).sqrt(),
            intrinsic_half_width: half(&intrinsic),
            induced_half_width: half(&induced),
            intrinsic_detunings: intrinsic,
            induced_detunings: induced,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.intrinsic_detunings.len()
    }

    pub fn collective_coupling(&self) -> f64 {
        self.kappa * (self.n_spins() as f64).sqrt()
    }
}

/// Rotating frame at the qubit frequency. Every frequency is a detuning from
/// `omega_q`, in units of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFrame {
    /// Center of the spin line relative to the qubit.
    pub spin_detuning: f64,
    /// Where the cavity idles, measured upward from the spin line.
    pub cavity_offset: f64,
    /// Constant added to every detuning, qubit included. Physically inert.
    #[serde(default)]
    pub global_shift: f64,
}

impl FrequencyFrame {
    pub fn cavity_park(&self) -> f64 {
        self.spin_detuning + self.cavity_offset
    }
}

/// `eta = eta_S * eta_T` with its two factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub eta_s: f64,
    pub eta_t: f64,
    pub eta_total: f64,
}

impl EfficiencyReport {
    pub fn new(eta_s: f64, eta_t: f64) -> Result<Self> {
        for (name, v) in [("eta_s", eta_s), ("eta_t", eta_t)] {
            if !(0.0..=1.0 + 1e-9).contains(&v) {
                return Err(Error::param(name, format!("efficiency {v} outside [0, 1]")));
            }
        }
        Ok(Self {
            eta_s,
            eta_t,
            eta_total: eta_s * eta_t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_width_grid_is_all_zero() {
        let g = build_detuning_grid(0.0, 5, DetuningProfile::UniformGrid).unwrap();
        assert_eq!(g, vec![0.0; 5]);
    }

    #[test]
    fn three_point_grid() {
        let g = build_detuning_grid(1.0, 3, DetuningProfile::UniformGrid).unwrap();
        assert_eq!(g, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn grid_moments() {
        let n = 2000;
        let g = build_detuning_grid(2.0, n, DetuningProfile::UniformGrid).unwrap();
        let mean = g.iter().sum::<f64>() / n as f64;
        let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // direct summation of the endpoint grid: w^2 (n+1) / (3 (n-1))
        let summed = 4.0 * (n + 1) as f64 / (3.0 * (n - 1) as f64);
        assert!(mean.abs() < 1e-14);
        assert_abs_diff_eq!(var, summed, epsilon = 1e-12);
        // 0.1% to the stated one significant figure (exact value 0.10005%)
        let rel = (var - 4.0 / 3.0).abs() / (4.0 / 3.0);
        assert!(rel < 1.5e-3, "rel {rel}");
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(build_detuning_grid(1.0, 0, DetuningProfile::UniformGrid).is_err());
        assert!(build_detuning_grid(-1.0, 4, DetuningProfile::UniformGrid).is_err());
    }

    #[test]
    fn random_profiles_are_symmetric_and_seeded() {
        for profile in [
            DetuningProfile::UniformRandom { seed: 7 },
            DetuningProfile::Lorentzian { seed: 7 },
        ] {
            let a = build_detuning_grid(3.0, 101, profile).unwrap();
            let b = build_detuning_grid(3.0, 101, profile).unwrap();
            assert_eq!(a, b);
            let mut sorted = a.clone();
            sorted.sort_by(f64::total_cmp);
            for (x, y) in sorted.iter().zip(sorted.iter().rev()) {
                assert_eq!(*x, -*y);
            }
        }
        let a = build_detuning_grid(3.0, 10, DetuningProfile::UniformRandom { seed: 1 }).unwrap();
        let b = build_detuning_grid(3.0, 10, DetuningProfile::UniformRandom { seed: 2 }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn norm_examples() {
        let empty = SingleExcitationState::new(vec![c(0.0, 0.0); 3], c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(state_norm(&empty), 0.0);
        let dicke = SingleExcitationState::dicke(16).unwrap();
        assert_abs_diff_eq!(state_norm(&dicke), 1.0, epsilon = 1e-15);
        let s = SingleExcitationState::new(vec![c(0.6, 0.0), c(0.0, 0.0)], c(0.0, 0.8), c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(state_norm(&s), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let dicke = SingleExcitationState::dicke(9).unwrap();
        assert_abs_diff_eq!(symmetric_overlap(&dicke), 1.0, epsilon = 1e-14);

        let r = 1.0 / 2f64.sqrt();
        let anti = SingleExcitationState::new(vec![c(r, 0.0), c(-r, 0.0)], c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(symmetric_overlap(&anti), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dephased_overlap_matches_brute_force_sum() {
        // half-width * T = pi/6 over 2000 grid points
        let n = 2000;
        let t = 1.0;
        let w = PI / 6.0;
        let grid = build_detuning_grid(w, n, DetuningProfile::UniformGrid).unwrap();
        let amps: Vec<Complex64> = grid
            .iter()
            .map(|d| Complex64::from_polar(1.0 / (n as f64).sqrt(), d * t))
            .collect();
        let state = SingleExcitationState::new(amps, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        // oracle: real cosine sum, the imaginary part cancels by symmetry
        let cos_sum: f64 = (0..n)
            .map(|j| (w * (-1.0 + 2.0 * j as f64 / (n - 1) as f64)).cos())
            .sum();
        let brute = cos_sum * cos_sum / n as f64 / n as f64;
        assert_abs_diff_eq!(symmetric_overlap(&state), brute, epsilon = 1e-12);
        assert_abs_diff_eq!(symmetric_overlap(&state), 9.0 / (PI * PI), epsilon = 1e-3);
    }

    #[test]
    fn ensemble_coupling_and_assignment() {
        let spec = EnsembleSpec {
            n_spins: 64,
            collective_coupling: 6.0,
            intrinsic_half_width: 2.0,
            intrinsic_profile: DetuningProfile::UniformGrid,
            induced_half_width: 10.0,
            assignment_seed: 3,
        };
        let e = SpinEnsemble::new(&spec).unwrap();
        assert_abs_diff_eq!(e.collective_coupling(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.kappa, 6.0 / 8.0, epsilon = 1e-15);
        let mut sorted = e.intrinsic_detunings.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(
            sorted,
            build_detuning_grid(2.0, 64, DetuningProfile::UniformGrid).unwrap()
        );
        assert_ne!(sorted, e.intrinsic_detunings);
        assert!(e.induced_detunings.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn efficiency_report_is_product() {
        let r = EfficiencyReport::new(0.9, 0.92).unwrap();
        assert_eq!(r.eta_total, 0.9 * 0.92);
        assert!(EfficiencyReport::new(1.5, 0.5).is_err());
    }

    #[test]
    fn flat_layout_round_trip() {
        let s = SingleExcitationState::new(vec![c(0.1, 0.2), c(0.3, -0.1)], c(0.5, 0.0), c(0.0, 0.7)).unwrap();
        assert_eq!(SingleExcitationState::from_flat(&s.to_flat()).unwrap(), s);
    }
}
