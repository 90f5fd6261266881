//! Bracketed scalar maximization: a coarse probe, golden-section refinement,
//! and a dense-scan fallback when the probe is not unimodal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// The range collapsed to one point.
    Degenerate,
    GoldenSection,
    /// Probe was not unimodal; a dense scan located the bracket first.
    DenseScanThenGolden,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMaximum {
    pub argmax: f64,
    pub value: f64,
    pub method: SearchMethod,
    /// `(x, f(x))` of the coarse probe (and of the dense scan, if it ran).
    pub probe: Vec<(f64, f64)>,
    pub evaluations: usize,
}

impl ScalarMaximum {
    pub fn fell_back(&self) -> bool {
        self.method == SearchMethod::DenseScanThenGolden
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Width tolerance of the final bracket.
    pub tol: f64,
    /// Points of the coarse unimodality probe (>= 3).
    pub probe_points: usize,
    /// Points of the fallback dense scan.
    pub fallback_points: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            probe_points: 9,
            fallback_points: 64,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// True when values rise (weakly) to their maximum and fall (weakly) after it.
fn is_unimodal(values: &[f64]) -> bool {
    let best = argmax(values);
    values[..=best].windows(2).all(|w| w[1] >= w[0]) && values[best..].windows(2).all(|w| w[1] <= w[0])
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut evals = 0;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    evals += 2;
    while (hi - lo) > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
        evals += 1;
    }
    Ok(if f1 >= f2 { (x1, f1, evals) } else { (x2, f2, evals) })
}

/// Maximizes `f` on `[lo, hi]`.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, opts: SearchOptions) -> Result<ScalarMaximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::param("range", format!("invalid search range [{lo}, {hi}]")));
    }
    if lo == hi {
        let value = f(lo)?;
        return Ok(ScalarMaximum {
            argmax: lo,
            value,
            method: SearchMethod::Degenerate,
            probe: vec![(lo, value)],
            evaluations: 1,
        });
    }
    let n_probe = opts.probe_points.max(3);
    let xs = linspace(lo, hi, n_probe);
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut probe: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let mut evaluations = n_probe;

    let (grid, values, method) = if is_unimodal(&ys) {
        (xs, ys, SearchMethod::GoldenSection)
    } else {
        let n = opts.fallback_points.max(n_probe);
        let xs = linspace(lo, hi, n);
        let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        evaluations += n;
        probe.extend(xs.iter().copied().zip(ys.iter().copied()));
        (xs, ys, SearchMethod::DenseScanThenGolden)
    };

    let best = argmax(&values);
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (x, v, evals) = golden_section_max(&mut f, a, b, opts.tol)?;
    evaluations += evals;
    // never report worse than a sampled point
    let (argmax, value) = if v >= values[best] {
        (x, v)
    } else {
        (grid[best], values[best])
    };
    Ok(ScalarMaximum {
        argmax,
        value,
        method,
        probe,
        evaluations,
    })
}
