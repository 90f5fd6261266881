//! Adaptive explicit Runge-Kutta integration of complex linear systems.
//!
//! Dormand-Prince 8(5,3) with step-size control after Hairer's `DOP853`
//! and its 7th-order dense output. Callers integrate one smooth interval at a
//! time; schedule switches are handled by restarting at the breakpoint.

mod tableau;

use num_complex::Complex64;

use crate::error::{Error, Result};
use tableau::*;

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy)]
pub struct Dop853Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dop853Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

impl Default for Dop853Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, rhs: Self) {
        self.accepted += rhs.accepted;
        self.rejected += rhs.rejected;
        self.evaluations += rhs.evaluations;
    }
}

const SAFE: f64 = 0.9;
const FACC1: f64 = 1.0 / 0.333;
const FACC2: f64 = 1.0 / 6.0;

/// `out = y + h * sum_i w_i k_i`
fn combine(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        *o = y[i] + acc * h;
    }
}

struct Stages {
    k: [Vec<Complex64>; 16],
}

impl Stages {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
        }
    }
}

/// Coefficients of the continuous extension over the last accepted step.
struct Dense {
    t_old: f64,
    h: f64,
    cont: [Vec<Complex64>; 8],
}

impl Dense {
    fn eval(&self, t: f64, out: &mut [Complex64]) {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        for i in 0..out.len() {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
    }
}

fn initial_step<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: &[Complex64],
    f0: &[Complex64],
    span: f64,
    opts: &Dop853Options,
) -> f64 {
    let n = y0.len() as f64;
    let sk = |y: Complex64| opts.atol + opts.rtol * y.norm();
    let dnf: f64 = f0.iter().zip(y0).map(|(f, y)| (f.norm() / sk(*y)).powi(2)).sum::<f64>() / n;
    let dny: f64 = y0.iter().map(|y| (y.norm() / sk(*y)).powi(2)).sum::<f64>() / n;
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf).sqrt()
    };
    h = h.min(opts.h_max).min(span);
    let mut y1 = vec![Complex64::new(0.0, 0.0); y0.len()];
    combine(&mut y1, y0, h, &[(1.0, f0)]);
    let mut f1 = vec![Complex64::new(0.0, 0.0); y0.len()];
    sys.rhs(t0 + h, &y1, &mut f1);
    let der2 = (f1
        .iter()
        .zip(f0)
        .zip(y0)
        .map(|((a, b), y)| ((a - b).norm() / sk(*y)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h).min(h1).min(opts.h_max).min(span)
}

/// Integrates `sys` from `t0` to `t1` starting at `y0`.
///
/// `sample_times` must be sorted and inside `[t0, t1]`; for each of them
/// `on_sample` receives the dense-output state. Returns the state at `t1`.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    opts: &Dop853Options,
    sample_times: &[f64],
    mut on_sample: F,
) -> Result<(Vec<Complex64>, Stats)>
where
    S: OdeSystem,
    F: FnMut(f64, &[Complex64]),
{
    let n = sys.dim();
    assert_eq!(y0.len(), n, "state length does not match system dimension");
    let mut stats = Stats::default();
    let mut y = y0.to_vec();
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok((y, stats));
    }

    let mut st = Stages::new(n);
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut sample_buf = vec![Complex64::new(0.0, 0.0); n];
    let mut dense = Dense {
        t_old: t0,
        h: 1.0,
        cont: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
    };

    sys.rhs(t0, &y, &mut st.k[0]);
    stats.evaluations += 1;
    let mut t = t0;
    let mut h = initial_step(sys, t0, &y, &st.k[0], span, opts);
    stats.evaluations += 1;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { time: t });
        }
        let remaining = t1 - t;
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        if h.abs() <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { time: t });
        }

        // the 12 stages; stage vectors follow DOP853 numbering with
        // k[i] = k_{i+1}
        macro_rules! stage {
            ($dst:expr, $c:expr, [$(($w:expr, $src:expr)),*]) => {{
                {
                    let k = &st.k;
                    combine(&mut tmp, &y, h, &[$(($w, &k[$src][..])),*]);
                }
                sys.rhs(t + $c * h, &tmp, &mut st.k[$dst]);
            }};
        }
        stage!(1, C2, [(A21, 0)]);
        stage!(2, C3, [(A31, 0), (A32, 1)]);
        stage!(3, C4, [(A41, 0), (A43, 2)]);
        stage!(4, C5, [(A51, 0), (A53, 2), (A54, 3)]);
        stage!(5, C6, [(A61, 0), (A64, 3), (A65, 4)]);
        stage!(6, C7, [(A71, 0), (A74, 3), (A75, 4), (A76, 5)]);
        stage!(7, C8, [(A81, 0), (A84, 3), (A85, 4), (A86, 5), (A87, 6)]);
        stage!(8, C9, [(A91, 0), (A94, 3), (A95, 4), (A96, 5), (A97, 6), (A98, 7)]);
        stage!(
            9,
            C10,
            [
                (A101, 0),
                (A104, 3),
                (A105, 4),
                (A106, 5),
                (A107, 6),
                (A108, 7),
                (A109, 8)
            ]
        );
        stage!(
            10,
            C11,
            [
                (A111, 0),
                (A114, 3),
                (A115, 4),
                (A116, 5),
                (A117, 6),
                (A118, 7),
                (A119, 8),
                (A1110, 9)
            ]
        );
        stage!(
            11,
            1.0,
            [
                (A121, 0),
                (A124, 3),
                (A125, 4),
                (A126, 5),
                (A127, 6),
                (A128, 7),
                (A129, 8),
                (A1210, 9),
                (A1211, 10)
            ]
        );
        stats.evaluations += 11;

        {
            let k = &st.k;
            combine(
                &mut y_new,
                &y,
                h,
                &[
                    (B1, &k[0]),
                    (B6, &k[5]),
                    (B7, &k[6]),
                    (B8, &k[7]),
                    (B9, &k[8]),
                    (B10, &k[9]),
                    (B11, &k[10]),
                    (B12, &k[11]),
                ],
            );
        }

        // error estimate: 5th-order and 3rd-order embedded solutions
        let (mut err, mut err2) = (0.0, 0.0);
        {
            let k = &st.k;
            for i in 0..n {
                let sk = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                let bsum = k[0][i] * B1
                    + k[5][i] * B6
                    + k[6][i] * B7
                    + k[7][i] * B8
                    + k[8][i] * B9
                    + k[9][i] * B10
                    + k[10][i] * B11
                    + k[11][i] * B12;
                let e2 = bsum - k[0][i] * BHH1 - k[8][i] * BHH2 - k[11][i] * BHH3;
                err2 += (e2.norm() / sk).powi(2);
                let e = k[0][i] * ER1
                    + k[5][i] * ER6
                    + k[6][i] * ER7
                    + k[7][i] * ER8
                    + k[8][i] * ER9
                    + k[9][i] * ER10
                    + k[10][i] * ER11
                    + k[11][i] * ER12;
                err += (e.norm() / sk).powi(2);
            }
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err * (1.0 / (deno * n as f64)).sqrt();
        if !err.is_finite() {
            return Err(Error::StepUnderflow { time: t });
        }

        let fac11 = err.powf(0.125);
        let fac = FACC2.max(FACC1.min(fac11 / SAFE));
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            // k13 = f(t + h, y_new)
            sys.rhs(t + h, &y_new, &mut st.k[12]);
            stats.evaluations += 1;

            let t_end = if last { t1 } else { t + h };
            if next_sample < sample_times.len() && sample_times[next_sample] < t_end {
                prepare_dense(sys, &mut st, &mut dense, &mut tmp, t, h, &y, &y_new);
                stats.evaluations += 3;
                while next_sample < sample_times.len() && sample_times[next_sample] < t_end {
                    dense.eval(sample_times[next_sample], &mut sample_buf);
                    on_sample(sample_times[next_sample], &sample_buf);
                    next_sample += 1;
                }
            }

            st.k.swap(0, 12);
            std::mem::swap(&mut y, &mut y_new);
            t = t_end;
            while next_sample < sample_times.len() && sample_times[next_sample] <= t {
                on_sample(sample_times[next_sample], &y);
                next_sample += 1;
            }
            if last {
                break;
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / FACC1.min(fac11 / SAFE);
            last_rejected = true;
            stats.rejected += 1;
        }
        h = h_new.min(opts.h_max);
    }

    while next_sample < sample_times.len() {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok((y, stats))
}

#[allow(clippy::too_many_arguments)]
fn prepare_dense<S: OdeSystem>(
    sys: &S,
    st: &mut Stages,
    dense: &mut Dense,
    tmp: &mut [Complex64],
    t: f64,
    h: f64,
    y: &[Complex64],
    y_new: &[Complex64],
) {
    // extra stages k14..k16
    {
        let k = &st.k;
        combine(
            tmp,
            y,
            h,
            &[
                (A141, &k[0]),
                (A147, &k[6]),
                (A148, &k[7]),
                (A149, &k[8]),
                (A1410, &k[9]),
                (A1411, &k[10]),
                (A1412, &k[11]),
                (A1413, &k[12]),
            ],
        );
    }
    sys.rhs(t + C14 * h, tmp, &mut st.k[13]);
    {
        let k = &st.k;
        combine(
            tmp,
            y,
            h,
            &[
                (A151, &k[0]),
                (A156, &k[5]),
                (A157, &k[6]),
                (A158, &k[7]),
                (A1511, &k[10]),
                (A1512, &k[11]),
                (A1513, &k[12]),
                (A1514, &k[13]),
            ],
        );
    }
    sys.rhs(t + C15 * h, tmp, &mut st.k[14]);
    {
        let k = &st.k;
        combine(
            tmp,
            y,
            h,
            &[
                (A161, &k[0]),
                (A166, &k[5]),
                (A167, &k[6]),
                (A168, &k[7]),
                (A169, &k[8]),
                (A1613, &k[12]),
                (A1614, &k[13]),
                (A1615, &k[14]),
            ],
        );
    }
    sys.rhs(t + C16 * h, tmp, &mut st.k[15]);

    let k = &st.k;
    dense.t_old = t;
    dense.h = h;
    let d4 = [D41, D46, D47, D48, D49, D410, D411, D412, D413, D414, D415, D416];
    let d5 = [D51, D56, D57, D58, D59, D510, D511, D512, D513, D514, D515, D516];
    let d6 = [D61, D66, D67, D68, D69, D610, D611, D612, D613, D614, D615, D616];
    let d7 = [D71, D76, D77, D78, D79, D710, D711, D712, D713, D714, D715, D716];
    let idx = [0usize, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
    let [c0, c1, c2, c3, c4, c5, c6, c7] = &mut dense.cont;
    for i in 0..y.len() {
        let ydiff = y_new[i] - y[i];
        let bspl = k[0][i] * h - ydiff;
        c0[i] = y[i];
        c1[i] = ydiff;
        c2[i] = bspl;
        c3[i] = ydiff - k[12][i] * h - bspl;
        let mut s4 = Complex64::new(0.0, 0.0);
        let mut s5 = s4;
        let mut s6 = s4;
        let mut s7 = s4;
        for (j, &m) in idx.iter().enumerate() {
            s4 += k[m][i] * d4[j];
            s5 += k[m][i] * d5[j];
            s6 += k[m][i] * d6[j];
            s7 += k[m][i] * d7[j];
        }
        c4[i] = s4 * h;
        c5[i] = s5 * h;
        c6[i] = s6 * h;
        c7[i] = s7 * h;
    }
}
