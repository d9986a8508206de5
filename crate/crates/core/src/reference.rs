//! High-accuracy integrators used as oracles for the tropical schemes.
//!
//! [`Dopri5`] is the embedded Runge–Kutta 5(4) pair of Dormand and Prince
//! with standard step-size control. [`SpectralLaplacian`] differentiates a
//! periodic profile on `[0, 1)` with the Fourier differentiation matrix.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A (FSAL); these are 5th minus 4th
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince integrator for `y' = f(t, y)`.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on attempted steps per call.
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Dopri5 {
            rtol: tol,
            atol: tol,
            max_steps: 5_000_000,
        }
    }

    /// Integrates from `(t0, y0)` and returns the state at each of `times`
    /// (non-decreasing, all ≥ `t0`). Steps are clipped to land on each
    /// output time exactly. `observe` sees every accepted step.
    pub fn solve<F, O>(&self, rhs: F, t0: f64, y0: &[f64], times: &[f64], mut observe: O) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]),
    {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::validation("integrator tolerances must be positive"));
        }
        let n = y0.len();
        let mut y = y0.to_vec();
        let mut t = t0;
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        rhs(t, &y, &mut k[0]);
        let mut h = self.initial_step(&rhs, t, &y, &k[0]);
        let mut out = Vec::with_capacity(times.len());
        let mut attempts = 0usize;
        observe(t, &y);

        for &target in times {
            if target < t {
                return Err(Error::validation("output times must be non-decreasing and after t0"));
            }
            while t < target {
                attempts += 1;
                if attempts > self.max_steps {
                    return Err(Error::domain(format!("step budget exhausted at t = {t}")));
                }
                let remaining = target - t;
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                if step <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::domain(format!("step size underflow at t = {t}")));
                }
                for s in 1..7 {
                    for i in 0..n {
                        let mut acc = y[i];
                        for (r, ks) in k.iter().take(s).enumerate() {
                            acc += step * A[s][r] * ks[i];
                        }
                        tmp[i] = acc;
                    }
                    rhs(t + C[s] * step, &tmp, &mut k[s]);
                }
                // the last stage input is the fifth-order solution (FSAL)
                y_new.copy_from_slice(&tmp);

                let mut err = 0.0;
                for i in 0..n {
                    let mut e = 0.0;
                    for (es, ks) in E.iter().zip(&k) {
                        e += es * ks[i];
                    }
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err += (step * e / sc).powi(2);
                }
                let err = (err / n as f64).sqrt();
                if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                    h = step * 0.2;
                    continue;
                }
                if err <= 1.0 {
                    t = if last { target } else { t + step };
                    y.copy_from_slice(&y_new);
                    k.swap(0, 6);
                    observe(t, &y);
                    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if !last {
                        h = step * fac;
                    } else {
                        h = h.max(step * fac);
                    }
                } else {
                    h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
            out.push(y.clone());
        }
        Ok(out)
    }

    fn initial_step<F: Fn(f64, &[f64], &mut [f64])>(&self, rhs: &F, t: f64, y: &[f64], f0: &[f64]) -> f64 {
        let n = y.len() as f64;
        let sc = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = (y.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; y.len()];
        rhs(t + h0, &y1, &mut f1);
        let d2 = (f1
            .iter()
            .zip(f0)
            .enumerate()
            .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }
}

/// Second-derivative matrix for periodic functions sampled at `x_i = i/M`
/// on `[0, 1)`.
#[derive(Debug, Clone)]
pub struct SpectralLaplacian {
    m: usize,
    d2: Vec<f64>,
}

impl SpectralLaplacian {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || m % 2 != 0 {
            return Err(Error::validation("spectral resolution must be even and at least 4"));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let half = (m / 2) as i64;
        let mut col = vec![0.0; m];
        for (d, c) in col.iter_mut().enumerate() {
            let mut acc = 0.0;
            for kk in (-half + 1)..=half {
                let w = two_pi * kk as f64;
                acc -= w * w * (two_pi * kk as f64 * d as f64 / m as f64).cos();
            }
            *c = acc / m as f64;
        }
        let mut d2 = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                d2[i * m + j] = col[(i + m - j) % m];
            }
        }
        Ok(SpectralLaplacian { m, d2 })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        for i in 0..self.m {
            let row = &self.d2[i * self.m..(i + 1) * self.m];
            out[i] = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
    }
}
