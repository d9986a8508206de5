//! Positivity-preserving (tropical) difference schemes for the two-variable
//! Oregonator
//!
//! ```text
//! du/dt = a·{u(1 − u) − f·v·(u − q)/(u + q)} + Du·Δu
//! dv/dt = u − v + Dv·Δv
//! ```
//!
//! Each update is a ratio of sums of positive terms, so positive data stay
//! positive for every step size. The updates are evaluated after
//! multiplying numerator and denominator by ε, which is algebraically the
//! same map and reduces exactly to `u' = m_α(u)` when `a = 0`.

use crate::error::{Error, Result};
use crate::grid::{field_sum, mean5, Boundary, Field2D, RealField2D};
use crate::reference::{Dopri5, SpectralLaplacian};

/// Default local error tolerance of the reference integrator.
pub const REFERENCE_TOL: f64 = 1e-10;

/// Kinetic and diffusion constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OregonatorParams {
    pub a: f64,
    pub f: f64,
    pub q: f64,
    pub du: f64,
    pub dv: f64,
    /// Admits `a = 0` (reaction switched off). Test mode only.
    pub allow_degenerate: bool,
}

impl OregonatorParams {
    pub fn new(a: f64, f: f64, q: f64) -> Self {
        OregonatorParams {
            a,
            f,
            q,
            du: 0.0,
            dv: 0.0,
            allow_degenerate: false,
        }
    }

    /// Reaction-free parameters (`a = 0`) with the degenerate flag set.
    pub fn degenerate(f: f64, q: f64) -> Self {
        OregonatorParams {
            allow_degenerate: true,
            ..Self::new(0.0, f, q)
        }
    }

    pub fn with_diffusion(mut self, du: f64, dv: f64) -> Self {
        self.du = du;
        self.dv = dv;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.f, self.q, self.du, self.dv].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::validation("Oregonator parameters must be finite"));
        }
        if self.a < 0.0 || (self.a == 0.0 && !self.allow_degenerate) {
            return Err(Error::validation(format!(
                "a must be positive (a = 0 requires the degenerate flag), got {}",
                self.a
            )));
        }
        if self.f <= 0.0 || self.q <= 0.0 {
            return Err(Error::validation(format!(
                "f and q must be positive, got f = {}, q = {}",
                self.f, self.q
            )));
        }
        if self.du < 0.0 || self.dv < 0.0 {
            return Err(Error::validation("diffusion coefficients must be non-negative"));
        }
        Ok(())
    }

    /// Right-hand side of the reaction ODE.
    pub fn reaction(&self, u: f64, v: f64) -> (f64, f64) {
        let du = self.a * (u * (1.0 - u) - self.f * v * (u - self.q) / (u + self.q));
        (du, u - v)
    }
}

/// Lattice step parameters: one lattice step is one ε-step; `alpha` and
/// `beta` are the stencil offsets of u and v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TropicalStepParams {
    pub eps: f64,
    pub alpha: usize,
    pub beta: usize,
}

impl TropicalStepParams {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("eps must be positive and finite, got {eps}")))
    }
}

fn check_positive(u: f64, v: f64) -> Result<()> {
    if u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("state must be positive, got (u, v) = ({u}, {v})")))
    }
}

#[inline]
fn u_kernel(m: f64, v: f64, p: &OregonatorParams, eps: f64) -> f64 {
    let ea = eps * p.a;
    let g = ea * p.f * v / (m + p.q);
    (m + ea * m + g * p.q) / (1.0 + ea * m + g)
}

#[inline]
fn v_kernel(v: f64, u: f64, eps: f64) -> f64 {
    (v + eps * u) / (1.0 + eps)
}

/// One step of the reaction scheme
/// `u' = (u/ε + au + afqv/(u+q)) / (1/ε + au + afv/(u+q))`,
/// `v' = (v/ε + u) / (1/ε + 1)`.
pub fn trop_ode_step(u: f64, v: f64, p: &OregonatorParams, eps: f64) -> Result<(f64, f64)> {
    p.validate()?;
    check_eps(eps)?;
    check_positive(u, v)?;
    let out = (u_kernel(u, v, p, eps), v_kernel(v, u, eps));
    check_positive(out.0, out.1)?;
    Ok(out)
}

/// `steps` iterations of [`trop_ode_step`], including the initial state.
pub fn trop_ode_run(u0: f64, v0: f64, p: &OregonatorParams, eps: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = (u0, v0);
    check_positive(u0, v0)?;
    out.push(s);
    for _ in 0..steps {
        s = trop_ode_step(s.0, s.1, p, eps)?;
        out.push(s);
    }
    Ok(out)
}

/// One step of the lattice scheme: the u update uses `m_α(u)` in place of
/// `u` and the cell's own `v`; `v' = (m_β(v)/ε + m_β(u)) / (1/ε + 1)`.
pub fn trop_pde_step(
    u: &RealField2D,
    v: &RealField2D,
    p: &OregonatorParams,
    sp: &TropicalStepParams,
    b: &Boundary<f64>,
) -> Result<(RealField2D, RealField2D)> {
    p.validate()?;
    sp.validate()?;
    if !u.same_shape(v) {
        return Err(crate::grid::shape_mismatch(u, v));
    }
    u.require_positive("u")?;
    v.require_positive("v")?;
    if let Boundary::Fixed(c) = b {
        if !(*c > 0.0) {
            return Err(Error::domain(format!("fixed boundary value must be positive, got {c}")));
        }
    }
    let mu = mean5(u, sp.alpha, b)?;
    let mu_b = mean5(u, sp.beta, b)?;
    let mv_b = mean5(v, sp.beta, b)?;
    let (w, h) = (u.width(), u.height());
    let un: Vec<f64> = mu
        .values()
        .iter()
        .zip(v.values())
        .map(|(&m, &vv)| u_kernel(m, vv, p, sp.eps))
        .collect();
    let vn: Vec<f64> = mv_b
        .values()
        .iter()
        .zip(mu_b.values())
        .map(|(&mv, &mu)| v_kernel(mv, mu, sp.eps))
        .collect();
    let un = Field2D::new(w, h, un)?;
    let vn = Field2D::new(w, h, vn)?;
    un.require_positive("u")?;
    vn.require_positive("v")?;
    Ok((un, vn))
}

/// Frames `0..=steps` of the lattice scheme.
pub fn trop_pde_run(
    u0: &RealField2D,
    v0: &RealField2D,
    p: &OregonatorParams,
    sp: &TropicalStepParams,
    b: &Boundary<f64>,
    steps: usize,
) -> Result<Vec<(RealField2D, RealField2D)>> {
    u0.require_positive("u")?;
    v0.require_positive("v")?;
    let mut frames = vec![(u0.clone(), v0.clone())];
    for _ in 0..steps {
        let (u, v) = frames.last().expect("non-empty");
        let next = trop_pde_step(u, v, p, sp, b)?;
        frames.push(next);
    }
    Ok(frames)
}

/// Sampled solution of the continuous reaction ODE.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn ode_rhs(p: OregonatorParams) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |_, y, dy| {
        let (du, dv) = p.reaction(y[0], y[1]);
        dy[0] = du;
        dy[1] = dv;
    }
}

/// Integrates the reaction ODE to `t_end` with the adaptive reference
/// integrator and records every accepted step.
pub fn ode_reference(u0: f64, v0: f64, p: &OregonatorParams, t_end: f64, tol: f64) -> Result<Trajectory> {
    p.validate()?;
    check_positive(u0, v0)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::validation(format!("t_end must be positive, got {t_end}")));
    }
    let mut traj = Trajectory::default();
    Dopri5::new(tol).solve(ode_rhs(*p), 0.0, &[u0, v0], &[t_end], |t, y| {
        traj.t.push(t);
        traj.u.push(y[0]);
        traj.v.push(y[1]);
    })?;
    Ok(traj)
}

/// Reference ODE state at exactly `t_end`.
pub fn ode_reference_at(u0: f64, v0: f64, p: &OregonatorParams, t_end: f64, tol: f64) -> Result<(f64, f64)> {
    p.validate()?;
    check_positive(u0, v0)?;
    let out = Dopri5::new(tol).solve(ode_rhs(*p), 0.0, &[u0, v0], &[t_end], |_, _| {})?;
    Ok((out[0][0], out[0][1]))
}

fn step_count(horizon: f64, eps: f64) -> Result<usize> {
    let n = (horizon / eps).round();
    if n < 1.0 || ((n * eps - horizon) / horizon).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "horizon {horizon} is not an integer multiple of eps {eps}"
        )));
    }
    Ok(n as usize)
}

/// Error of the ODE scheme at `horizon` for each ε (max-norm against the
/// reference solution). Each ε must divide the horizon.
pub fn consistency_order_ode(
    p: &OregonatorParams,
    state: (f64, f64),
    horizon: f64,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_decreasing(eps_list)?;
    let (ru, rv) = ode_reference_at(state.0, state.1, p, horizon, REFERENCE_TOL)?;
    eps_list
        .iter()
        .map(|&eps| {
            let steps = step_count(horizon, eps)?;
            let (u, v) = *trop_ode_run(state.0, state.1, p, eps, steps)?.last().expect("non-empty");
            Ok((eps, (u - ru).abs().max((v - rv).abs())))
        })
        .collect()
}

fn check_decreasing(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::validation("eps list must be non-empty, positive and strictly decreasing"));
    }
    Ok(())
}

/// Setup of the lattice consistency study: an x-dependent periodic profile
/// on `[0, 1)` laid on an `N × height` periodic lattice. Lattice spacing is
/// `1/N`, and ε is tied to it through `Du = α²Δx²/(5ε)`, so
/// `ε = α²/(5·Du·N²)`. `Dv` must equal `Du·β²/α²` for the v stencil to
/// represent the same Δt.
#[derive(Debug, Clone, Copy)]
pub struct PdeStudy {
    pub params: OregonatorParams,
    pub alpha: usize,
    pub beta: usize,
    pub height: usize,
    pub horizon: f64,
    /// Collocation points of the spectral reference (even, multiple of every N).
    pub modes: usize,
    pub tol: f64,
}

impl PdeStudy {
    pub fn eps_for(&self, n: usize) -> f64 {
        (self.alpha * self.alpha) as f64 / (5.0 * self.params.du * (n * n) as f64)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.alpha == 0 || self.params.du <= 0.0 {
            return Err(Error::validation("lattice study needs alpha ≥ 1 and Du > 0"));
        }
        let expected_dv = self.params.du * (self.beta * self.beta) as f64 / (self.alpha * self.alpha) as f64;
        if (self.params.dv - expected_dv).abs() > 1e-12 * expected_dv.max(1.0) {
            return Err(Error::validation(format!(
                "Dv must equal Du·β²/α² = {expected_dv} for a common time step"
            )));
        }
        if self.height == 0 {
            return Err(Error::validation("height must be at least 1"));
        }
        Ok(())
    }
}

/// Error of the lattice scheme at the study horizon for each lattice width
/// `N` in `sizes` (strictly increasing), measured in max-norm against a
/// Fourier collocation solution of the PDE. Returns `(ε, error)` pairs.
pub fn consistency_order_pde(
    study: &PdeStudy,
    sizes: &[usize],
    profile: impl Fn(f64) -> (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    study.validate()?;
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("lattice sizes must be strictly increasing"));
    }
    let m = study.modes;
    if sizes.iter().any(|&n| n == 0 || m % n != 0) {
        return Err(Error::validation("every lattice size must divide the spectral resolution"));
    }
    let lap = SpectralLaplacian::new(m)?;
    let p = study.params;
    let mut y0 = vec![0.0; 2 * m];
    for i in 0..m {
        let (u, v) = profile(i as f64 / m as f64);
        check_positive(u, v)?;
        y0[i] = u;
        y0[m + i] = v;
    }
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let (u, v) = y.split_at(m);
        let (du, dv) = dy.split_at_mut(m);
        lap.apply(u, du);
        lap.apply(v, dv);
        for i in 0..m {
            let (ru, rv) = p.reaction(u[i], v[i]);
            du[i] = p.du * du[i] + ru;
            dv[i] = p.dv * dv[i] + rv;
        }
    };
    let reference = Dopri5::new(study.tol).solve(rhs, 0.0, &y0, &[study.horizon], |_, _| {})?;
    let reference = &reference[0];

    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let eps = study.eps_for(n);
        let steps = step_count(study.horizon, eps)?;
        let u0 = RealField2D::from_fn(n, study.height, |j, _| profile(j as f64 / n as f64).0)?;
        let v0 = RealField2D::from_fn(n, study.height, |j, _| profile(j as f64 / n as f64).1)?;
        let sp = TropicalStepParams {
            eps,
            alpha: study.alpha,
            beta: study.beta,
        };
        let (mut u, mut v) = (u0, v0);
        for _ in 0..steps {
            (u, v) = trop_pde_step(&u, &v, &p, &sp, &Boundary::Periodic)?;
        }
        let stride = m / n;
        let mut err = 0.0f64;
        for k in 0..study.height {
            for j in 0..n {
                err = err
                    .max((u.get(j, k) - reference[j * stride]).abs())
                    .max((v.get(j, k) - reference[m + j * stride]).abs());
            }
        }
        out.push((eps, err));
    }
    Ok(out)
}

/// Empirical orders `ln(e_i/e_{i+1}) / ln(ε_i/ε_{i+1})` between successive
/// `(ε, error)` pairs.
pub fn empirical_orders(errors: &[(f64, f64)]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}

/// Local maxima `(index, value)` of a sampled series (strict rise, then
/// non-rise).
pub fn local_maxima(series: &[f64]) -> Vec<(usize, f64)> {
    series
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] && w[1] >= w[2])
        .map(|(i, w)| (i + 1, w[1]))
        .collect()
}

/// Peak statistics of a sampled oscillation after a transient.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationReport {
    /// `(t, u)` of every local maximum after the transient.
    pub peaks: Vec<(f64, f64)>,
    /// Largest relative change between successive peak heights.
    pub peak_spread: f64,
    /// Peak minus following trough, for the first and last full swing.
    pub first_swing: f64,
    pub last_swing: f64,
    pub max_value: f64,
}

impl OscillationReport {
    /// At least three peaks of nearly equal height and a swing that has
    /// not decayed below half its early size.
    pub fn sustained(&self, tol: f64) -> bool {
        self.peaks.len() >= 3
            && self.peak_spread <= tol
            && self.last_swing > 0.0
            && self.last_swing >= 0.5 * self.first_swing
            && self.max_value.is_finite()
    }

    /// Mean spacing of successive peaks.
    pub fn period(&self) -> Option<f64> {
        let n = self.peaks.len();
        (n >= 2).then(|| (self.peaks[n - 1].0 - self.peaks[0].0) / (n - 1) as f64)
    }
}

/// Summarizes the oscillation of `u` sampled at times `t`, ignoring
/// samples with `t ≤ transient`.
pub fn oscillation_report(t: &[f64], u: &[f64], transient: f64) -> OscillationReport {
    let start = t.iter().position(|&x| x > transient).unwrap_or(t.len());
    let tail = &u[start.min(u.len())..];
    let peaks: Vec<(f64, f64)> = local_maxima(tail).into_iter().map(|(i, v)| (t[start + i], v)).collect();
    let neg: Vec<f64> = tail.iter().map(|x| -x).collect();
    let troughs: Vec<(usize, f64)> = local_maxima(&neg).into_iter().map(|(i, v)| (i, -v)).collect();
    let peak_idx: Vec<usize> = local_maxima(tail).into_iter().map(|(i, _)| i).collect();
    let swing = |pi: usize| -> Option<f64> {
        troughs.iter().find(|(ti, _)| *ti > pi).map(|(_, v)| tail[pi] - v)
    };
    let swings: Vec<f64> = peak_idx.iter().filter_map(|&i| swing(i)).collect();
    let peak_spread = peaks
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / w[0].1).abs())
        .fold(0.0, f64::max);
    OscillationReport {
        peak_spread,
        first_swing: swings.first().copied().unwrap_or(0.0),
        last_swing: swings.last().copied().unwrap_or(0.0),
        max_value: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        peaks,
    }
}

/// Total u of each lattice frame; constant under pure diffusion with a
/// periodic boundary.
pub fn u_sums(frames: &[(RealField2D, RealField2D)]) -> Vec<f64> {
    frames.iter().map(|(u, _)| field_sum(u)).collect()
}
