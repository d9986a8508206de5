//! Max-plus lattice maps obtained from the tropical scheme by the
//! substitutions `u = e^{U/λ}`, `v = e^{V/λ}`, `a = e^{A/λ}`, `f = e^{F/λ}`,
//! `q = e^{Q/λ}`, `ε = e^{E/λ}` and the limit λ → +0.
//!
//! Three forms are provided:
//!
//! * [`ud_step_full`]: finite `E` (or `E = +∞`),
//!   `U' = max{M−E, A+M, A+F+Q+V−max(M,Q)} − max{−E, A+M, A+F+V−max(M,Q)}`,
//!   `V' = max{M_β(V)−E, M_β(U)} − max{−E, 0}` with `M = M_α(U)`;
//! * [`ud_step_einf`]: the `E → +∞` limit, in which `A` cancels and
//!   `V' = M_β(U)`;
//! * [`ud_step_single`]: the second-order equation in `U` alone obtained by
//!   eliminating `V`.

use crate::error::{Error, Result};
use crate::grid::{check_guard, max5, shape_mismatch, Boundary, IntField2D};
use crate::maxplus::{log_sum_exp, max_with, ExtInt};

/// Max-plus parameters and stencil offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UDParams {
    pub a: i64,
    pub f: i64,
    pub q: i64,
    pub e: ExtInt,
    pub alpha: usize,
    pub beta: usize,
}

impl UDParams {
    /// `E = +∞`, `A = 0`.
    pub fn limit(f: i64, q: i64, alpha: usize, beta: usize) -> Self {
        UDParams {
            a: 0,
            f,
            q,
            e: ExtInt::PosInf,
            alpha,
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_guard(self.a)?;
        check_guard(self.f)?;
        check_guard(self.q)?;
        match self.e {
            ExtInt::NegInf => Err(Error::validation("E must be an integer or +inf")),
            ExtInt::Finite(e) => check_guard(e).map(|_| ()),
            ExtInt::PosInf => Ok(()),
        }
    }

    /// The excitable regime `Q < 0 < F` in which the binary automaton lives.
    pub fn require_ca_regime(&self) -> Result<()> {
        self.validate()?;
        if self.q < 0 && 0 < self.f {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "automaton regime needs Q < 0 < F, got F = {}, Q = {}",
                self.f, self.q
            )))
        }
    }
}

/// Two-layer state of the full and limit maps.
#[derive(Debug, Clone, PartialEq)]
pub struct UDState {
    pub u: IntField2D,
    pub v: IntField2D,
}

impl UDState {
    pub fn new(u: IntField2D, v: IntField2D) -> Result<Self> {
        if !u.same_shape(&v) {
            return Err(shape_mismatch(&u, &v));
        }
        Ok(UDState { u, v })
    }
}

/// Scalar u-update of the full map with `m = M_α(U)` at the cell.
pub fn ud_u_full(m: i64, v: i64, a: i64, f: i64, q: i64, e: ExtInt) -> Result<i64> {
    let neg_e = e.neg();
    let mq = m.max(q);
    let num = max_with(&[a + m, a + f + q + v - mq], neg_e.add_finite(m));
    let den = max_with(&[a + m, a + f + v - mq], neg_e);
    match (num, den) {
        (ExtInt::Finite(n), ExtInt::Finite(d)) => check_guard(n - d),
        _ => Err(Error::validation("E = -inf is outside the map's domain")),
    }
}

/// Scalar v-update of the full map.
pub fn ud_v_full(mv: i64, mu: i64, e: ExtInt) -> Result<i64> {
    let neg_e = e.neg();
    let num = max_with(&[mu], neg_e.add_finite(mv));
    let den = max_with(&[0], neg_e);
    match (num, den) {
        (ExtInt::Finite(n), ExtInt::Finite(d)) => check_guard(n - d),
        _ => Err(Error::validation("E = -inf is outside the map's domain")),
    }
}

/// Scalar u-update of the `E → +∞` map.
#[inline]
pub fn ud_u_limit(m: i64, v: i64, f: i64, q: i64) -> Result<i64> {
    let mq = m.max(q);
    check_guard(m.max(f + q + v - mq) - m.max(f + v - mq))
}

fn zip3(
    a: &IntField2D,
    b: &IntField2D,
    g: impl Fn(i64, i64) -> Result<i64>,
) -> Result<IntField2D> {
    let vals = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| g(x, y))
        .collect::<Result<Vec<_>>>()?;
    IntField2D::new(a.width(), a.height(), vals)
}

/// One step of the finite-`E` map (`E = +∞` is accepted and drops the
/// `−E` terms).
pub fn ud_step_full(s: &UDState, p: &UDParams, b: &Boundary<i64>) -> Result<UDState> {
    p.validate()?;
    if !s.u.same_shape(&s.v) {
        return Err(shape_mismatch(&s.u, &s.v));
    }
    let m = max5(&s.u, p.alpha, b)?;
    let mu_b = max5(&s.u, p.beta, b)?;
    let mv_b = max5(&s.v, p.beta, b)?;
    let u = zip3(&m, &s.v, |m, v| ud_u_full(m, v, p.a, p.f, p.q, p.e))?;
    let v = zip3(&mv_b, &mu_b, |mv, mu| ud_v_full(mv, mu, p.e))?;
    Ok(UDState { u, v })
}

/// One step of the `E → +∞` map: `V' = M_β(U)`.
pub fn ud_step_einf(s: &UDState, p: &UDParams, b: &Boundary<i64>) -> Result<UDState> {
    p.validate()?;
    if !s.u.same_shape(&s.v) {
        return Err(shape_mismatch(&s.u, &s.v));
    }
    let m = max5(&s.u, p.alpha, b)?;
    let u = zip3(&m, &s.v, |m, v| ud_u_limit(m, v, p.f, p.q))?;
    let v = max5(&s.u, p.beta, b)?;
    Ok(UDState { u, v })
}

/// `U_{n+1}` from `(U_n, U_{n−1})`:
/// `max{M_α(U_n), F+Q+M_β(U_{n−1})−max(M_α(U_n),Q)} − max{M_α(U_n), F+M_β(U_{n−1})−max(M_α(U_n),Q)}`.
pub fn ud_step_single(u_n: &IntField2D, u_nm1: &IntField2D, p: &UDParams, b: &Boundary<i64>) -> Result<IntField2D> {
    p.validate()?;
    if !u_n.same_shape(u_nm1) {
        return Err(shape_mismatch(u_n, u_nm1));
    }
    let m = max5(u_n, p.alpha, b)?;
    let prev = max5(u_nm1, p.beta, b)?;
    zip3(&m, &prev, |m, v| ud_u_limit(m, v, p.f, p.q))
}

/// Smallest `E` from which the finite map provably coincides with the
/// limit map on states bounded by `bound` in absolute value.
pub fn saturation_bound(bound: i64, p: &UDParams) -> i64 {
    4 * bound + p.a.abs() + p.f.abs() + p.q.abs() + 1
}

/// Which max-plus expression the limit probe compares.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeMap {
    /// `max(X_1, …, X_k)` against `λ·ln Σ e^{X_i/λ}`.
    Max(Vec<i64>),
    /// `M` of five samples against `λ·ln` of their arithmetic mean.
    Mean5([i64; 5]),
    /// The u-update at one cell with offset 0.
    SchemeU { u: i64, v: i64, a: i64, f: i64, q: i64, e: i64 },
    /// The v-update at one cell with offset 0.
    SchemeV { u: i64, v: i64, e: i64 },
}

/// Gap `|λ·ln(x') − X'|` between the tropical expression evaluated at
/// `x = e^{X/λ}` (in log space) and the max-plus output `X'`.
pub fn ud_limit_probe(map: &ProbeMap, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::validation(format!("lambda must be positive, got {lambda}")));
    }
    let lse = |xs: &[i64]| log_sum_exp(&xs.iter().map(|&x| x as f64).collect::<Vec<_>>(), lambda);
    let (smooth, exact) = match map {
        ProbeMap::Max(xs) => {
            if xs.is_empty() {
                return Err(Error::validation("max of an empty list"));
            }
            (lse(xs), *xs.iter().max().expect("non-empty") as f64)
        }
        ProbeMap::Mean5(xs) => (lse(xs) - lambda * 5f64.ln(), *xs.iter().max().expect("five") as f64),
        &ProbeMap::SchemeU { u, v, a, f, q, e } => {
            let uq = log_sum_exp(&[u as f64, q as f64], lambda);
            let num = log_sum_exp(&[(u - e) as f64, (a + u) as f64, (a + f + q + v) as f64 - uq], lambda);
            let den = log_sum_exp(&[-e as f64, (a + u) as f64, (a + f + v) as f64 - uq], lambda);
            (num - den, ud_u_full(u, v, a, f, q, ExtInt::Finite(e))? as f64)
        }
        &ProbeMap::SchemeV { u, v, e } => {
            let num = lse(&[v - e, u]);
            let den = lse(&[-e, 0]);
            (num - den, ud_v_full(v, u, ExtInt::Finite(e))? as f64)
        }
    };
    Ok((smooth - exact).abs())
}
