//! The diffusion-free max-plus map
//!
//! ```text
//! U_{n+1} = max{U_n, F + Q + U_{n−1} − max(U_n, Q)} − max{U_n, F + U_{n−1} − max(U_n, Q)}
//! ```
//!
//! its equilibria, its piecewise-linear case forms, the recursion
//! `Ψ_{n+2} = Ψ_n − Ψ_{n+1}` for `Ψ_n = U_{n−1} − U_n`, and the
//! classification of integer orbits for `0 < F < Q`: every orbit ends on the
//! alternation `0, Q, 0, Q, …` except the constant solution `U = F`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::check_guard;

/// Iteration budget of [`attractor_classify`] when none is given.
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroDimParams {
    pub f: i64,
    pub q: i64,
}

impl ZeroDimParams {
    pub fn new(f: i64, q: i64) -> Result<Self> {
        check_guard(f)?;
        check_guard(q)?;
        Ok(ZeroDimParams { f, q })
    }

    /// The oscillatory regime `0 < F < Q`.
    pub fn require_oscillatory(&self) -> Result<()> {
        if 0 < self.f && self.f < self.q {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "orbit classification needs 0 < F < Q, got F = {}, Q = {}",
                self.f, self.q
            )))
        }
    }
}

/// `(U_{n−1}, U_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OdeState {
    pub u_prev: i64,
    pub u_curr: i64,
}

impl OdeState {
    pub fn new(u_prev: i64, u_curr: i64) -> Self {
        OdeState { u_prev, u_curr }
    }

    /// `Ψ_n = U_{n−1} − U_n`.
    pub fn psi(&self) -> i64 {
        self.u_prev - self.u_curr
    }

    pub fn advance(&self, next: i64) -> OdeState {
        OdeState::new(self.u_curr, next)
    }
}

/// `U_{n+1}` by the max-plus formula.
pub fn ud_ode_step(s: OdeState, p: ZeroDimParams) -> Result<i64> {
    let (u, up) = (s.u_curr, s.u_prev);
    let mq = u.max(p.q);
    check_guard(u.max(p.f + p.q + up - mq) - u.max(p.f + up - mq))
}

/// Which case form applies: `I` for `U_n ≥ Q`, `II` for `U_n ≤ Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    I,
    II,
}

/// Sub-branch of a case form. `Linear` is the middle branch
/// (`F + Q + U_{n−1} − 2U_n` in case I, `F + Ψ_n` in case II); when `Q < 0`
/// the middle branch is the reflected expression instead
/// (`2U_n − F − U_{n−1}` in case I, `Q − F − Ψ_n` in case II).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Zero,
    Linear,
    Reflected,
    Q,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Zero => "0",
            Branch::Linear => "linear",
            Branch::Reflected => "reflected",
            Branch::Q => "Q",
        };
        f.write_str(s)
    }
}

/// Case-I form: with `x = F + U_{n−1} − 2U_n`, `U_{n+1} = max(0, x + Q) − max(0, x)`.
pub fn case_i_value(s: OdeState, p: ZeroDimParams) -> (i64, Branch) {
    let x = p.f + s.u_prev - 2 * s.u_curr;
    two_max_branch(x, p.q)
}

/// Case-II form: with `y = F + Ψ_n`, `U_{n+1} = max(0, y) − max(0, y − Q)`.
pub fn case_ii_value(s: OdeState, p: ZeroDimParams) -> (i64, Branch) {
    let y = p.f + s.psi();
    two_max_branch(y - p.q, p.q)
}

/// `max(0, x + Q) − max(0, x)` split into its linear pieces.
fn two_max_branch(x: i64, q: i64) -> (i64, Branch) {
    if q >= 0 {
        if x + q <= 0 {
            (0, Branch::Zero)
        } else if x >= 0 {
            (q, Branch::Q)
        } else {
            (x + q, Branch::Linear)
        }
    } else if x <= 0 {
        (0, Branch::Zero)
    } else if x + q >= 0 {
        (q, Branch::Q)
    } else {
        (-x, Branch::Reflected)
    }
}

/// `U_{n+1}` through the case forms (case II whenever `U_n ≤ Q`).
pub fn piecewise_step(s: OdeState, p: ZeroDimParams) -> (i64, Case, Branch) {
    if s.u_curr <= p.q {
        let (v, b) = case_ii_value(s, p);
        (v, Case::II, b)
    } else {
        let (v, b) = case_i_value(s, p);
        (v, Case::I, b)
    }
}

/// `U_0, U_1, …, U_steps+1`.
pub fn trajectory(u0: i64, u1: i64, p: ZeroDimParams, steps: usize) -> Result<Vec<i64>> {
    check_guard(u0)?;
    check_guard(u1)?;
    let mut out = vec![u0, u1];
    let mut s = OdeState::new(u0, u1);
    for _ in 0..steps {
        let next = ud_ode_step(s, p)?;
        out.push(next);
        s = s.advance(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// Which printed case produced an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `Ū ≥ Q` branch.
    UpperCase,
    /// `Ū ≤ Q` branch.
    LowerCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub value: f64,
    pub stability: Stability,
    pub regions: Vec<Region>,
}

/// Equilibria by the case conditions:
///
/// * `U ≥ Q`: `0` if `F + Q ≤ 0` and `F ≤ 0`; `Q` if `F ≥ 0` and `F ≥ Q`;
/// * `U ≤ Q`: `0` if `F ≤ Q` and `F ≤ 0`; `F` if `0 < F < Q`; `Q` if
///   `F ≥ 0` and `F ≥ Q`.
///
/// `0` and `Q` are tagged stable, `F` unstable. Values are deduplicated
/// and sorted. For `F = 0, Q < 0` every value in `[Q, 0]` is fixed; only
/// the two endpoints are reported.
pub fn equilibria(f: f64, q: f64) -> Result<Vec<Equilibrium>> {
    if !f.is_finite() || !q.is_finite() {
        return Err(Error::validation("F and Q must be finite"));
    }
    let mut found: Vec<(f64, Stability, Region)> = Vec::new();
    if f + q <= 0.0 && f <= 0.0 {
        found.push((0.0, Stability::Stable, Region::UpperCase));
    }
    if f >= 0.0 && f >= q {
        found.push((q, Stability::Stable, Region::UpperCase));
    }
    if f <= q && f <= 0.0 {
        found.push((0.0, Stability::Stable, Region::LowerCase));
    }
    if 0.0 < f && f < q {
        found.push((f, Stability::Unstable, Region::LowerCase));
    }
    if f >= 0.0 && f >= q {
        found.push((q, Stability::Stable, Region::LowerCase));
    }
    let mut out: Vec<Equilibrium> = Vec::new();
    for (value, stability, region) in found {
        match out.iter_mut().find(|e| e.value == value) {
            Some(e) => {
                if !e.regions.contains(&region) {
                    e.regions.push(region);
                }
            }
            None => out.push(Equilibrium {
                value,
                stability,
                regions: vec![region],
            }),
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}

/// The three intervals of `Ψ` for `0 < F < Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalClass {
    /// `(−∞, −F]`
    I1,
    /// `(−F, Q − F)`
    I2,
    /// `[Q − F, ∞)`
    I3,
}

pub fn classify_interval(psi: i64, p: ZeroDimParams) -> Result<IntervalClass> {
    p.require_oscillatory()?;
    Ok(if psi <= -p.f {
        IntervalClass::I1
    } else if psi < p.q - p.f {
        IntervalClass::I2
    } else {
        IntervalClass::I3
    })
}

/// `Ψ_1, …, Ψ_n` from `Ψ_{n+2} = Ψ_n − Ψ_{n+1}`.
pub fn psi_recursion(psi1: i64, psi2: i64, n: usize) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(n);
    let (mut a, mut b) = (check_guard(psi1)?, check_guard(psi2)?);
    for _ in 0..n {
        out.push(a);
        let c = check_guard(a - b)?;
        (a, b) = (b, c);
    }
    Ok(out)
}

/// Closed-form `Ψ_n` (n ≥ 1). With `r = (√5 − 1)/2` and `φ = (1 + √5)/2`
/// (the roots of `x² + x − 1` are `r` and `−φ`),
/// `Ψ_n = [c₂·r^{n−1} − c₁·(−φ)^{n−1}] / √5` where `c₁ = Ψ₂ − r·Ψ₁` and
/// `c₂ = Ψ₂ + φ·Ψ₁`. The `(−φ)` mode is absent exactly when `c₁ = 0`, i.e.
/// for `Ψ₁ = Ψ₂ = 0` among integers.
pub fn psi_closed_form(psi1: i64, psi2: i64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::validation("closed form is indexed from n = 1"));
    }
    let s5 = 5f64.sqrt();
    let r = (s5 - 1.0) / 2.0;
    let phi = (1.0 + s5) / 2.0;
    let (p1, p2) = (psi1 as f64, psi2 as f64);
    let c1 = p2 - r * p1;
    let c2 = p2 + phi * p1;
    let e = (n - 1) as i32;
    Ok((c2 * r.powi(e) - c1 * (-phi).powi(e)) / s5)
}

/// Eventual behavior of an orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum Attractor {
    /// Alternation between `0` and `Q` from `entry` on (`(U_entry, U_entry+1)` is `(0, Q)` or `(Q, 0)`).
    Period2 { low: i64, high: i64, entry: usize },
    /// `U_n = F` from `entry` on.
    ConstantF { entry: usize },
    /// A fixed value other than `F`.
    StableEquilibrium { value: i64, entry: usize },
    /// Nothing recognized within the budget.
    Undecided,
}

impl fmt::Display for Attractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attractor::Period2 { low, high, entry } => write!(f, "Period2 {{{low},{high}}} at step {entry}"),
            Attractor::ConstantF { .. } => write!(f, "ConstantF"),
            Attractor::StableEquilibrium { value, entry } => {
                write!(f, "StableEquilibrium {value} at step {entry}")
            }
            Attractor::Undecided => write!(f, "Undecided"),
        }
    }
}

/// `(Ψ_n, Ψ_{n+1})` with their intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub n: usize,
    pub psi: i64,
    pub psi_next: i64,
    pub cell: (IntervalClass, IntervalClass),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub attractor: Attractor,
    /// `U_0, U_1, …` up to the last value inspected.
    pub trajectory: Vec<i64>,
    /// One entry per `n ≥ 1` with both `Ψ_n` and `Ψ_{n+1}` available.
    pub transitions: Vec<Transition>,
}

/// Iterates from `(U_0, U_1)` until the orbit is recognized. A 2-cycle is
/// reported once the pair has repeated twice (two full periods), a
/// constant once it has held for two steps.
pub fn attractor_classify(u0: i64, u1: i64, p: ZeroDimParams, max_iter: usize) -> Result<Classification> {
    p.require_oscillatory()?;
    check_guard(u0)?;
    check_guard(u1)?;
    let mut traj = vec![u0, u1];
    let mut attractor = Attractor::Undecided;
    let confirm = 4;
    // traj[n], traj[n + 1] is the pair at time n
    let mut n = 0usize;
    while n <= max_iter {
        while traj.len() < n + 2 + confirm {
            let len = traj.len();
            let s = OdeState::new(traj[len - 2], traj[len - 1]);
            traj.push(ud_ode_step(s, p)?);
        }
        let (a, b) = (traj[n], traj[n + 1]);
        let repeats2 = (n..n + confirm).all(|i| traj[i + 2] == traj[i]);
        if a != b && repeats2 && ((a, b) == (0, p.q) || (a, b) == (p.q, 0)) {
            attractor = Attractor::Period2 {
                low: 0,
                high: p.q,
                entry: n,
            };
            break;
        }
        if a == b && (n..n + confirm).all(|i| traj[i + 2] == a) {
            attractor = if a == p.f {
                Attractor::ConstantF { entry: n }
            } else {
                Attractor::StableEquilibrium { value: a, entry: n }
            };
            break;
        }
        n += 1;
    }
    let transitions = transition_log(&traj, p)?;
    Ok(Classification {
        attractor,
        trajectory: traj,
        transitions,
    })
}

/// Labels every available `(Ψ_n, Ψ_{n+1})` of a trajectory.
pub fn transition_log(traj: &[i64], p: ZeroDimParams) -> Result<Vec<Transition>> {
    let mut out = Vec::new();
    for n in 1..traj.len().saturating_sub(1) {
        let psi = traj[n - 1] - traj[n];
        let psi_next = traj[n] - traj[n + 1];
        out.push(Transition {
            n,
            psi,
            psi_next,
            cell: (classify_interval(psi, p)?, classify_interval(psi_next, p)?),
        });
    }
    Ok(out)
}

/// A cycle of the pair map: from `start` on, the orbit repeats with `period`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub start: usize,
    pub period: usize,
    /// `U_start, …, U_{start+period−1}`.
    pub values: Vec<i64>,
}

/// Detects the first repeated pair `(U_n, U_{n+1})`, for any `F`, `Q`.
pub fn find_cycle(u0: i64, u1: i64, p: ZeroDimParams, max_iter: usize) -> Result<Option<Cycle>> {
    let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
    let mut traj = vec![check_guard(u0)?, check_guard(u1)?];
    for n in 0..=max_iter {
        let pair = (traj[n], traj[n + 1]);
        if let Some(&start) = seen.get(&pair) {
            return Ok(Some(Cycle {
                start,
                period: n - start,
                values: traj[start..n].to_vec(),
            }));
        }
        seen.insert(pair, n);
        let s = OdeState::new(traj[n], traj[n + 1]);
        traj.push(ud_ode_step(s, p)?);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zp(f: i64, q: i64) -> ZeroDimParams {
        ZeroDimParams::new(f, q).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(ud_ode_step(OdeState::new(0, 2), zp(1, 2)).unwrap(), 0);
        assert_eq!(ud_ode_step(OdeState::new(2, 0), zp(1, 2)).unwrap(), 2);
        assert_eq!(ud_ode_step(OdeState::new(1, 1), zp(1, 3)).unwrap(), 1);
    }

    #[test]
    fn branch_examples() {
        assert_eq!(piecewise_step(OdeState::new(0, 2), zp(1, 2)), (0, Case::II, Branch::Zero));
        assert_eq!(case_i_value(OdeState::new(0, 2), zp(1, 2)), (0, Branch::Zero));
        assert_eq!(piecewise_step(OdeState::new(2, 0), zp(1, 2)), (2, Case::II, Branch::Q));
        assert_eq!(piecewise_step(OdeState::new(0, 0), zp(1, 3)), (1, Case::II, Branch::Linear));
        assert_eq!(piecewise_step(OdeState::new(0, 9), zp(1, 3)).1, Case::I);
    }

    #[test]
    fn equilibria_examples() {
        let e = equilibria(-1.0, 1.0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].value, e[0].stability), (0.0, Stability::Stable));
        let e = equilibria(2.0, 1.0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].value, e[0].stability), (1.0, Stability::Stable));
        assert_eq!(e[0].regions, vec![Region::UpperCase, Region::LowerCase]);
        let e = equilibria(1.0, 3.0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].value, e[0].stability), (1.0, Stability::Unstable));
        assert!(equilibria(f64::NAN, 1.0).is_err());
        // real-valued parameters are accepted
        let e = equilibria(0.5, 1.5).unwrap();
        assert_eq!(e[0].value, 0.5);
    }

    #[test]
    fn interval_boundaries() {
        let p = zp(1, 3);
        assert_eq!(classify_interval(-1, p).unwrap(), IntervalClass::I1);
        assert_eq!(classify_interval(0, p).unwrap(), IntervalClass::I2);
        assert_eq!(classify_interval(1, p).unwrap(), IntervalClass::I2);
        assert_eq!(classify_interval(2, p).unwrap(), IntervalClass::I3);
        assert!(classify_interval(0, zp(3, 1)).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_recursion(1, -1, 6).unwrap(), vec![1, -1, 2, -3, 5, -8]);
        for n in 1..=6 {
            assert_eq!(psi_closed_form(0, 0, n).unwrap(), 0.0);
        }
        let seq = psi_recursion(1, 0, 40).unwrap();
        assert!(seq[39].abs() > 10_000_000);
        assert!(seq.windows(2).skip(3).all(|w| w[0].signum() == -w[1].signum()));
        assert!(psi_closed_form(1, 1, 0).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = attractor_classify(0, 0, zp(1, 3), DEFAULT_MAX_ITER).unwrap();
        assert_eq!(c.attractor, Attractor::Period2 { low: 0, high: 3, entry: 5 });
        assert_eq!(&c.trajectory[..9], &[0, 0, 1, 0, 2, 0, 3, 0, 3]);
        assert_eq!(c.attractor.to_string(), "Period2 {0,3} at step 5");
        let c = attractor_classify(1, 1, zp(1, 3), DEFAULT_MAX_ITER).unwrap();
        assert_eq!(c.attractor, Attractor::ConstantF { entry: 0 });
        let c = attractor_classify(7, -4, zp(2, 5), DEFAULT_MAX_ITER).unwrap();
        assert!(matches!(c.attractor, Attractor::Period2 { low: 0, high: 5, .. }));
        assert_eq!(&c.trajectory[..6], &[7, -4, 5, 0, 5, 0]);
        assert!(attractor_classify(0, 0, zp(3, 3), 10).is_err());
    }

    #[test]
    fn budget_exhaustion_is_undecided() {
        let c = attractor_classify(0, 0, zp(1, 3), 2).unwrap();
        assert_eq!(c.attractor, Attractor::Undecided);
    }

    #[test]
    fn cycle_finder() {
        let c = find_cycle(0, 0, zp(1, 3), 100).unwrap().unwrap();
        assert_eq!(c.period, 2);
        let c = find_cycle(5, 5, zp(-1, 1), 100).unwrap().unwrap();
        assert_eq!((c.period, c.values.clone()), (1, vec![0]));
    }

    proptest! {
        #[test]
        fn closed_form_matches_recursion(p1 in -50i64..=50, p2 in -50i64..=50) {
            let seq = psi_recursion(p1, p2, 30).unwrap();
            for (i, &x) in seq.iter().enumerate() {
                let cf = psi_closed_form(p1, p2, i + 1).unwrap();
                prop_assert!((cf - x as f64).abs() <= 1e-6, "n={} {} vs {}", i + 1, cf, x);
            }
        }

        #[test]
        fn piecewise_equals_direct(f in -20i64..=20, q in -20i64..=20, a in -40i64..=40, b in -40i64..=40) {
            let p = zp(f, q);
            let s = OdeState::new(a, b);
            prop_assert_eq!(piecewise_step(s, p).0, ud_ode_step(s, p).unwrap());
        }
    }
}
