//! Property suites run by the `verify` command. Each check reports a name,
//! a verdict and a `key=value` detail string.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{ca_step_full, ca_step_simple, tsu_step, w_shift, CAState};
use crate::error::{Error, Result};
use crate::grid::{field_sum, Boundary, IntField2D, RealField2D};
use crate::maxplus::ExtInt;
use crate::tropical::{
    consistency_order_ode, consistency_order_pde, empirical_orders, oscillation_report, trop_ode_run,
    trop_pde_step, OregonatorParams, PdeStudy, TropicalStepParams, REFERENCE_TOL,
};
use crate::ultradiscrete::{
    saturation_bound, ud_limit_probe, ud_step_einf, ud_step_full, ud_step_single, ProbeMap, UDParams, UDState,
};
use crate::zerodim::{
    attractor_classify, case_i_value, case_ii_value, piecewise_step, psi_closed_form, psi_recursion,
    ud_ode_step, Attractor, IntervalClass, OdeState, ZeroDimParams,
};

const SEED: u64 = 0x5eed_0a5c;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Limits,
    CaEquiv,
    Attractor,
    Consistency,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "limits" => Ok(Suite::Limits),
            "ca-equiv" => Ok(Suite::CaEquiv),
            "attractor" => Ok(Suite::Attractor),
            "consistency" => Ok(Suite::Consistency),
            other => Err(Error::validation(format!("unknown suite {other:?}"))),
        }
    }
}

/// One property verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}/{} {}", self.suite, self.name, self.detail)
    }
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name,
        passed,
        detail,
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Limits => limits()?,
        Suite::CaEquiv => ca_equiv()?,
        Suite::Attractor => attractor()?,
        Suite::Consistency => consistency()?,
        Suite::All => {
            let mut all = limits()?;
            all.extend(ca_equiv()?);
            all.extend(attractor()?);
            all.extend(consistency()?);
            all
        }
    })
}

/// Random probe inputs in the style of the limit study: scheme maps with
/// small integer arguments.
pub fn random_probe_maps(count: usize, seed: u64) -> Vec<ProbeMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = |lo: i64, hi: i64| rng.gen_range(lo..=hi);
    (0..count)
        .map(|i| match i % 4 {
            0 => ProbeMap::SchemeU {
                u: r(-5, 5),
                v: r(-5, 5),
                a: r(-3, 3),
                f: r(-3, 3),
                q: r(-3, 3),
                e: r(-3, 3),
            },
            1 => ProbeMap::SchemeV {
                u: r(-5, 5),
                v: r(-5, 5),
                e: r(-3, 3),
            },
            2 => ProbeMap::Max((0..r(1, 6)).map(|_| r(-5, 5)).collect()),
            _ => ProbeMap::Mean5([r(-5, 5), r(-5, 5), r(-5, 5), r(-5, 5), r(-5, 5)]),
        })
        .collect()
}

/// Gap sequences over `lambdas` for every probe map.
pub fn limit_gaps(maps: &[ProbeMap], lambdas: &[f64]) -> Result<Vec<Vec<f64>>> {
    maps.iter()
        .map(|m| lambdas.iter().map(|&l| ud_limit_probe(m, l)).collect())
        .collect()
}

fn random_int_field(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: i64, hi: i64) -> IntField2D {
    IntField2D::from_fn(w, h, |_, _| rng.gen_range(lo..=hi)).expect("bounded values")
}

fn limits() -> Result<Vec<Check>> {
    const S: &str = "limits";
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for lam in [1e-1, 1e-2, 1e-3] {
        for a in [-3i64, 0, 7] {
            let g = ud_limit_probe(&ProbeMap::Max(vec![a, a]), lam)?;
            worst = worst.max((g - lam * 2f64.ln()).abs());
        }
    }
    out.push(check(S, "max-identity", worst <= 1e-12, format!("max_err={worst:.3e} tol=1e-12")));

    let lambdas = [1e-1, 1e-2, 1e-3];
    let maps = random_probe_maps(200, SEED);
    let gaps = limit_gaps(&maps, &lambdas)?;
    let monotone = gaps.iter().filter(|g| g.windows(2).all(|w| w[1] <= w[0] + 1e-12)).count();
    let final_max = gaps.iter().map(|g| g[2]).fold(0.0, f64::max);
    let means: Vec<String> = (0..3)
        .map(|i| format!("{:.3e}", gaps.iter().map(|g| g[i]).sum::<f64>() / gaps.len() as f64))
        .collect();
    out.push(check(
        S,
        "lambda-convergence",
        monotone == maps.len() && final_max <= 0.05,
        format!(
            "inputs={} monotone={} mean_gap=[{}] final_max={final_max:.3e} tol=0.05",
            maps.len(),
            monotone,
            means.join(",")
        ),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut equal = 0;
    let trials = 100;
    for _ in 0..trials {
        let bound = rng.gen_range(1..=8);
        let s = UDState::new(
            random_int_field(&mut rng, 8, 8, -bound, bound),
            random_int_field(&mut rng, 8, 8, -bound, bound),
        )?;
        let p = UDParams {
            a: rng.gen_range(-4..=4),
            f: rng.gen_range(-4..=4),
            q: rng.gen_range(-4..=4),
            e: ExtInt::PosInf,
            alpha: rng.gen_range(0..=2),
            beta: rng.gen_range(0..=2),
        };
        let b = Boundary::Periodic;
        let estar = saturation_bound(bound, &p);
        let full = ud_step_full(&s, &UDParams { e: ExtInt::Finite(estar), ..p }, &b)?;
        if full == ud_step_einf(&s, &p, &b)? {
            equal += 1;
        }
    }
    out.push(check(
        S,
        "finite-e-saturation",
        equal == trials,
        format!("states={trials} equal_at_estar={equal}"),
    ));
    Ok(out)
}

/// Compares the three rules on every two-layer binary 3×3 configuration
/// (α = 1, β = 0, zero boundary). Returns (full≠simple, simple≠tsu,
/// non-binary outputs).
pub fn exhaustive_local_sweep() -> Result<(usize, usize, usize)> {
    let b = Boundary::Fixed(0);
    let (mut m1, mut m2, mut nb) = (0, 0, 0);
    for bits in 0u32..(1 << 18) {
        let prev = IntField2D::from_fn(3, 3, |j, k| i64::from((bits >> (k * 3 + j)) & 1 == 1))?;
        let curr = IntField2D::from_fn(3, 3, |j, k| i64::from((bits >> (9 + k * 3 + j)) & 1 == 1))?;
        let s = CAState::new(prev.clone(), curr.clone())?;
        let simple = ca_step_simple(&s, 1, 1, 0, &b)?;
        if ca_step_full(&s, 1, -1, 1, 0, &b)? != simple {
            m1 += 1;
        }
        if tsu_step(&curr, &prev, &b)? != simple {
            m2 += 1;
        }
        if !simple.is_binary() {
            nb += 1;
        }
    }
    Ok((m1, m2, nb))
}

fn ca_equiv() -> Result<Vec<Check>> {
    const S: &str = "ca-equiv";
    let mut out = Vec::new();
    let (m1, m2, nb) = exhaustive_local_sweep()?;
    out.push(check(
        S,
        "local-sweep",
        m1 == 0 && m2 == 0 && nb == 0,
        format!("configs=262144 full_vs_simple={m1} simple_vs_tsu={m2} non_binary={nb}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let b = Boundary::Fixed(0);
    let (mut g1, mut g2) = (0, 0);
    for _ in 0..200 {
        let prev = random_int_field(&mut rng, 16, 16, 0, 1);
        let curr = random_int_field(&mut rng, 16, 16, 0, 1);
        let s = CAState::new(prev.clone(), curr.clone())?;
        let simple = ca_step_simple(&s, 1, 1, 0, &b)?;
        g1 += usize::from(ca_step_full(&s, 1, -1, 1, 0, &b)? != simple);
        g2 += usize::from(tsu_step(&curr, &prev, &b)? != simple);
    }
    out.push(check(
        S,
        "random-global",
        g1 == 0 && g2 == 0,
        format!("states=200 size=16x16 full_vs_simple={g1} simple_vs_tsu={g2}"),
    ));

    let mut chain_mismatch = 0;
    let runs = 20;
    for _ in 0..runs {
        let u_prev = random_int_field(&mut rng, 16, 16, -1, 0);
        let u_curr = random_int_field(&mut rng, 16, 16, -1, 0);
        let p = UDParams::limit(1, -1, 1, 0);
        let (mut up, mut uc) = (u_prev.clone(), u_curr.clone());
        let mut w = CAState::new(w_shift(&u_prev, -1)?, w_shift(&u_curr, -1)?)?;
        for _ in 0..20 {
            let un = ud_step_single(&uc, &up, &p, &Boundary::Fixed(-1))?;
            let wn = ca_step_full(&w, 1, -1, 1, 0, &Boundary::Fixed(0))?;
            if w_shift(&un, -1)? != wn {
                chain_mismatch += 1;
            }
            (up, uc) = (uc, un);
            w = CAState {
                prev: w.curr,
                curr: wn,
                n: w.n + 1,
            };
        }
    }
    out.push(check(
        S,
        "shift-chain",
        chain_mismatch == 0,
        format!("runs={runs} steps=20 mismatches={chain_mismatch}"),
    ));

    let z = IntField2D::zeros(12, 12)?;
    let s = CAState::new(z.clone(), z.clone())?;
    let quiet = ca_step_simple(&s, 1, 1, 0, &b)? == z
        && ca_step_full(&s, 1, -1, 1, 0, &b)? == z
        && tsu_step(&z, &z, &b)? == z;
    out.push(check(S, "quiescence", quiet, "rules=3".into()));
    Ok(out)
}

/// Counts failures of the orbit theorem over `F ∈ [1,4]`, `Q ∈ [F+1,8]`,
/// `u0, u1 ∈ [−8,8]` with a budget of `max_iter` steps.
pub fn attractor_sweep(max_iter: usize) -> Result<(usize, usize)> {
    let (mut cases, mut failures) = (0, 0);
    for f in 1..=4 {
        for q in f + 1..=8 {
            let p = ZeroDimParams::new(f, q)?;
            for u0 in -8..=8 {
                for u1 in -8..=8 {
                    cases += 1;
                    let c = attractor_classify(u0, u1, p, max_iter)?;
                    let ok = match c.attractor {
                        Attractor::ConstantF { .. } => (u0, u1) == (f, f),
                        Attractor::Period2 { low: 0, high, .. } => high == q && (u0, u1) != (f, f),
                        _ => false,
                    };
                    failures += usize::from(!ok);
                }
            }
        }
    }
    Ok((cases, failures))
}

fn attractor() -> Result<Vec<Check>> {
    const S: &str = "attractor";
    let mut out = Vec::new();
    let (cases, failures) = attractor_sweep(200)?;
    out.push(check(
        S,
        "global-theorem",
        failures == 0,
        format!("cases={cases} exceptions={failures} max_iter=200"),
    ));

    let (mut n, mut bad, mut trap_bad, mut exit_bad, mut tie_bad) = (0, 0, 0, 0, 0);
    for f in -5i64..=5 {
        for q in -5i64..=5 {
            let p = ZeroDimParams::new(f, q)?;
            for a in -10i64..=10 {
                for b in -10i64..=10 {
                    let s = OdeState::new(a, b);
                    let direct = ud_ode_step(s, p)?;
                    n += 1;
                    bad += usize::from(piecewise_step(s, p).0 != direct);
                    if b == q {
                        tie_bad += usize::from(case_i_value(s, p).0 != case_ii_value(s, p).0);
                    }
                    if 0 < f && f < q {
                        trap_bad += usize::from(b <= q && direct > q);
                        exit_bad += usize::from(b >= q && direct > q);
                    }
                }
            }
        }
    }
    out.push(check(
        S,
        "piecewise-agreement",
        bad == 0 && tie_bad == 0,
        format!("cases={n} mismatches={bad} tie_mismatches={tie_bad}"),
    ));
    out.push(check(
        S,
        "case-trapping",
        trap_bad == 0 && exit_bad == 0,
        format!("case_ii_violations={trap_bad} case_i_violations={exit_bad}"),
    ));

    let (mut recur_bad, mut tail_bad, mut logged) = (0, 0, 0);
    for f in 1..=4 {
        for q in f + 1..=8 {
            let p = ZeroDimParams::new(f, q)?;
            for u0 in -8..=8 {
                for u1 in -8..=8 {
                    let c = attractor_classify(u0, u1, p, 200)?;
                    let (r, t, l) = transition_violations(&c.trajectory, &c.transitions, p);
                    recur_bad += r;
                    tail_bad += t;
                    logged += l;
                }
            }
        }
    }
    out.push(check(
        S,
        "transition-log",
        recur_bad == 0 && tail_bad == 0,
        format!("transitions={logged} recursion_violations={recur_bad} tail_violations={tail_bad}"),
    ));

    let mut cf_err = 0.0f64;
    let mut div_bad = 0;
    for p1 in -4..=4 {
        for p2 in -4..=4 {
            let seq = psi_recursion(p1, p2, 30)?;
            for (i, &x) in seq.iter().enumerate() {
                cf_err = cf_err.max((psi_closed_form(p1, p2, i + 1)? - x as f64).abs());
            }
            let diverges = seq[29].abs() > 1000;
            div_bad += usize::from(diverges != ((p1, p2) != (0, 0)));
        }
    }
    out.push(check(
        S,
        "psi-closed-form",
        cf_err <= 1e-6 && div_bad == 0,
        format!("grid=9x9 n<=30 max_err={cf_err:.3e} tol=1e-6 divergence_mismatches={div_bad}"),
    ));
    Ok(out)
}

/// Checks a logged orbit against the case analysis: inside case II an
/// `I2 × I2` pair propagates `Ψ_{n+2} = Ψ_n − Ψ_{n+1}`, and an `I1 × I3` or
/// `I3 × I1` pair is followed by the `0, Q` alternation within two steps.
/// Returns (recursion violations, tail violations, transitions inspected).
pub fn transition_violations(
    traj: &[i64],
    transitions: &[crate::zerodim::Transition],
    p: ZeroDimParams,
) -> (usize, usize, usize) {
    use IntervalClass::*;
    let (mut r, mut t) = (0, 0);
    for (i, tr) in transitions.iter().enumerate() {
        let n = tr.n;
        if traj[n] > p.q {
            continue;
        }
        match tr.cell {
            (I2, I2) => {
                if let Some(next) = transitions.get(i + 1) {
                    r += usize::from(next.psi_next != tr.psi - tr.psi_next);
                }
            }
            (I1, I3) | (I3, I1) => {
                let tail = &traj[(n + 1).min(traj.len())..];
                let ok = tail.windows(2).all(|w| (w[0], w[1]) == (0, p.q) || (w[0], w[1]) == (p.q, 0));
                t += usize::from(!ok);
            }
            _ => {}
        }
    }
    (r, t, transitions.len())
}

fn consistency() -> Result<Vec<Check>> {
    const S: &str = "consistency";
    let mut out = Vec::new();
    let p = OregonatorParams::new(1.0, 1.0, 1.0);
    let errs = consistency_order_ode(&p, (0.5, 0.2), 1.0, &[1e-2, 5e-3, 2.5e-3])?;
    let orders = empirical_orders(&errs);
    out.push(check(
        S,
        "ode-order",
        orders.iter().all(|o| (0.8..=1.2).contains(o)),
        format!("errors=[{}] orders=[{}] band=[0.8,1.2]", fmt_list(&errs.iter().map(|e| e.1).collect::<Vec<_>>()), fmt_list(&orders)),
    ));

    let study = pde_study();
    let errs = consistency_order_pde(&study, &[8, 16, 32], pde_profile)?;
    let orders = empirical_orders(&errs);
    out.push(check(
        S,
        "pde-order",
        orders.iter().all(|o| (0.8..=1.2).contains(o)),
        format!("lattices=[8,16,32] errors=[{}] orders=[{}] band=[0.8,1.2]", fmt_list(&errs.iter().map(|e| e.1).collect::<Vec<_>>()), fmt_list(&orders)),
    ));

    let rel = diffusion_mass_drift(64, 20)?;
    out.push(check(
        S,
        "mass-conservation",
        rel <= 1e-12,
        format!("size=64x64 steps=20 max_rel_drift={rel:.3e} tol=1e-12"),
    ));

    let p = OregonatorParams::new(25.0, 1.5, 8e-4);
    let eps = 1e-3;
    let run = trop_ode_run(0.5, 0.2, &p, eps, 50_000)?;
    let t: Vec<f64> = (0..run.len()).map(|i| i as f64 * eps).collect();
    let u: Vec<f64> = run.iter().map(|s| s.0).collect();
    let rep = oscillation_report(&t, &u, 20.0);
    out.push(check(
        S,
        "oscillation",
        rep.sustained(0.05),
        format!(
            "a=25 f=1.5 q=8e-4 eps=1e-3 horizon=50 peaks={} spread={:.3e} period={:.3} tol=0.05",
            rep.peaks.len(),
            rep.peak_spread,
            rep.period().unwrap_or(f64::NAN)
        ),
    ));
    Ok(out)
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(",")
}

/// The lattice study used by the consistency suite: `a = f = q = 1`,
/// `Du = Dv = 0.2`, `α = β = 1`, horizon 0.25 (so ε = 1/N²).
pub fn pde_study() -> PdeStudy {
    PdeStudy {
        params: OregonatorParams::new(1.0, 1.0, 1.0).with_diffusion(0.2, 0.2),
        alpha: 1,
        beta: 1,
        height: 4,
        horizon: 0.25,
        modes: 64,
        tol: REFERENCE_TOL,
    }
}

/// `u = 0.5 + 0.2·cos 2πx`, `v = 0.2 + 0.1·sin 2πx`.
pub fn pde_profile(x: f64) -> (f64, f64) {
    let w = 2.0 * std::f64::consts::PI * x;
    (0.5 + 0.2 * w.cos(), 0.2 + 0.1 * w.sin())
}

/// Largest relative change of the total u over `steps` reaction-free
/// lattice steps on an `n × n` periodic grid.
pub fn diffusion_mass_drift(n: usize, steps: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut u = RealField2D::from_fn(n, n, |_, _| rng.gen_range(0.1..2.0))?;
    let mut v = RealField2D::from_fn(n, n, |_, _| rng.gen_range(0.1..2.0))?;
    let p = OregonatorParams::degenerate(1.5, 8e-4);
    let sp = TropicalStepParams {
        eps: 0.05,
        alpha: 2,
        beta: 1,
    };
    let s0 = field_sum(&u);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        (u, v) = trop_pde_step(&u, &v, &p, &sp, &Boundary::Periodic)?;
        worst = worst.max(((field_sum(&u) - s0) / s0).abs());
    }
    Ok(worst)
}
