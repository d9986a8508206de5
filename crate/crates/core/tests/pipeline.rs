use oregonator_core::automaton::{ca_run, w_shift, CAState, CaParams, Rule};
use oregonator_core::tropical::{trop_ode_step, OregonatorParams};
use oregonator_core::ultradiscrete::{ud_limit_probe, ud_step_single, ud_u_full, ProbeMap, UDParams};
use oregonator_core::verify::{run_suite, Suite};
use oregonator_core::zerodim::{attractor_classify, find_cycle, trajectory, Attractor, ZeroDimParams};
use oregonator_core::{Boundary, ExtInt, IntField2D};

#[test]
fn lattice_map_drives_the_automaton() {
    // U ∈ {−1, 0} shifted by −Q is the binary automaton layer
    let u_prev = IntField2D::from_fn(15, 15, |j, k| -i64::from((j * 7 + k * 3) % 4 != 0)).unwrap();
    let u_curr = IntField2D::from_fn(15, 15, |j, k| -i64::from((j + 2 * k) % 3 != 0)).unwrap();
    let p = UDParams::limit(1, -1, 1, 0);
    let seed = CAState::new(w_shift(&u_prev, -1).unwrap(), w_shift(&u_curr, -1).unwrap()).unwrap();
    let frames = ca_run(&seed, Rule::Full, &CaParams::default(), 12, None).unwrap();
    let (mut prev, mut curr) = (u_prev, u_curr);
    for frame in &frames[1..] {
        let next = ud_step_single(&curr, &prev, &p, &Boundary::Fixed(-1)).unwrap();
        assert_eq!(&w_shift(&next, -1).unwrap(), frame);
        prev = std::mem::replace(&mut curr, next);
    }
}

#[test]
fn tropical_step_tends_to_max_plus_step() {
    // u' from the real scheme at x = e^{X/λ} against the max-plus u-update
    let (u, v, a, f, q, e) = (2i64, -1, 1, 2, -2, 1);
    let exact = ud_u_full(u, v, a, f, q, ExtInt::Finite(e)).unwrap() as f64;
    let mut last = f64::INFINITY;
    for lambda in [0.5, 0.2, 0.1, 0.05] {
        let x = |z: i64| (z as f64 / lambda).exp();
        let p = OregonatorParams::new(x(a), x(f), x(q));
        let (un, _) = trop_ode_step(x(u), x(v), &p, x(e)).unwrap();
        let gap = (lambda * un.ln() - exact).abs();
        let probe = ud_limit_probe(&ProbeMap::SchemeU { u, v, a, f, q, e }, lambda).unwrap();
        assert!((gap - probe).abs() < 1e-9, "λ={lambda}: {gap} vs {probe}");
        assert!(gap <= last);
        last = gap;
    }
    assert!(last < 0.05);
}

#[test]
fn classification_agrees_with_cycle_finder() {
    for (f, q) in [(1, 3), (2, 5), (3, 8)] {
        let p = ZeroDimParams::new(f, q).unwrap();
        for u0 in -6..=6 {
            for u1 in -6..=6 {
                let c = attractor_classify(u0, u1, p, 200).unwrap();
                let cycle = find_cycle(u0, u1, p, 200).unwrap().unwrap();
                match c.attractor {
                    Attractor::ConstantF { .. } => assert_eq!(cycle.values, vec![f]),
                    Attractor::Period2 { entry, .. } => {
                        assert_eq!(cycle.period, 2);
                        let t = trajectory(u0, u1, p, entry + 4).unwrap();
                        assert_eq!(t[entry + 2], t[entry]);
                    }
                    other => panic!("{other} for ({u0},{u1})"),
                }
            }
        }
    }
}

#[test]
fn verify_report_lines() {
    let checks = run_suite(Suite::Attractor).unwrap();
    assert!(checks.len() >= 5);
    for c in checks {
        let line = c.to_string();
        assert!(line.starts_with("PASS attractor/"), "{line}");
        assert!(line.contains('='));
    }
}
