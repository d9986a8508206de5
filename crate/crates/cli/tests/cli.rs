use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oregonator_cli::formats::{read_int_frames, read_pbm, read_pgm, read_real_frames, read_table, write_frames_csv, write_pbm};
use oregonator_core::automaton::{ca_run, CAState, CaParams, Rule};
use oregonator_core::tropical::{trop_pde_run, OregonatorParams, TropicalStepParams};
use oregonator_core::{Boundary, IntField2D, RealField2D};
use tempfile::TempDir;

fn oregonator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oregonator"))
        .args(args)
        .env_remove("OREGONATOR_SEED_SEARCH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = oregonator(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn trop_ode_fixed_point_series() {
    let out = ok(&["trop", "ode", "--a", "1", "--f", "1", "--q", "1", "--eps", "1", "--u0", "1", "--v0", "1", "--steps", "10"]);
    let (header, rows) = read_table(out.as_bytes()).unwrap();
    assert_eq!(header, ["n", "t", "u", "v"]);
    assert_eq!(rows.len(), 11);
    for (n, r) in rows.iter().enumerate() {
        assert_eq!(r, &[n as f64, n as f64, 1.0, 1.0]);
    }
}

#[test]
fn trop_ode_zero_steps_has_initial_row_only() {
    let out = ok(&["trop", "ode", "--steps", "0", "--u0", "0.25", "--v0", "0.125"]);
    assert_eq!(out, "n,t,u,v\n0,0,0.25,0.125\n");
}

#[test]
fn trop_ode_file_round_trip_is_exact() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "series.csv");
    ok(&["trop", "ode", "--steps", "200", "--out", &path]);
    let (_, rows) = read_table(fs::File::open(&path).unwrap()).unwrap();
    let lib = oregonator_core::tropical::trop_ode_run(0.5, 0.2, &OregonatorParams::new(25.0, 1.5, 8e-4), 1e-3, 200).unwrap();
    assert_eq!(rows.len(), lib.len());
    for (r, (u, v)) in rows.iter().zip(lib) {
        assert_eq!((r[2], r[3]), (u, v));
    }
}

#[test]
fn trop_pde_diffusion_conserves_mass() {
    let out = ok(&["trop", "pde", "--a", "0", "--width", "24", "--height", "16", "--steps", "30", "--bump", "2", "--alpha", "2"]);
    let drift: f64 = out
        .split_whitespace()
        .find_map(|w| w.strip_prefix("max_rel_drift="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(drift <= 1e-12, "{out}");
}

#[test]
fn trop_pde_frames_round_trip() {
    let dir = TempDir::new().unwrap();
    let base = ["trop", "pde", "--a", "1", "--f", "1", "--q", "1", "--width", "8", "--height", "6", "--steps", "5", "--bump", "0.3"];
    let pgm = p(&dir, "pgm");
    let csv = p(&dir, "csv");
    ok(&[&base[..], &["--out", &pgm]].concat());
    ok(&[&base[..], &["--out", &csv, "--format", "csv"]].concat());

    let u0 = RealField2D::from_fn(8, 6, |j, k| 0.5 + if (j, k) == (4, 3) { 0.3 } else { 0.0 }).unwrap();
    let v0 = RealField2D::filled(8, 6, 0.2).unwrap();
    let sp = TropicalStepParams { eps: 1e-2, alpha: 1, beta: 1 };
    let lib = trop_pde_run(&u0, &v0, &OregonatorParams::new(1.0, 1.0, 1.0), &sp, &Boundary::Periodic, 5).unwrap();

    let us = read_real_frames(fs::File::open(Path::new(&csv).join("u.csv")).unwrap()).unwrap();
    let vs = read_real_frames(fs::File::open(Path::new(&csv).join("v.csv")).unwrap()).unwrap();
    for (n, (u, v)) in lib.iter().enumerate() {
        assert_eq!(us[n], (n, u.clone()));
        assert_eq!(vs[n], (n, v.clone()));
        let img = read_pgm(&mut fs::File::open(Path::new(&pgm).join(format!("u_{n:06}.pgm"))).unwrap()).unwrap();
        for (a, b) in img.values().iter().zip(u.values()) {
            assert!((a - b).abs() <= img.map.scale / 2.0 + 1e-15);
        }
    }
}

#[test]
fn ud_infinite_e_matches_large_e() {
    let dir = TempDir::new().unwrap();
    let u = IntField2D::from_fn(7, 5, |j, k| (j as i64 * 3 + k as i64 * 5) % 7 - 3).unwrap();
    let v = IntField2D::from_fn(7, 5, |j, k| (j as i64 + 2 * k as i64) % 5 - 2).unwrap();
    let (up, vp) = (p(&dir, "u.csv"), p(&dir, "v.csv"));
    write_frames_csv(&[&u], 0, fs::File::create(&up).unwrap()).unwrap();
    write_frames_csv(&[&v], 0, fs::File::create(&vp).unwrap()).unwrap();
    let run = |e: &str, out: &str| {
        ok(&["ud", "--mode", "full", "--A", "2", "--F", "1", "--Q", "-1", "--E", e, "--u", &up, "--v", &vp, "--steps", "6", "--alpha", "1", "--beta", "1", "--out", out]);
    };
    let (a, b) = (p(&dir, "inf"), p(&dir, "big"));
    run("inf", &a);
    run("1000000", &b);
    let (da, db) = (dir_contents(Path::new(&a)), dir_contents(Path::new(&b)));
    assert_eq!(da.len(), 14);
    assert_eq!(da, db);
}

#[test]
fn ud_zero_layers_drop_to_q() {
    let dir = TempDir::new().unwrap();
    for mode in ["einf", "single", "full"] {
        let out = p(&dir, mode);
        ok(&["ud", "--mode", mode, "--F", "1", "--Q", "-1", "--width", "4", "--height", "3", "--steps", "1", "--format", "csv", "--out", &out]);
        let frames = read_int_frames(fs::File::open(Path::new(&out).join("u.csv")).unwrap()).unwrap();
        assert_eq!(frames[1].1, IntField2D::filled(4, 3, -1).unwrap(), "{mode}");
        let pgm_dir = p(&dir, &format!("{mode}-pgm"));
        ok(&["ud", "--mode", mode, "--width", "4", "--height", "3", "--steps", "1", "--out", &pgm_dir]);
        let img = read_pgm(&mut fs::File::open(Path::new(&pgm_dir).join("u_000001.pgm")).unwrap()).unwrap();
        assert_eq!(img.to_int_field().unwrap(), frames[1].1);
    }
}

#[test]
fn ud_mismatched_layers_exit_2() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "small.csv");
    write_frames_csv(&[&IntField2D::zeros(3, 3).unwrap()], 0, fs::File::create(&path).unwrap()).unwrap();
    let o = oregonator(&["ud", "--u", &path, "--v", "0", "--width", "4", "--height", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = oregonator(&["ud", "--mode", "single", "--u", &path, "--u-prev", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ud_rejects_negative_infinite_e() {
    assert_eq!(oregonator(&["ud", "--E", "-inf"]).status.code(), Some(2));
    assert_eq!(oregonator(&["ud", "--E", "banana"]).status.code(), Some(2));
}

fn ones(f: &IntField2D) -> Vec<(usize, usize)> {
    (0..f.height())
        .flat_map(|k| (0..f.width()).map(move |j| (j, k)))
        .filter(|&(j, k)| f.get(j, k) == 1)
        .collect()
}

#[test]
fn ca_ring_frames() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "ring");
    let summary = ok(&["ca", "run", "--pattern", "ring", "--size", "21", "--steps", "8", "--out", &out]);
    assert!(summary.contains("ring front is the L1 sphere of radius n for n = 1..8"), "{summary}");
    let files = dir_contents(Path::new(&out));
    assert_eq!(files.len(), 9);
    let read = |n: usize| read_pbm(&mut files[&format!("frame_{n:06}.pbm")].as_slice()).unwrap();
    let (f7, f8) = (read(7), read(8));
    let new: Vec<_> = ones(&f8).into_iter().filter(|&(j, k)| f7.get(j, k) == 0).collect();
    let mut sphere: Vec<_> = (0..21usize)
        .flat_map(|k| (0..21usize).map(move |j| (j, k)))
        .filter(|&(j, k)| j.abs_diff(10) + k.abs_diff(10) == 8)
        .collect();
    sphere.sort_by_key(|&(j, k)| (k, j));
    assert_eq!(new, sphere);
}

#[test]
fn ca_tsu_and_simple_rules_write_identical_frames() {
    let dir = TempDir::new().unwrap();
    for pattern in ["ring", "target", "spiral"] {
        let (a, b) = (p(&dir, &format!("{pattern}-tsu")), p(&dir, &format!("{pattern}-simple")));
        ok(&["ca", "run", "--pattern", pattern, "--size", "41", "--steps", "12", "--rule", "tsu", "--out", &a]);
        ok(&["ca", "run", "--pattern", pattern, "--size", "41", "--steps", "12", "--rule", "simple", "--alpha", "1", "--beta", "0", "--out", &b]);
        let da = dir_contents(Path::new(&a));
        assert_eq!(da.len(), 13);
        assert_eq!(da, dir_contents(Path::new(&b)), "{pattern}");
    }
}

#[test]
fn ca_target_reports_period_four() {
    let out = ok(&["ca", "run", "--pattern", "target", "--steps", "16"]);
    assert!(out.contains("period 4 confirmed"), "{out}");
    let out = ok(&["ca", "run", "--pattern", "target", "--steps", "16", "--size", "41", "--no-pacemaker"]);
    assert!(out.contains("period 4 confirmed"), "{out}");
}

#[test]
fn ca_spiral_search_and_switch() {
    let out = ok(&["ca", "run", "--pattern", "spiral", "--size", "81", "--steps", "60"]);
    assert!(out.contains("spiral signature confirmed"), "{out}");
    let o = Command::new(env!("CARGO_BIN_EXE_oregonator"))
        .args(["ca", "run", "--pattern", "spiral", "--size", "81", "--steps", "20"])
        .env("OREGONATOR_SEED_SEARCH", "off")
        .output()
        .unwrap();
    let text = stdout(&o);
    assert!(o.status.success());
    assert!(text.contains("thickness=1 dx=1 dy=0 trunc=0/0 tried=1"), "{text}");
}

#[test]
fn ca_custom_layers_round_trip() {
    let dir = TempDir::new().unwrap();
    let prev = IntField2D::from_fn(9, 7, |j, k| ((j + k) % 5 == 0) as i64).unwrap();
    let curr = IntField2D::from_fn(9, 7, |j, k| ((j * k) % 7 == 1) as i64).unwrap();
    let (pp, cp) = (p(&dir, "prev.pbm"), p(&dir, "curr.pbm"));
    write_pbm(&prev, &mut fs::File::create(&pp).unwrap()).unwrap();
    write_pbm(&curr, &mut fs::File::create(&cp).unwrap()).unwrap();
    let out = p(&dir, "run");
    ok(&["ca", "run", "--pattern", "custom", "--prev", &pp, "--curr", &cp, "--size", "9", "--steps", "6", "--rule", "full", "--out", &out]);
    let lib = ca_run(&CAState::new(prev, curr).unwrap(), Rule::Full, &CaParams::default(), 6, None).unwrap();
    for (n, f) in lib.iter().enumerate() {
        let bytes = fs::read(Path::new(&out).join(format!("frame_{n:06}.pbm"))).unwrap();
        assert_eq!(&read_pbm(&mut bytes.as_slice()).unwrap(), f);
    }
}

#[test]
fn ca_ascii_rendering() {
    let out = ok(&["ca", "run", "--size", "5", "--steps", "1", "--ascii"]);
    assert!(out.starts_with("step 0\n.....\n.....\n..#..\n.....\n.....\nstep 1\n.....\n..#..\n.###.\n..#..\n.....\n"), "{out}");
}

#[test]
fn ca_validation_exit_codes() {
    assert_eq!(oregonator(&["ca", "run", "--size", "5", "--steps", "8"]).status.code(), Some(2));
    assert_eq!(oregonator(&["ca", "run", "--F", "0"]).status.code(), Some(2));
    assert_eq!(oregonator(&["ca", "run", "--pattern", "custom"]).status.code(), Some(2));
    assert_eq!(oregonator(&["ca", "run", "--pattern", "hexagon"]).status.code(), Some(2));
}

#[test]
fn zerodim_classify_outputs() {
    assert_eq!(ok(&["zerodim", "classify", "--F", "1", "--Q", "3", "--u0", "1", "--u1", "1"]).lines().next(), Some("ConstantF"));
    let out = ok(&["zerodim", "classify", "--F", "1", "--Q", "3", "--u0", "0", "--u1", "0"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("Period2 {0,3} at step 5"));
    let csv: String = lines.map(|l| format!("{l}\n")).collect();
    let (header, rows) = read_table(csv.as_bytes()).unwrap();
    assert_eq!(header, ["n", "u"]);
    let u: Vec<i64> = rows.iter().map(|r| r[1] as i64).collect();
    assert_eq!(&u[..9], &[0, 0, 1, 0, 2, 0, 3, 0, 3]);
    let out = ok(&["zerodim", "classify", "--F", "2", "--Q", "5", "--u0", "7", "--u1", "-4", "--transitions"]);
    assert!(out.starts_with("Period2 {0,5}"), "{out}");
    assert!(out.contains("cell=I"), "{out}");
}

#[test]
fn zerodim_classify_writes_csv_file() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "traj.csv");
    let out = ok(&["zerodim", "classify", "--F", "1", "--Q", "3", "--u0", "0", "--u1", "0", "--out", &path]);
    assert_eq!(out, "Period2 {0,3} at step 5\n");
    assert!(fs::read_to_string(&path).unwrap().starts_with("n,u\n0,0\n1,0\n2,1\n"));
}

#[test]
fn zerodim_equilibria_outputs() {
    assert_eq!(ok(&["zerodim", "equilibria", "--F", "1", "--Q", "3"]), "F=1 unstable; no stable equilibria\n");
    assert_eq!(ok(&["zerodim", "equilibria", "--F", "-1", "--Q", "1"]), "0 stable\n");
    assert_eq!(ok(&["zerodim", "equilibria", "--F", "2", "--Q", "1"]), "Q=1 stable\n");
}

#[test]
fn zerodim_outside_regime_exit_2() {
    assert_eq!(oregonator(&["zerodim", "classify", "--F", "3", "--Q", "1", "--u0", "0", "--u1", "0"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = oregonator(&["verify", "ca-equiv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS ca-equiv/")).count() >= 3, "{text}");
    assert!(text.contains("configs=262144"));
    assert_eq!(oregonator(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn numeric_domain_exit_3() {
    assert_eq!(oregonator(&["trop", "ode", "--u0", "-1"]).status.code(), Some(3));
    assert_eq!(oregonator(&["trop", "pde", "--boundary", "fixed:-1"]).status.code(), Some(3));
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a"), p(&dir, "b"));
    for out in [&a, &b] {
        ok(&["ca", "run", "--pattern", "spiral", "--size", "61", "--steps", "15", "--out", out]);
    }
    assert_eq!(dir_contents(Path::new(&a)), dir_contents(Path::new(&b)));
    let (c, d) = (p(&dir, "c"), p(&dir, "d"));
    for out in [&c, &d] {
        ok(&["trop", "pde", "--width", "10", "--height", "10", "--steps", "8", "--bump", "0.5", "--out", out]);
    }
    assert_eq!(dir_contents(Path::new(&c)), dir_contents(Path::new(&d)));
}

#[test]
fn json_config_mirrors_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "cfg.json");
    fs::write(&cfg, r#"{"pattern": "target", "size": 31, "steps": 9, "no-pacemaker": false}"#).unwrap();
    let (a, b) = (p(&dir, "a"), p(&dir, "b"));
    ok(&["--config", &cfg, "ca", "run", "--out", &a]);
    ok(&["ca", "run", "--pattern", "target", "--size", "31", "--steps", "9", "--out", &b]);
    assert_eq!(dir_contents(Path::new(&a)), dir_contents(Path::new(&b)));
    assert_eq!(dir_contents(Path::new(&a)).len(), 10);

    // a flag on the command line overrides the file
    let c = p(&dir, "c");
    ok(&["ca", "run", "--steps", "4", "--config", &cfg, "--out", &c]);
    assert_eq!(dir_contents(Path::new(&c)).len(), 5);

    let cfg2 = p(&dir, "cfg2.json");
    fs::write(&cfg2, r#"{"F": 1, "Q": 3, "u0": 0, "u1": 0}"#).unwrap();
    assert!(ok(&["zerodim", "classify", "--config", &cfg2]).starts_with("Period2 {0,3} at step 5"));
}

#[test]
fn bad_config_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "bad.json");
    fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(oregonator(&["--config", &cfg, "verify"]).status.code(), Some(2));
    assert_eq!(oregonator(&["--config", &p(&dir, "missing.json"), "verify"]).status.code(), Some(2));
}
