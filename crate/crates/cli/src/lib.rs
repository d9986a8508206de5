//! Command-line front end: argument parsing, file emission and the run
//! drivers behind the `oregonator` binary.

pub mod config;
pub mod formats;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oregonator_core::automaton::{
    ca_run, ring_profile, seed_pattern_with, spiral_signature, target_periodicity, CaParams,
    PatternSeed, Rule, SpiralCheck,
};
use oregonator_core::tropical::{trop_ode_run, trop_pde_run, u_sums, OregonatorParams, TropicalStepParams};
use oregonator_core::ultradiscrete::{ud_step_einf, ud_step_full, ud_step_single, UDParams, UDState};
use oregonator_core::verify::{run_suite, Suite};
use oregonator_core::zerodim::{attractor_classify, equilibria, Stability, ZeroDimParams, DEFAULT_MAX_ITER};
use oregonator_core::{Boundary, Error, ExtInt, IntField2D, RealField2D};

/// Environment variable that disables the spiral seed search when `off`.
pub const SEED_SEARCH_ENV: &str = "OREGONATOR_SEED_SEARCH";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Domain(_)) | CliError::Core(Error::Overflow { .. }) => EXIT_DOMAIN,
            CliError::Core(_) | CliError::Input(_) => EXIT_VALIDATION,
            CliError::Csv(e) if !matches!(e.kind(), csv::ErrorKind::Io(_)) => EXIT_VALIDATION,
            CliError::Io(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "oregonator", version, about = "Tropical and ultradiscrete Oregonator simulator")]
pub struct Cli {
    /// JSON file whose keys mirror the flags of the chosen subcommand
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tropical (positivity-preserving) scheme
    #[command(subcommand)]
    Trop(TropCommand),
    /// Max-plus lattice map
    Ud(UdArgs),
    /// Binary cellular automaton
    #[command(subcommand)]
    Ca(CaCommand),
    /// Zero-dimensional max-plus map
    #[command(subcommand)]
    Zerodim(ZeroDimCommand),
    /// Run property suites
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum TropCommand {
    /// Reaction system without diffusion; CSV `n,t,u,v`
    Ode(TropOdeArgs),
    /// Lattice scheme with five-point mean diffusion
    Pde(TropPdeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Kinetics {
    #[arg(long, default_value_t = 25.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.5)]
    pub f: f64,
    #[arg(long, default_value_t = 8e-4)]
    pub q: f64,
}

impl Kinetics {
    fn params(&self) -> OregonatorParams {
        // a = 0 switches the reaction off, leaving pure diffusion
        if self.a == 0.0 {
            OregonatorParams::degenerate(self.f, self.q)
        } else {
            OregonatorParams::new(self.a, self.f, self.q)
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct TropOdeArgs {
    #[command(flatten)]
    pub kinetics: Kinetics,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub u0: f64,
    #[arg(long, default_value_t = 0.2)]
    pub v0: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// CSV destination (standard output if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pgm,
    Csv,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct TropPdeArgs {
    #[command(flatten)]
    pub kinetics: Kinetics,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    #[arg(long, default_value_t = 1)]
    pub alpha: usize,
    #[arg(long, default_value_t = 1)]
    pub beta: usize,
    #[arg(long, default_value_t = 32)]
    pub width: usize,
    #[arg(long, default_value_t = 32)]
    pub height: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Initial u on every cell
    #[arg(long, default_value_t = 0.5)]
    pub u0: f64,
    /// Initial v on every cell
    #[arg(long, default_value_t = 0.2)]
    pub v0: f64,
    /// Added to u at the center cell
    #[arg(long, default_value_t = 0.0)]
    pub bump: f64,
    /// `periodic` or `fixed:<value>`
    #[arg(long, default_value = "periodic")]
    pub boundary: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Pgm)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UdMode {
    /// Finite-E map for U and V
    Full,
    /// E → ∞ map for U and V
    Einf,
    /// Second-order equation in U alone
    Single,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct UdArgs {
    #[arg(long, value_enum, default_value_t = UdMode::Einf)]
    pub mode: UdMode,
    #[arg(long = "A", default_value_t = 0)]
    pub a: i64,
    #[arg(long = "F", default_value_t = 1)]
    pub f: i64,
    #[arg(long = "Q", default_value_t = -1)]
    pub q: i64,
    /// Integer, `inf` or `-inf`
    #[arg(long = "E", default_value = "inf")]
    pub e: String,
    #[arg(long, default_value_t = 1)]
    pub alpha: usize,
    #[arg(long, default_value_t = 0)]
    pub beta: usize,
    #[arg(long, default_value_t = 16)]
    pub width: usize,
    #[arg(long, default_value_t = 16)]
    pub height: usize,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Initial U: an integer constant or an `n,j,k,value` CSV file
    #[arg(long, default_value = "0")]
    pub u: String,
    /// Initial V (full and einf modes)
    #[arg(long, default_value = "0")]
    pub v: String,
    /// U one step earlier (single mode)
    #[arg(long, default_value = "0")]
    pub u_prev: String,
    /// `periodic` or `fixed:<value>`
    #[arg(long, default_value = "periodic")]
    pub boundary: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Pgm)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum CaCommand {
    /// Run a seeded pattern; PBM frames `frame_%06d.pbm`
    Run(CaRunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pattern {
    Ring,
    Target,
    Spiral,
    /// Layers read from `--prev` and `--curr` PBM files
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Simple,
    Full,
    Tsu,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Rule {
        match r {
            RuleArg::Simple => Rule::Simple,
            RuleArg::Full => Rule::Full,
            RuleArg::Tsu => Rule::Tsu,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CaRunArgs {
    #[arg(long, value_enum, default_value_t = Pattern::Ring)]
    pub pattern: Pattern,
    #[arg(long, value_enum, default_value_t = RuleArg::Simple)]
    pub rule: RuleArg,
    #[arg(long = "F", default_value_t = 1)]
    pub f: i64,
    #[arg(long = "Q", default_value_t = -1)]
    pub q: i64,
    #[arg(long, default_value_t = 1)]
    pub alpha: usize,
    #[arg(long, default_value_t = 0)]
    pub beta: usize,
    /// Side of the square grid
    #[arg(long, default_value_t = 81)]
    pub size: usize,
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    /// Spiral segment length
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    /// Target without forcing: the center starts excited in both layers
    #[arg(long)]
    pub no_pacemaker: bool,
    #[arg(long)]
    pub prev: Option<PathBuf>,
    #[arg(long)]
    pub curr: Option<PathBuf>,
    /// `fixed:0`, `fixed:1` or `periodic`
    #[arg(long, default_value = "fixed:0")]
    pub boundary: String,
    /// Print every frame to standard output
    #[arg(long)]
    pub ascii: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ZeroDimCommand {
    /// Long-time behavior of one orbit; prints the trajectory as CSV
    Classify(ClassifyArgs),
    /// Equilibria with stability tags
    Equilibria(EquilibriaArgs),
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[arg(long = "F")]
    pub f: i64,
    #[arg(long = "Q")]
    pub q: i64,
    #[arg(long)]
    pub u0: i64,
    #[arg(long)]
    pub u1: i64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Also print the (Ψ_n, Ψ_{n+1}) interval log
    #[arg(long)]
    pub transitions: bool,
    /// Trajectory CSV destination (standard output if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct EquilibriaArgs {
    #[arg(long = "F")]
    pub f: f64,
    #[arg(long = "Q")]
    pub q: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// all, limits, ca-equiv, attractor or consistency
    #[arg(default_value = "all")]
    pub suite: String,
}

/// Parses `periodic` or `fixed:<value>`.
pub fn parse_boundary<T: FromStr>(s: &str) -> Result<Boundary<T>, CliError> {
    if s == "periodic" {
        return Ok(Boundary::Periodic);
    }
    s.strip_prefix("fixed:")
        .and_then(|v| v.parse().ok())
        .map(Boundary::Fixed)
        .ok_or_else(|| CliError::Input(format!("boundary must be `periodic` or `fixed:<value>`, got {s:?}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = File::create(path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn frame_name(prefix: &str, n: usize, ext: &str) -> String {
    format!("{prefix}_{n:06}.{ext}")
}

/// Parses the command line (merging a config file when given) and runs
/// it, writing the summary to `stdout`. Returns the process exit code.
pub fn main_with(argv: Vec<OsString>, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    let cli = match parse(argv) {
        Ok(cli) => cli,
        Err(ParseFailure::Clap(e)) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
        Err(ParseFailure::Cli(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    match run(&cli, stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Cli(CliError),
}

fn parse(mut argv: Vec<OsString>) -> Result<Cli, ParseFailure> {
    if let Some(path) = config_path(&argv) {
        let extra = config::config_args(&path, &argv).map_err(ParseFailure::Cli)?;
        argv.extend(extra);
    }
    Cli::try_parse_from(argv).map_err(ParseFailure::Clap)
}

/// The value of `--config`, looked up before clap sees the arguments so
/// that flags supplied by the file count as present.
fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--") => return None,
            Some("--config") => return it.next().map(PathBuf::from),
            Some(s) if s.starts_with("--config=") => return Some(PathBuf::from(&s["--config=".len()..])),
            _ => {}
        }
    }
    None
}

/// Runs a parsed command. `Ok(false)` means a verification failed.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<bool, CliError> {
    match &cli.command {
        Command::Trop(TropCommand::Ode(a)) => cmd_trop_ode(a, out).map(|_| true),
        Command::Trop(TropCommand::Pde(a)) => cmd_trop_pde(a, out).map(|_| true),
        Command::Ud(a) => cmd_ud(a, out).map(|_| true),
        Command::Ca(CaCommand::Run(a)) => cmd_ca(a, out),
        Command::Zerodim(ZeroDimCommand::Classify(a)) => cmd_classify(a, out).map(|_| true),
        Command::Zerodim(ZeroDimCommand::Equilibria(a)) => cmd_equilibria(a, out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

pub fn cmd_trop_ode(a: &TropOdeArgs, out: &mut impl Write) -> Result<(), CliError> {
    let run = trop_ode_run(a.u0, a.v0, &a.kinetics.params(), a.eps, a.steps)?;
    let rows = run
        .iter()
        .enumerate()
        .map(|(n, &(u, v))| vec![n.to_string(), (n as f64 * a.eps).to_string(), u.to_string(), v.to_string()]);
    let header = ["n", "t", "u", "v"];
    match &a.out {
        Some(path) => formats::write_table(&header, rows, create(path)?),
        None => formats::write_table(&header, rows, &mut *out),
    }
}

fn relative_drift(sums: &[f64]) -> f64 {
    let s0 = sums.first().copied().unwrap_or(0.0);
    sums.iter().map(|s| ((s - s0) / s0).abs()).fold(0.0, f64::max)
}

pub fn cmd_trop_pde(a: &TropPdeArgs, out: &mut impl Write) -> Result<(), CliError> {
    let b: Boundary<f64> = parse_boundary(&a.boundary)?;
    let (cj, ck) = (a.width / 2, a.height / 2);
    let u0 = RealField2D::from_fn(a.width, a.height, |j, k| a.u0 + if (j, k) == (cj, ck) { a.bump } else { 0.0 })?;
    let v0 = RealField2D::filled(a.width, a.height, a.v0)?;
    let sp = TropicalStepParams {
        eps: a.eps,
        alpha: a.alpha,
        beta: a.beta,
    };
    let frames = trop_pde_run(&u0, &v0, &a.kinetics.params(), &sp, &b, a.steps)?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        match a.format {
            Format::Pgm => {
                for (n, (u, v)) in frames.iter().enumerate() {
                    formats::write_pgm_real(u, &mut create(&dir.join(frame_name("u", n, "pgm")))?)?;
                    formats::write_pgm_real(v, &mut create(&dir.join(frame_name("v", n, "pgm")))?)?;
                }
            }
            Format::Csv => {
                let us: Vec<&RealField2D> = frames.iter().map(|f| &f.0).collect();
                let vs: Vec<&RealField2D> = frames.iter().map(|f| &f.1).collect();
                formats::write_frames_csv(&us, 0, create(&dir.join("u.csv"))?)?;
                formats::write_frames_csv(&vs, 0, create(&dir.join("v.csv"))?)?;
            }
        }
    }
    let sums = u_sums(&frames);
    writeln!(
        out,
        "frames {} sum_u first={} last={} max_rel_drift={:.3e}",
        frames.len(),
        sums[0],
        sums[sums.len() - 1],
        relative_drift(&sums)
    )?;
    Ok(())
}

/// An integer constant over `w × h`, or the first frame of a CSV file.
fn load_layer(spec: &str, w: usize, h: usize) -> Result<IntField2D, CliError> {
    if let Ok(c) = spec.parse::<i64>() {
        return Ok(IntField2D::filled(w, h, c)?);
    }
    let frames = formats::read_int_frames(open(Path::new(spec))?)?;
    frames
        .into_iter()
        .next()
        .map(|(_, f)| f)
        .ok_or_else(|| CliError::Input(format!("{spec}: no frames")))
}

pub fn cmd_ud(a: &UdArgs, out: &mut impl Write) -> Result<(), CliError> {
    let e: ExtInt = a.e.parse()?;
    let b: Boundary<i64> = parse_boundary(&a.boundary)?;
    let p = UDParams {
        a: a.a,
        f: a.f,
        q: a.q,
        e,
        alpha: a.alpha,
        beta: a.beta,
    };
    p.validate()?;
    let mut us = Vec::with_capacity(a.steps + 1);
    let mut vs = Vec::new();
    match a.mode {
        UdMode::Single => {
            let mut prev = load_layer(&a.u_prev, a.width, a.height)?;
            let mut curr = load_layer(&a.u, a.width, a.height)?;
            if !prev.same_shape(&curr) {
                return Err(CliError::Input(format!(
                    "layer sizes differ: {}x{} and {}x{}",
                    prev.width(),
                    prev.height(),
                    curr.width(),
                    curr.height()
                )));
            }
            us.push(curr.clone());
            for _ in 0..a.steps {
                let next = ud_step_single(&curr, &prev, &p, &b)?;
                us.push(next.clone());
                prev = std::mem::replace(&mut curr, next);
            }
        }
        UdMode::Full | UdMode::Einf => {
            let mut s = UDState::new(load_layer(&a.u, a.width, a.height)?, load_layer(&a.v, a.width, a.height)?)?;
            us.push(s.u.clone());
            vs.push(s.v.clone());
            for _ in 0..a.steps {
                s = if a.mode == UdMode::Full {
                    ud_step_full(&s, &p, &b)?
                } else {
                    ud_step_einf(&s, &p, &b)?
                };
                us.push(s.u.clone());
                vs.push(s.v.clone());
            }
        }
    }
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        for (name, layers) in [("u", &us), ("v", &vs)] {
            if layers.is_empty() {
                continue;
            }
            match a.format {
                Format::Pgm => {
                    for (n, f) in layers.iter().enumerate() {
                        formats::write_pgm_int(f, &mut create(&dir.join(frame_name(name, n, "pgm")))?)?;
                    }
                }
                Format::Csv => {
                    let refs: Vec<&IntField2D> = layers.iter().collect();
                    formats::write_frames_csv(&refs, 0, create(&dir.join(format!("{name}.csv")))?)?;
                }
            }
        }
    }
    let last = us.last().expect("initial layer");
    let lo = last.values().iter().min().copied().unwrap_or(0);
    let hi = last.values().iter().max().copied().unwrap_or(0);
    writeln!(out, "frames {} final U range [{lo}, {hi}]", us.len())?;
    Ok(())
}

fn search_enabled() -> bool {
    std::env::var(SEED_SEARCH_ENV).map(|v| v != "off").unwrap_or(true)
}

pub fn cmd_ca(a: &CaRunArgs, out: &mut impl Write) -> Result<bool, CliError> {
    let boundary: Boundary<i64> = parse_boundary(&a.boundary)?;
    let p = CaParams {
        f: a.f,
        q: a.q,
        alpha: a.alpha,
        beta: a.beta,
        boundary,
    };
    let kind = match a.pattern {
        Pattern::Ring => PatternSeed::SingleRing,
        Pattern::Target => PatternSeed::Target {
            pacemaker: !a.no_pacemaker,
        },
        Pattern::Spiral => PatternSeed::Spiral { length: a.length },
        Pattern::Custom => {
            let (Some(prev), Some(curr)) = (&a.prev, &a.curr) else {
                return Err(CliError::Input("custom pattern needs --prev and --curr".into()));
            };
            PatternSeed::Custom {
                prev: formats::read_pbm(&mut open(prev)?)?,
                curr: formats::read_pbm(&mut open(curr)?)?,
            }
        }
    };
    let seeded = seed_pattern_with(&kind, a.size, a.size, a.steps, search_enabled())?;
    let frames = ca_run(&seeded.state, a.rule.into(), &p, a.steps, seeded.pacemaker.as_ref())?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        for (n, f) in frames.iter().enumerate() {
            formats::write_pbm(f, &mut create(&dir.join(frame_name("frame", n, "pbm")))?)?;
        }
    }
    if a.ascii {
        for (n, f) in frames.iter().enumerate() {
            writeln!(out, "step {n}")?;
            out.write_all(formats::ascii(f).as_bytes())?;
        }
    }
    writeln!(out, "frames {} size {}x{}", frames.len(), a.size, a.size)?;
    let center = (a.size / 2, a.size / 2);
    match a.pattern {
        Pattern::Ring => {
            let profile = ring_profile(&frames, center);
            match profile.iter().find(|s| !s.front_is_sphere) {
                None => writeln!(out, "ring front is the L1 sphere of radius n for n = 1..{}", a.steps)?,
                Some(s) => writeln!(out, "ring front departs from the L1 sphere at step {}", s.n)?,
            }
        }
        Pattern::Target => {
            let seq: &[i64] = if a.no_pacemaker { &[1, 0, 0, 1] } else { &[1, 1, 0, 0] };
            let r = target_periodicity(&frames, center, seq, 0);
            if r.passed() {
                writeln!(out, "period 4 confirmed ({} cells)", r.total_cells)?;
            } else {
                writeln!(out, "period 4 not confirmed ({}/{} cells periodic)", r.periodic_cells, r.total_cells)?;
            }
        }
        Pattern::Spiral => {
            let s = seeded.spiral.as_ref().expect("spiral seed records its variant");
            let v = s.variant;
            writeln!(
                out,
                "spiral seed thickness={} dx={} dy={} trunc={}/{} tried={}",
                v.thickness, v.dx, v.dy, v.trunc_left, v.trunc_right, s.tried
            )?;
            let check = SpiralCheck {
                steps: a.steps,
                ..SpiralCheck::default()
            };
            let report = spiral_signature(&frames, &check);
            let rotating = report.rotating().count();
            if report.passed {
                writeln!(out, "spiral signature confirmed: {rotating} rotating cores at step {}", report.frame)?;
            } else {
                writeln!(out, "spiral signature not found ({rotating} rotating cores)")?;
            }
        }
        Pattern::Custom => {}
    }
    Ok(true)
}

pub fn cmd_classify(a: &ClassifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    let p = ZeroDimParams::new(a.f, a.q)?;
    let c = attractor_classify(a.u0, a.u1, p, a.max_iter)?;
    writeln!(out, "{}", c.attractor)?;
    if a.transitions {
        for t in &c.transitions {
            writeln!(out, "n={} psi={} psi_next={} cell={:?}x{:?}", t.n, t.psi, t.psi_next, t.cell.0, t.cell.1)?;
        }
    }
    let rows = c.trajectory.iter().enumerate().map(|(n, u)| vec![n.to_string(), u.to_string()]);
    match &a.out {
        Some(path) => formats::write_table(&["n", "u"], rows, create(path)?),
        None => formats::write_table(&["n", "u"], rows, &mut *out),
    }
}

/// One-line description of the equilibria of `(F, Q)`.
pub fn describe_equilibria(f: f64, q: f64) -> Result<String, CliError> {
    let eqs = equilibria(f, q)?;
    let mut parts: Vec<String> = eqs
        .iter()
        .map(|e| {
            let name = if e.value == 0.0 {
                "0".to_string()
            } else if e.value == f && e.stability == Stability::Unstable {
                format!("F={}", e.value)
            } else {
                format!("Q={}", e.value)
            };
            let tag = match e.stability {
                Stability::Stable => "stable",
                Stability::Unstable => "unstable",
            };
            format!("{name} {tag}")
        })
        .collect();
    if !eqs.iter().any(|e| e.stability == Stability::Stable) {
        parts.push("no stable equilibria".into());
    }
    if f == 0.0 && q < 0.0 {
        parts.push(format!("every value in [{q}, 0] is fixed"));
    }
    Ok(parts.join("; "))
}

pub fn cmd_equilibria(a: &EquilibriaArgs, out: &mut impl Write) -> Result<(), CliError> {
    writeln!(out, "{}", describe_equilibria(a.f, a.q)?)?;
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> Result<bool, CliError> {
    let suite: Suite = a.suite.parse()?;
    let checks = run_suite(suite)?;
    let mut ok = true;
    for c in &checks {
        writeln!(out, "{c}")?;
        ok &= c.passed;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    Ok(ok)
}
