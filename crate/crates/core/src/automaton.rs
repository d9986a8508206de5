//! The binary cellular automaton in the excitable regime `Q < 0 < F`.
//!
//! Shifting `W = U − Q` maps the `{−1, 0}`-valued states of the single
//! max-plus equation to `{0, 1}`. With `F = 1, Q = −1` the unsimplified rule
//!
//! ```text
//! W' = max{M_α(W), F + M_β(W⁻) − M_α(W)} − max{M_α(W) + Q, F + M_β(W⁻) − M_α(W)}
//! ```
//!
//! collapses on binary layers to `W' = max{2·M_α(W) − M_β(W⁻) − F, 0}`: a
//! cell fires iff some stencil neighbor fired and it was not excited in the
//! previous step. With `(α, β) = (1, 0)` this is the Takahashi–Shida–Usami
//! rule `Y' = max(M_1(Y) − Y⁻, 0)`.
//!
//! Pattern seeds for expanding rings, target waves and spiral pairs are
//! provided together with the predicates that characterize each pattern.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::{check_guard, max5, shape_mismatch, Boundary, IntField2D};

/// Two consecutive binary layers `W_{n−1}`, `W_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CAState {
    pub prev: IntField2D,
    pub curr: IntField2D,
    pub n: usize,
}

impl CAState {
    pub fn new(prev: IntField2D, curr: IntField2D) -> Result<Self> {
        if !prev.same_shape(&curr) {
            return Err(shape_mismatch(&prev, &curr));
        }
        prev.require_binary()?;
        curr.require_binary()?;
        Ok(CAState { prev, curr, n: 0 })
    }

    pub fn width(&self) -> usize {
        self.curr.width()
    }

    pub fn height(&self) -> usize {
        self.curr.height()
    }
}

/// `W = U − Q` cellwise.
pub fn w_shift(u: &IntField2D, q: i64) -> Result<IntField2D> {
    check_guard(q)?;
    u.zip_with(u, |x, _| x - q)
}

/// Center update of the unsimplified rule given `M_α(W_n)` and `M_β(W_{n−1})`.
#[inline]
pub fn full_rule(ma: i64, mb: i64, f: i64, q: i64) -> i64 {
    let t = f + mb - ma;
    ma.max(t) - (ma + q).max(t)
}

/// Center update of the simplified rule.
#[inline]
pub fn simple_rule(ma: i64, mb: i64, f: i64) -> i64 {
    (2 * ma - mb - f).max(0)
}

/// Center update of the comparison rule given `M_1(Y_n)` and `Y_{n−1}`.
#[inline]
pub fn tsu_rule(m1: i64, prev: i64) -> i64 {
    (m1 - prev).max(0)
}

fn combine(
    a: &IntField2D,
    b: &IntField2D,
    rule: impl Fn(i64, i64) -> i64,
) -> Result<IntField2D> {
    a.zip_with(b, rule)
}

/// One step of the unsimplified rule. Accepts any integer layers.
pub fn ca_step_full(s: &CAState, f: i64, q: i64, alpha: usize, beta: usize, b: &Boundary<i64>) -> Result<IntField2D> {
    check_guard(f)?;
    check_guard(q)?;
    if !s.prev.same_shape(&s.curr) {
        return Err(shape_mismatch(&s.prev, &s.curr));
    }
    let ma = max5(&s.curr, alpha, b)?;
    let mb = max5(&s.prev, beta, b)?;
    combine(&ma, &mb, |x, y| full_rule(x, y, f, q))
}

/// One step of the simplified rule. Layers must be binary and `F ≥ 1`.
pub fn ca_step_simple(s: &CAState, f: i64, alpha: usize, beta: usize, b: &Boundary<i64>) -> Result<IntField2D> {
    if f < 1 {
        return Err(Error::validation(format!("the simplified rule needs F ≥ 1, got {f}")));
    }
    check_guard(f)?;
    check_binary_boundary(b)?;
    s.prev.require_binary()?;
    s.curr.require_binary()?;
    let ma = max5(&s.curr, alpha, b)?;
    let mb = max5(&s.prev, beta, b)?;
    combine(&ma, &mb, |x, y| simple_rule(x, y, f))
}

/// One step of the comparison rule `Y' = max(M_1(Y) − Y⁻, 0)`.
pub fn tsu_step(y_curr: &IntField2D, y_prev: &IntField2D, b: &Boundary<i64>) -> Result<IntField2D> {
    if !y_prev.same_shape(y_curr) {
        return Err(shape_mismatch(y_prev, y_curr));
    }
    check_binary_boundary(b)?;
    y_prev.require_binary()?;
    y_curr.require_binary()?;
    let m1 = max5(y_curr, 1, b)?;
    combine(&m1, y_prev, tsu_rule)
}

fn check_binary_boundary(b: &Boundary<i64>) -> Result<()> {
    match b {
        Boundary::Fixed(c) if *c != 0 && *c != 1 => {
            Err(Error::validation(format!("binary rules need a 0/1 boundary value, got {c}")))
        }
        _ => Ok(()),
    }
}

/// Which update rule drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Simple,
    Full,
    Tsu,
}

/// Rule constants for a run. The comparison rule ignores `f`, `q`,
/// `alpha` and `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaParams {
    pub f: i64,
    pub q: i64,
    pub alpha: usize,
    pub beta: usize,
    pub boundary: Boundary<i64>,
}

impl Default for CaParams {
    fn default() -> Self {
        CaParams {
            f: 1,
            q: -1,
            alpha: 1,
            beta: 0,
            boundary: Boundary::Fixed(0),
        }
    }
}

/// A cell forced to a cyclic sequence: after step `t` its value is
/// `sequence[t % len]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pacemaker {
    pub j: usize,
    pub k: usize,
    pub sequence: Vec<i64>,
}

impl Pacemaker {
    pub fn value_at(&self, t: usize) -> i64 {
        self.sequence[t % self.sequence.len()]
    }
}

/// Advances one step with the chosen rule.
pub fn ca_step(s: &CAState, rule: Rule, p: &CaParams) -> Result<IntField2D> {
    match rule {
        Rule::Simple => ca_step_simple(s, p.f, p.alpha, p.beta, &p.boundary),
        Rule::Full => ca_step_full(s, p.f, p.q, p.alpha, p.beta, &p.boundary),
        Rule::Tsu => tsu_step(&s.curr, &s.prev, &p.boundary),
    }
}

/// Runs `steps` steps and returns frames `W_0 … W_steps` (`frames[0]` is
/// the seed's current layer). Every produced layer must be binary.
pub fn ca_run(
    seed: &CAState,
    rule: Rule,
    p: &CaParams,
    steps: usize,
    pacemaker: Option<&Pacemaker>,
) -> Result<Vec<IntField2D>> {
    if let Some(pm) = pacemaker {
        if pm.sequence.is_empty() || pm.sequence.iter().any(|&x| x != 0 && x != 1) {
            return Err(Error::validation("pacemaker sequence must be a non-empty 0/1 list"));
        }
        if pm.j >= seed.width() || pm.k >= seed.height() {
            return Err(Error::validation("pacemaker cell outside the grid"));
        }
    }
    let mut state = seed.clone();
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(state.curr.clone());
    for t in 1..=steps {
        let mut next = ca_step(&state, rule, p)?;
        if let Some(pm) = pacemaker {
            next.set(pm.j, pm.k, pm.value_at(t))?;
        }
        next.require_binary()?;
        frames.push(next.clone());
        state.prev = std::mem::replace(&mut state.curr, next);
        state.n = t;
    }
    Ok(frames)
}

/// Seed generators.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSeed {
    /// A single excited cell at the center.
    SingleRing,
    /// Center cell following `1, 1, 0, 0, …`. With `pacemaker` the cell is
    /// forced every step; without it, the cell starts excited in both
    /// layers and sustains the cycle on its own (frames then read
    /// `1, 0, 0, 1, 1, …` at the center).
    Target { pacemaker: bool },
    /// A horizontal segment of 1s whose previous layer is offset, giving
    /// a pair of counter-rotating spirals at the segment ends.
    Spiral { length: usize },
    /// Explicit layers.
    Custom { prev: IntField2D, curr: IntField2D },
}

/// Offsets and truncations of the spiral seed. The previous layer is the
/// current segment translated by `(dx, dy)` with `trunc_left` and
/// `trunc_right` cells removed from its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpiralVariant {
    pub thickness: usize,
    pub dx: isize,
    pub dy: isize,
    pub trunc_left: usize,
    pub trunc_right: usize,
}

impl SpiralVariant {
    /// One-row segment with the previous layer shifted one cell to the right.
    pub const PRIMARY: SpiralVariant = SpiralVariant {
        thickness: 1,
        dx: 1,
        dy: 0,
        trunc_left: 0,
        trunc_right: 0,
    };

    /// The deterministic search order, starting with [`Self::PRIMARY`].
    pub fn search_order() -> Vec<SpiralVariant> {
        let mut out = Vec::new();
        for thickness in [1, 2] {
            for dy in [0, -1, 1, -2, 2, -3, 3] {
                for dx in [1, -1, 2, -2, 3, -3, 0] {
                    for trunc_left in 0..=3 {
                        for trunc_right in 0..=3 {
                            out.push(SpiralVariant {
                                thickness,
                                dx,
                                dy,
                                trunc_left,
                                trunc_right,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of the spiral seed search.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSearch {
    pub variant: SpiralVariant,
    /// Whether the chosen variant satisfies the rotation signature.
    pub passed: bool,
    /// Variants evaluated (1 when the search is disabled).
    pub tried: usize,
}

/// A seeded run: initial layers plus optional forcing.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeded {
    pub state: CAState,
    pub pacemaker: Option<Pacemaker>,
    pub spiral: Option<SpiralSearch>,
}

/// Spiral signature parameters: run `steps` steps, look for cores at frame
/// `steps − consecutive`, then require `consecutive` quarter turns of the
/// `2·radius`-wide window around every core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpiralCheck {
    pub steps: usize,
    pub radius: usize,
    pub consecutive: usize,
}

impl Default for SpiralCheck {
    fn default() -> Self {
        SpiralCheck {
            steps: 40,
            radius: 3,
            consecutive: 8,
        }
    }
}

fn center(width: usize, height: usize) -> (usize, usize) {
    (width / 2, height / 2)
}

fn check_margin(width: usize, height: usize, reach: usize) -> Result<()> {
    let (cj, ck) = center(width, height);
    let margin = cj.min(width - 1 - cj).min(ck).min(height - 1 - ck);
    if margin < reach {
        return Err(Error::validation(format!(
            "seed does not fit: {width}x{height} grid leaves margin {margin} < {reach}"
        )));
    }
    Ok(())
}

/// Builds the seed with the spiral search enabled.
pub fn seed_pattern(kind: &PatternSeed, width: usize, height: usize, steps: usize) -> Result<Seeded> {
    seed_pattern_with(kind, width, height, steps, true)
}

/// Builds the seed. Rings and targets require a margin of at least
/// `steps · α` (α = 1) around the center so fronts never reach the wall.
/// For spirals, `search` enables the fallback over [`SpiralVariant::search_order`].
pub fn seed_pattern_with(kind: &PatternSeed, width: usize, height: usize, steps: usize, search: bool) -> Result<Seeded> {
    if width == 0 || height == 0 {
        return Err(Error::validation("grid must be at least 1x1"));
    }
    let (cj, ck) = center(width, height);
    let zeros = IntField2D::zeros(width, height)?;
    match kind {
        PatternSeed::SingleRing => {
            check_margin(width, height, steps)?;
            let mut curr = zeros.clone();
            curr.set(cj, ck, 1)?;
            Ok(Seeded {
                state: CAState::new(zeros, curr)?,
                pacemaker: None,
                spiral: None,
            })
        }
        PatternSeed::Target { pacemaker } => {
            check_margin(width, height, steps)?;
            let mut curr = zeros.clone();
            curr.set(cj, ck, 1)?;
            if *pacemaker {
                Ok(Seeded {
                    state: CAState::new(zeros, curr)?,
                    pacemaker: Some(Pacemaker {
                        j: cj,
                        k: ck,
                        sequence: vec![1, 1, 0, 0],
                    }),
                    spiral: None,
                })
            } else {
                Ok(Seeded {
                    state: CAState::new(curr.clone(), curr)?,
                    pacemaker: None,
                    spiral: None,
                })
            }
        }
        PatternSeed::Spiral { length } => {
            let (variant, passed, tried) = if search {
                find_spiral_variant(width, height, *length, &SpiralCheck::default())?
            } else {
                (SpiralVariant::PRIMARY, false, 1)
            };
            let state = spiral_seed(width, height, *length, &variant)?;
            let passed = passed || (!search && spiral_passes(&state, &SpiralCheck::default())?);
            Ok(Seeded {
                state,
                pacemaker: None,
                spiral: Some(SpiralSearch { variant, passed, tried }),
            })
        }
        PatternSeed::Custom { prev, curr } => Ok(Seeded {
            state: CAState::new(prev.clone(), curr.clone())?,
            pacemaker: None,
            spiral: None,
        }),
    }
}

/// Segment of `length` cells centered horizontally, rows
/// `[height/2, height/2 + thickness)`, plus the offset previous layer.
pub fn spiral_seed(width: usize, height: usize, length: usize, v: &SpiralVariant) -> Result<CAState> {
    if length == 0 || v.thickness == 0 {
        return Err(Error::validation("spiral segment must be non-empty"));
    }
    let (cj, ck) = center(width, height);
    let j0 = cj as isize - (length / 2) as isize;
    let k0 = ck as isize;
    let mut curr = IntField2D::zeros(width, height)?;
    let mut prev = curr.clone();
    let fits = |j: isize, k: isize| j >= 0 && k >= 0 && (j as usize) < width && (k as usize) < height;
    for row in 0..v.thickness as isize {
        for i in 0..length as isize {
            let (j, k) = (j0 + i, k0 + row);
            if !fits(j, k) {
                return Err(Error::validation("spiral segment does not fit in the grid"));
            }
            curr.set(j as usize, k as usize, 1)?;
            if i < v.trunc_left as isize || i >= length as isize - v.trunc_right as isize {
                continue;
            }
            let (pj, pk) = (j + v.dx, k + v.dy);
            if !fits(pj, pk) {
                return Err(Error::validation("offset spiral layer does not fit in the grid"));
            }
            prev.set(pj as usize, pk as usize, 1)?;
        }
    }
    CAState::new(prev, curr)
}

fn spiral_passes(state: &CAState, check: &SpiralCheck) -> Result<bool> {
    let keep = check.consecutive + 2;
    let frames = match packed_tail(state, check.steps, keep) {
        Some(tail) => tail,
        None => ca_run(state, Rule::Simple, &CaParams::default(), check.steps, None)?,
    };
    Ok(spiral_signature(&frames, check).passed)
}

/// Bit-packed run of the simplified rule with `F = 1`, `(α, β) = (1, 0)`
/// and a zero boundary: a cell fires iff it or an axis neighbor fired and it
/// was quiet one step earlier. Returns the last `keep` frames, or `None`
/// when the grid is wider than 128 cells.
fn packed_tail(seed: &CAState, steps: usize, keep: usize) -> Option<Vec<IntField2D>> {
    let (w, h) = (seed.width(), seed.height());
    if w > 128 {
        return None;
    }
    let mask = if w == 128 { u128::MAX } else { (1u128 << w) - 1 };
    let pack = |f: &IntField2D| -> Vec<u128> {
        (0..h)
            .map(|k| (0..w).fold(0u128, |acc, j| acc | ((f.get(j, k) as u128) << j)))
            .collect()
    };
    let unpack = |rows: &[u128]| -> IntField2D {
        IntField2D::from_fn(w, h, |j, k| ((rows[k] >> j) & 1) as i64).expect("binary values")
    };
    let mut prev = pack(&seed.prev);
    let mut curr = pack(&seed.curr);
    let mut tail = Vec::with_capacity(keep);
    if steps < keep {
        tail.push(unpack(&curr));
    }
    for t in 1..=steps {
        let next: Vec<u128> = (0..h)
            .map(|k| {
                let c = curr[k];
                let up = if k > 0 { curr[k - 1] } else { 0 };
                let down = if k + 1 < h { curr[k + 1] } else { 0 };
                (c | (c << 1) | (c >> 1) | up | down) & !prev[k] & mask
            })
            .collect();
        prev = std::mem::replace(&mut curr, next);
        if t + keep > steps {
            tail.push(unpack(&curr));
        }
    }
    Some(tail)
}

/// Walks the search order and returns the first variant passing the
/// spiral signature, or the primary variant with `passed = false`.
pub fn find_spiral_variant(
    width: usize,
    height: usize,
    length: usize,
    check: &SpiralCheck,
) -> Result<(SpiralVariant, bool, usize)> {
    let order = SpiralVariant::search_order();
    for (i, v) in order.iter().enumerate() {
        let Ok(state) = spiral_seed(width, height, length, v) else {
            continue;
        };
        if spiral_passes(&state, check)? {
            return Ok((*v, true, i + 1));
        }
    }
    Ok((SpiralVariant::PRIMARY, false, order.len()))
}

// ---------------------------------------------------------------------------
// Pattern predicates

/// Cells with value 1.
pub fn ones(frame: &IntField2D) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for k in 0..frame.height() {
        for j in 0..frame.width() {
            if frame.get(j, k) == 1 {
                out.insert((j, k));
            }
        }
    }
    out
}

fn l1(a: (usize, usize), b: (usize, usize)) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

/// Cells at L1 distance exactly `r` from `c`, clipped to the grid.
pub fn l1_sphere(width: usize, height: usize, c: (usize, usize), r: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for k in 0..height {
        for j in 0..width {
            if l1((j, k), c) == r {
                out.insert((j, k));
            }
        }
    }
    out
}

/// Per-step summary of an expanding ring around `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingStep {
    pub n: usize,
    /// The 1-cells at the largest distance form the full L1 sphere of radius n.
    pub front_is_sphere: bool,
    /// Largest distance of a 1-cell from the seed.
    pub outer_radius: usize,
    /// Smallest distance of a 1-cell from the seed.
    pub inner_radius: usize,
    /// Every cell with distance in `[inner, outer]` is 1.
    pub solid: bool,
}

/// Describes frames `1..` of a ring run seeded at `c`.
pub fn ring_profile(frames: &[IntField2D], c: (usize, usize)) -> Vec<RingStep> {
    let mut out = Vec::new();
    for (n, frame) in frames.iter().enumerate().skip(1) {
        let set = ones(frame);
        let (w, h) = (frame.width(), frame.height());
        let dists: Vec<usize> = set.iter().map(|&x| l1(x, c)).collect();
        let outer = dists.iter().copied().max().unwrap_or(0);
        let inner = dists.iter().copied().min().unwrap_or(0);
        let front: BTreeSet<_> = set.iter().copied().filter(|&x| l1(x, c) == outer).collect();
        let band = (inner..=outer).map(|r| l1_sphere(w, h, c, r).len()).sum::<usize>();
        out.push(RingStep {
            n,
            front_is_sphere: !set.is_empty() && outer == n && front == l1_sphere(w, h, c, n),
            outer_radius: outer,
            inner_radius: inner,
            solid: band == set.len(),
        });
    }
    out
}

/// Result of the eventual-periodicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityReport {
    pub period: usize,
    /// Cells whose series repeats with `period` from their arrival time on.
    pub periodic_cells: usize,
    pub total_cells: usize,
    /// Cells checked over at least one full period.
    pub covered_cells: usize,
    pub source_follows_sequence: bool,
}

impl PeriodicityReport {
    pub fn passed(&self) -> bool {
        self.periodic_cells == self.total_cells && self.covered_cells > 0 && self.source_follows_sequence
    }
}

/// Every cell must satisfy `x[n + period] = x[n]` for all
/// `n ≥ d(cell) + slack`, where `d` is the L1 distance to `source`; the
/// source itself must follow `sequence`.
pub fn target_periodicity(
    frames: &[IntField2D],
    source: (usize, usize),
    sequence: &[i64],
    slack: usize,
) -> PeriodicityReport {
    let period = sequence.len();
    let (w, h) = (frames[0].width(), frames[0].height());
    let mut periodic = 0;
    let mut covered = 0;
    for k in 0..h {
        for j in 0..w {
            let start = l1((j, k), source) + slack;
            let mut ok = true;
            if start + period < frames.len() {
                covered += 1;
            }
            for n in start..frames.len().saturating_sub(period) {
                if frames[n].get(j, k) != frames[n + period].get(j, k) {
                    ok = false;
                    break;
                }
            }
            if ok {
                periodic += 1;
            }
        }
    }
    let follows = frames
        .iter()
        .enumerate()
        .all(|(t, f)| f.get(source.0, source.1) == sequence[t % period]);
    PeriodicityReport {
        period,
        periodic_cells: periodic,
        total_cells: w * h,
        covered_cells: covered,
        source_follows_sequence: follows,
    }
}

/// Excitation phase of a cell from its current and previous values:
/// excited `(1,0)` → 0, excited twice `(1,1)` → 1, refractory `(0,1)` → 2,
/// rest `(0,0)` → 3.
pub fn phase(curr: i64, prev: i64) -> u8 {
    match (curr, prev) {
        (1, 0) => 0,
        (1, 1) => 1,
        (0, 1) => 2,
        _ => 3,
    }
}

/// Direction of a quarter turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Turn {
    Clockwise,
    CounterClockwise,
}

/// A candidate rotation center: the 2×2 plaquette with top-left `(j, k)`
/// whose four cells carry four distinct phases. `chirality` is +1 when the
/// phases increase clockwise (top-left, top-right, bottom-right,
/// bottom-left) and −1 when they increase counter-clockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Core {
    pub j: usize,
    pub k: usize,
    pub chirality: i8,
    /// Common direction of all observed quarter turns, if every step was one.
    pub turn: Option<Turn>,
}

/// Spiral signature over a frame sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiralReport {
    pub frame: usize,
    pub cores: Vec<Core>,
    pub passed: bool,
}

impl SpiralReport {
    pub fn rotating(&self) -> impl Iterator<Item = &Core> {
        self.cores.iter().filter(|c| c.turn.is_some())
    }
}

/// Phase-winding cores between `frames[n − 1]` and `frames[n]`.
pub fn find_cores(curr: &IntField2D, prev: &IntField2D) -> Vec<Core> {
    let mut out = Vec::new();
    for k in 0..curr.height().saturating_sub(1) {
        for j in 0..curr.width().saturating_sub(1) {
            let ring = [(j, k), (j + 1, k), (j + 1, k + 1), (j, k + 1)];
            let p = ring.map(|(a, b)| phase(curr.get(a, b), prev.get(a, b)));
            let mask = p.iter().fold(0u8, |m, &x| m | (1 << x));
            if mask != 0b1111 {
                continue;
            }
            let steps: [u8; 4] = std::array::from_fn(|i| (p[(i + 1) % 4] + 4 - p[i]) % 4);
            let chirality = if steps.iter().all(|&s| s == 1) {
                1
            } else if steps.iter().all(|&s| s == 3) {
                -1
            } else {
                continue;
            };
            out.push(Core {
                j,
                k,
                chirality,
                turn: None,
            });
        }
    }
    out
}

fn window(frame: &IntField2D, j: usize, k: usize, r: usize) -> Vec<Vec<i64>> {
    let n = 2 * r;
    let (j0, k0) = (j as isize + 1 - r as isize, k as isize + 1 - r as isize);
    (0..n)
        .map(|y| {
            (0..n)
                .map(|x| frame.sample(j0 + x as isize, k0 + y as isize, &Boundary::Fixed(0)))
                .collect()
        })
        .collect()
}

fn rotate(w: &[Vec<i64>], turn: Turn) -> Vec<Vec<i64>> {
    let n = w.len();
    (0..n)
        .map(|y| {
            (0..n)
                .map(|x| match turn {
                    Turn::Clockwise => w[n - 1 - x][y],
                    Turn::CounterClockwise => w[x][n - 1 - y],
                })
                .collect()
        })
        .collect()
}

/// Finds cores at frame `frames.len() − 1 − consecutive` and, for each,
/// checks that the window around it turns by a quarter in the same
/// direction on each of the following `consecutive` steps. Passes when at
/// least two cores rotate and both chiralities occur among them.
pub fn spiral_signature(frames: &[IntField2D], check: &SpiralCheck) -> SpiralReport {
    if frames.len() < check.consecutive + 2 {
        return SpiralReport {
            frame: 0,
            cores: Vec::new(),
            passed: false,
        };
    }
    let start = frames.len() - 1 - check.consecutive;
    let mut cores = find_cores(&frames[start], &frames[start - 1]);
    for core in cores.iter_mut() {
        let mut allowed: BTreeSet<Turn> = [Turn::Clockwise, Turn::CounterClockwise].into_iter().collect();
        for t in start..start + check.consecutive {
            let a = window(&frames[t], core.j, core.k, check.radius);
            let b = window(&frames[t + 1], core.j, core.k, check.radius);
            allowed.retain(|&turn| rotate(&a, turn) == b);
            if a.iter().flatten().all(|&x| x == a[0][0]) {
                allowed.clear();
            }
        }
        core.turn = allowed.into_iter().next();
    }
    let chiralities: BTreeSet<i8> = cores.iter().filter(|c| c.turn.is_some()).map(|c| c.chirality).collect();
    let rotating = cores.iter().filter(|c| c.turn.is_some()).count();
    SpiralReport {
        frame: start,
        passed: rotating >= 2 && chiralities.len() == 2,
        cores,
    }
}

/// Outcome of the collision experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilationReport {
    pub steps: usize,
    /// Rows `0..=mid` of the combined run equal the top seed run alone.
    pub top_matches_single: bool,
    /// Rows `mid..` of the combined run equal the mirrored seed run alone.
    pub bottom_matches_single: bool,
    /// The top seed, run alone, sends excitation past the midline.
    pub single_crosses_midline: bool,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.top_matches_single && self.bottom_matches_single && self.single_crosses_midline
    }
}

/// Mirror image across the horizontal midline.
pub fn flip_vertical(f: &IntField2D) -> IntField2D {
    let h = f.height();
    IntField2D::from_fn(f.width(), h, |j, k| f.get(j, h - 1 - k)).expect("values copied from a valid field")
}

fn or_layers(a: &IntField2D, b: &IntField2D) -> Result<IntField2D> {
    a.zip_with(b, |x, y| x.max(y))
}

/// Places a spiral seed `offset` rows above the midline, adds its mirror
/// image below, and compares the combined run with the two runs alone.
/// Fronts that annihilate leave each half exactly as if the other seed
/// were absent, while a single seed would cross.
pub fn annihilation_check(
    size: usize,
    length: usize,
    variant: &SpiralVariant,
    offset: usize,
    steps: usize,
) -> Result<AnnihilationReport> {
    if size % 2 == 0 {
        return Err(Error::validation("collision grid must have odd size"));
    }
    let mid = size / 2;
    let base = spiral_seed(size, size, length, variant)?;
    let shift = |f: &IntField2D| f.translate(0, -(offset as isize));
    let top = CAState::new(shift(&base.prev), shift(&base.curr))?;
    // the translated seed must not have wrapped around
    if ones(&top.curr).len() != ones(&base.curr).len()
        || ones(&top.curr).iter().chain(ones(&top.prev).iter()).any(|&(_, k)| k > mid - 1)
    {
        return Err(Error::validation("collision seed does not fit above the midline"));
    }
    let bottom = CAState::new(flip_vertical(&top.prev), flip_vertical(&top.curr))?;
    let both = CAState::new(or_layers(&top.prev, &bottom.prev)?, or_layers(&top.curr, &bottom.curr)?)?;
    let p = CaParams::default();
    let run_top = ca_run(&top, Rule::Simple, &p, steps, None)?;
    let run_bottom = ca_run(&bottom, Rule::Simple, &p, steps, None)?;
    let run_both = ca_run(&both, Rule::Simple, &p, steps, None)?;
    let rows_equal = |a: &IntField2D, b: &IntField2D, rows: std::ops::Range<usize>| {
        rows.into_iter().all(|k| (0..size).all(|j| a.get(j, k) == b.get(j, k)))
    };
    let top_ok = run_both.iter().zip(&run_top).all(|(c, s)| rows_equal(c, s, 0..mid + 1));
    let bottom_ok = run_both.iter().zip(&run_bottom).all(|(c, s)| rows_equal(c, s, mid..size));
    let crosses = run_top.iter().any(|f| ones(f).iter().any(|&(_, k)| k > mid));
    Ok(AnnihilationReport {
        steps,
        top_matches_single: top_ok,
        bottom_matches_single: bottom_ok,
        single_crosses_midline: crosses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transition_tables() {
        let cases = [(1, 0, 1), (1, 1, 0), (0, 0, 0), (0, 1, 0)];
        for (m, prev, out) in cases {
            assert_eq!(simple_rule(m, prev, 1), out);
            assert_eq!(tsu_rule(m, prev), out);
            assert_eq!(full_rule(m, prev, 1, -1), out);
        }
    }

    #[test]
    fn shift_examples() {
        let u = IntField2D::new(2, 1, vec![-1, 0]).unwrap();
        let w = w_shift(&u, -1).unwrap();
        assert_eq!(w.values(), &[0, 1]);
        assert_eq!(w_shift(&u, 0).unwrap(), u);
        assert_eq!(w_shift(&w, 1).unwrap(), u);
        let big = IntField2D::new(1, 1, vec![crate::grid::INT_GUARD]).unwrap();
        assert!(matches!(w_shift(&big, -1), Err(Error::Overflow { .. })));
    }

    #[test]
    fn quiescent_and_all_excited_layers() {
        let z = IntField2D::zeros(5, 4).unwrap();
        let o = IntField2D::filled(5, 4, 1).unwrap();
        let s = CAState::new(z.clone(), z.clone()).unwrap();
        let b = Boundary::Fixed(0);
        assert_eq!(ca_step_full(&s, 1, -1, 1, 0, &b).unwrap(), z);
        assert_eq!(ca_step_simple(&s, 1, 1, 0, &b).unwrap(), z);
        assert_eq!(tsu_step(&z, &z, &b).unwrap(), z);
        let s = CAState::new(z.clone(), o.clone()).unwrap();
        assert_eq!(ca_step_full(&s, 1, -1, 1, 0, &b).unwrap(), o);
    }

    #[test]
    fn simple_rule_rejects_non_binary_and_small_f() {
        let z = IntField2D::zeros(3, 3).unwrap();
        let bad = IntField2D::filled(3, 3, 2).unwrap();
        let s = CAState {
            prev: z.clone(),
            curr: bad.clone(),
            n: 0,
        };
        assert!(matches!(
            ca_step_simple(&s, 1, 1, 0, &Boundary::Fixed(0)),
            Err(Error::NonBinary { .. })
        ));
        assert!(matches!(tsu_step(&bad, &z, &Boundary::Fixed(0)), Err(Error::NonBinary { .. })));
        let ok = CAState::new(z.clone(), z).unwrap();
        assert!(ca_step_simple(&ok, 0, 1, 0, &Boundary::Fixed(0)).is_err());
    }

    #[test]
    fn zero_steps_echo_the_seed() {
        let seeded = seed_pattern(&PatternSeed::SingleRing, 21, 21, 8).unwrap();
        let frames = ca_run(&seeded.state, Rule::Simple, &CaParams::default(), 0, None).unwrap();
        assert_eq!(frames, vec![seeded.state.curr.clone()]);
        assert_eq!(ones(&frames[0]).len(), 1);
    }

    #[test]
    fn ring_grows_as_a_two_cell_annulus() {
        let seeded = seed_pattern(&PatternSeed::SingleRing, 21, 21, 8).unwrap();
        let frames = ca_run(&seeded.state, Rule::Simple, &CaParams::default(), 8, None).unwrap();
        let profile = ring_profile(&frames, (10, 10));
        for step in &profile {
            assert!(step.front_is_sphere, "n = {}", step.n);
            assert!(step.solid);
            assert_eq!(step.inner_radius, if step.n == 1 { 0 } else { step.n - 1 });
        }
    }

    #[test]
    fn margin_rule_rejects_small_grids() {
        assert!(seed_pattern(&PatternSeed::SingleRing, 15, 15, 8).is_err());
        assert!(seed_pattern(&PatternSeed::Target { pacemaker: true }, 17, 17, 8).is_ok());
    }

    #[test]
    fn self_sustained_center_cycles_without_forcing() {
        let seeded = seed_pattern(&PatternSeed::Target { pacemaker: false }, 41, 41, 16).unwrap();
        let frames = ca_run(&seeded.state, Rule::Simple, &CaParams::default(), 16, None).unwrap();
        // the seed is the (1, 1) point of the cycle, so frames read 1, 0, 0, 1, …
        let report = target_periodicity(&frames, (20, 20), &[1, 0, 0, 1], 2);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn spiral_seed_geometry() {
        let s = spiral_seed(21, 21, 6, &SpiralVariant::PRIMARY).unwrap();
        let c = ones(&s.curr);
        let p = ones(&s.prev);
        assert_eq!(c, (7..13).map(|j| (j, 10)).collect());
        assert_eq!(p, (8..14).map(|j| (j, 10)).collect());
        let v = SpiralVariant {
            thickness: 2,
            dx: -1,
            dy: 1,
            trunc_left: 1,
            trunc_right: 2,
        };
        let s = spiral_seed(21, 21, 6, &v).unwrap();
        assert_eq!(ones(&s.curr).len(), 12);
        assert_eq!(ones(&s.prev).len(), 6);
        assert!(spiral_seed(5, 5, 8, &SpiralVariant::PRIMARY).is_err());
    }

    #[test]
    fn rotating_phase_field_is_recognized() {
        // a two-armed phase field φ = quadrant − L1 radius turns by a quarter per step
        let n = 20;
        let (c0, c1) = (9.5f64, 9.5f64);
        let phase_at = |j: usize, k: usize, t: usize| -> i64 {
            let (x, y) = (j as f64 - c0, k as f64 - c1);
            let quad = match (x > 0.0, y > 0.0) {
                (true, false) => 0,
                (true, true) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            let r = (x.abs() + y.abs()) as i64;
            (quad - r - t as i64).rem_euclid(4)
        };
        let frames: Vec<IntField2D> = (0..12)
            .map(|t| IntField2D::from_fn(n, n, |j, k| i64::from(phase_at(j, k, t) < 2)).unwrap())
            .collect();
        let report = spiral_signature(&frames, &SpiralCheck { steps: 11, radius: 3, consecutive: 8 });
        assert!(report.rotating().any(|c| c.j == 9 && c.k == 9), "{report:?}");
    }

    #[test]
    fn packed_run_matches_generic_run() {
        for v in SpiralVariant::search_order().iter().step_by(37) {
            let seed = spiral_seed(41, 33, 9, v).unwrap();
            let full = ca_run(&seed, Rule::Simple, &CaParams::default(), 25, None).unwrap();
            let tail = packed_tail(&seed, 25, 10).unwrap();
            assert_eq!(&full[16..], &tail[..]);
        }
        let seed = seed_pattern(&PatternSeed::SingleRing, 21, 21, 3).unwrap().state;
        let full = ca_run(&seed, Rule::Simple, &CaParams::default(), 3, None).unwrap();
        assert_eq!(packed_tail(&seed, 3, 10).unwrap(), full);
    }

    fn binary_field(w: usize, h: usize) -> impl Strategy<Value = IntField2D> {
        prop::collection::vec(0i64..=1, w * h).prop_map(move |v| IntField2D::new(w, h, v).unwrap())
    }

    proptest! {
        #[test]
        fn rules_agree_on_random_binary_states(prev in binary_field(9, 7), curr in binary_field(9, 7), b in 0i64..=1) {
            let s = CAState::new(prev.clone(), curr.clone()).unwrap();
            let bd = Boundary::Fixed(b);
            let simple = ca_step_simple(&s, 1, 1, 0, &bd).unwrap();
            prop_assert_eq!(&simple, &ca_step_full(&s, 1, -1, 1, 0, &bd).unwrap());
            prop_assert_eq!(&simple, &tsu_step(&curr, &prev, &bd).unwrap());
            prop_assert!(simple.is_binary());
        }

        #[test]
        fn closure_for_any_offsets(prev in binary_field(8, 8), curr in binary_field(8, 8), a in 0usize..4, bb in 0usize..4, f in 1i64..4) {
            let s = CAState::new(prev, curr).unwrap();
            let out = ca_step_simple(&s, f, a, bb, &Boundary::Periodic).unwrap();
            prop_assert!(out.is_binary());
        }
    }
}
