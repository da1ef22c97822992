//! Exact branch-and-prune search for complete proper colourings.
//!
//! Cells are filled column by column. Every node is checked against the
//! pair potential (witness slots left versus pairs still uncovered), the
//! feasible frequency profiles, and the neighbourhoods of colours whose
//! final frequency has been committed. When a colour receives a copy below
//! the largest admissible frequency the search branches on whether that
//! copy is its last ("closed") or not ("open"); the two branches partition
//! the solutions, so no witness is lost or duplicated.

mod audit;
mod state;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::lemmas::COUNTEREXAMPLE;
use crate::model::{ColorMatrix, Colour, Membership};

pub use audit::{audit_lemma_cuts, planted_matrix, AuditReport, PlantedLayout};
pub use state::{PruneRule, PruneStats};

use state::{Closure, Problem, State};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Wall-clock limit; zero means unlimited.
    pub time_budget: Duration,
    /// Node limit; zero means unlimited.
    pub node_budget: u64,
    /// Only legal for the `(6,7,19)` instance.
    pub use_lemma_pruning: bool,
    /// Worker count; `1` runs the deterministic sequential path.
    pub parallel_width: usize,
    pub seed: u64,
    /// Colour-introduction and column-order symmetry breaking.
    pub symmetry_breaking: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            time_budget: Duration::ZERO,
            node_budget: 0,
            use_lemma_pruning: false,
            parallel_width: 1,
            seed: 0,
            symmetry_breaking: true,
        }
    }
}

impl SearchConfig {
    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.node_budget = nodes;
        self
    }

    pub fn with_time(mut self, budget: Duration) -> Self {
        self.time_budget = budget;
        self
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.parallel_width = width.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lemmas(mut self, on: bool) -> Self {
        self.use_lemma_pruning = on;
        self
    }

    pub fn with_symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Found,
    Exhausted,
    BudgetExceeded,
}

impl std::fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchStatus::Found => "FOUND",
            SearchStatus::Exhausted => "EXHAUSTED",
            SearchStatus::BudgetExceeded => "BUDGET_EXCEEDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub witness: Option<ColorMatrix>,
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    pub prunes: PruneStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Found,
    Budget,
    Cancelled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    All,
    /// Stop at this depth and hand the state out as a task.
    Split(usize),
    /// Exhaustive up to this depth; deeper states are counted, not expanded.
    Horizon(usize),
}

/// A state rejected by a lemma cut: its cells and the closed colours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CutSample {
    pub matrix: ColorMatrix,
    pub closed: Vec<Colour>,
    pub rule: PruneRule,
}

/// Keeps every `every`-th lemma cut, up to `limit`.
struct CutSampler {
    every: u64,
    seen: u64,
    limit: usize,
    samples: Vec<CutSample>,
}

struct Limits {
    node_budget: u64,
    deadline: Option<Instant>,
    stop: AtomicBool,
    flushed: AtomicU64,
}

impl Limits {
    fn new(cfg: &SearchConfig, start: Instant) -> Self {
        Self {
            node_budget: cfg.node_budget,
            deadline: (!cfg.time_budget.is_zero()).then(|| start + cfg.time_budget),
            stop: AtomicBool::new(false),
            flushed: AtomicU64::new(0),
        }
    }
}

const FLUSH_EVERY: u64 = 1024;

struct Searcher<'a> {
    pb: &'a Problem,
    st: State,
    limits: &'a Limits,
    mode: Mode,
    rng: ChaCha8Rng,
    nodes: u64,
    pending: u64,
    stats: PruneStats,
    solutions: Vec<ColorMatrix>,
    frontier: Vec<State>,
    horizon_hits: u64,
    sampler: Option<CutSampler>,
}

impl<'a> Searcher<'a> {
    fn new(pb: &'a Problem, st: State, limits: &'a Limits, mode: Mode, seed: u64) -> Self {
        Self {
            pb,
            st,
            limits,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: 0,
            pending: 0,
            stats: PruneStats::default(),
            solutions: Vec::new(),
            frontier: Vec::new(),
            horizon_hits: 0,
            sampler: None,
        }
    }

    fn flush(&mut self) {
        self.limits
            .flushed
            .fetch_add(self.pending, Ordering::Relaxed);
        self.pending = 0;
    }

    fn over_budget(&mut self) -> Option<Flow> {
        let lim = self.limits;
        if lim.node_budget > 0
            && lim.flushed.load(Ordering::Relaxed) + self.pending > lim.node_budget
        {
            return Some(Flow::Budget);
        }
        if self.pending >= FLUSH_EVERY {
            self.flush();
            if lim.stop.load(Ordering::Relaxed) {
                return Some(Flow::Cancelled);
            }
            if lim.deadline.is_some_and(|d| Instant::now() >= d) {
                return Some(Flow::Budget);
            }
        }
        None
    }

    fn dfs(&mut self) -> Flow {
        self.nodes += 1;
        self.pending += 1;
        if let Some(flow) = self.over_budget() {
            return flow;
        }
        let pb = self.pb;
        let depth = self.st.depth;
        if depth == pb.order.len() {
            if self.st.uncovered == 0 && self.st.used == pb.k {
                let m = self.st.to_matrix(pb);
                assert!(
                    m.in_family(pb.p, pb.q, pb.k),
                    "search produced an invalid witness:\n{m}"
                );
                self.solutions.push(m);
                if matches!(self.mode, Mode::First | Mode::Horizon(_)) {
                    return Flow::Found;
                }
            }
            return Flow::Continue;
        }
        if self.mode == Mode::Split(depth) {
            self.frontier.push(self.st.clone());
            return Flow::Continue;
        }
        if self.mode == Mode::Horizon(depth) {
            self.horizon_hits += 1;
            return Flow::Continue;
        }

        let cell = pb.order[depth];
        for (colour, closures) in self.candidates(cell) {
            for &closure in closures.iter().flatten() {
                let undo = self.st.assign(pb, cell, colour, closure);
                self.st.depth += 1;
                let closed_now = (closure == Closure::Closed).then_some(colour);
                let flow = match self.st.check(pb, closed_now) {
                    Ok(()) => self.dfs(),
                    Err(rule) => {
                        self.stats.record(rule);
                        if rule.is_lemma() && self.sample_cut(rule) {
                            Flow::Cancelled
                        } else {
                            Flow::Continue
                        }
                    }
                };
                self.st.depth -= 1;
                self.st.unassign(pb, undo);
                if flow != Flow::Continue {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    /// Records a lemma cut if it is due; true once the sampler is full.
    fn sample_cut(&mut self, rule: PruneRule) -> bool {
        let Some(sampler) = self.sampler.as_mut() else {
            return false;
        };
        sampler.seen += 1;
        if sampler.seen % sampler.every != 0 {
            return false;
        }
        let closed = (1..=self.pb.k as Colour)
            .filter(|&c| self.st.closure[c as usize] == Closure::Closed)
            .collect();
        sampler.samples.push(CutSample {
            matrix: self.st.to_matrix(self.pb),
            closed,
            rule,
        });
        sampler.samples.len() >= sampler.limit
    }

    /// Colour choices for `cell` with the closure branches to try for each.
    fn candidates(&mut self, cell: usize) -> Vec<(Colour, [Option<Closure>; 2])> {
        let pb = self.pb;
        let legal = self.st.legal_colours(pb, cell);
        let mut used = Vec::new();
        let mut fresh = Vec::new();
        let mut m = legal;
        while m != 0 {
            let c = m.trailing_zeros() as Colour + 1;
            m &= m - 1;
            if self.st.closure[c as usize] == Closure::Closed {
                continue;
            }
            if self.st.freq[c as usize] == 0 {
                fresh.push(c);
            } else {
                used.push((self.st.deficit(pb, c), self.rng.random::<u32>(), c));
            }
        }
        // colours with the fewest unmet partners first; ties broken by the seeded rng
        used.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

        if pb.symmetry && fresh.len() > 1 {
            // unused colours are interchangeable
            self.stats.symmetry += fresh.len() as u64 - 1;
            fresh.truncate(1);
        }
        let mut out: Vec<(Colour, [Option<Closure>; 2])> =
            Vec::with_capacity(used.len() + fresh.len());
        let forced_fresh = pb.column_rule && self.column_rule_forces_fresh(cell);
        if forced_fresh {
            self.stats.symmetry += used.len() as u64;
        } else {
            for (_, _, c) in used {
                out.push((c, self.closures_after(c)));
            }
        }
        for c in fresh {
            out.push((c, self.closures_after(c)));
        }
        out
    }

    /// In column 1, once some row holds a colour absent from column 0, every
    /// later row must hold a fresh colour too.
    fn column_rule_forces_fresh(&self, cell: usize) -> bool {
        let pb = self.pb;
        let (i, j) = (pb.row_of[cell], pb.col_of[cell]);
        if j != 1 || i == 0 {
            return false;
        }
        let above = self.st.cells[cell - pb.q];
        above as usize > pb.p
    }

    fn closures_after(&self, c: Colour) -> [Option<Closure>; 2] {
        let f = self.st.freq[c as usize] as usize + 1;
        if f >= self.pb.max_freq {
            [Some(Closure::Closed), None]
        } else if f < self.pb.min_freq {
            [Some(Closure::Open), None]
        } else {
            [Some(Closure::Closed), Some(Closure::Open)]
        }
    }
}

struct TaskResult {
    flow: Flow,
    nodes: u64,
    stats: PruneStats,
    solutions: Vec<ColorMatrix>,
}

fn task_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_task(pb: &Problem, st: State, limits: &Limits, mode: Mode, seed: u64) -> TaskResult {
    let mut s = Searcher::new(pb, st, limits, mode, seed);
    let flow = s.dfs();
    s.flush();
    if flow == Flow::Found {
        limits.stop.store(true, Ordering::Relaxed);
    }
    TaskResult {
        flow,
        nodes: s.nodes,
        stats: s.stats,
        solutions: s.solutions,
    }
}

/// Runs the search rooted at `root`, splitting into subtrees when
/// `width > 1`.
fn drive(
    pb: &Problem,
    root: State,
    cfg: &SearchConfig,
    mode: Mode,
) -> (SearchStatus, Vec<ColorMatrix>, u64, PruneStats, Duration) {
    let start = Instant::now();
    let limits = Limits::new(cfg, start);
    let mut stats = PruneStats::default();

    if let Err(rule) =
        root.check(pb, None)
            .and_then(|_| if pb.lemmas { root.lemma_scan() } else { Ok(()) })
    {
        stats.record(rule);
        return (
            SearchStatus::Exhausted,
            Vec::new(),
            1,
            stats,
            start.elapsed(),
        );
    }
    if pb.profiles.is_empty() {
        stats.record(PruneRule::Frequency);
        return (
            SearchStatus::Exhausted,
            Vec::new(),
            1,
            stats,
            start.elapsed(),
        );
    }

    let width = cfg.parallel_width.max(1);
    let tasks: Vec<State>;
    let mut results: Vec<TaskResult> = Vec::new();
    if width == 1 || cfg!(not(feature = "parallel")) {
        tasks = vec![root];
    } else {
        // deepen the split until there is enough work to spread
        let target = 16 * width;
        let max_depth = pb.order.len().saturating_sub(1);
        let mut depth = 1.min(max_depth);
        loop {
            let mut s = Searcher::new(pb, root.clone(), &limits, Mode::Split(depth), cfg.seed);
            let flow = s.dfs();
            s.flush();
            if flow != Flow::Continue || s.frontier.len() >= target || depth >= max_depth {
                tasks = std::mem::take(&mut s.frontier);
                results.push(TaskResult {
                    flow,
                    nodes: s.nodes,
                    stats: s.stats,
                    solutions: s.solutions,
                });
                break;
            }
            depth += 1;
        }
    }

    let stop_early = results
        .iter()
        .any(|r| r.flow != Flow::Continue || (mode == Mode::First && !r.solutions.is_empty()));
    if !stop_early {
        let run =
            |(idx, st): (usize, State)| run_task(pb, st, &limits, mode, task_seed(cfg.seed, idx));
        #[cfg(feature = "parallel")]
        {
            if width > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(width)
                    .build()
                    .expect("thread pool");
                let mut out: Vec<TaskResult> =
                    pool.install(|| tasks.into_par_iter().enumerate().map(run).collect());
                results.append(&mut out);
            } else {
                results.extend(tasks.into_iter().enumerate().map(run));
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            for (idx, st) in tasks.into_iter().enumerate() {
                let r = run((idx, st));
                let done = r.flow != Flow::Continue;
                results.push(r);
                if done {
                    break;
                }
            }
        }
    }

    let mut nodes = 0;
    let mut solutions = Vec::new();
    let mut budget = false;
    for r in results {
        nodes += r.nodes;
        stats.merge(&r.stats);
        budget |= r.flow == Flow::Budget;
        solutions.extend(r.solutions);
    }
    let status = if !solutions.is_empty() && mode == Mode::First {
        SearchStatus::Found
    } else if budget {
        SearchStatus::BudgetExceeded
    } else {
        SearchStatus::Exhausted
    };
    (status, solutions, nodes, stats, start.elapsed())
}

fn outcome(
    status: SearchStatus,
    mut solutions: Vec<ColorMatrix>,
    nodes: u64,
    prunes: PruneStats,
    wall_time: Duration,
) -> SearchOutcome {
    SearchOutcome {
        status,
        witness: if status == SearchStatus::Found {
            solutions.drain(..).next()
        } else {
            None
        },
        nodes_expanded: nodes,
        wall_time,
        prunes,
    }
}

/// Searches for a complete proper `k`-colouring of `K_p □ K_q`.
///
/// `p > q` is solved on the transpose and the witness transposed back.
pub fn find_coloring(p: usize, q: usize, k: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    if p > q {
        let mut out = find_coloring(q, p, k, config)?;
        out.witness = out.witness.map(|w| w.transpose());
        return Ok(out);
    }
    let pb = Problem::new(
        p,
        q,
        k,
        config.use_lemma_pruning,
        config.symmetry_breaking,
        None,
    )?;
    let root = State::empty(&pb);
    let (status, sols, nodes, stats, t) = drive(&pb, root, config, Mode::First);
    Ok(outcome(status, sols, nodes, stats, t))
}

/// Searches for a completion of the partial matrix `start`. Colours listed
/// in `closed` receive no further cells.
pub fn find_completion(
    start: &ColorMatrix,
    closed: &[Colour],
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    let (p, q, k) = start.shape();
    let pb = Problem::new(
        p,
        q,
        k,
        config.use_lemma_pruning,
        config.symmetry_breaking,
        Some(start),
    )?;
    let root = State::from_partial(&pb, start, closed)?;
    let (status, sols, nodes, stats, t) = drive(&pb, root, config, Mode::First);
    Ok(outcome(status, sols, nodes, stats, t))
}

/// Every complete proper `k`-colouring reachable by the search. With
/// symmetry breaking off this is every member of the family; with it on,
/// at least one member of every equivalence class.
pub fn enumerate_colorings(
    p: usize,
    q: usize,
    k: usize,
    config: &SearchConfig,
) -> Result<Vec<ColorMatrix>> {
    let pb = Problem::new(
        p,
        q,
        k,
        config.use_lemma_pruning,
        config.symmetry_breaking,
        None,
    )?;
    let root = State::empty(&pb);
    let (status, sols, ..) = drive(&pb, root, config, Mode::All);
    if status == SearchStatus::BudgetExceeded {
        return Err(Error::Config("enumeration exceeded its budget".into()));
    }
    Ok(sols)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AchromaticValue {
    Exact { value: usize },
    Bracket { lower: usize, upper: usize },
}

impl std::fmt::Display for AchromaticValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AchromaticValue::Exact { value } => write!(f, "{value}"),
            AchromaticValue::Bracket { lower, upper } => write!(f, "[{lower}, {upper}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub k: usize,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AchromaticResult {
    pub value: AchromaticValue,
    /// Complete colouring with the largest `k` found.
    pub witness: Option<ColorMatrix>,
    pub upper_bound: usize,
    pub probes: Vec<Probe>,
}

/// Determines the achromatic number by probing `k` upward from `max(p,q)`.
///
/// The family is interpolating, so the first exhausted `k` pins the value.
/// A probe that runs out of budget leaves a bracket.
pub fn achromatic(p: usize, q: usize, config: &SearchConfig) -> Result<AchromaticResult> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidDimensions {
            rows: p,
            cols: q,
            palette: 0,
        });
    }
    let ub = bounds::upper_bound(p, q);
    let mut best = 0;
    let mut witness = None;
    let mut probes = Vec::new();
    let mut value = None;
    for k in p.max(q)..=ub {
        let out = find_coloring(p, q, k, config)?;
        let status = out.status;
        if let Some(w) = &out.witness {
            best = k;
            witness = Some(w.clone());
        }
        probes.push(Probe { k, outcome: out });
        match status {
            SearchStatus::Found => {}
            SearchStatus::Exhausted => {
                value = Some(AchromaticValue::Exact { value: k - 1 });
                break;
            }
            SearchStatus::BudgetExceeded => {
                value = Some(AchromaticValue::Bracket {
                    lower: best,
                    upper: ub,
                });
                break;
            }
        }
    }
    Ok(AchromaticResult {
        value: value.unwrap_or(AchromaticValue::Exact { value: ub }),
        witness,
        upper_bound: ub,
        probes,
    })
}

/// Attempts to rule out a complete proper 19-colouring of `K_6 □ K_7`.
///
/// `EXHAUSTED` is a computer refutation. `FOUND` would contradict the
/// structural cuts and must be treated as a defect, not a result.
pub fn refute(config: &SearchConfig) -> Result<SearchOutcome> {
    let (p, q, k) = COUNTEREXAMPLE;
    find_coloring(p, q, k, config)
}

/// Appends a column to a complete proper `k`-colouring of `K_p □ K_q`,
/// giving one of `K_p □ K_{q+1}` with the same `k`.
///
/// Each row needs a colour it does not already use, all distinct: a
/// perfect matching from rows into colours. Every pair stays good because
/// the old columns are untouched. A matrix that is complete on the colours
/// it uses but leaves some palette colours unused is also accepted; the
/// new column must then bring those colours in, which is settled by a
/// small exhaustive search.
pub fn extend_coloring(m: &ColorMatrix) -> Result<ColorMatrix> {
    let (p, q, k) = m.shape();
    let status = m.membership(p, q, k);
    let allowed: Vec<Vec<Colour>> = (0..p)
        .map(|i| {
            (1..=k as Colour)
                .filter(|c| !m.row(i).contains(c))
                .collect()
        })
        .collect();
    let column = match &status {
        Membership::Member => {
            if k < p {
                return Err(Error::NoExtension);
            }
            let mut owner: Vec<Option<usize>> = vec![None; k + 1];
            for i in 0..p {
                let mut seen = vec![false; k + 1];
                if !augment(i, &allowed, &mut owner, &mut seen) {
                    return Err(Error::NoExtension);
                }
            }
            let mut column = vec![0 as Colour; p];
            for (c, o) in owner.iter().enumerate() {
                if let Some(i) = o {
                    column[*i] = c as Colour;
                }
            }
            column
        }
        Membership::Incomplete { unused, .. } if complete_on_used(m, unused) => {
            let mut column = vec![0 as Colour; p];
            if unused.len() > p || !fill_column(m, &allowed, unused, 0, &mut column) {
                return Err(Error::NoExtension);
            }
            column
        }
        _ => return Err(Error::NotInFamily(status.to_string())),
    };
    let out = m.with_column(&column)?;
    debug_assert!(out.in_family(p, q + 1, k));
    Ok(out)
}

fn complete_on_used(m: &ColorMatrix, unused: &[Colour]) -> bool {
    m.ledger().is_ok_and(|l| {
        l.uncovered_pairs()
            .all(|(a, b)| unused.contains(&a) || unused.contains(&b))
    })
}

fn fill_column(
    m: &ColorMatrix,
    allowed: &[Vec<Colour>],
    unused: &[Colour],
    row: usize,
    column: &mut [Colour],
) -> bool {
    let p = column.len();
    if row == p {
        let (_, q, k) = m.shape();
        return m
            .with_column(column)
            .is_ok_and(|w| w.in_family(p, q + 1, k));
    }
    let missing = unused.iter().filter(|c| !column[..row].contains(c)).count();
    if missing > p - row {
        return false;
    }
    for &c in &allowed[row] {
        if column[..row].contains(&c) {
            continue;
        }
        column[row] = c;
        if fill_column(m, allowed, unused, row + 1, column) {
            return true;
        }
    }
    column[row] = 0;
    false
}

fn augment(
    row: usize,
    allowed: &[Vec<Colour>],
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &c in &allowed[row] {
        let c = c as usize;
        if seen[c] {
            continue;
        }
        seen[c] = true;
        if owner[c].is_none_or(|other| augment(other, allowed, owner, seen)) {
            owner[c] = Some(row);
            return true;
        }
    }
    false
}

/// Fills every unassigned cell of `m` with a uniformly chosen legal colour
/// from `palette`, row by row. Returns `None` if some cell has no option.
pub(crate) fn random_fill<R: Rng>(
    m: &mut ColorMatrix,
    palette: &[Colour],
    rng: &mut R,
) -> Option<()> {
    let (p, q, _) = m.shape();
    for i in 0..p {
        for j in 0..q {
            if m.get(i, j).is_some() {
                continue;
            }
            let options: Vec<Colour> = palette
                .iter()
                .copied()
                .filter(|&c| !m.row(i).contains(&c) && !m.column(j).any(|x| x == c))
                .collect();
            if options.is_empty() {
                return None;
            }
            let c = options[rng.random_range(0..options.len())];
            m.set(i, j, c).ok()?;
        }
    }
    Some(())
}
