//! Exhaustive search for the largest rainbow-free families.
//!
//! The orderly tree (see [`orderly`]) is cut at a fixed depth into an ordered
//! list of work items. Items above the cut are single nodes; items at the cut
//! are whole subtrees. Workers pull items in order, share the best size seen
//! so far as a monotone counter, and results are merged by item order and
//! canonical code, so the outcome does not depend on the worker count.

pub mod checkpoint;
pub mod index;
mod orderly;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::canon::{canonical_family, encode, CanonicalCode};
use crate::family::{Mode, Triangle, TriangleFamily};
use crate::rainbow::find_rainbow;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use index::{colex_pool, extend_ok, OwnerIndex};

use orderly::{family_of, Explorer, Flow, Item};

/// Largest vertex count the bitmask core supports.
pub const MAX_SEARCH_N: usize = 12;

/// Frontier cut: the first depth with at least this many nodes, capped.
const FRONTIER_TARGET: usize = 64;
const FRONTIER_MAX_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Maximize,
    ProveSize(usize),
    EnumerateExtremal,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub mode: Mode,
    pub target: Target,
    pub node_limit: Option<u64>,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    pub resume: Option<Checkpoint>,
}

impl SearchConfig {
    pub fn new(n: usize, mode: Mode) -> Self {
        SearchConfig {
            n,
            mode,
            target: Target::Maximize,
            node_limit: None,
            workers: 1,
            checkpoint_path: None,
            checkpoint_interval: Duration::from_secs(30),
            resume: None,
        }
    }

    pub fn target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint_path = Some(path.into());
        self
    }

    pub fn resume(mut self, ckpt: Checkpoint) -> Self {
        self.resume = Some(ckpt);
        self
    }

    pub fn max_multiplicity(&self) -> u8 {
        self.mode.max_multiplicity()
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.n < 3 || self.n > MAX_SEARCH_N {
            return Err(SearchError::InvalidConfig(format!(
                "n must be in 3..={MAX_SEARCH_N}, got {}",
                self.n
            )));
        }
        if self.workers == 0 {
            return Err(SearchError::InvalidConfig(
                "workers must be positive".into(),
            ));
        }
        if self.node_limit == Some(0) {
            return Err(SearchError::InvalidConfig(
                "node limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub best_size: usize,
    /// Canonical representatives at `best_size`, ascending by canonical code.
    /// In prove mode, the single family that met the target.
    pub witnesses: Vec<TriangleFamily>,
    /// Number of isomorphism classes at the maximum (enumeration only, when complete).
    pub extremal_class_count: Option<usize>,
    pub nodes_explored: u64,
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Found(TriangleFamily),
    Refuted,
    Undecided,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("internal error: witness failed re-verification:\n{0}")]
    UnsoundWitness(String),
}

pub(crate) struct Shared {
    pub(crate) best: AtomicUsize,
    pub(crate) nodes: AtomicU64,
    pub(crate) node_limit: Option<u64>,
    pub(crate) stop: AtomicBool,
    pub(crate) found_min: AtomicUsize,
}

impl Shared {
    fn new(node_limit: Option<u64>) -> Self {
        Shared {
            best: AtomicUsize::new(0),
            nodes: AtomicU64::new(0),
            node_limit,
            stop: AtomicBool::new(false),
            found_min: AtomicUsize::new(usize::MAX),
        }
    }
}

#[derive(Clone, Debug)]
struct WorkItem {
    path: Vec<Item>,
    expand: bool,
}

#[derive(Clone, Debug, Default)]
struct ItemOutcome {
    best: usize,
    witnesses: Vec<Vec<Item>>,
    found: Option<Vec<Item>>,
    finished: bool,
}

/// Pre-order list of frontier items for `(n, mode)`; independent of target
/// and worker count.
fn frontier(n: usize, mode: Mode, pool: &[Triangle]) -> Vec<WorkItem> {
    fn count(e: &mut Explorer<'_>, depth: usize, counts: &mut [usize]) {
        counts[e.items.len()] += 1;
        if e.items.len() == depth {
            return;
        }
        let (children, _) = e.children();
        for child in children {
            e.push(child);
            if e.canonical() {
                count(e, depth, counts);
            }
            e.pop();
        }
    }
    fn collect(e: &mut Explorer<'_>, depth: usize, out: &mut Vec<WorkItem>) {
        let at_cut = e.items.len() == depth;
        out.push(WorkItem {
            path: e.items.clone(),
            expand: at_cut,
        });
        if at_cut {
            return;
        }
        let (children, _) = e.children();
        for child in children {
            e.push(child);
            if e.canonical() {
                collect(e, depth, out);
            }
            e.pop();
        }
    }

    let shared = Shared::new(None);
    let mut e = Explorer::new(&shared, pool, n, mode, None, 0);
    let mut counts = vec![0usize; FRONTIER_MAX_DEPTH + 1];
    count(&mut e, FRONTIER_MAX_DEPTH, &mut counts);
    let depth = (1..=FRONTIER_MAX_DEPTH)
        .find(|&d| counts[d] >= FRONTIER_TARGET)
        .unwrap_or(FRONTIER_MAX_DEPTH);
    let mut out = Vec::new();
    collect(&mut e, depth, &mut out);
    out
}

fn run_item(
    shared: &Shared,
    pool: &[Triangle],
    cfg: &SearchConfig,
    prove: Option<usize>,
    id: usize,
    item: &WorkItem,
) -> ItemOutcome {
    let mut e = Explorer::new(shared, pool, cfg.n, cfg.mode, prove, id);
    for &step in &item.path {
        e.push(step);
    }
    let superseded = || prove.is_some() && shared.found_min.load(Ordering::Relaxed) < id;
    let flow = if shared.stop.load(Ordering::Relaxed) || superseded() {
        Flow::Stop
    } else if item.expand {
        e.explore()
    } else {
        e.record()
    };
    // An item cut short because an earlier item already met the proof
    // target no longer matters.
    ItemOutcome {
        best: e.best,
        finished: flow == Flow::Continue || e.found.is_some() || superseded(),
        witnesses: std::mem::take(&mut e.witnesses),
        found: e.found.take(),
    }
}

struct Progress {
    outcomes: Vec<Option<ItemOutcome>>,
    last_write: Instant,
}

struct Run<'a> {
    cfg: &'a SearchConfig,
    pool: Vec<Triangle>,
    items: Vec<WorkItem>,
    shared: Shared,
    resumed_best: usize,
    resumed_nodes: u64,
    resumed_witnesses: Vec<TriangleFamily>,
    start_at: usize,
}

impl Run<'_> {
    fn prove_target(&self) -> Option<usize> {
        match self.cfg.target {
            Target::ProveSize(k) => Some(k),
            _ => None,
        }
    }

    fn family(&self, items: &[Item]) -> TriangleFamily {
        family_of(self.cfg.n, self.cfg.mode, &self.pool, items)
    }

    fn snapshot(&self, progress: &Progress) -> Checkpoint {
        let next = (self.start_at..self.items.len())
            .find(|&i| !progress.outcomes[i].as_ref().is_some_and(|o| o.finished))
            .unwrap_or(self.items.len());
        let done: Vec<&ItemOutcome> = progress.outcomes.iter().flatten().collect();
        let best = done
            .iter()
            .map(|o| o.best)
            .chain(std::iter::once(self.resumed_best))
            .max()
            .unwrap_or(0);
        let mut witnesses: Vec<TriangleFamily> = self
            .resumed_witnesses
            .iter()
            .filter(|w| w.size() == best)
            .cloned()
            .collect();
        for o in &done {
            if let Some(f) = &o.found {
                witnesses.push(self.family(f));
            } else if o.best == best && self.prove_target().is_none() {
                witnesses.extend(o.witnesses.iter().map(|w| self.family(w)));
            }
        }
        let prefix = self
            .items
            .get(next)
            .map(|it| it.path.iter().map(|&(i, m)| (self.pool[i], m)).collect())
            .unwrap_or_default();
        Checkpoint {
            n: self.cfg.n,
            mode: self.cfg.mode,
            target: self.cfg.target,
            next,
            prefix,
            best,
            nodes: self.resumed_nodes + self.shared.nodes.load(Ordering::Relaxed),
            witnesses: dedup_canonical(witnesses),
        }
    }

    fn execute(&self) -> Result<Progress, SearchError> {
        let progress = Mutex::new(Progress {
            outcomes: vec![None; self.items.len()],
            last_write: Instant::now(),
        });
        let next_item = AtomicUsize::new(self.start_at);
        let write_error: Mutex<Option<CheckpointError>> = Mutex::new(None);
        let prove = self.prove_target();
        std::thread::scope(|scope| {
            for _ in 0..self.cfg.workers {
                scope.spawn(|| loop {
                    let id = next_item.fetch_add(1, Ordering::Relaxed);
                    if id >= self.items.len() || self.shared.stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let outcome = run_item(
                        &self.shared,
                        &self.pool,
                        self.cfg,
                        prove,
                        id,
                        &self.items[id],
                    );
                    let mut p = progress.lock().expect("progress lock");
                    p.outcomes[id] = Some(outcome);
                    if let Some(path) = &self.cfg.checkpoint_path {
                        if p.last_write.elapsed() >= self.cfg.checkpoint_interval {
                            if let Err(e) = self.snapshot(&p).store(path) {
                                *write_error.lock().expect("error lock") = Some(e);
                            }
                            p.last_write = Instant::now();
                        }
                    }
                });
            }
        });
        if let Some(e) = write_error.into_inner().expect("error lock") {
            return Err(e.into());
        }
        let progress = progress.into_inner().expect("progress lock");
        if let Some(path) = &self.cfg.checkpoint_path {
            self.snapshot(&progress).store(path)?;
        }
        Ok(progress)
    }
}

fn dedup_canonical(families: Vec<TriangleFamily>) -> Vec<TriangleFamily> {
    let mut by_code: BTreeMap<CanonicalCode, TriangleFamily> = BTreeMap::new();
    for f in families {
        let c = canonical_family(&f);
        by_code.entry(encode(&c)).or_insert(c);
    }
    by_code.into_values().collect()
}

fn verify(witnesses: &[TriangleFamily]) -> Result<(), SearchError> {
    for w in witnesses {
        if let Some(cert) = find_rainbow(w) {
            return Err(SearchError::UnsoundWitness(format!("{w}{cert}")));
        }
    }
    Ok(())
}

fn prepare(cfg: &SearchConfig) -> Result<Run<'_>, SearchError> {
    cfg.validate()?;
    let pool = colex_pool(cfg.n);
    let items = frontier(cfg.n, cfg.mode, &pool);
    let shared = Shared::new(cfg.node_limit);
    let mut run = Run {
        cfg,
        pool,
        items,
        shared,
        resumed_best: 0,
        resumed_nodes: 0,
        resumed_witnesses: Vec::new(),
        start_at: 0,
    };
    if let Some(ckpt) = &cfg.resume {
        if ckpt.n != cfg.n || ckpt.mode != cfg.mode || ckpt.target != cfg.target {
            return Err(CheckpointError::Mismatch(format!(
                "checkpoint is for n={} mode={} target={:?}",
                ckpt.n, ckpt.mode, ckpt.target
            ))
            .into());
        }
        if ckpt.next > run.items.len() {
            return Err(CheckpointError::Mismatch("work item out of range".into()).into());
        }
        if let Some(item) = run.items.get(ckpt.next) {
            let expected: Vec<(Triangle, u8)> =
                item.path.iter().map(|&(i, m)| (run.pool[i], m)).collect();
            if expected != ckpt.prefix {
                return Err(
                    CheckpointError::Mismatch("prefix does not match work item".into()).into(),
                );
            }
        }
        for w in &ckpt.witnesses {
            if w.n() != cfg.n || w.mode() != cfg.mode {
                return Err(CheckpointError::Mismatch("witness has wrong shape".into()).into());
            }
        }
        verify(&ckpt.witnesses)?;
        run.resumed_best = ckpt.best;
        run.resumed_nodes = ckpt.nodes;
        run.resumed_witnesses = ckpt.witnesses.clone();
        run.start_at = ckpt.next;
        run.shared.best.store(ckpt.best, Ordering::Relaxed);
        if let Target::ProveSize(k) = cfg.target {
            if ckpt.witnesses.iter().any(|w| w.size() >= k) {
                run.start_at = run.items.len();
            }
        }
    }
    Ok(run)
}

/// Exact maximum (or proof search, per `cfg.target`).
pub fn max_family(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let run = prepare(cfg)?;
    let progress = run.execute()?;
    let outcomes: Vec<&ItemOutcome> = progress.outcomes.iter().flatten().collect();
    let all_finished = (run.start_at..run.items.len())
        .all(|i| progress.outcomes[i].as_ref().is_some_and(|o| o.finished));
    let best_size = outcomes
        .iter()
        .map(|o| o.best)
        .chain(std::iter::once(run.resumed_best))
        .max()
        .unwrap_or(0);
    let nodes_explored = run.resumed_nodes + run.shared.nodes.load(Ordering::Relaxed);

    let result = match cfg.target {
        Target::ProveSize(k) => {
            let found = progress
                .outcomes
                .iter()
                .enumerate()
                .filter_map(|(i, o)| o.as_ref().and_then(|o| o.found.as_ref()).map(|f| (i, f)))
                .min_by_key(|(i, _)| *i)
                .map(|(_, f)| run.family(f))
                .or_else(|| {
                    run.resumed_witnesses
                        .iter()
                        .find(|w| w.size() >= k)
                        .cloned()
                });
            let witnesses = found
                .map(|f| vec![canonical_family(&f)])
                .unwrap_or_default();
            SearchResult {
                best_size: best_size.max(witnesses.first().map_or(0, |w| w.size())),
                completed: !witnesses.is_empty() || all_finished,
                witnesses,
                extremal_class_count: None,
                nodes_explored,
            }
        }
        Target::Maximize | Target::EnumerateExtremal => {
            let mut families: Vec<TriangleFamily> = run
                .resumed_witnesses
                .iter()
                .filter(|w| w.size() == best_size)
                .cloned()
                .collect();
            for o in outcomes.iter().filter(|o| o.best == best_size) {
                families.extend(o.witnesses.iter().map(|w| run.family(w)));
            }
            let witnesses = dedup_canonical(families);
            let completed = all_finished;
            SearchResult {
                best_size,
                extremal_class_count: (cfg.target == Target::EnumerateExtremal && completed)
                    .then_some(witnesses.len()),
                witnesses,
                nodes_explored,
                completed,
            }
        }
    };
    verify(&result.witnesses)?;
    Ok(result)
}

/// Decides whether a rainbow-free family of size at least `k` exists.
pub fn prove_size(
    cfg: &SearchConfig,
    k: usize,
) -> Result<(ProofOutcome, SearchResult), SearchError> {
    let cfg = SearchConfig {
        target: Target::ProveSize(k),
        ..cfg.clone()
    };
    let result = max_family(&cfg)?;
    let outcome = match result.witnesses.first() {
        Some(w) => ProofOutcome::Found(w.clone()),
        None if result.completed => ProofOutcome::Refuted,
        None => ProofOutcome::Undecided,
    };
    Ok((outcome, result))
}
