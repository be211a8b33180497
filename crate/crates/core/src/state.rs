//! The live configuration: per-bin loads plus the derived structures that
//! make every step O(log n).
//!
//! # Structures maintained incrementally
//!
//! | structure        | purpose                                        | cost per ±1 |
//! |------------------|------------------------------------------------|-------------|
//! | `loads`          | the load vector x, by bin id                   | O(1)        |
//! | `hist`           | load value → #bins, ordered (min/max = ends)   | O(log n)    |
//! | `nonempty`       | swap-remove array of non-empty bin ids         | O(1)        |
//! | `tree`           | Fenwick prefix sums over loads (weighted pick) | O(log n)    |
//!
//! The histogram is keyed by load *value* rather than indexed by it, so memory
//! is O(#distinct loads) no matter how large individual loads grow.
//!
//! # Invariants
//!
//! - `total_load == Σ loads[i]` at all times;
//! - `max_total_load >= total_load`, non-decreasing over a run;
//! - `nonempty` holds exactly the ids with positive load;
//! - histogram counts sum to `n` and weighted-sum to `total_load`.
//!
//! [`BinState::check_coherence`] rebuilds every derived structure from the raw
//! loads and verifies exact integer equality; the test suites run it after
//! long trajectories.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rng::RngState;

/// A derived structure diverged from the raw load vector.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoherenceError {
    #[error("total_load is {stored} but loads sum to {actual}")]
    TotalLoad { stored: u64, actual: u64 },
    #[error("max_total_load {max_total} is below current total_load {total}")]
    Watermark { max_total: u64, total: u64 },
    #[error("histogram mismatch at load {load}: stored {stored}, actual {actual}")]
    Histogram { load: u64, stored: u64, actual: u64 },
    #[error("non-empty index mismatch: stored {stored} ids, actual {actual}")]
    NonEmpty { stored: usize, actual: usize },
    #[error("non-empty index position map corrupt for bin {bin}")]
    NonEmptyPosition { bin: u32 },
    #[error("prefix tree mismatch at index {index}: stored prefix {stored}, actual {actual}")]
    PrefixTree { index: usize, stored: u64, actual: u64 },
}

// ---------------------------------------------------------------------------
// Fenwick prefix-sum tree
// ---------------------------------------------------------------------------

/// Fenwick (binary indexed) tree over non-negative integer weights, used as
/// the logarithmic-time structure for sampling a bin with probability
/// proportional to its load.
///
/// Positions are 0-based externally. All arithmetic is exact (u64), so
/// weighted sampling has no floating-point bias: a uniform integer below the
/// total selects a ball, and [`PrefixTree::find`] locates its bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTree {
    /// 1-based implicit binary indexed tree; `tree[0]` unused.
    tree: Vec<u64>,
    n: usize,
}

impl PrefixTree {
    /// Tree over `n` zero weights.
    #[must_use]
    pub fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
            n,
        }
    }

    /// Tree initialized to `weights` in O(n).
    #[must_use]
    pub fn from_weights(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Self { tree, n }
    }

    /// Number of positions.
    #[must_use]
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the tree has no positions.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Adds `delta` to the weight at `pos`.
    pub fn add(&mut self, pos: usize, delta: u64) {
        let mut i = pos + 1;
        while i <= self.n {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Subtracts `delta` from the weight at `pos`.
    ///
    /// # Panics
    /// In debug builds, if a node underflows (weight went negative).
    pub fn sub(&mut self, pos: usize, delta: u64) {
        let mut i = pos + 1;
        while i <= self.n {
            debug_assert!(self.tree[i] >= delta, "prefix tree underflow");
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of the first `count` weights (`count` in `0..=n`).
    #[must_use]
    pub fn prefix(&self, count: usize) -> u64 {
        debug_assert!(count <= self.n);
        let mut sum = 0;
        let mut i = count;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    /// Sum of all weights.
    #[must_use]
    pub fn total(&self) -> u64 {
        self.prefix(self.n)
    }

    /// Smallest position `p` with `prefix(p + 1) > target`, i.e. the position
    /// owning offset `target` when the weights are laid out contiguously.
    ///
    /// Requires `target < total()`.
    #[must_use]
    pub fn find(&self, mut target: u64) -> usize {
        debug_assert!(target < self.total(), "find target out of range");
        let mut pos = 0usize;
        let mut step = self.n.next_power_of_two();
        // `next_power_of_two` may exceed n; the bounds check below handles it.
        while step != 0 {
            let next = pos + step;
            if next <= self.n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

// ---------------------------------------------------------------------------
// Non-empty bin index
// ---------------------------------------------------------------------------

/// Swap-remove array of non-empty bin ids with a position map: O(1) uniform
/// sampling, O(1) insert, O(1) remove.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NonEmptyIndex {
    ids: Vec<u32>,
    /// bin id → index into `ids`; `u32::MAX` when absent.
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl NonEmptyIndex {
    fn new(n: usize) -> Self {
        Self {
            ids: Vec::with_capacity(n),
            pos: vec![ABSENT; n],
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    fn insert(&mut self, bin: u32) {
        debug_assert_eq!(self.pos[bin as usize], ABSENT);
        self.pos[bin as usize] = self.ids.len() as u32;
        self.ids.push(bin);
    }

    fn remove(&mut self, bin: u32) {
        let at = self.pos[bin as usize];
        debug_assert_ne!(at, ABSENT);
        let last = *self.ids.last().expect("remove from empty index");
        self.ids[at as usize] = last;
        self.pos[last as usize] = at;
        self.ids.pop();
        self.pos[bin as usize] = ABSENT;
    }

    fn contains(&self, bin: u32) -> bool {
        self.pos[bin as usize] != ABSENT
    }
}

// ---------------------------------------------------------------------------
// BinState
// ---------------------------------------------------------------------------

/// The live configuration of the process: loads by bin id plus derived
/// histograms, totals and running maxima.
///
/// Single-writer: exactly one logical thread mutates a `BinState`. Values are
/// `Send`, so states (and their RNGs) can be moved between replica threads;
/// replicas never share one mutably.
#[derive(Debug, Clone)]
pub struct BinState {
    n: usize,
    loads: Vec<u64>,
    total_load: u64,
    max_total_load: u64,
    nonempty: NonEmptyIndex,
    hist: BTreeMap<u64, u64>,
    tree: PrefixTree,
}

impl BinState {
    /// Empty configuration with `n` bins.
    ///
    /// # Panics
    /// If `n == 0` or `n` does not fit in `u32`.
    #[must_use]
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one bin");
        assert!(u32::try_from(n).is_ok(), "bin count must fit in u32");
        let mut hist = BTreeMap::new();
        hist.insert(0u64, n as u64);
        Self {
            n,
            loads: vec![0; n],
            total_load: 0,
            max_total_load: 0,
            nonempty: NonEmptyIndex::new(n),
            hist,
            tree: PrefixTree::new(n),
        }
    }

    /// Configuration with the given loads; the total-load watermark starts at
    /// the current total.
    ///
    /// # Panics
    /// If `loads` is empty or longer than `u32::MAX`.
    #[must_use]
    pub fn from_loads(loads: &[u64]) -> Self {
        let mut s = Self::new(loads.len());
        for (i, &v) in loads.iter().enumerate() {
            if v > 0 {
                s.loads[i] = v;
                s.nonempty.insert(i as u32);
            }
        }
        s.tree = PrefixTree::from_weights(loads);
        s.hist.clear();
        for &v in loads {
            *s.hist.entry(v).or_insert(0) += 1;
        }
        s.total_load = loads.iter().sum();
        s.max_total_load = s.total_load;
        s
    }

    /// Number of bins.
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// The load vector, indexed by bin id.
    #[must_use]
    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    /// Load of one bin.
    #[must_use]
    pub fn load(&self, bin: usize) -> u64 {
        self.loads[bin]
    }

    /// Current number of balls, m(t).
    #[must_use]
    pub fn total_load(&self) -> u64 {
        self.total_load
    }

    /// Highest total ever observed, m_max(t). Non-decreasing.
    #[must_use]
    pub fn max_total_load(&self) -> u64 {
        self.max_total_load
    }

    /// Current average load m(t)/n.
    #[must_use]
    pub fn average(&self) -> f64 {
        self.total_load as f64 / self.n as f64
    }

    /// Number of non-empty bins, n̂(t).
    #[must_use]
    pub fn nonempty_count(&self) -> usize {
        self.nonempty.len()
    }

    /// Smallest current load.
    #[must_use]
    pub fn min_load(&self) -> u64 {
        *self.hist.keys().next().expect("histogram never empty")
    }

    /// Largest current load.
    #[must_use]
    pub fn max_load(&self) -> u64 {
        *self.hist.keys().next_back().expect("histogram never empty")
    }

    /// Load value → number of bins with exactly that load. Counts sum to `n`.
    #[must_use]
    pub fn histogram(&self) -> &BTreeMap<u64, u64> {
        &self.hist
    }

    /// Adds one ball to `bin`, updating every derived structure and the
    /// total-load watermark.
    ///
    /// Deterministic state surgery: this is the primitive behind the random
    /// operations and is public so harnesses and couplings can direct balls
    /// at specific bins (e.g. reverting an insertion, or rank-directed
    /// coupled updates).
    pub fn force_insert(&mut self, bin: usize) {
        let old = self.loads[bin];
        self.loads[bin] = old + 1;
        self.hist_dec(old);
        *self.hist.entry(old + 1).or_insert(0) += 1;
        if old == 0 {
            self.nonempty.insert(bin as u32);
        }
        self.tree.add(bin, 1);
        self.total_load += 1;
        self.max_total_load = self.max_total_load.max(self.total_load);
    }

    /// Removes one ball from `bin`, updating every derived structure.
    ///
    /// # Panics
    /// If `bin` is empty — callers choose deletion targets among non-empty
    /// bins by construction.
    pub fn force_delete(&mut self, bin: usize) {
        let old = self.loads[bin];
        assert!(old > 0, "force_delete on empty bin {bin}");
        self.loads[bin] = old - 1;
        self.hist_dec(old);
        *self.hist.entry(old - 1).or_insert(0) += 1;
        if old == 1 {
            self.nonempty.remove(bin as u32);
        }
        self.tree.sub(bin, 1);
        self.total_load -= 1;
    }

    fn hist_dec(&mut self, load: u64) {
        let c = self.hist.get_mut(&load).expect("histogram count present");
        *c -= 1;
        if *c == 0 {
            self.hist.remove(&load);
        }
    }

    /// A uniformly random non-empty bin, or `None` on an empty system. O(1).
    pub fn sample_nonempty_uniform(&self, rng: &mut RngState) -> Option<usize> {
        if self.nonempty.len() == 0 {
            return None;
        }
        let k = rng.below(self.nonempty.len() as u64) as usize;
        Some(self.nonempty.ids[k] as usize)
    }

    /// A bin chosen with probability `loads[i] / total_load` (the bin of a
    /// uniformly random ball), or `None` on an empty system. O(log n), exact
    /// integer arithmetic.
    pub fn sample_ball_weighted(&self, rng: &mut RngState) -> Option<usize> {
        if self.total_load == 0 {
            return None;
        }
        let j = rng.below(self.total_load);
        Some(self.tree.find(j))
    }

    /// Rebuilds every derived structure from the raw loads and verifies exact
    /// integer equality with the incrementally maintained versions.
    pub fn check_coherence(&self) -> Result<(), CoherenceError> {
        let actual_total: u64 = self.loads.iter().sum();
        if self.total_load != actual_total {
            return Err(CoherenceError::TotalLoad {
                stored: self.total_load,
                actual: actual_total,
            });
        }
        if self.max_total_load < self.total_load {
            return Err(CoherenceError::Watermark {
                max_total: self.max_total_load,
                total: self.total_load,
            });
        }
        let mut fresh: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in &self.loads {
            *fresh.entry(v).or_insert(0) += 1;
        }
        for (&load, &count) in fresh.iter().chain(self.hist.iter()) {
            let stored = self.hist.get(&load).copied().unwrap_or(0);
            let actual = fresh.get(&load).copied().unwrap_or(0);
            if stored != actual {
                return Err(CoherenceError::Histogram {
                    load,
                    stored,
                    actual,
                });
            }
            let _ = count;
        }
        let actual_nonempty = self.loads.iter().filter(|&&v| v > 0).count();
        if self.nonempty.len() != actual_nonempty {
            return Err(CoherenceError::NonEmpty {
                stored: self.nonempty.len(),
                actual: actual_nonempty,
            });
        }
        for (i, &v) in self.loads.iter().enumerate() {
            let bin = i as u32;
            let listed = self.nonempty.contains(bin);
            if listed != (v > 0)
                || (listed && self.nonempty.ids[self.nonempty.pos[i] as usize] != bin)
            {
                return Err(CoherenceError::NonEmptyPosition { bin });
            }
        }
        let mut running = 0u64;
        for i in 0..self.n {
            running += self.loads[i];
            let stored = self.tree.prefix(i + 1);
            if stored != running {
                return Err(CoherenceError::PrefixTree {
                    index: i,
                    stored,
                    actual: running,
                });
            }
        }
        Ok(())
    }
}
