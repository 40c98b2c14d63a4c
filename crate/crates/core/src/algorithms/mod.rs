//! The four quantum preference queries.
//!
//! * `qqpq_theta`: superposition of all tuples with `f(p) >= θ`, found by
//!   amplitude amplification inside an exponential-schedule loop for
//!   unknown `k` (`m ← 4m/3`, random iteration count `j ∈ {1..⌈m⌉}`).
//! * `cqpq_theta`: repeatedly measures that superposition and marks each
//!   measured tuple dummy until the search comes back empty.
//! * `cqpq_k`: keeps a min-priority queue of `k` candidates and swaps in
//!   anything found above the queue minimum.
//! * `qqpq_k`: learns the k-th best utility with `cqpq_k`, then returns the
//!   superposition over exactly those `k` tuples.
//!
//! A single empty answer from the loop can be a false negative (probability
//! at most 1/4), so the classical-output queries only stop after `retries`
//! consecutive empty answers.

mod pq;

use std::sync::Arc;

use rand::Rng;

use crate::dataset::{Dataset, UtilityFunction};
use crate::engine::{Backend, EngineState, Layout, Oracle, SuperpositionHandle, Threshold, UtilityIndex};
use crate::error::{Error, Result};
use crate::ledger::{IoLedger, IoPolicy};
use crate::qram::{CellValue, Qram};
use crate::rng::TrialRng;

pub use pq::MinPriorityQueue;

pub const DEFAULT_RETRIES: usize = 3;

/// Best-first list, search passes, queue entries.
type TopK = (Vec<(usize, u64)>, u64, Vec<usize>);

/// Growth factor of the iteration bound between passes.
const SCHEDULE_GROWTH: f64 = 4.0 / 3.0;

#[derive(Debug, Clone)]
pub enum QueryResult {
    Classical(Vec<(usize, u64)>),
    Quantum(SuperpositionHandle),
    Null,
}

impl QueryResult {
    pub fn is_null(&self) -> bool {
        matches!(self, QueryResult::Null)
    }

    pub fn classical(&self) -> Option<&[(usize, u64)]> {
        match self {
            QueryResult::Classical(v) => Some(v),
            _ => None,
        }
    }

    pub fn quantum(&self) -> Option<&SuperpositionHandle> {
        match self {
            QueryResult::Quantum(h) => Some(h),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub result: QueryResult,
    /// IO spent by this query alone.
    pub ledger: IoLedger,
    /// Passes of the search loop, summed over every threshold search.
    pub passes: u64,
    /// Every index that entered the priority queue, in order (top-k only).
    pub queue_entries: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOptions {
    pub backend: Backend,
    pub policy: IoPolicy,
    pub retries: usize,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            backend: Backend::Collapsed,
            policy: IoPolicy::default(),
            retries: DEFAULT_RETRIES,
        }
    }
}

/// One query executor: a QRAM over the dataset, a utility function, a
/// private ledger and random stream. Single-threaded by construction.
pub struct Session<'d> {
    qram: Qram<'d>,
    f: UtilityFunction,
    index: Arc<UtilityIndex>,
    ledger: IoLedger,
    options: QueryOptions,
    rng: TrialRng,
}

struct Search<'a> {
    qram: &'a Qram<'a>,
    f: &'a UtilityFunction,
    index: &'a UtilityIndex,
    backend: Backend,
    policy: &'a IoPolicy,
}

impl Search<'_> {
    /// The unknown-k search loop. Returns the handle (if any) and the
    /// number of passes made.
    fn run(
        &self,
        threshold: Threshold,
        eligible: Option<&[bool]>,
        ledger: &mut IoLedger,
        rng: &mut TrialRng,
    ) -> (Option<SuperpositionHandle>, u64) {
        let mut oracle = Oracle::new(self.qram, self.f, threshold).with_index(self.index);
        if let Some(mask) = eligible {
            oracle = oracle.with_eligible(mask);
        }
        if !oracle.any_eligible() {
            return (None, 0);
        }
        let good: Arc<[usize]> = oracle.good_set().into();
        let limit = (oracle.domain() as f64).sqrt();
        let mut m = 1.0f64;
        let mut passes = 0;
        while m <= limit {
            passes += 1;
            let j = rng.random_range(1..=m.ceil() as u64);
            let mut state =
                EngineState::init_with_good(self.backend, &oracle, good.clone()).expect("eligible set checked above");
            for _ in 0..j {
                state.grover_iteration(&oracle, ledger, self.policy);
            }
            if let Some(h) = state.post_select(&oracle, ledger, self.policy, rng) {
                return (Some(h), passes);
            }
            m *= SCHEDULE_GROWTH;
        }
        (None, passes)
    }
}

impl<'d> Session<'d> {
    pub fn new(dataset: &'d Dataset, f: UtilityFunction, options: QueryOptions, rng: TrialRng) -> Result<Self> {
        let qram = Qram::new(dataset);
        check_dims(dataset, &f)?;
        let index = Arc::new(UtilityIndex::build(&qram, &f));
        Self::assemble(qram, f, index, options, rng)
    }

    /// Reuses a utility index built for the same dataset and function.
    pub fn with_index(
        dataset: &'d Dataset,
        f: UtilityFunction,
        index: Arc<UtilityIndex>,
        options: QueryOptions,
        rng: TrialRng,
    ) -> Result<Self> {
        check_dims(dataset, &f)?;
        if index.utilities().len() != dataset.len() {
            return Err(Error::Config("utility index does not match dataset".into()));
        }
        Self::assemble(Qram::new(dataset), f, index, options, rng)
    }

    fn assemble(
        qram: Qram<'d>,
        f: UtilityFunction,
        index: Arc<UtilityIndex>,
        options: QueryOptions,
        rng: TrialRng,
    ) -> Result<Self> {
        options.policy.validate()?;
        if options.retries == 0 {
            return Err(Error::Config("retries must be at least 1".into()));
        }
        if options.backend == Backend::Gate {
            let ds = qram.dataset();
            Layout::new(qram.len(), ds.dims(), ds.attr_bits(), f.utility_bits())?;
        }
        Ok(Session {
            qram,
            f,
            index,
            ledger: IoLedger::new(),
            options,
            rng,
        })
    }

    pub fn qram(&self) -> &Qram<'d> {
        &self.qram
    }

    pub fn utility_function(&self) -> &UtilityFunction {
        &self.f
    }

    pub fn utility_index(&self) -> &UtilityIndex {
        &self.index
    }

    /// Everything charged to this session so far.
    pub fn ledger(&self) -> &IoLedger {
        &self.ledger
    }

    pub fn options(&self) -> &QueryOptions {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.qram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qram.is_empty()
    }

    /// Stores into the QRAM. A tuple store refreshes the cached utilities.
    pub fn store(&mut self, addr: usize, value: CellValue) -> Result<()> {
        let refresh = matches!(value, CellValue::Tuple(_));
        self.qram.store(addr, value, &mut self.ledger)?;
        if refresh {
            self.index = Arc::new(UtilityIndex::build(&self.qram, &self.f));
        }
        Ok(())
    }

    fn finish(&mut self, result: QueryResult, ledger: IoLedger, passes: u64, queue_entries: Vec<usize>) -> QueryOutcome {
        self.ledger.merge(&ledger);
        QueryOutcome {
            result,
            ledger,
            passes,
            queue_entries,
        }
    }

    fn search(&mut self, threshold: Threshold, eligible: Option<&[bool]>, ledger: &mut IoLedger) -> (Option<SuperpositionHandle>, u64) {
        let search = Search {
            qram: &self.qram,
            f: &self.f,
            index: &self.index,
            backend: self.options.backend,
            policy: &self.options.policy,
        };
        search.run(threshold, eligible, ledger, &mut self.rng)
    }

    /// Quantum output, threshold input.
    pub fn qqpq_theta(&mut self, theta: u64) -> QueryOutcome {
        let mut ledger = IoLedger::new();
        let (handle, passes) = self.search(Threshold::at_least(theta), None, &mut ledger);
        let result = handle.map_or(QueryResult::Null, QueryResult::Quantum);
        self.finish(result, ledger, passes, Vec::new())
    }

    /// Classical output, threshold input. Dummy marks are rolled back before
    /// returning.
    pub fn cqpq_theta(&mut self, theta: u64) -> QueryOutcome {
        let mut ledger = IoLedger::new();
        let mut found = Vec::new();
        let mut passes = 0;
        let mut nulls = 0;
        while nulls < self.options.retries {
            let (handle, p) = self.search(Threshold::at_least(theta), None, &mut ledger);
            passes += p;
            match handle {
                Some(h) => {
                    let (i, u) = h.measure(&mut self.rng).expect("post-selected handles are non-empty");
                    self.qram
                        .store(i, CellValue::Dummy, &mut ledger)
                        .expect("measured index is in range");
                    found.push((i, u));
                    nulls = 0;
                }
                None => nulls += 1,
            }
        }
        for &(i, _) in &found {
            self.qram.unmark_dummy(i);
        }
        self.finish(QueryResult::Classical(found), ledger, passes, Vec::new())
    }

    /// Classical output, top-k input. The result is sorted best first.
    pub fn cqpq_k(&mut self, k: usize) -> Result<QueryOutcome> {
        let mut ledger = IoLedger::new();
        let (top, passes, entries) = self.top_k(k, &mut ledger)?;
        Ok(self.finish(QueryResult::Classical(top), ledger, passes, entries))
    }

    fn top_k(&mut self, k: usize, ledger: &mut IoLedger) -> Result<TopK> {
        let n = self.qram.len();
        if k == 0 || k > n {
            return Err(Error::InvalidK { k, n });
        }
        let policy = self.options.policy;
        let mut queue = MinPriorityQueue::new(k);
        let mut remaining = vec![true; n];
        let mut entries = Vec::with_capacity(k * 4);
        for i in rand::seq::index::sample(&mut self.rng, n, k) {
            remaining[i] = false;
            queue.push(i, self.index.utility(i), ledger, &policy)?;
            entries.push(i);
        }
        let mut passes = 0;
        let mut nulls = 0;
        while nulls < self.options.retries {
            let (worst, worst_u) = queue.min().expect("queue holds k >= 1 entries");
            let (handle, p) = self.search(Threshold::above(worst_u, worst), Some(&remaining), ledger);
            passes += p;
            match handle {
                Some(h) => {
                    let (i, u) = h.measure(&mut self.rng).expect("post-selected handles are non-empty");
                    remaining[i] = false;
                    queue.pop_min(ledger, &policy);
                    queue.push(i, u, ledger, &policy)?;
                    entries.push(i);
                    nulls = 0;
                }
                None => nulls += 1,
            }
        }
        Ok((queue.into_sorted_desc(), passes, entries))
    }

    /// Quantum output, top-k input.
    ///
    /// The threshold is the smallest utility in the classical top-k list, and
    /// the oracle is restricted to that list so equal-utility tuples outside
    /// it are not admitted.
    pub fn qqpq_k(&mut self, k: usize) -> Result<QueryOutcome> {
        let mut ledger = IoLedger::new();
        let (top, mut passes, entries) = self.top_k(k, &mut ledger)?;
        let theta = top.iter().map(|e| e.1).min().expect("k >= 1");
        let mut members = vec![false; self.qram.len()];
        top.iter().for_each(|&(i, _)| members[i] = true);
        let mut result = QueryResult::Null;
        for _ in 0..self.options.retries {
            let (handle, p) = self.search(Threshold::at_least(theta), Some(&members), &mut ledger);
            passes += p;
            if let Some(h) = handle {
                result = QueryResult::Quantum(h);
                break;
            }
        }
        Ok(self.finish(result, ledger, passes, entries))
    }
}

fn check_dims(dataset: &Dataset, f: &UtilityFunction) -> Result<()> {
    if dataset.dims() != f.dims() {
        return Err(Error::DimensionMismatch {
            expected: dataset.dims(),
            got: f.dims(),
        });
    }
    Ok(())
}

/// Probability that the rank-`i` tuple (1 = best) ever enters the queue
/// during a top-`k` search over `n` tuples: 1 for `i <= k`, else `k / i`.
pub fn lemma1_probability(rank: usize, k: usize, n: usize) -> Result<f64> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, n });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(if rank <= k { 1.0 } else { k as f64 / rank as f64 })
}
