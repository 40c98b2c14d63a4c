//! IO accounting.
//!
//! One quantum QRAM read is one IO, one classical page access is one IO, and
//! each min-priority-queue operation costs `pq_op_cost(k)`. The [`IoPolicy`]
//! decides how many reads a Grover iteration or a post-selection is charged.

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Where a superposed QRAM load happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadContext {
    GroverIteration,
    PostSelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessKind {
    Read,
    Write,
}

/// Cost model for one priority-queue push or pop on a queue of capacity `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqCost {
    Log2K,
    Unit,
    Free,
}

impl PqCost {
    pub fn cost(self, k: usize) -> f64 {
        match self {
            PqCost::Log2K => (k.max(1) as f64).log2(),
            PqCost::Unit => 1.0,
            PqCost::Free => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IoPolicy {
    /// 1 counts only the compute read; 2 also counts the uncompute read.
    pub grover_reads_per_iteration: u32,
    pub count_postselect_read: bool,
    pub pq_cost: PqCost,
    pub tuples_per_page: usize,
}

impl Default for IoPolicy {
    fn default() -> Self {
        IoPolicy {
            grover_reads_per_iteration: 1,
            count_postselect_read: true,
            pq_cost: PqCost::Log2K,
            tuples_per_page: 1,
        }
    }
}

impl IoPolicy {
    pub fn quantum_cost(&self, ctx: LoadContext) -> u64 {
        match ctx {
            LoadContext::GroverIteration => u64::from(self.grover_reads_per_iteration),
            LoadContext::PostSelection => u64::from(self.count_postselect_read),
        }
    }

    /// Page accesses needed to touch `tuples` consecutive tuples.
    pub fn pages(&self, tuples: usize) -> u64 {
        tuples.div_ceil(self.tuples_per_page) as u64
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.grover_reads_per_iteration) {
            return Err(Error::InvalidPolicy(format!(
                "grover_reads must be 1 or 2, got {}",
                self.grover_reads_per_iteration
            )));
        }
        if self.tuples_per_page == 0 {
            return Err(Error::InvalidPolicy("page size must be positive".into()));
        }
        Ok(())
    }
}

/// Parses `default`, `uncompute`, or a comma list such as
/// `grover_reads=2,postselect=false,pq=unit,page=4`.
impl FromStr for IoPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut policy = IoPolicy::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "default" => continue,
                "uncompute" => {
                    policy.grover_reads_per_iteration = 2;
                    continue;
                }
                _ => {}
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidPolicy(format!("expected key=value, got `{part}`")))?;
            let bad = || Error::InvalidPolicy(format!("bad value for {key}: `{value}`"));
            match key.trim() {
                "grover_reads" => policy.grover_reads_per_iteration = value.trim().parse().map_err(|_| bad())?,
                "postselect" => policy.count_postselect_read = value.trim().parse().map_err(|_| bad())?,
                "pq" => {
                    policy.pq_cost = match value.trim() {
                        "log2" => PqCost::Log2K,
                        "unit" => PqCost::Unit,
                        "free" => PqCost::Free,
                        _ => return Err(bad()),
                    }
                }
                "page" => policy.tuples_per_page = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::InvalidPolicy(format!("unknown key `{other}`"))),
            }
        }
        policy.validate()?;
        Ok(policy)
    }
}

impl fmt::Display for IoPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pq = match self.pq_cost {
            PqCost::Log2K => "log2",
            PqCost::Unit => "unit",
            PqCost::Free => "free",
        };
        write!(
            f,
            "grover_reads={},postselect={},pq={},page={}",
            self.grover_reads_per_iteration, self.count_postselect_read, pq, self.tuples_per_page
        )
    }
}

/// Monotone IO counters for one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IoLedger {
    /// All charged QRAM reads, including post-selection reads.
    pub quantum_reads: u64,
    /// The post-selection share of `quantum_reads`.
    pub postselect_reads: u64,
    pub grover_iterations: u64,
    pub classical_reads: u64,
    pub classical_writes: u64,
    pub pq_ops: u64,
    pub pq_cost: f64,
}

impl IoLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_quantum_load(&mut self, policy: &IoPolicy, ctx: LoadContext) {
        let cost = policy.quantum_cost(ctx);
        self.quantum_reads += cost;
        match ctx {
            LoadContext::GroverIteration => self.grover_iterations += 1,
            LoadContext::PostSelection => self.postselect_reads += cost,
        }
    }

    pub fn record_classical_access(&mut self, kind: AccessKind, count: u64) {
        match kind {
            AccessKind::Read => self.classical_reads += count,
            AccessKind::Write => self.classical_writes += count,
        }
    }

    pub fn record_pq_op(&mut self, policy: &IoPolicy, capacity: usize) {
        self.pq_ops += 1;
        self.pq_cost += policy.pq_cost.cost(capacity);
    }

    pub fn merge(&mut self, other: &IoLedger) {
        *self += other;
    }

    pub fn quantum_ios(&self) -> u64 {
        self.quantum_reads
    }

    /// QRAM reads spent inside Grover iterations only.
    pub fn iteration_reads(&self) -> u64 {
        self.quantum_reads - self.postselect_reads
    }

    pub fn classical_ios(&self) -> u64 {
        self.classical_reads + self.classical_writes
    }

    pub fn pq_ios(&self) -> f64 {
        self.pq_cost
    }

    pub fn total_ios(&self) -> f64 {
        (self.quantum_ios() + self.classical_ios()) as f64 + self.pq_ios()
    }
}

impl AddAssign<&IoLedger> for IoLedger {
    fn add_assign(&mut self, o: &IoLedger) {
        self.quantum_reads += o.quantum_reads;
        self.postselect_reads += o.postselect_reads;
        self.grover_iterations += o.grover_iterations;
        self.classical_reads += o.classical_reads;
        self.classical_writes += o.classical_writes;
        self.pq_ops += o.pq_ops;
        self.pq_cost += o.pq_cost;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grover_and_postselect_costs() {
        let mut ledger = IoLedger::new();
        let default = IoPolicy::default();
        ledger.record_quantum_load(&default, LoadContext::GroverIteration);
        assert_eq!(ledger.quantum_reads, 1);
        let uncompute: IoPolicy = "uncompute".parse().unwrap();
        ledger.record_quantum_load(&uncompute, LoadContext::GroverIteration);
        assert_eq!(ledger.quantum_reads, 3);
        ledger.record_quantum_load(&default, LoadContext::PostSelection);
        assert_eq!(ledger.quantum_reads, 4);
        assert_eq!(ledger.postselect_reads, 1);
        assert_eq!(ledger.iteration_reads(), 3);
        let quiet: IoPolicy = "postselect=false".parse().unwrap();
        ledger.record_quantum_load(&quiet, LoadContext::PostSelection);
        assert_eq!(ledger.quantum_reads, 4);
    }

    #[test]
    fn classical_counts() {
        let mut ledger = IoLedger::new();
        ledger.record_classical_access(AccessKind::Read, 1);
        assert_eq!(ledger.classical_reads, 1);
        ledger.record_classical_access(AccessKind::Write, 0);
        assert_eq!(ledger, IoLedger { classical_reads: 1, ..IoLedger::default() });
    }

    #[test]
    fn pq_cost_models() {
        assert_eq!(PqCost::Log2K.cost(8), 3.0);
        assert_eq!(PqCost::Log2K.cost(1), 0.0);
        assert_eq!(PqCost::Unit.cost(8), 1.0);
        let mut ledger = IoLedger::new();
        ledger.record_pq_op(&IoPolicy::default(), 16);
        ledger.record_pq_op(&IoPolicy::default(), 16);
        assert_eq!((ledger.pq_ops, ledger.pq_cost), (2, 8.0));
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("default".parse::<IoPolicy>().unwrap(), IoPolicy::default());
        let p: IoPolicy = "grover_reads=2, postselect=false, pq=unit, page=4".parse().unwrap();
        assert_eq!(p.grover_reads_per_iteration, 2);
        assert!(!p.count_postselect_read);
        assert_eq!(p.pq_cost, PqCost::Unit);
        assert_eq!(p.pages(9), 3);
        assert_eq!(p.to_string().parse::<IoPolicy>().unwrap(), p);
        assert!("grover_reads=3".parse::<IoPolicy>().is_err());
        assert!("page=0".parse::<IoPolicy>().is_err());
        assert!("colour=blue".parse::<IoPolicy>().is_err());
        assert!("pq".parse::<IoPolicy>().is_err());
    }

    fn ledger_strategy() -> impl Strategy<Value = IoLedger> {
        (0u64..1000, 0u64..1000, 0u64..1000, 0u64..1000, 0u32..1000).prop_map(|(q, p, r, w, c)| IoLedger {
            quantum_reads: q + p,
            postselect_reads: p,
            grover_iterations: q,
            classical_reads: r,
            classical_writes: w,
            pq_ops: u64::from(c),
            // quarter steps keep float addition exact
            pq_cost: f64::from(c) * 0.25,
        })
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_associative(a in ledger_strategy(), b in ledger_strategy(), c in ledger_strategy()) {
            let mut ab = a.clone();
            ab.merge(&b);
            let mut ba = b.clone();
            ba.merge(&a);
            prop_assert_eq!(&ab, &ba);

            let mut ab_c = ab.clone();
            ab_c.merge(&c);
            let mut bc = b.clone();
            bc.merge(&c);
            let mut a_bc = a.clone();
            a_bc.merge(&bc);
            prop_assert_eq!(ab_c, a_bc);
        }
    }
}
