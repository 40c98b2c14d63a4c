use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::ledger::{IoLedger, IoPolicy};

/// Capacity-bounded min-priority queue of `(index, utility)` entries.
///
/// Entries are ordered by `(utility, index)`; `min` is the smallest pair.
/// Every push and pop is charged `pq_cost(k)` in the ledger.
#[derive(Debug, Clone)]
pub struct MinPriorityQueue {
    heap: BinaryHeap<Reverse<(u64, usize)>>,
    capacity: usize,
}

impl MinPriorityQueue {
    pub fn new(capacity: usize) -> Self {
        MinPriorityQueue {
            heap: BinaryHeap::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn min(&self) -> Option<(usize, u64)> {
        self.heap.peek().map(|Reverse((u, i))| (*i, *u))
    }

    pub fn push(&mut self, index: usize, utility: u64, ledger: &mut IoLedger, policy: &IoPolicy) -> Result<()> {
        if self.heap.len() >= self.capacity {
            return Err(Error::QueueFull(self.capacity));
        }
        ledger.record_pq_op(policy, self.capacity);
        self.heap.push(Reverse((utility, index)));
        Ok(())
    }

    pub fn pop_min(&mut self, ledger: &mut IoLedger, policy: &IoPolicy) -> Option<(usize, u64)> {
        let Reverse((u, i)) = self.heap.pop()?;
        ledger.record_pq_op(policy, self.capacity);
        Some((i, u))
    }

    /// Contents, best first.
    pub fn into_sorted_desc(self) -> Vec<(usize, u64)> {
        // into_sorted_vec is ascending in Reverse order, i.e. descending pairs
        self.heap.into_sorted_vec().into_iter().map(|Reverse((u, i))| (i, u)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn min_uses_index_tie_break() {
        let mut ledger = IoLedger::new();
        let p = IoPolicy::default();
        let mut q = MinPriorityQueue::new(4);
        q.push(7, 5, &mut ledger, &p).unwrap();
        q.push(2, 5, &mut ledger, &p).unwrap();
        q.push(1, 9, &mut ledger, &p).unwrap();
        assert_eq!(q.min(), Some((2, 5)));
        assert_eq!(q.pop_min(&mut ledger, &p), Some((2, 5)));
        assert_eq!(q.min(), Some((7, 5)));
        assert_eq!(ledger.pq_ops, 4);
        assert_eq!(ledger.pq_cost, 8.0);
        assert_eq!(q.into_sorted_desc(), vec![(1, 9), (7, 5)]);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut ledger = IoLedger::new();
        let p = IoPolicy::default();
        let mut q = MinPriorityQueue::new(1);
        q.push(0, 1, &mut ledger, &p).unwrap();
        assert!(matches!(q.push(1, 2, &mut ledger, &p), Err(Error::QueueFull(1))));
        assert_eq!(ledger.pq_ops, 1);
    }

    proptest! {
        #[test]
        fn keeps_the_k_largest(values in proptest::collection::vec(0u64..50, 1..60), k in 1usize..8) {
            let mut ledger = IoLedger::new();
            let p = IoPolicy::default();
            let mut q = MinPriorityQueue::new(k);
            for (i, &u) in values.iter().enumerate() {
                if q.len() < k {
                    q.push(i, u, &mut ledger, &p).unwrap();
                } else if (u, i) > q.min().map(|(mi, mu)| (mu, mi)).unwrap() {
                    q.pop_min(&mut ledger, &p);
                    q.push(i, u, &mut ledger, &p).unwrap();
                }
                prop_assert!(q.len() <= k);
            }
            let mut all: Vec<(u64, usize)> = values.iter().enumerate().map(|(i, &u)| (u, i)).collect();
            all.sort_unstable_by(|a, b| b.cmp(a));
            let expected: Vec<(usize, u64)> = all.into_iter().take(k).map(|(u, i)| (i, u)).collect();
            prop_assert_eq!(q.into_sorted_desc(), expected);
        }
    }
}
