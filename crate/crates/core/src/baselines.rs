//! Classical competitors, charged one IO per page access.

use rand::Rng;

use crate::dataset::{Dataset, UtilityFunction};
use crate::error::{Error, Result};
use crate::ledger::{AccessKind, IoLedger, IoPolicy};

/// Full scan returning every tuple with `f(p) >= θ`, in index order.
pub fn linear_scan(
    dataset: &Dataset,
    f: &UtilityFunction,
    theta: u64,
    ledger: &mut IoLedger,
    policy: &IoPolicy,
) -> Vec<(usize, u64)> {
    ledger.record_classical_access(AccessKind::Read, policy.pages(dataset.len()));
    dataset
        .iter()
        .enumerate()
        .map(|(i, t)| (i, f.evaluate_unchecked(t)))
        .filter(|&(_, u)| u >= theta)
        .collect()
}

/// Random-pivot quickselect for the top-`k` tuples under descending
/// `(utility, index)` order. Each partition pass charges the pages it
/// touches, pivot included. The result is sorted best first.
pub fn quick_select<R: Rng + ?Sized>(
    dataset: &Dataset,
    f: &UtilityFunction,
    k: usize,
    ledger: &mut IoLedger,
    policy: &IoPolicy,
    rng: &mut R,
) -> Result<Vec<(usize, u64)>> {
    let n = dataset.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    // keyed so that larger keys rank first
    let mut items: Vec<(u64, usize)> = dataset.iter().enumerate().map(|(i, t)| (f.evaluate_unchecked(t), i)).collect();
    let (mut lo, mut hi) = (0usize, n);
    // invariant: the k best lie in items[..hi] and items[..lo] are all among them
    while hi - lo > 1 {
        ledger.record_classical_access(AccessKind::Read, policy.pages(hi - lo));
        let p = rng.random_range(lo..hi);
        items.swap(p, hi - 1);
        let pivot = items[hi - 1];
        let mut store = lo;
        for i in lo..hi - 1 {
            if items[i] > pivot {
                items.swap(i, store);
                store += 1;
            }
        }
        items.swap(store, hi - 1);
        // items[lo..store] beat the pivot, items[store] is the pivot
        match (store + 1).cmp(&k) {
            std::cmp::Ordering::Equal => break,
            std::cmp::Ordering::Greater => hi = store,
            std::cmp::Ordering::Less => lo = store + 1,
        }
        if lo >= k || hi <= k {
            break;
        }
    }
    items.truncate(k);
    items.sort_unstable_by(|a, b| b.cmp(a));
    Ok(items.into_iter().map(|(u, i)| (i, u)).collect())
}
