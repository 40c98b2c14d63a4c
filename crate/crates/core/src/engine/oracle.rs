use crate::dataset::UtilityFunction;
use crate::qram::Qram;

/// The good-state predicate over `(index, utility)`.
///
/// `at_least(θ)` is the plain `f(p) >= θ` test. `above(u, i)` admits tuples
/// whose `(utility, index)` pair is lexicographically greater than `(u, i)`;
/// top-k search uses it so that ties are broken by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    utility: u64,
    tie_index: Option<usize>,
}

impl Threshold {
    pub fn at_least(utility: u64) -> Self {
        Threshold {
            utility,
            tie_index: None,
        }
    }

    pub fn above(utility: u64, index: usize) -> Self {
        Threshold {
            utility,
            tie_index: Some(index),
        }
    }

    pub fn utility(&self) -> u64 {
        self.utility
    }

    pub fn admits(&self, index: usize, utility: u64) -> bool {
        match self.tie_index {
            None => utility >= self.utility,
            Some(t) => (utility, index) > (self.utility, t),
        }
    }
}

/// Cached utilities plus the index order sorted by descending `(utility, index)`.
///
/// Every [`Threshold`] admits a prefix of that order, so good sets can be
/// collected without touching the rest of the dataset. Built from the QRAM
/// cells once per query; dummy marks are checked live by the [`Oracle`].
#[derive(Debug, Clone)]
pub struct UtilityIndex {
    utilities: Vec<u64>,
    order: Vec<u32>,
}

impl UtilityIndex {
    pub fn build(qram: &Qram<'_>, f: &UtilityFunction) -> Self {
        let utilities: Vec<u64> = (0..qram.len()).map(|i| f.evaluate_unchecked(qram.attrs(i))).collect();
        Self::from_utilities(utilities)
    }

    pub fn from_utilities(utilities: Vec<u64>) -> Self {
        assert!(utilities.len() <= u32::MAX as usize);
        let mut order: Vec<u32> = (0..utilities.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| (utilities[b as usize], b).cmp(&(utilities[a as usize], a)));
        UtilityIndex { utilities, order }
    }

    pub fn utilities(&self) -> &[u64] {
        &self.utilities
    }

    pub fn utility(&self, i: usize) -> u64 {
        self.utilities[i]
    }

    /// Indices ranked best first.
    pub fn ranked(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&i| i as usize)
    }

    /// The `rank`-th best entry (1-based).
    pub fn nth_best(&self, rank: usize) -> Option<(usize, u64)> {
        let i = *self.order.get(rank.checked_sub(1)?)? as usize;
        Some((i, self.utilities[i]))
    }

    fn admitted<'s>(&'s self, threshold: &'s Threshold) -> impl Iterator<Item = usize> + 's {
        self.ranked().take_while(move |&i| threshold.admits(i, self.utilities[i]))
    }
}

/// Everything the quantum oracles `F`, `G_θ` and `O_θ` need to know.
#[derive(Debug, Clone, Copy)]
pub struct Oracle<'a> {
    pub qram: &'a Qram<'a>,
    pub f: &'a UtilityFunction,
    pub threshold: Threshold,
    /// Indices still in the searched subset `D'`; `None` means all of them.
    pub eligible: Option<&'a [bool]>,
    pub index: Option<&'a UtilityIndex>,
}

impl<'a> Oracle<'a> {
    pub fn new(qram: &'a Qram<'a>, f: &'a UtilityFunction, threshold: Threshold) -> Self {
        Oracle {
            qram,
            f,
            threshold,
            eligible: None,
            index: None,
        }
    }

    pub fn with_eligible(mut self, eligible: &'a [bool]) -> Self {
        self.eligible = Some(eligible);
        self
    }

    pub fn with_index(mut self, index: &'a UtilityIndex) -> Self {
        self.index = Some(index);
        self
    }

    /// Size of the index domain `N`.
    pub fn domain(&self) -> usize {
        self.qram.len()
    }

    pub fn is_eligible(&self, i: usize) -> bool {
        !self.qram.is_dummy(i) && self.eligible.is_none_or(|m| m[i])
    }

    pub fn utility(&self, i: usize) -> u64 {
        if self.qram.is_dummy(i) {
            return 0;
        }
        match self.index {
            Some(idx) => idx.utility(i),
            None => self.f.evaluate_unchecked(self.qram.attrs(i)),
        }
    }

    pub fn marks(&self, i: usize) -> bool {
        self.is_eligible(i) && self.threshold.admits(i, self.utility(i))
    }

    pub fn any_eligible(&self) -> bool {
        match self.eligible {
            Some(m) => m.iter().enumerate().any(|(i, &e)| e && !self.qram.is_dummy(i)),
            None => self.qram.dummy_count() < self.qram.len(),
        }
    }

    /// Sorted list of marked indices.
    pub fn good_set(&self) -> Vec<usize> {
        let mut good: Vec<usize> = match self.index {
            Some(idx) => idx.admitted(&self.threshold).filter(|&i| self.is_eligible(i)).collect(),
            None => (0..self.domain()).filter(|&i| self.marks(i)).collect(),
        };
        good.sort_unstable();
        good
    }
}
