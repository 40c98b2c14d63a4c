//! Amplitude amplification and post-selection.
//!
//! Three interchangeable backends evolve the same state:
//!
//! * `Collapsed` keeps only the iteration count and evaluates the closed form
//!   `sin((2s+1)t)|θ+⟩ + cos((2s+1)t)|θ−⟩`, `t = arcsin √(k/N)`. This is exact
//!   because every operator in the search preserves class uniformity: all
//!   good indices share one amplitude and so do all bad ones.
//! * `Dense` stores one real amplitude per index and applies the phase flip
//!   and the inversion about the mean literally.
//! * `Gate` simulates the full circuit over index, attribute, utility and
//!   auxiliary registers (tiny instances only).
//!
//! Indices that are dummies or were removed from the searched subset stay in
//! the superposition as bad states. Finding the good set is an `O(N)`
//! classical pass that is not charged as IO; only QRAM reads are.

mod gate;
mod handle;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ledger::{IoLedger, IoPolicy, LoadContext};

pub use gate::{GateState, Layout, MAX_QUBITS};
pub use handle::SuperpositionHandle;
pub use oracle::{Oracle, Threshold, UtilityIndex};

/// Probabilities within this distance of 0 or 1 are snapped, so a certain
/// outcome is not lost to rounding in `sin²`.
const CERTAINTY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Collapsed,
    Dense,
    Gate,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Collapsed => "collapsed",
            Backend::Dense => "dense",
            Backend::Gate => "gate",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "collapsed" => Ok(Backend::Collapsed),
            "dense" => Ok(Backend::Dense),
            "gate" => Ok(Backend::Gate),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Collapsed,
    Dense(Vec<f64>),
    Gate(Box<GateState>),
}

/// Simulated register state for one amplitude-amplification run.
#[derive(Debug, Clone)]
pub struct EngineState {
    domain: usize,
    good: Arc<[usize]>,
    angle: f64,
    iterations: u64,
    repr: Repr,
}

impl EngineState {
    /// Uniform superposition over all `N` indices (step 1: Hadamards).
    pub fn init_uniform(backend: Backend, oracle: &Oracle<'_>) -> Result<Self> {
        let good: Arc<[usize]> = oracle.good_set().into();
        Self::init_with_good(backend, oracle, good)
    }

    /// As [`init_uniform`](Self::init_uniform) with a precomputed good set.
    pub fn init_with_good(backend: Backend, oracle: &Oracle<'_>, good: Arc<[usize]>) -> Result<Self> {
        if !oracle.any_eligible() {
            return Err(Error::EmptyActiveSet);
        }
        let domain = oracle.domain();
        let angle = (good.len() as f64 / domain as f64).sqrt().asin();
        let repr = match backend {
            Backend::Collapsed => Repr::Collapsed,
            Backend::Dense => Repr::Dense(vec![1.0 / (domain as f64).sqrt(); domain]),
            Backend::Gate => {
                let ds = oracle.qram.dataset();
                let layout = Layout::new(domain, ds.dims(), ds.attr_bits(), oracle.f.utility_bits())?;
                let mut g = GateState::new(layout);
                g.apply_state_prep();
                Repr::Gate(Box::new(g))
            }
        };
        Ok(EngineState {
            domain,
            good,
            angle,
            iterations: 0,
            repr,
        })
    }

    pub fn backend(&self) -> Backend {
        match self.repr {
            Repr::Collapsed => Backend::Collapsed,
            Repr::Dense(_) => Backend::Dense,
            Repr::Gate(_) => Backend::Gate,
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn good_set(&self) -> &[usize] {
        &self.good
    }

    /// `t = arcsin √(k/N)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// One Grover iteration: `Q`, `F`, `G_θ`, uncompute, then `H R H`.
    pub fn grover_iteration(&mut self, oracle: &Oracle<'_>, ledger: &mut IoLedger, policy: &IoPolicy) {
        ledger.record_quantum_load(policy, LoadContext::GroverIteration);
        self.iterations += 1;
        match &mut self.repr {
            Repr::Collapsed => {}
            Repr::Dense(amps) => {
                for &i in self.good.iter() {
                    amps[i] = -amps[i];
                }
                let mean = amps.iter().sum::<f64>() / amps.len() as f64;
                amps.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
            }
            Repr::Gate(g) => {
                let marked = |i: usize, u: u64| i < oracle.domain() && oracle.is_eligible(i) && oracle.threshold.admits(i, u);
                g.apply_qram_unitary(oracle.qram);
                g.apply_utility_oracle(oracle.f);
                g.apply_phase_oracle(marked);
                g.apply_utility_oracle(oracle.f);
                g.apply_qram_unitary(oracle.qram);
                g.apply_diffusion();
            }
        }
    }

    /// Closed-form good amplitude `sin((2s+1)t)`.
    pub fn closed_form_amplitude(&self) -> f64 {
        ((2 * self.iterations + 1) as f64 * self.angle).sin()
    }

    /// Signed amplitude of the normalized good component, `α`.
    ///
    /// For the dense and gate backends this is read from the state itself.
    pub fn good_amplitude(&self) -> f64 {
        match &self.repr {
            Repr::Collapsed => self.closed_form_amplitude(),
            Repr::Dense(amps) => {
                let k = self.good.len();
                if k == 0 {
                    return 0.0;
                }
                amps[self.good[0]] * (k as f64).sqrt()
            }
            Repr::Gate(g) => {
                let p = self.good_probability();
                // sign from any good index's amplitude on the cleared work registers
                let sign = self
                    .good
                    .first()
                    .map(|&i| g.amplitudes()[i << (g.layout().total_qubits() - g.layout().index_bits)].re)
                    .map_or(1.0, |a| if a < 0.0 { -1.0 } else { 1.0 });
                sign * p.sqrt()
            }
        }
    }

    /// Probability that measuring now lands in the good set, `α²`.
    pub fn good_probability(&self) -> f64 {
        match &self.repr {
            Repr::Collapsed => self.closed_form_amplitude().powi(2),
            Repr::Dense(amps) => self.good.iter().map(|&i| amps[i] * amps[i]).sum(),
            Repr::Gate(g) => {
                let p = g.index_probabilities();
                self.good.iter().map(|&i| p[i]).sum()
            }
        }
    }

    /// Measurement distribution of the index register.
    pub fn index_probabilities(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Collapsed => {
                let k = self.good.len();
                let alpha2 = self.closed_form_amplitude().powi(2);
                let bad = if self.domain > k {
                    (1.0 - alpha2) / (self.domain - k) as f64
                } else {
                    0.0
                };
                let mut p = vec![bad; self.domain];
                for &i in self.good.iter() {
                    p[i] = alpha2 / k as f64;
                }
                p
            }
            Repr::Dense(amps) => amps.iter().map(|a| a * a).collect(),
            Repr::Gate(g) => g.index_probabilities(),
        }
    }

    /// Samples an index as if the register were measured (without collapse).
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.repr {
            Repr::Collapsed => {
                let k = self.good.len();
                if k > 0 && rng.random::<f64>() < self.good_probability() {
                    return self.good[rng.random_range(0..k)];
                }
                if k == self.domain {
                    return self.good[rng.random_range(0..k)];
                }
                loop {
                    let i = rng.random_range(0..self.domain);
                    if self.good.binary_search(&i).is_err() {
                        return i;
                    }
                }
            }
            _ => {
                let p = self.index_probabilities();
                let mut r = rng.random::<f64>();
                for (i, pi) in p.iter().enumerate() {
                    if r < *pi {
                        return i;
                    }
                    r -= pi;
                }
                p.len() - 1
            }
        }
    }

    /// Maximum within-class spread of dense amplitudes `(good, bad)`.
    pub fn class_spread(&self) -> Option<(f64, f64)> {
        let Repr::Dense(amps) = &self.repr else { return None };
        let mut in_good = vec![false; amps.len()];
        self.good.iter().for_each(|&i| in_good[i] = true);
        let spread = |want: bool| {
            let (lo, hi) = amps
                .iter()
                .zip(&in_good)
                .filter(|(_, &g)| g == want)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&a, _)| (lo.min(a), hi.max(a)));
            if lo > hi {
                0.0
            } else {
                hi - lo
            }
        };
        Some((spread(true), spread(false)))
    }

    pub fn dense_amplitudes(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense(a) => Some(a),
            _ => None,
        }
    }

    pub fn gate_state(&self) -> Option<&GateState> {
        match &self.repr {
            Repr::Gate(g) => Some(g),
            _ => None,
        }
    }

    /// Exact outcome of post-selection without sampling: the probability
    /// that the auxiliary qubit reads 1 and the index distribution given it.
    pub fn post_selection_distribution(&self, oracle: &Oracle<'_>) -> (f64, Vec<f64>) {
        match &self.repr {
            Repr::Gate(g) => {
                let mut g = g.clone();
                let marked = |i: usize, u: u64| i < oracle.domain() && oracle.is_eligible(i) && oracle.threshold.admits(i, u);
                g.apply_qram_unitary(oracle.qram);
                g.apply_utility_oracle(oracle.f);
                g.apply_o_theta(marked);
                let p = g.prob_one(0);
                if p <= 0.0 {
                    return (0.0, vec![0.0; self.domain]);
                }
                g.collapse(0, true);
                (p, g.index_probabilities())
            }
            _ => {
                let p = if self.good.is_empty() { 0.0 } else { self.good_probability() };
                let mut cond = vec![0.0; self.domain];
                if p > 0.0 {
                    let all = self.index_probabilities();
                    for &i in self.good.iter() {
                        cond[i] = all[i] / p;
                    }
                }
                (p, cond)
            }
        }
    }

    /// Post-selection on `O_θ`: returns the good-set superposition with
    /// probability `α²`, nothing otherwise.
    pub fn post_select<R: Rng + ?Sized>(
        self,
        oracle: &Oracle<'_>,
        ledger: &mut IoLedger,
        policy: &IoPolicy,
        rng: &mut R,
    ) -> Option<SuperpositionHandle> {
        ledger.record_quantum_load(policy, LoadContext::PostSelection);
        let handle = |good: &[usize]| SuperpositionHandle::new(good.iter().map(|&i| (i, oracle.utility(i))).collect());
        match self.repr {
            Repr::Gate(mut g) => {
                let marked = |i: usize, u: u64| i < oracle.domain() && oracle.is_eligible(i) && oracle.threshold.admits(i, u);
                g.apply_qram_unitary(oracle.qram);
                g.apply_utility_oracle(oracle.f);
                g.apply_o_theta(marked);
                if !g.measure_qubit(0, rng) {
                    return None;
                }
                let support: Vec<usize> = g
                    .index_probabilities()
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > CERTAINTY_EPS)
                    .map(|(i, _)| i)
                    .collect();
                debug_assert_eq!(support.as_slice(), &*self.good);
                Some(handle(&support))
            }
            _ => {
                if self.good.is_empty() {
                    return None;
                }
                let p = self.good_probability();
                let p = if p > 1.0 - CERTAINTY_EPS { 1.0 } else { p };
                (rng.random::<f64>() < p).then(|| handle(&self.good))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, DatasetMeta, UtilityFunction};
    use crate::qram::Qram;
    use crate::rng::rng_for;

    fn ramp(n: usize) -> Dataset {
        Dataset::from_flat((0..n as u32).collect(), 1, 16, DatasetMeta::named("ramp")).unwrap()
    }

    fn identity() -> UtilityFunction {
        UtilityFunction::expression("a0", 1, 16, 16).unwrap().with_scale(1.0)
    }

    #[test]
    fn uniform_start() {
        let ds = ramp(4);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(3));
        for b in [Backend::Collapsed, Backend::Dense] {
            let s = EngineState::init_uniform(b, &o).unwrap();
            assert!(s.index_probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn initial_angle() {
        let ds = ramp(8);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(6));
        let s = EngineState::init_uniform(Backend::Collapsed, &o).unwrap();
        assert!((s.good_amplitude() - 0.5).abs() < 1e-15);
        assert!((s.angle() - (2f64 / 8.0).sqrt().asin()).abs() < 1e-15);
    }

    #[test]
    fn one_iteration_finds_one_of_four() {
        let ds = ramp(4);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(3));
        let mut ledger = IoLedger::new();
        let mut s = EngineState::init_uniform(Backend::Collapsed, &o).unwrap();
        s.grover_iteration(&o, &mut ledger, &IoPolicy::default());
        assert!((s.good_amplitude() - 1.0).abs() < 1e-15);
        assert_eq!(ledger.quantum_reads, 1);
    }

    #[test]
    fn dense_two_of_eight() {
        let ds = ramp(8);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(6));
        let mut ledger = IoLedger::new();
        let mut s = EngineState::init_uniform(Backend::Dense, &o).unwrap();
        s.grover_iteration(&o, &mut ledger, &IoPolicy::default());
        let expected = (3.0 * 0.5f64.asin()).sin().powi(2);
        assert!((s.good_probability() - expected).abs() < 1e-12);
        assert!((s.good_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_good_set_is_fixed_point() {
        let ds = ramp(16);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(100));
        let mut ledger = IoLedger::new();
        for b in [Backend::Collapsed, Backend::Dense] {
            let mut s = EngineState::init_uniform(b, &o).unwrap();
            let before = s.index_probabilities();
            for _ in 0..5 {
                s.grover_iteration(&o, &mut ledger, &IoPolicy::default());
            }
            let after = s.index_probabilities();
            assert!(before.iter().zip(&after).all(|(a, b)| (a - b).abs() < 1e-14));
            let mut rng = rng_for(0, 0);
            assert!(s.post_select(&o, &mut ledger, &IoPolicy::default(), &mut rng).is_none());
        }
        assert_eq!(ledger.quantum_reads, 10 + 2);
    }

    #[test]
    fn all_good_stays_certain() {
        let ds = ramp(8);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(0));
        let mut ledger = IoLedger::new();
        let mut s = EngineState::init_uniform(Backend::Dense, &o).unwrap();
        for _ in 0..7 {
            s.grover_iteration(&o, &mut ledger, &IoPolicy::default());
            assert!((s.good_probability() - 1.0).abs() < 1e-12);
            assert!((s.closed_form_amplitude().abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_active_set_rejected() {
        let ds = ramp(4);
        let q = Qram::new(&ds);
        let f = identity();
        let none = vec![false; 4];
        let o = Oracle::new(&q, &f, Threshold::at_least(0)).with_eligible(&none);
        assert!(matches!(EngineState::init_uniform(Backend::Dense, &o), Err(Error::EmptyActiveSet)));
    }

    #[test]
    fn uniform_measurement_chi_square() {
        let ds = ramp(16);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(12));
        let s = EngineState::init_uniform(Backend::Collapsed, &o).unwrap();
        let mut rng = rng_for(3, 0);
        let shots = 100_000;
        let mut counts = [0f64; 16];
        for _ in 0..shots {
            counts[s.sample_index(&mut rng)] += 1.0;
        }
        let e = shots as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        // 15 degrees of freedom, 0.999 quantile
        assert!(chi2 < 37.7, "{chi2}");
    }

    #[test]
    fn certain_success_and_certain_failure() {
        let ds = ramp(4);
        let q = Qram::new(&ds);
        let f = identity();
        let o = Oracle::new(&q, &f, Threshold::at_least(3));
        let mut ledger = IoLedger::new();
        let mut rng = rng_for(9, 0);
        for _ in 0..200 {
            let mut s = EngineState::init_uniform(Backend::Collapsed, &o).unwrap();
            s.grover_iteration(&o, &mut ledger, &IoPolicy::default());
            let h = s.post_select(&o, &mut ledger, &IoPolicy::default(), &mut rng).unwrap();
            assert_eq!(h.entries(), &[(3, 3)]);
        }
    }
}
