//! Full state-vector simulation of the threshold-search circuit.
//!
//! Register layout, most significant qubit first:
//!
//! ```text
//! | index (n) | a_0 (n_a) | ... | a_{d-1} (n_a) | utility (n_u) | aux (1) |
//! ```
//!
//! With `n = 3, d = 2, n_a = 2, n_u = 2` this is the ten-qubit circuit whose
//! qubits q9..q7 hold the index, q6..q3 the attributes, q2..q1 the utility
//! and q0 the post-selection flag. Only tiny instances fit in memory.

use num_complex::Complex64;
use rand::Rng;

use crate::dataset::{index_bits, UtilityFunction};
use crate::error::{Error, Result};
use crate::qram::Qram;

pub const MAX_QUBITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub domain: usize,
    pub index_bits: u32,
    pub dims: usize,
    pub attr_bits: u32,
    pub utility_bits: u32,
}

impl Layout {
    pub fn new(domain: usize, dims: usize, attr_bits: u32, utility_bits: u32) -> Result<Self> {
        let layout = Layout {
            domain,
            index_bits: index_bits(domain),
            dims,
            attr_bits,
            utility_bits,
        };
        let needed = layout.total_qubits();
        if needed > MAX_QUBITS {
            return Err(Error::QubitBudget {
                needed,
                budget: MAX_QUBITS,
            });
        }
        Ok(layout)
    }

    pub fn total_qubits(&self) -> u32 {
        self.index_bits + self.dims as u32 * self.attr_bits + self.utility_bits + 1
    }

    fn util_shift(&self) -> u32 {
        1
    }

    fn attr_shift(&self, j: usize) -> u32 {
        1 + self.utility_bits + (self.dims - 1 - j) as u32 * self.attr_bits
    }

    fn index_shift(&self) -> u32 {
        1 + self.utility_bits + self.dims as u32 * self.attr_bits
    }

    pub fn index_of(&self, basis: usize) -> usize {
        basis >> self.index_shift()
    }

    pub fn utility_of(&self, basis: usize) -> u64 {
        ((basis >> self.util_shift()) & ((1 << self.utility_bits) - 1)) as u64
    }

    pub fn attr_of(&self, basis: usize, j: usize) -> u32 {
        ((basis >> self.attr_shift(j)) & ((1 << self.attr_bits) - 1)) as u32
    }

    /// Mask covering the attribute and utility registers.
    fn work_mask(&self) -> usize {
        ((1usize << (self.dims as u32 * self.attr_bits + self.utility_bits)) - 1) << 1
    }

    fn index_qubits(&self) -> std::ops::Range<u32> {
        self.index_shift()..self.index_shift() + self.index_bits
    }
}

#[derive(Debug, Clone)]
pub struct GateState {
    layout: Layout,
    amps: Vec<Complex64>,
}

impl GateState {
    /// All qubits in `|0⟩`.
    pub fn new(layout: Layout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.total_qubits()];
        amps[0] = Complex64::new(1.0, 0.0);
        GateState { layout, amps }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    pub fn apply_hadamard(&mut self, qubit: u32) {
        let bit = 1usize << qubit;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (x, y) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = (x + y) * s;
                self.amps[b | bit] = (x - y) * s;
            }
        }
    }

    /// `H^⊗n` on the index register.
    pub fn apply_hadamards(&mut self) {
        for q in self.layout.index_qubits() {
            self.apply_hadamard(q);
        }
    }

    /// Self-inverse unitary taking the index register from `|0⟩` to the
    /// uniform superposition over `0..N`. Equals `H^⊗n` when `N = 2^n`;
    /// otherwise a Householder reflection swapping `|0⟩` and `|u_N⟩`.
    pub fn apply_state_prep(&mut self) {
        let l = self.layout;
        if l.domain == 1 << l.index_bits {
            self.apply_hadamards();
            return;
        }
        let dim = 1usize << l.index_bits;
        let u = 1.0 / (l.domain as f64).sqrt();
        // v = |0⟩ - |u⟩
        let v: Vec<f64> = (0..dim)
            .map(|i| if i < l.domain { -u } else { 0.0 } + if i == 0 { 1.0 } else { 0.0 })
            .collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let shift = l.index_shift();
        let rest = 1usize << shift;
        for low in 0..rest {
            let dot: Complex64 = (0..dim).map(|i| self.amps[(i << shift) | low] * v[i]).sum();
            let coef = dot * (2.0 / vv);
            for (i, vi) in v.iter().enumerate() {
                self.amps[(i << shift) | low] -= coef * *vi;
            }
        }
    }

    fn permute(&mut self, mut target: impl FnMut(usize) -> usize) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[target(b)] += *a;
        }
        self.amps = out;
    }

    /// `Q|i⟩|x⟩ = |i⟩|x ⊕ p_i⟩` on the attribute registers. Indices past `N`
    /// read an all-zero cell.
    pub fn apply_qram_unitary(&mut self, qram: &Qram<'_>) {
        let l = self.layout;
        let loaded: Vec<usize> = (0..1usize << l.index_bits)
            .map(|i| {
                if i >= l.domain {
                    return 0;
                }
                qram.attrs(i)
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &a)| acc | ((a as usize) << l.attr_shift(j)))
            })
            .collect();
        self.permute(|b| b ^ loaded[l.index_of(b)]);
    }

    /// `F|p⟩|y⟩ = |p⟩|y ⊕ f(p)⟩` computed from the attribute registers.
    pub fn apply_utility_oracle(&mut self, f: &UtilityFunction) {
        let l = self.layout;
        let mut attrs = vec![0u32; l.dims];
        self.permute(|b| {
            for (j, a) in attrs.iter_mut().enumerate() {
                *a = l.attr_of(b, j);
            }
            let u = f.evaluate_unchecked(&attrs) & ((1 << l.utility_bits) - 1);
            b ^ ((u as usize) << l.util_shift())
        });
    }

    /// `G_θ`: phase −1 on basis states whose `(index, utility)` is marked.
    pub fn apply_phase_oracle(&mut self, marked: impl Fn(usize, u64) -> bool) {
        let l = self.layout;
        for (b, a) in self.amps.iter_mut().enumerate() {
            if marked(l.index_of(b), l.utility_of(b)) {
                *a = -*a;
            }
        }
    }

    /// `R`: phase −1 on every index state except `|0⟩`.
    pub fn apply_r(&mut self) {
        let l = self.layout;
        for (b, a) in self.amps.iter_mut().enumerate() {
            if l.index_of(b) != 0 {
                *a = -*a;
            }
        }
    }

    /// Diffusion `A R A` with `A` the state preparation (`H R H` for `N = 2^n`).
    pub fn apply_diffusion(&mut self) {
        self.apply_state_prep();
        self.apply_r();
        self.apply_state_prep();
    }

    /// `O_θ`: flips the auxiliary qubit on marked states.
    pub fn apply_o_theta(&mut self, marked: impl Fn(usize, u64) -> bool) {
        let l = self.layout;
        self.permute(|b| if marked(l.index_of(b), l.utility_of(b)) { b ^ 1 } else { b });
    }

    pub fn prob_one(&self, qubit: u32) -> f64 {
        let bit = 1usize << qubit;
        self.amps.iter().enumerate().filter(|(b, _)| b & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projective measurement of one qubit; the state collapses and renormalizes.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: u32, rng: &mut R) -> bool {
        let p1 = self.prob_one(qubit);
        let outcome = rng.random::<f64>() < p1;
        self.collapse(qubit, outcome);
        outcome
    }

    /// Projects onto `qubit == outcome`. Returns the outcome's probability.
    pub fn collapse(&mut self, qubit: u32, outcome: bool) -> f64 {
        let bit = 1usize << qubit;
        let p = if outcome { self.prob_one(qubit) } else { 1.0 - self.prob_one(qubit) };
        let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
        for (b, a) in self.amps.iter_mut().enumerate() {
            if (b & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        p
    }

    /// Marginal distribution of the index register over `0..N`.
    pub fn index_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.layout.index_bits];
        for (b, a) in self.amps.iter().enumerate() {
            p[self.layout.index_of(b)] += a.norm_sqr();
        }
        p.truncate(self.layout.domain);
        p
    }

    /// Probability mass on states whose attribute and utility registers are
    /// not all zero.
    pub fn work_register_weight(&self) -> f64 {
        let mask = self.layout.work_mask();
        self.amps.iter().enumerate().filter(|(b, _)| b & mask != 0).map(|(_, a)| a.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, DatasetMeta};
    use crate::rng::rng_for;

    fn small_layout() -> Layout {
        Layout::new(8, 2, 2, 2).unwrap()
    }

    fn small_data() -> Dataset {
        let flat = vec![0, 1, 3, 2, 1, 1, 2, 3, 3, 3, 0, 0, 2, 0, 1, 3];
        Dataset::from_flat(flat, 2, 2, DatasetMeta::named("fig")).unwrap()
    }

    #[test]
    fn ten_qubit_layout() {
        let l = small_layout();
        assert_eq!(l.total_qubits(), 10);
        // q9 q8 q7 | q6 q5 | q4 q3 | q2 q1 | q0
        #[allow(clippy::unusual_byte_groupings)]
        let b = 0b101_10_01_11_1usize;
        assert_eq!(l.index_of(b), 5);
        assert_eq!(l.attr_of(b, 0), 2);
        assert_eq!(l.attr_of(b, 1), 1);
        assert_eq!(l.utility_of(b), 3);
    }

    #[test]
    fn budget() {
        assert!(matches!(Layout::new(1 << 10, 4, 4, 8), Err(Error::QubitBudget { needed: 35, .. })));
    }

    #[test]
    fn qram_twice_uncomputes() {
        let ds = small_data();
        let q = Qram::new(&ds);
        let f = UtilityFunction::linear(vec![0.5, 0.5], 2, 2).unwrap().with_scale(1.0);
        let mut s = GateState::new(small_layout());
        s.apply_hadamards();
        s.apply_qram_unitary(&q);
        assert!(s.work_register_weight() > 0.5);
        s.apply_utility_oracle(&f);
        s.apply_utility_oracle(&f);
        s.apply_qram_unitary(&q);
        assert!(s.work_register_weight() < 1e-24);
        let p = s.index_probabilities();
        assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-12));
    }

    #[test]
    fn loads_dataset_tuples() {
        let ds = small_data();
        let q = Qram::new(&ds);
        let mut s = GateState::new(small_layout());
        s.apply_hadamards();
        s.apply_qram_unitary(&q);
        for (b, a) in s.amplitudes().iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                let i = s.layout().index_of(b);
                assert_eq!([s.layout().attr_of(b, 0), s.layout().attr_of(b, 1)], ds.tuple(i));
            }
        }
    }

    #[test]
    fn every_op_preserves_norm_and_reality() {
        let ds = small_data();
        let q = Qram::new(&ds);
        let f = UtilityFunction::linear(vec![0.5, 0.5], 2, 2).unwrap().with_scale(1.0);
        let marked = |i: usize, u: u64| i < 8 && u >= 2;
        let mut s = GateState::new(small_layout());
        let check = |s: &GateState| {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(s.max_imag() < 1e-12);
        };
        s.apply_hadamards();
        check(&s);
        s.apply_qram_unitary(&q);
        check(&s);
        s.apply_utility_oracle(&f);
        check(&s);
        s.apply_phase_oracle(marked);
        check(&s);
        s.apply_r();
        check(&s);
        s.apply_diffusion();
        check(&s);
        s.apply_o_theta(marked);
        check(&s);
        let mut rng = rng_for(0, 0);
        s.measure_qubit(0, &mut rng);
        check(&s);
    }

    #[test]
    fn householder_prep_is_uniform_and_self_inverse() {
        for n in [3, 5, 6, 7] {
            let l = Layout::new(n, 1, 1, 1).unwrap();
            let mut s = GateState::new(l);
            s.apply_state_prep();
            let p = s.index_probabilities();
            assert_eq!(p.len(), n);
            assert!(p.iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-12), "{p:?}");
            s.apply_state_prep();
            assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn post_selection_on_four_states() {
        // utilities 0, 1, 5, 7 in a 3-bit register, θ = 5
        let ds = Dataset::from_flat(vec![0, 1, 5, 7], 1, 3, DatasetMeta::named("fig1")).unwrap();
        let q = Qram::new(&ds);
        let f = UtilityFunction::expression("a0", 1, 3, 3).unwrap().with_scale(1.0);
        let mut s = GateState::new(Layout::new(4, 1, 3, 3).unwrap());
        s.apply_hadamards();
        s.apply_qram_unitary(&q);
        s.apply_utility_oracle(&f);
        s.apply_o_theta(|_, u| u >= 5);
        assert!((s.prob_one(0) - 0.5).abs() < 1e-12);
        s.collapse(0, true);
        let p = s.index_probabilities();
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
        assert!((p[2] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
    }
}
