use rand::Rng;

use crate::error::{Error, Result};

/// A post-selected uniform superposition `(1/√k) Σ |i⟩|f(p_i)⟩` over the
/// good indices. Measuring it yields each entry with probability `1/k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperpositionHandle {
    entries: Vec<(usize, u64)>,
}

impl SuperpositionHandle {
    pub fn new(entries: Vec<(usize, u64)>) -> Self {
        SuperpositionHandle { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, u64)] {
        &self.entries
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn amplitude(&self) -> f64 {
        1.0 / (self.entries.len() as f64).sqrt()
    }

    /// Draws an outcome without collapsing, for repeated-preparation statistics.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, u64)> {
        if self.entries.is_empty() {
            return Err(Error::EmptyHandle);
        }
        Ok(self.entries[rng.random_range(0..self.entries.len())])
    }

    /// Measures the index register. The superposition is consumed.
    pub fn measure<R: Rng + ?Sized>(self, rng: &mut R) -> Result<(usize, u64)> {
        self.sample(rng)
    }
}
