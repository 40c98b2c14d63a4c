//! Closed-form expected-IO bounds for the quantum queries.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// `qqpq_theta`: `(9/2) √(N/k)`.
    T1,
    /// `cqpq_theta`: `9 √(N k)`.
    T2,
    /// `cqpq_k`: `(9π/2) √(N k) + k log2(k) ln(N)`.
    T3,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::T1, Theorem::T2, Theorem::T3];
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T1" => Ok(Theorem::T1),
            "T2" => Ok(Theorem::T2),
            "T3" => Ok(Theorem::T3),
            _ => Err(Error::Config(format!("unknown theorem `{s}`"))),
        }
    }
}

pub fn bound(theorem: Theorem, n: usize, k: usize) -> Result<f64> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let (n, k) = (n as f64, k as f64);
    Ok(match theorem {
        Theorem::T1 => 4.5 * (n / k).sqrt(),
        Theorem::T2 => 9.0 * (n * k).sqrt(),
        Theorem::T3 => 4.5 * PI * (n * k).sqrt() + k * k.log2() * n.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub n: usize,
    pub k: usize,
    pub bound_value: f64,
    pub observed_mean: f64,
    pub trials: usize,
    pub within_bound: bool,
}

impl BoundReport {
    pub fn new(theorem: Theorem, n: usize, k: usize, observations: &[f64]) -> Result<Self> {
        let bound_value = bound(theorem, n, k)?;
        let observed_mean = observations.iter().sum::<f64>() / observations.len().max(1) as f64;
        Ok(BoundReport {
            theorem,
            n,
            k,
            bound_value,
            observed_mean,
            trials: observations.len(),
            within_bound: observed_mean <= bound_value,
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} N={} k={}: observed {:.1} over {} trials, bound {:.1} ({})",
            self.theorem,
            self.n,
            self.k,
            self.observed_mean,
            self.trials,
            self.bound_value,
            if self.within_bound { "ok" } else { "EXCEEDED" }
        )
    }
}
