//! Self-check suites run by `qpq validate` and the acceptance tests.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::algorithms::{lemma1_probability, QueryOptions, QueryResult, Session};
use crate::bounds::{bound, Theorem};
use crate::dataset::{generate_synthetic, index_bits, random_query, Category, Dataset, DatasetMeta, UtilityFunction};
use crate::engine::{Backend, EngineState, Oracle, Threshold, UtilityIndex};
use crate::error::{Error, Result};
use crate::ledger::IoLedger;
use crate::qram::{CellValue, Qram};
use crate::rng::{rng_for, stream_id};

/// Total-variation tolerance between backends.
pub const BACKEND_TV_TOL: f64 = 1e-9;
/// Largest dense-vs-closed-form amplitude error allowed.
pub const AMPLITUDE_TOL: f64 = 1e-10;
/// Allowed deviation of queue-entry frequencies from `min(1, k/i)`.
pub const LEMMA1_TOL: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    BackendEquivalence,
    AmplitudeClosedForm,
    Lemma1,
    Bounds,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::BackendEquivalence, Suite::AmplitudeClosedForm, Suite::Lemma1, Suite::Bounds];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BackendEquivalence => "backend-equivalence",
            Suite::AmplitudeClosedForm => "amplitude-closed-form",
            Suite::Lemma1 => "lemma1",
            Suite::Bounds => "bounds",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", if self.passed() { "PASS" } else { "FAIL" }, self.suite.name())?;
        for c in &self.checks {
            writeln!(f, "  {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Trial counts for the Monte-Carlo suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Effort {
    pub lemma1_runs: usize,
    pub t1_trials: usize,
    pub t2_trials: usize,
    pub t3_trials: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            lemma1_runs: 20_000,
            t1_trials: 500,
            t2_trials: 200,
            t3_trials: 200,
        }
    }
}

pub fn run_suite(suite: Suite, effort: &Effort, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::BackendEquivalence => backend_equivalence(seed),
        Suite::AmplitudeClosedForm => amplitude_closed_form(256, 50),
        Suite::Lemma1 => lemma1(100, 5, &[10, 20, 50], effort.lemma1_runs, seed),
        Suite::Bounds => bounds(effort, seed),
    }
}

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Tuple `i` holds the single attribute `perm[i]`, a shuffle of `0..n`, and
/// the identity utility makes every utility distinct.
pub fn distinct_dataset(n: usize, seed: u64) -> Result<(Dataset, UtilityFunction)> {
    let bits = index_bits(n).max(1);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng_for(seed, 0x5eed));
    let ds = Dataset::from_flat(perm, 1, bits, DatasetMeta::named("distinct"))?;
    let f = UtilityFunction::linear(vec![1.0], bits, bits)?;
    Ok((ds, f))
}

/// Collapsed, dense and gate backends on every small configuration:
/// `N = 1..=8`, `d = 2`, 2-bit attributes and utilities, all thresholds,
/// up to four iterations, with and without a dummy cell.
pub fn backend_equivalence(seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut report = SuiteReport::new(Suite::BackendEquivalence);
    let (mut worst_index, mut worst_cond, mut worst_p) = (0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    for n in 1..=8usize {
        for variant in 0..3u64 {
            let ds = generate_synthetic(Category::Inde, n, 2, 2, stream_id(&[seed, n as u64, variant]))?;
            let f = random_query(2, 2, 2, stream_id(&[seed, n as u64, variant, 1]))?;
            for dummy in [false, true] {
                let mut qram = Qram::new(&ds);
                if dummy {
                    qram.store(n / 2, CellValue::Dummy, &mut IoLedger::new())?;
                }
                for theta in 0..=f.max_utility() {
                    let oracle = Oracle::new(&qram, &f, Threshold::at_least(theta));
                    if !oracle.any_eligible() {
                        continue;
                    }
                    let mut states = [Backend::Collapsed, Backend::Dense, Backend::Gate]
                        .map(|b| EngineState::init_uniform(b, &oracle))
                        .into_iter()
                        .collect::<Result<Vec<_>>>()?;
                    for s in 0..=4 {
                        if s > 0 {
                            let policy = Default::default();
                            states.iter_mut().for_each(|st| st.grover_iteration(&oracle, &mut IoLedger::new(), &policy));
                        }
                        let idx: Vec<Vec<f64>> = states.iter().map(|st| st.index_probabilities()).collect();
                        let post: Vec<(f64, Vec<f64>)> = states.iter().map(|st| st.post_selection_distribution(&oracle)).collect();
                        for b in 1..3 {
                            worst_index = worst_index.max(tv(&idx[0], &idx[b]));
                            worst_p = worst_p.max((post[0].0 - post[b].0).abs());
                            if post[0].0 > 1e-9 {
                                worst_cond = worst_cond.max(tv(&post[0].1, &post[b].1));
                            }
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.check(
        "index distribution",
        worst_index < BACKEND_TV_TOL,
        format!("max TV {worst_index:.2e} over {cases} states (< {BACKEND_TV_TOL:e})"),
    );
    report.check(
        "post-selection success",
        worst_p < BACKEND_TV_TOL,
        format!("max |dp| {worst_p:.2e} (< {BACKEND_TV_TOL:e})"),
    );
    report.check(
        "post-selected distribution",
        worst_cond < BACKEND_TV_TOL,
        format!("max TV {worst_cond:.2e} (< {BACKEND_TV_TOL:e})"),
    );
    report.check("runtime", elapsed < 1.0, format!("{elapsed:.3} s (< 1 s)"));
    Ok(report)
}

/// Dense amplitudes against `sin((2s+1)·asin(√(k/N)))` for every
/// `1 <= k <= N <= max_n` and `s <= max_s`.
pub fn amplitude_closed_form(max_n: usize, max_s: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::AmplitudeClosedForm);
    let worst: Vec<(f64, usize, usize, u64)> = (1..=max_n)
        .into_par_iter()
        .map(|n| -> Result<(f64, usize, usize, u64)> {
            let bits = index_bits(n).max(1);
            let ds = Dataset::from_flat((0..n as u32).collect(), 1, bits, DatasetMeta::named("ramp"))?;
            let f = UtilityFunction::linear(vec![1.0], bits, bits)?;
            let qram = Qram::new(&ds);
            let policy = Default::default();
            let mut worst = (0.0, n, 0, 0);
            for k in 1..=n {
                let oracle = Oracle::new(&qram, &f, Threshold::at_least((n - k) as u64));
                let mut st = EngineState::init_uniform(Backend::Dense, &oracle)?;
                let t = (k as f64 / n as f64).sqrt().asin();
                for s in 0..=max_s {
                    if s > 0 {
                        st.grover_iteration(&oracle, &mut IoLedger::new(), &policy);
                    }
                    let err = (st.good_amplitude() - ((2 * s + 1) as f64 * t).sin()).abs();
                    if err > worst.0 {
                        worst = (err, n, k, s);
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (err, n, k, s) = worst.into_iter().fold((0.0, 0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    report.check(
        "dense amplitude",
        err < AMPLITUDE_TOL,
        format!("max error {err:.2e} at N={n} k={k} s={s} (< {AMPLITUDE_TOL:e})"),
    );
    Ok(report)
}

/// Frequency with which each rank (1 = best) entered the queue over `runs`
/// top-`k` searches on `n` distinct utilities.
pub fn queue_entry_frequencies(n: usize, k: usize, runs: usize, seed: u64) -> Result<Vec<f64>> {
    let (ds, f) = distinct_dataset(n, seed)?;
    let index = Arc::new(UtilityIndex::from_utilities(ds.utilities(&f)?));
    let mut rank_of = vec![0usize; n];
    index.ranked().enumerate().for_each(|(r, i)| rank_of[i] = r);
    let counts = (0..runs)
        .into_par_iter()
        .map(|t| -> Result<Vec<u32>> {
            let rng = rng_for(seed, stream_id(&[0x1e, t as u64]));
            let mut session = Session::with_index(&ds, f.clone(), Arc::clone(&index), QueryOptions::default(), rng)?;
            let out = session.cqpq_k(k)?;
            let mut seen = vec![0u32; n];
            out.queue_entries.iter().for_each(|&i| seen[rank_of[i]] = 1);
            Ok(seen)
        })
        .try_reduce(
            || vec![0u32; n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok(counts.into_iter().map(|c| c as f64 / runs as f64).collect())
}

pub fn lemma1(n: usize, k: usize, ranks: &[usize], runs: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Lemma1);
    let freq = queue_entry_frequencies(n, k, runs, seed)?;
    for &i in ranks {
        let expect = lemma1_probability(i, k, n)?;
        let got = freq[i - 1];
        report.check(
            format!("rank {i}"),
            (got - expect).abs() <= LEMMA1_TOL,
            format!("frequency {got:.4} vs {expect:.4} (±{LEMMA1_TOL}) over {runs} runs"),
        );
    }
    Ok(report)
}

/// Per-trial measurements of one query type on a distinct-utility dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    /// Grover-iteration reads only (post-selection reads excluded).
    pub iteration_reads: Vec<f64>,
    /// All quantum reads, post-selection included.
    pub quantum_ios: Vec<f64>,
    pub pq_ios: Vec<f64>,
    pub successes: usize,
    pub trials: usize,
}

impl TrialStats {
    pub fn mean_iteration_reads(&self) -> f64 {
        mean(&self.iteration_reads)
    }

    pub fn mean_quantum(&self) -> f64 {
        mean(&self.quantum_ios)
    }

    pub fn mean_pq(&self) -> f64 {
        mean(&self.pq_ios)
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials.max(1) as f64
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    QqpqTheta,
    CqpqTheta,
    CqpqK,
}

/// Runs `trials` queries at threshold rank `k` over `n` distinct utilities.
/// Success means the exact expected answer (a non-null handle for
/// `QqpqTheta`, whose handle is always the full threshold set).
pub fn probe(which: Probe, n: usize, k: usize, trials: usize, retries: usize, seed: u64) -> Result<TrialStats> {
    let (ds, f) = distinct_dataset(n, seed)?;
    let index = Arc::new(UtilityIndex::from_utilities(ds.utilities(&f)?));
    let (_, theta) = index.nth_best(k).ok_or(Error::InvalidK { k, n })?;
    let mut expected: Vec<usize> = index.ranked().take(k).collect();
    expected.sort_unstable();
    let options = QueryOptions {
        retries,
        ..QueryOptions::default()
    };
    let per: Vec<(f64, f64, f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, f64, bool)> {
            let rng = rng_for(seed, stream_id(&[which as u64, n as u64, k as u64, t as u64]));
            let mut session = Session::with_index(&ds, f.clone(), Arc::clone(&index), options, rng)?;
            let out = match which {
                Probe::QqpqTheta => session.qqpq_theta(theta),
                Probe::CqpqTheta => session.cqpq_theta(theta),
                Probe::CqpqK => session.cqpq_k(k)?,
            };
            let ok = match &out.result {
                QueryResult::Quantum(h) => h.indices().collect::<Vec<_>>() == expected,
                QueryResult::Classical(v) => {
                    let mut got: Vec<usize> = v.iter().map(|e| e.0).collect();
                    got.sort_unstable();
                    got == expected
                }
                QueryResult::Null => false,
            };
            Ok((
                out.ledger.iteration_reads() as f64,
                out.ledger.quantum_ios() as f64,
                out.ledger.pq_ios(),
                ok,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(TrialStats {
        iteration_reads: per.iter().map(|p| p.0).collect(),
        quantum_ios: per.iter().map(|p| p.1).collect(),
        pq_ios: per.iter().map(|p| p.2).collect(),
        successes: per.iter().filter(|p| p.3).count(),
        trials,
    })
}

/// Theorem cost bounds, measured on the iteration-only read count.
pub fn bounds(effort: &Effort, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Bounds);
    let n1 = 1 << 16;
    for k in [1, 4, 16, 64] {
        let s = probe(Probe::QqpqTheta, n1, k, effort.t1_trials, 1, seed)?;
        let limit = bound(Theorem::T1, n1, k)?;
        let m = s.mean_iteration_reads();
        report.check(
            format!("T1 N={n1} k={k}"),
            m > 0.0 && m <= limit && s.success_rate() >= 0.75,
            format!("mean {m:.1} <= {limit:.1}, non-null rate {:.3} >= 0.75", s.success_rate()),
        );
    }
    let (n2, k2) = (4096, 10);
    let s = probe(Probe::CqpqTheta, n2, k2, effort.t2_trials, crate::algorithms::DEFAULT_RETRIES, seed)?;
    let limit = bound(Theorem::T2, n2, k2)?;
    let m = s.mean_iteration_reads();
    report.check(
        format!("T2 N={n2} k={k2}"),
        m <= limit && s.success_rate() >= 0.99,
        format!("mean {m:.1} <= {limit:.1}, exact rate {:.3} >= 0.99", s.success_rate()),
    );
    let (n3, k3) = (1024, 10);
    let s = probe(Probe::CqpqK, n3, k3, effort.t3_trials, crate::algorithms::DEFAULT_RETRIES, seed)?;
    let limit = bound(Theorem::T3, n3, k3)?;
    let m = s.mean_iteration_reads() + s.mean_pq();
    report.check(
        format!("T3 N={n3} k={k3}"),
        m <= limit && s.success_rate() >= 0.99,
        format!("mean {m:.1} <= {limit:.1}, exact rate {:.3} >= 0.99", s.success_rate()),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn distinct_dataset_is_a_permutation() {
        let (ds, f) = distinct_dataset(100, 3).unwrap();
        let mut u = ds.utilities(&f).unwrap();
        u.sort_unstable();
        assert_eq!(u, (0..100).collect::<Vec<u64>>());
    }

    #[test]
    fn small_closed_form() {
        let r = amplitude_closed_form(16, 10).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn report_formatting() {
        let mut r = SuiteReport::new(Suite::Lemma1);
        r.check("a", true, "fine");
        assert!(r.passed());
        r.check("b", false, "off");
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.starts_with("[FAIL] lemma1"));
        assert!(text.contains("FAIL b: off"));
    }
}
