use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{QueryOptions, QueryOutcome, QueryResult, Session};
use crate::baselines::{linear_scan, quick_select};
use crate::dataset::{generate_synthetic, load_csv, random_query, Dataset};
use crate::engine::UtilityIndex;
use crate::error::{Error, Result};
use crate::ledger::IoLedger;
use crate::rng::{rng_for, stream_id};

use super::config::{Algorithm, DataSource, ExperimentConfig, SweepPoint};

pub const CSV_HEADER: &str =
    "algorithm,dataset,N,d,k_or_theta,trial,quantum_ios,classical_ios,pq_ios,total_ios,success,seed";

/// One trial of one algorithm at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub algorithm: String,
    pub dataset: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    /// The rank k; threshold algorithms use the k-th best utility as θ.
    pub k_or_theta: usize,
    pub trial: usize,
    pub quantum_ios: u64,
    pub classical_ios: u64,
    pub pq_ios: f64,
    pub total_ios: f64,
    pub success: bool,
    pub seed: u64,
}

impl ResultRow {
    fn new(alg: Algorithm, ds: &Dataset, k: usize, trial: usize, ledger: &IoLedger, success: bool, seed: u64) -> Self {
        let quantum_ios = ledger.quantum_ios();
        let classical_ios = ledger.classical_ios();
        let pq_ios = ledger.pq_ios();
        ResultRow {
            algorithm: alg.name().to_string(),
            dataset: ds.meta().name.clone(),
            n: ds.len(),
            d: ds.dims(),
            k_or_theta: k,
            trial,
            quantum_ios,
            classical_ios,
            pq_ios,
            total_ios: quantum_ios as f64 + classical_ios as f64 + pq_ios,
            success,
            seed,
        }
    }
}

/// Means over the trials of one (sweep point, algorithm) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub algorithm: String,
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub k_or_theta: usize,
    pub trials: usize,
    pub quantum_ios: f64,
    pub classical_ios: f64,
    pub pq_ios: f64,
    pub total_ios: f64,
    pub success_rate: f64,
}

/// Builds or loads the dataset for one sweep point.
pub fn load_dataset(point: &SweepPoint, cfg: &ExperimentConfig) -> Result<Dataset> {
    match &point.source {
        DataSource::Synthetic(cat) => generate_synthetic(*cat, point.n, point.d, cfg.attr_bits, cfg.seed),
        DataSource::Csv { path, columns } => {
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            load_csv(path, &cols, cfg.attr_bits)
        }
    }
}

fn same_set(found: impl IntoIterator<Item = usize>, expected: &BTreeSet<usize>) -> bool {
    found.into_iter().collect::<BTreeSet<_>>() == *expected
}

/// Runs every algorithm for one trial. The utility function and its index
/// are shared across algorithms; each algorithm gets its own rng stream.
fn run_trial(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    point_id: usize,
    k: usize,
    trial: usize,
) -> Result<Vec<ResultRow>> {
    let f = random_query(
        ds.dims(),
        ds.attr_bits(),
        cfg.utility_bits,
        stream_id(&[cfg.seed, point_id as u64, trial as u64]),
    )?;
    let index = Arc::new(UtilityIndex::from_utilities(ds.utilities(&f)?));
    let top: BTreeSet<usize> = index.ranked().take(k).collect();
    let (_, theta) = index.nth_best(k).ok_or(Error::InvalidK { k, n: ds.len() })?;
    let above: BTreeSet<usize> = index.ranked().take_while(|&i| index.utility(i) >= theta).collect();
    let options = QueryOptions {
        backend: cfg.backend,
        policy: cfg.policy,
        retries: cfg.retries,
    };

    let mut rows = Vec::with_capacity(cfg.algorithms.len());
    for &alg in &cfg.algorithms {
        let mut rng = rng_for(cfg.seed, stream_id(&[point_id as u64, alg as u64, trial as u64]));
        let (ledger, success) = if alg.is_quantum() {
            let mut session = Session::with_index(ds, f.clone(), Arc::clone(&index), options, rng)?;
            let QueryOutcome { result, ledger, .. } = match alg {
                Algorithm::QqpqTheta => session.qqpq_theta(theta),
                Algorithm::CqpqTheta => session.cqpq_theta(theta),
                Algorithm::CqpqK => session.cqpq_k(k)?,
                Algorithm::QqpqK => session.qqpq_k(k)?,
                _ => unreachable!("classical algorithms run below"),
            };
            let expected = if alg.takes_threshold() { &above } else { &top };
            let success = match &result {
                QueryResult::Classical(v) => same_set(v.iter().map(|e| e.0), expected),
                QueryResult::Quantum(h) => same_set(h.indices(), expected),
                QueryResult::Null => false,
            };
            (ledger, success)
        } else {
            let mut ledger = IoLedger::new();
            let found = match alg {
                Algorithm::LinearScan => linear_scan(ds, &f, theta, &mut ledger, &cfg.policy),
                _ => quick_select(ds, &f, k, &mut ledger, &cfg.policy, &mut rng)?,
            };
            let expected = if alg.takes_threshold() { &above } else { &top };
            (ledger, same_set(found.iter().map(|e| e.0), expected))
        };
        rows.push(ResultRow::new(alg, ds, k, trial, &ledger, success, cfg.seed));
    }
    Ok(rows)
}

/// Rows for one sweep point, in (algorithm, trial) order.
pub fn run_point(cfg: &ExperimentConfig, ds: &Dataset, point_id: usize, k: usize) -> Result<Vec<ResultRow>> {
    if k == 0 || k > ds.len() {
        return Err(Error::InvalidK { k, n: ds.len() });
    }
    let trials: Vec<usize> = (0..cfg.queries).collect();
    let per_trial: Vec<Vec<ResultRow>> = if cfg.parallel {
        trials
            .par_iter()
            .map(|&t| run_trial(cfg, ds, point_id, k, t))
            .collect::<Result<_>>()?
    } else {
        trials
            .iter()
            .map(|&t| run_trial(cfg, ds, point_id, k, t))
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::with_capacity(cfg.queries * cfg.algorithms.len());
    for a in 0..cfg.algorithms.len() {
        rows.extend(per_trial.iter().map(|r| r[a].clone()));
    }
    Ok(rows)
}

/// Runs the full sweep. Rows come out in (sweep value, algorithm, trial)
/// order whatever the parallelism.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut cached: Option<Dataset> = None;
    for (point_id, point) in cfg.points()?.into_iter().enumerate() {
        // k and θ-rank sweeps reuse the same dataset
        let reuse = cached
            .as_ref()
            .is_some_and(|ds| ds.len() == point.n && ds.dims() == point.d && ds.meta().name == source_name(&point));
        if !reuse {
            cached = Some(load_dataset(&point, cfg)?);
        }
        let ds = cached.as_ref().expect("loaded above");
        rows.extend(run_point(cfg, ds, point_id, point.k)?);
    }
    Ok(rows)
}

fn source_name(p: &SweepPoint) -> String {
    match &p.source {
        DataSource::Synthetic(c) => c.to_string(),
        DataSource::Csv { path, .. } => path.display().to_string(),
    }
}

/// Per (sweep point, algorithm) means, in first-appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<Summary> {
    let mut out: Vec<(Summary, usize)> = Vec::new();
    for r in rows {
        let key = |s: &Summary| {
            s.algorithm == r.algorithm && s.dataset == r.dataset && s.n == r.n && s.d == r.d && s.k_or_theta == r.k_or_theta
        };
        let pos = match out.iter().position(|(s, _)| key(s)) {
            Some(p) => p,
            None => {
                out.push((
                    Summary {
                        algorithm: r.algorithm.clone(),
                        dataset: r.dataset.clone(),
                        n: r.n,
                        d: r.d,
                        k_or_theta: r.k_or_theta,
                        trials: 0,
                        quantum_ios: 0.0,
                        classical_ios: 0.0,
                        pq_ios: 0.0,
                        total_ios: 0.0,
                        success_rate: 0.0,
                    },
                    0,
                ));
                out.len() - 1
            }
        };
        let (s, successes) = &mut out[pos];
        s.trials += 1;
        s.quantum_ios += r.quantum_ios as f64;
        s.classical_ios += r.classical_ios as f64;
        s.pq_ios += r.pq_ios;
        s.total_ios += r.total_ios;
        *successes += r.success as usize;
    }
    out.into_iter()
        .map(|(mut s, successes)| {
            let t = s.trials as f64;
            s.quantum_ios /= t;
            s.classical_ios /= t;
            s.pq_ios /= t;
            s.total_ios /= t;
            s.success_rate = successes as f64 / t;
            s
        })
        .collect()
}

/// Writes the rows as CSV. Empty input is an error and creates no file.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::EmptyResults);
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
