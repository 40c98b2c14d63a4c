use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::algorithms::DEFAULT_RETRIES;
use crate::dataset::{Category, DEFAULT_ATTR_BITS, DEFAULT_UTILITY_BITS};
use crate::engine::Backend;
use crate::error::{Error, Result};
use crate::ledger::IoPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    QqpqTheta,
    CqpqTheta,
    CqpqK,
    QqpqK,
    LinearScan,
    QuickSelect,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::QqpqTheta,
        Algorithm::CqpqTheta,
        Algorithm::CqpqK,
        Algorithm::QqpqK,
        Algorithm::LinearScan,
        Algorithm::QuickSelect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::QqpqTheta => "qqpq_theta",
            Algorithm::CqpqTheta => "cqpq_theta",
            Algorithm::CqpqK => "cqpq_k",
            Algorithm::QqpqK => "qqpq_k",
            Algorithm::LinearScan => "linear_scan",
            Algorithm::QuickSelect => "quick_select",
        }
    }

    pub fn is_quantum(self) -> bool {
        !matches!(self, Algorithm::LinearScan | Algorithm::QuickSelect)
    }

    /// Threshold-input algorithms take θ as the k-th best utility.
    pub fn takes_threshold(self) -> bool {
        matches!(self, Algorithm::QqpqTheta | Algorithm::CqpqTheta | Algorithm::LinearScan)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    K,
    ThetaRank,
    D,
    N,
    Category,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::K => "k",
            SweepVar::ThetaRank => "theta-rank",
            SweepVar::D => "d",
            SweepVar::N => "N",
            SweepVar::Category => "category",
        }
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "k" | "K" => Ok(SweepVar::K),
            "theta-rank" | "theta_rank" | "theta" => Ok(SweepVar::ThetaRank),
            "d" | "D" => Ok(SweepVar::D),
            "n" | "N" => Ok(SweepVar::N),
            "category" => Ok(SweepVar::Category),
            other => Err(Error::Config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Synthetic(Category),
    Csv { path: PathBuf, columns: Vec<String> },
}

/// One resolved sweep point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPoint {
    pub source: DataSource,
    pub n: usize,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub n: usize,
    pub d: usize,
    pub attr_bits: u32,
    pub utility_bits: u32,
    pub k: usize,
    pub algorithms: Vec<Algorithm>,
    pub sweep: SweepVar,
    /// Raw sweep values; empty means the single default point.
    pub values: Vec<String>,
    pub queries: usize,
    pub seed: u64,
    pub policy: IoPolicy,
    pub retries: usize,
    pub backend: Backend,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            source: DataSource::Synthetic(Category::Anti),
            n: 500_000,
            d: 4,
            attr_bits: DEFAULT_ATTR_BITS,
            utility_bits: DEFAULT_UTILITY_BITS,
            k: 10,
            algorithms: vec![
                Algorithm::CqpqTheta,
                Algorithm::LinearScan,
                Algorithm::CqpqK,
                Algorithm::QuickSelect,
            ],
            sweep: SweepVar::K,
            values: Vec::new(),
            queries: 100,
            seed: 0,
            policy: IoPolicy::default(),
            retries: DEFAULT_RETRIES,
            backend: Backend::Collapsed,
            parallel: true,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value for {key}: `{value}`")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one key. Used by both the config file and command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('-', "_").as_str() {
            "category" => self.source = DataSource::Synthetic(parse(key, value)?),
            "dataset" => {
                let columns = match &self.source {
                    DataSource::Csv { columns, .. } => columns.clone(),
                    DataSource::Synthetic(_) => Vec::new(),
                };
                self.source = DataSource::Csv {
                    path: PathBuf::from(value),
                    columns,
                };
            }
            "columns" => {
                let cols: Vec<String> = list(value).map(String::from).collect();
                match &mut self.source {
                    DataSource::Csv { columns, .. } => *columns = cols,
                    DataSource::Synthetic(_) => {
                        self.source = DataSource::Csv {
                            path: PathBuf::new(),
                            columns: cols,
                        }
                    }
                }
            }
            "n" => self.n = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "attr_bits" | "n_a" => self.attr_bits = parse(key, value)?,
            "utility_bits" | "n_u" => self.utility_bits = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "algo" | "algorithms" => self.algorithms = list(value).map(str::parse).collect::<Result<_>>()?,
            "sweep" => self.sweep = parse(key, value)?,
            "values" => self.values = list(value).map(String::from).collect(),
            "theta_rank" => {
                self.sweep = SweepVar::ThetaRank;
                self.values = list(value).map(String::from).collect();
            }
            "queries" => self.queries = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "io_policy" => self.policy = value.parse()?,
            "retries" => self.retries = parse(key, value)?,
            "backend" => self.backend = value.parse()?,
            "parallel" => self.parallel = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if self.queries == 0 {
            return Err(Error::Config("queries must be positive".into()));
        }
        if self.retries == 0 {
            return Err(Error::Config("retries must be positive".into()));
        }
        if let DataSource::Csv { path, columns } = &self.source {
            if path.as_os_str().is_empty() {
                return Err(Error::Config("columns given without a dataset path".into()));
            }
            if columns.is_empty() {
                return Err(Error::Config("CSV dataset needs columns".into()));
            }
            if matches!(self.sweep, SweepVar::N | SweepVar::D | SweepVar::Category) && !self.values.is_empty() {
                return Err(Error::Config(format!("cannot sweep {} over a CSV dataset", self.sweep.name())));
            }
        }
        self.policy.validate()?;
        for p in self.points()? {
            if p.n == 0 || p.d == 0 {
                return Err(Error::Config(format!("invalid sweep point N={} d={}", p.n, p.d)));
            }
            if p.k == 0 || p.k > p.n {
                return Err(Error::Config(format!("k={} outside 1..={}", p.k, p.n)));
            }
        }
        Ok(())
    }

    /// The resolved sweep points, in sweep order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let base = SweepPoint {
            source: self.source.clone(),
            n: self.n,
            d: self.d,
            k: self.k,
        };
        if self.values.is_empty() {
            return Ok(vec![base]);
        }
        let key = self.sweep.name();
        self.values
            .iter()
            .map(|v| {
                let mut p = base.clone();
                match self.sweep {
                    SweepVar::K | SweepVar::ThetaRank => p.k = parse(key, v)?,
                    SweepVar::D => p.d = parse(key, v)?,
                    SweepVar::N => p.n = parse(key, v)?,
                    SweepVar::Category => p.source = DataSource::Synthetic(parse(key, v)?),
                }
                Ok(p)
            })
            .collect()
    }
}
