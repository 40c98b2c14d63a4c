use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use qpq::bench::{emit_chart, emit_csv, load_dataset, run_experiment, summarize, Algorithm, ExperimentConfig};
use qpq::bounds::{bound, Theorem};
use qpq::dataset::{generate_synthetic, random_query, write_csv, Category, DEFAULT_ATTR_BITS};
use qpq::engine::UtilityIndex;
use qpq::validate::{run_suite, Effort, Suite};
use qpq::{QueryOptions, QueryResult, Session};

#[derive(Parser)]
#[command(name = "qpq", version, about = "Quantum preference query simulator and IO benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV
    Gen(GenArgs),
    /// Run a single query and print the result with its IO ledger
    Query(QueryArgs),
    /// Run a benchmark sweep and write per-trial CSV
    Bench(BenchArgs),
    /// Run the self-check suites
    Validate(ValidateArgs),
    /// Print the theorem cost bounds
    Bounds(BoundsArgs),
}

/// Flags shared by `query` and `bench`; each overrides the config file.
#[derive(Args, Default)]
struct Common {
    /// Flat key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset path (needs --columns)
    #[arg(long)]
    dataset: Option<String>,
    /// Comma-separated CSV columns to use as attributes
    #[arg(long)]
    columns: Option<String>,
    /// Synthetic category: ANTI, CORR or INDE
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Rank whose utility becomes θ; comma-separated values sweep it
    #[arg(long)]
    theta_rank: Option<String>,
    /// Algorithm name, or a comma-separated list for bench
    #[arg(long)]
    algo: Option<String>,
    /// collapsed, dense or gate
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    retries: Option<String>,
    /// `default`, `uncompute`, or key=value pairs
    #[arg(long)]
    io_policy: Option<String>,
}

impl Common {
    fn config(&self) -> qpq::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("dataset", &self.dataset),
            ("columns", &self.columns),
            ("category", &self.category),
            ("n", &self.n),
            ("d", &self.d),
            ("k", &self.k),
            ("theta_rank", &self.theta_rank),
            ("algo", &self.algo),
            ("backend", &self.backend),
            ("seed", &self.seed),
            ("retries", &self.retries),
            ("io_policy", &self.io_policy),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "ANTI")]
    category: Category,
    #[arg(long, default_value_t = 500_000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_ATTR_BITS)]
    attr_bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    common: Common,
    /// Explicit θ for threshold algorithms, instead of a rank
    #[arg(long)]
    theta: Option<u64>,
    /// Index of the random utility function to use
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Sweep variable: k, theta-rank, d, N or category
    #[arg(long)]
    sweep: Option<String>,
    /// Comma-separated sweep values
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    queries: Option<String>,
    /// Run trials on one thread
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Also write an SVG line chart
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite to run (repeatable); all suites by default
    #[arg(long = "suite")]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Query(a) => query(a),
        Command::Bench(a) => bench(a),
        Command::Validate(a) => validate(a),
        Command::Bounds(a) => bounds(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn gen(a: GenArgs) -> qpq::Result<ExitCode> {
    let ds = generate_synthetic(a.category, a.n, a.d, a.attr_bits, a.seed)?;
    write_csv(&ds, &a.out)?;
    println!("wrote {} {} tuples (d={}) to {}", ds.len(), a.category, ds.dims(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn query(a: QueryArgs) -> qpq::Result<ExitCode> {
    let mut cfg = a.common.config()?;
    if a.common.theta_rank.is_some() {
        // a single query takes the rank directly
        let rank = cfg.points()?[0].k;
        cfg.values.clear();
        cfg.k = rank;
    }
    cfg.validate()?;
    let [alg] = cfg.algorithms[..] else {
        return Err(qpq::Error::Config("query takes exactly one --algo".into()));
    };
    let point = &cfg.points()?[0];
    let ds = load_dataset(point, &cfg)?;
    let f = random_query(ds.dims(), ds.attr_bits(), cfg.utility_bits, a.trial)?;
    let index = Arc::new(UtilityIndex::from_utilities(ds.utilities(&f)?));
    let theta = match a.theta {
        Some(t) => t,
        None => index.nth_best(point.k).map(|e| e.1).ok_or(qpq::Error::InvalidK { k: point.k, n: ds.len() })?,
    };
    let options = QueryOptions {
        backend: cfg.backend,
        policy: cfg.policy,
        retries: cfg.retries,
    };
    let mut rng = qpq::rng::rng_for(cfg.seed, a.trial);
    let mut ledger = qpq::IoLedger::new();

    println!("dataset {} N={} d={}", ds.meta().name, ds.len(), ds.dims());
    if alg.takes_threshold() {
        println!("{alg} theta={theta}");
    } else {
        println!("{alg} k={}", point.k);
    }
    let result = match alg {
        Algorithm::LinearScan => QueryResult::Classical(qpq::baselines::linear_scan(&ds, &f, theta, &mut ledger, &cfg.policy)),
        Algorithm::QuickSelect => {
            QueryResult::Classical(qpq::baselines::quick_select(&ds, &f, point.k, &mut ledger, &cfg.policy, &mut rng)?)
        }
        _ => {
            let mut session = Session::with_index(&ds, f.clone(), index, options, rng)?;
            let out = match alg {
                Algorithm::QqpqTheta => session.qqpq_theta(theta),
                Algorithm::CqpqTheta => session.cqpq_theta(theta),
                Algorithm::CqpqK => session.cqpq_k(point.k)?,
                _ => session.qqpq_k(point.k)?,
            };
            ledger = out.ledger;
            out.result
        }
    };
    match &result {
        QueryResult::Null => println!("result: null"),
        QueryResult::Classical(v) => {
            println!("result: {} tuples", v.len());
            for (i, u) in v {
                println!("  {i}\t{u}");
            }
        }
        QueryResult::Quantum(h) => {
            println!("result: superposition over {} tuples, amplitude {:.6}", h.len(), h.amplitude());
            for (i, u) in h.entries() {
                println!("  {i}\t{u}");
            }
        }
    }
    println!(
        "ios: quantum={} (post-select {}) classical={} pq={} total={}",
        ledger.quantum_ios(),
        ledger.postselect_reads,
        ledger.classical_ios(),
        ledger.pq_ios(),
        ledger.total_ios()
    );
    println!("grover iterations: {}", ledger.grover_iterations);
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> qpq::Result<ExitCode> {
    let mut cfg = a.common.config()?;
    if let Some(s) = &a.sweep {
        cfg.set("sweep", s)?;
    }
    if let Some(v) = &a.values {
        cfg.set("values", v)?;
    }
    if let Some(q) = &a.queries {
        cfg.set("queries", q)?;
    }
    if a.serial {
        cfg.parallel = false;
    }
    let rows = run_experiment(&cfg)?;
    emit_csv(&rows, &a.out)?;
    if let Some(path) = &a.chart {
        emit_chart(&rows, cfg.sweep.name(), path)?;
    }
    println!("{:<14}{:>8}{:>10}{:>4}{:>7}{:>14}{:>9}", "algorithm", "dataset", "N", "d", "k", "mean IOs", "success");
    for s in summarize(&rows) {
        println!(
            "{:<14}{:>8}{:>10}{:>4}{:>7}{:>14.1}{:>9.3}",
            s.algorithm, s.dataset, s.n, s.d, s.k_or_theta, s.total_ios, s.success_rate
        );
    }
    println!("wrote {} rows to {}", rows.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ValidateArgs) -> qpq::Result<ExitCode> {
    let suites = if a.suites.is_empty() { Suite::ALL.to_vec() } else { a.suites };
    let mut ok = true;
    for s in suites {
        let report = run_suite(s, &Effort::default(), a.seed)?;
        print!("{report}");
        ok &= report.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bounds(a: BoundsArgs) -> qpq::Result<ExitCode> {
    for th in Theorem::ALL {
        println!("{th} N={} k={}: {:.1}", a.n, a.k, bound(th, a.n, a.k)?);
    }
    Ok(ExitCode::SUCCESS)
}
