//! Command-line front end.
//!
//! Exit codes: 0 when every requested cell completed, 1 for usage errors
//! (reported before any computation), 2 for runtime or cell failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::seeds::SEED_SCHEME;
use crate::experiments::{
    closed_form_candidates, compare_tiny, exact_tiny_oracle, run_cell, run_experiment,
    CellConfig, ExperimentConfig, ExperimentReport, FailedCell, NoiseModel, ReportRecord,
};
use crate::strategies::Strategy;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "deanon", version, about = "Simulate active de-anonymization attacks and estimate their query counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one experiment cell.
    Run(RunArgs),
    /// Run the cross product of comma-separated or repeated parameter lists.
    Sweep(SweepArgs),
    /// Exact expected query count of a tiny noiseless instance.
    Oracle(OracleArgs),
    /// Check the simulator against the exact oracle and the closed forms.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Fill the runtime_s column (output is then no longer reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Strategy,
    #[arg(long)]
    pub users: usize,
    #[arg(long)]
    pub groups: usize,
    #[arg(long = "edge-prob")]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    pub e1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub e2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f2: f64,
    #[arg(long)]
    pub nprime: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw one graph pair per cell instead of one per trial.
    #[arg(long = "fixed-graph")]
    pub fixed_graph: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_strategy, value_delimiter = ',', required = true)]
    pub strategy: Vec<Strategy>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub users: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub groups: Vec<usize>,
    #[arg(long = "edge-prob", value_delimiter = ',', required = true)]
    pub edge_prob: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub e1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub e2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub f1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub f2: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub nprime: Vec<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "fixed-graph")]
    pub fixed_graph: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Strategy,
    #[arg(long)]
    pub users: usize,
    #[arg(long)]
    pub groups: usize,
    #[arg(long = "edge-prob")]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 1)]
    pub nprime: usize,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A flag problem found after parsing; reported with exit code 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

fn check_prob(flag: &str, v: f64) -> std::result::Result<(), UsageError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(UsageError(format!("{flag} must be in [0,1] (got {v})")))
    }
}

fn check_positive(flag: &str, v: usize) -> std::result::Result<(), UsageError> {
    if v == 0 {
        Err(UsageError(format!("{flag} must be at least 1")))
    } else {
        Ok(())
    }
}

fn check_typicality(epsilon: Option<f64>, rounds: Option<usize>) -> std::result::Result<(), UsageError> {
    if let Some(eps) = epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(UsageError(format!("epsilon must be positive (got {eps})")));
        }
    }
    if rounds == Some(0) {
        return Err(UsageError("rounds must be at least 1".into()));
    }
    Ok(())
}

impl RunArgs {
    /// Validates every flag and builds the cell.
    pub fn to_cell(&self) -> std::result::Result<CellConfig, UsageError> {
        check_positive("users", self.users)?;
        check_positive("groups", self.groups)?;
        check_positive("trials", self.trials)?;
        check_prob("edge-prob", self.edge_prob)?;
        for (flag, v) in [("e1", self.e1), ("e2", self.e2), ("f1", self.f1), ("f2", self.f2)] {
            check_prob(flag, v)?;
        }
        if let Some(np) = self.nprime {
            if np > self.groups {
                return Err(UsageError(format!(
                    "nprime {np} exceeds the number of groups {}",
                    self.groups
                )));
            }
        }
        check_typicality(self.epsilon, self.rounds)?;
        let model = NoiseModel { p: self.edge_prob, e1: self.e1, e2: self.e2, f1: self.f1, f2: self.f2 };
        let mut cell = CellConfig::new(self.strategy, self.users, self.groups, model)
            .with_trials(self.trials)
            .with_seed(self.seed);
        cell.n_prime = self.nprime;
        cell.epsilon = self.epsilon;
        cell.rounds = self.rounds;
        cell.fixed_graph = self.fixed_graph;
        cell.timing = self.output.timing;
        Ok(cell)
    }
}

impl SweepArgs {
    pub fn to_config(&self) -> std::result::Result<ExperimentConfig, UsageError> {
        check_positive("trials", self.trials)?;
        for &m in &self.users {
            check_positive("users", m)?;
        }
        for &n in &self.groups {
            check_positive("groups", n)?;
        }
        let lists = [
            ("edge-prob", &self.edge_prob),
            ("e1", &self.e1),
            ("e2", &self.e2),
            ("f1", &self.f1),
            ("f2", &self.f2),
        ];
        for (flag, values) in lists {
            for &v in values {
                check_prob(flag, v)?;
            }
        }
        let min_groups = self.groups.iter().copied().min().unwrap_or(0);
        if let Some(&np) = self.nprime.iter().find(|&&np| np > min_groups) {
            return Err(UsageError(format!(
                "nprime {np} exceeds the number of groups {min_groups}"
            )));
        }
        check_typicality(self.epsilon, self.rounds)?;
        Ok(ExperimentConfig {
            strategies: self.strategy.clone(),
            users: self.users.clone(),
            groups: self.groups.clone(),
            edge_probs: self.edge_prob.clone(),
            e1: self.e1.clone(),
            e2: self.e2.clone(),
            f1: self.f1.clone(),
            f2: self.f2.clone(),
            n_primes: self.nprime.clone(),
            epsilon: self.epsilon,
            rounds: self.rounds,
            trials: self.trials,
            master_seed: self.seed,
            confidence: 0.95,
            fixed_graph: self.fixed_graph,
            timing: self.output.timing,
        })
    }
}

/// First line of every CSV report.
pub fn header_comment() -> String {
    format!("# deanon {}; {}", env!("CARGO_PKG_VERSION"), SEED_SCHEME)
}

/// Writes a report as CSV (header comment, one row per completed cell,
/// `# failed_cells:` footer lines) or as a JSON array of records, followed by
/// a `{"failed_cells": [...]}` object when some cell failed.
pub fn emit_report<W: Write>(report: &ExperimentReport, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", header_comment())?;
            {
                let mut writer = csv::WriterBuilder::new().has_headers(true).from_writer(&mut out);
                if report.records.is_empty() {
                    writer
                        .write_record(CSV_COLUMNS)
                        .map_err(csv_error)?;
                }
                for record in &report.records {
                    writer.serialize(record).map_err(csv_error)?;
                }
                writer.flush()?;
            }
            for failed in &report.failed_cells {
                writeln!(
                    out,
                    "# failed_cells: {} [{}] {}",
                    failed.index, failed.description, failed.error
                )?;
            }
        }
        Format::Json => {
            let mut values: Vec<serde_json::Value> = report
                .records
                .iter()
                .map(serde_json::to_value)
                .collect::<std::result::Result<_, _>>()
                .map_err(json_error)?;
            if !report.failed_cells.is_empty() {
                values.push(serde_json::json!({ "failed_cells": report.failed_cells }));
            }
            serde_json::to_writer_pretty(&mut out, &values).map_err(json_error)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Column names of the CSV report, in order.
pub const CSV_COLUMNS: [&str; 22] = [
    "strategy",
    "m",
    "n",
    "p",
    "e1",
    "e2",
    "f1",
    "f2",
    "nprime",
    "epsilon",
    "rounds",
    "trials",
    "seed",
    "mean_q",
    "std_q",
    "ci95_halfwidth",
    "mean_gm_q",
    "mean_uid_q",
    "mean_ambiguity",
    "q_per_log2m",
    "theory_ref_value",
    "runtime_s",
];

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Io(io::Error::other(e))
}

/// Inverse of the JSON branch of [`emit_report`].
pub fn parse_json_report(text: &str) -> Result<ExperimentReport> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Record(Box<ReportRecord>),
        Failed { failed_cells: Vec<FailedCell> },
    }
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(json_error)?;
    let mut report = ExperimentReport::default();
    for entry in entries {
        match entry {
            Entry::Record(r) => report.records.push(*r),
            Entry::Failed { failed_cells } => report.failed_cells.extend(failed_cells),
        }
    }
    Ok(report)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(io::Error::other(e)))?;
    Ok(pool.install(f))
}

fn finish(report: &ExperimentReport, output: &OutputArgs) -> u8 {
    match open_output(&output.out).and_then(|w| emit_report(report, output.format, w)) {
        Ok(()) if report.failed_cells.is_empty() => EXIT_OK,
        Ok(()) => {
            for failed in &report.failed_cells {
                eprintln!("error: cell {} failed: {}", failed.index, failed.error);
            }
            EXIT_FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[derive(Serialize)]
struct OracleRecord {
    strategy: String,
    m: usize,
    n: usize,
    p: f64,
    nprime: usize,
    epsilon: Option<f64>,
    rounds: Option<usize>,
    expected_q: f64,
}

fn run_oracle(args: &OracleArgs) -> std::result::Result<u8, UsageError> {
    check_prob("edge-prob", args.edge_prob)?;
    check_typicality(args.epsilon, args.rounds)?;
    let value = exact_tiny_oracle(
        args.strategy,
        args.users,
        args.groups,
        args.edge_prob,
        args.nprime,
        args.epsilon,
        args.rounds,
    )
    .map_err(|e| UsageError(e.to_string()))?;
    let record = OracleRecord {
        strategy: args.strategy.to_string(),
        m: args.users,
        n: args.groups,
        p: args.edge_prob,
        nprime: args.nprime,
        epsilon: args.epsilon,
        rounds: args.rounds,
        expected_q: value,
    };
    let written = open_output(&args.out).and_then(|mut w| {
        match args.format {
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(&mut w);
                writer.serialize(&record).map_err(csv_error)?;
                writer.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &record).map_err(json_error)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    });
    Ok(match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    })
}

/// One line of selftest output.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Tiny-oracle equivalence for every strategy on m in {2,3}, n in {1,2,3},
/// p in {0.25,0.5} (4 standard errors), oracle dominance of MAP over GIS, and
/// the noiseless candidate-set closed forms (3 standard errors).
pub fn selftest_checks(trials: usize, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name: String, outcome: Result<(bool, String)>| {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, e.to_string()));
        checks.push(Check { name, passed, detail });
    };
    for m in [2, 3] {
        for n in [1, 2, 3] {
            for p in [0.25, 0.5] {
                for strategy in Strategy::ALL {
                    let outcome = compare_tiny(strategy, m, n, p, trials, seed).map(|c| {
                        let z = c.z();
                        (z <= 4.0, format!("exact {:.6} estimate {:.6} z {:.2}", c.exact, c.estimate.mean, z))
                    });
                    push(format!("tiny {strategy} m={m} n={n} p={p}"), outcome);
                }
                let dominance = (|| {
                    let np = n.saturating_sub(1).max(1);
                    let gis = exact_tiny_oracle(Strategy::Gis, m, n, p, np, None, None)?;
                    let map = exact_tiny_oracle(Strategy::Map, m, n, p, np, None, None)?;
                    Ok((map <= gis + 1e-12, format!("map {map:.6} gis {gis:.6}")))
                })();
                push(format!("tiny map<=gis m={m} n={n} p={p}"), dominance);
            }
        }
    }
    for strategy in [Strategy::Gis, Strategy::Map] {
        let outcome = (|| {
            let model = NoiseModel::noiseless(0.3);
            let cfg = CellConfig::new(strategy, 1000, 200, model)
                .with_nprime(10)
                .with_trials(trials.min(5000))
                .with_seed(seed);
            let target = closed_form_candidates(strategy, 1000, &model, 10)?;
            let r = run_cell(&cfg, 0)?;
            let z = r.ambiguity.z_score(target);
            Ok((z <= 3.0, format!("closed form {target:.4} estimate {:.4} z {z:.2}", r.ambiguity.mean)))
        })();
        push(format!("closed form {strategy} m=1000 n'=10 p=0.3"), outcome);
    }
    checks
}

fn run_selftest(args: &SelftestArgs) -> std::result::Result<u8, UsageError> {
    check_positive("trials", args.trials)?;
    let checks = match with_jobs(args.jobs, || selftest_checks(args.trials, args.seed)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_FAILURE);
        }
    };
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn dispatch(cli: Cli) -> std::result::Result<u8, UsageError> {
    match cli.command {
        Command::Run(args) => {
            let cell = args.to_cell()?;
            let report = with_jobs(args.output.jobs, || run_experiment(std::slice::from_ref(&cell)));
            Ok(match report {
                Ok(r) => finish(&r, &args.output),
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAILURE
                }
            })
        }
        Command::Sweep(args) => {
            let config = args.to_config()?;
            let cells = config.cells().map_err(|e| UsageError(e.to_string()))?;
            Ok(match with_jobs(args.output.jobs, || run_experiment(&cells)) {
                Ok(r) => finish(&r, &args.output),
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAILURE
                }
            })
        }
        Command::Oracle(args) => run_oracle(&args),
        Command::Selftest(args) => run_selftest(&args),
    }
}

/// Parses `args` (program name first), runs the command and returns its exit
/// code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
