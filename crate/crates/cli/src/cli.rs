//! Command-line interface.

use std::fmt::Write as _;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use wardsim::experiment::ConfigError;
use wardsim::reporting::{compare_results, delay_csv, occupancy_csv, ResultsTable, TableFormat, DEFAULT_TOLERANCE};
use wardsim::verify::run_suite;
use wardsim::{Experiment, ExperimentError, ModelId, SweepAxis};

use crate::api::{serve, ServeConfig};
use crate::report::{execute, Execution};

pub const EXIT_OK: u8 = 0;
pub const EXIT_TOLERANCE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const SEED_ENV: &str = "WARDSIM_SEED";

#[derive(Debug, Parser)]
#[command(name = "wardsim", version, about = "Hospital bed capacity simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write result tables.
    Run(RunArgs),
    /// Run an experiment once per value of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Dotted parameter path, e.g. n_beds or arrivals.Elective.mean.
        #[arg(long)]
        param: String,
        /// Values as `a:b` (integer steps), `a:b:step` or `v1,v2,...`.
        #[arg(long)]
        values: String,
    },
    /// Compare two results_full.csv files (or output directories).
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Relative tolerance on KPI means.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Print a shipped example experiment document.
    ExampleConfig {
        model: ModelId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Allowed browser origin; repeat for several, `*` for any.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
        /// Largest accepted run length × replications, in years.
        #[arg(long, default_value_t = crate::api::DEFAULT_MAX_REPLICATION_YEARS)]
        max_replication_years: f64,
    },
    /// Run the built-in verification checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
        model: SuiteChoice,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    Ccu,
    Stroke,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment JSON document.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; falls back to the document, then WARDSIM_SEED, then 0
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<u32>,
    /// Run length in the model's time unit.
    #[arg(long)]
    pub run_length: Option<f64>,
    /// Warm-up period in the model's time unit.
    #[arg(long)]
    pub warm_up: Option<f64>,
    /// Write trace.txt with one line per event.
    #[arg(long)]
    pub trace: bool,
    /// Output directory, created if missing.
    #[arg(long, default_value = "wardsim-out")]
    pub out: PathBuf,
    /// Table format printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Why a command could not finish; maps onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Config(ConfigError),
    Tolerance,
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Tolerance => EXIT_TOLERANCE,
            _ => EXIT_USAGE,
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => Failure::Config(c),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

/// Seed precedence: flag, then the document, then the environment, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64, Failure> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(v) => v
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(0),
    }
}

/// Loads a document and applies command-line overrides. Overrides go
/// through the same validation as document values.
pub fn load_experiment(args: &RunArgs) -> Result<Experiment, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(ConfigError::single("", format!("invalid JSON: {e}"))))?;
    let mut exp = Experiment::parse_value(value).map_err(Failure::Config)?;
    let env = std::env::var(SEED_ENV).ok();
    exp.set_seed(resolve_seed(args.seed, exp.seed(), env.as_deref())?);
    if let Some(n) = args.replications {
        exp.set_replications(n);
    }
    if let Some(v) = args.run_length {
        exp.set_run_length(v);
    }
    if let Some(v) = args.warm_up {
        exp.set_warm_up(v);
    }
    if args.trace {
        exp.set_trace(true);
    }
    exp.validate().map_err(Failure::Config)?;
    Ok(exp)
}

/// Parses `a:b`, `a:b:step` or a comma-separated list.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("cannot parse values {spec:?}; use a:b, a:b:step or v1,v2");
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a), num(b), Some(1.0)),
            [a, b, s] => (num(a), num(b), num(s)),
            _ => return Err(bad()),
        };
        let (lo, hi, step) = match (lo, hi, step) {
            (Some(l), Some(h), Some(s)) if s > 0.0 && l <= h => (l, h, s),
            _ => return Err(bad()),
        };
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| lo + step * i as f64).collect())
    } else {
        spec.split(',').map(|s| num(s).ok_or_else(bad)).collect()
    }
}

/// Files a run writes, computed fully before anything touches the disk.
pub fn output_files(exec: &Execution) -> Vec<(String, String)> {
    let table = exec.report.table();
    let mut files = vec![
        ("results.csv".into(), table.render(TableFormat::Csv).expect("non-empty")),
        ("results.md".into(), table.render(TableFormat::Markdown).expect("non-empty")),
        ("results_full.csv".into(), table.to_machine_csv().expect("non-empty")),
    ];
    let several = exec.report.scenarios.len() > 1;
    if exec.report.model == ModelId::Stroke {
        for s in &exec.report.scenarios {
            for u in &s.summary.units {
                let suffix = if several {
                    format!("{}_{}", u.unit, s.label.replace(['=', '.', '/'], "_"))
                } else {
                    u.unit.clone()
                };
                if let Some(pmf) = &u.pmf {
                    files.push((format!("occupancy_{suffix}.csv"), occupancy_csv(pmf)));
                }
                if let Some(curve) = &u.delay {
                    files.push((format!("delay_{suffix}.csv"), delay_csv(curve)));
                }
            }
        }
    }
    let traced: Vec<_> = exec
        .runs
        .iter()
        .filter(|(_, run)| run.results.iter().any(|r| !r.trace.is_empty()))
        .collect();
    if !traced.is_empty() {
        let mut text = String::new();
        for (label, run) in traced {
            for r in &run.results {
                let _ = writeln!(text, "# scenario={label} replication={}", r.replication);
                for line in &r.trace {
                    text.push_str(line);
                    text.push('\n');
                }
            }
        }
        files.push(("trace.txt".into(), text));
    }
    files
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run_command(args: &RunArgs, sweep: Option<SweepAxis>, out: &mut String) -> Result<(), Failure> {
    let exp = load_experiment(args)?;
    let exec = execute(&exp, sweep.as_ref())?;
    let files = output_files(&exec);
    write_outputs(&args.out, &files)?;
    let table = exec.report.table();
    let rendered = match args.format {
        Format::Csv => table.render(TableFormat::Csv),
        Format::Md => table.render(TableFormat::Markdown),
    }
    .expect("non-empty");
    out.push_str(&rendered);
    let mut warnings: Vec<&String> = Vec::new();
    for s in &exec.report.scenarios {
        for w in &s.summary.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    for w in warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(
        out,
        "seed {}; {} replication(s); wrote {} file(s) to {}",
        exec.report.seed,
        exec.report.replications,
        files.len(),
        args.out.display()
    );
    Ok(())
}

fn read_table(path: &Path) -> Result<ResultsTable, Failure> {
    let file = if path.is_dir() {
        path.join("results_full.csv")
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
    ResultsTable::from_machine_csv(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))
}

fn diff_command(a: &Path, b: &Path, tol: f64, out: &mut String) -> Result<(), Failure> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Usage(format!("--tol must be >= 0, got {tol}")));
    }
    let (ta, tb) = (read_table(a)?, read_table(b)?);
    let report = compare_results(&ta, &tb, tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let _ = writeln!(out, "{report}");
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Tolerance)
    }
}

/// Runs one parsed command. Normal output is appended to `out`; the
/// returned value is the process exit code.
pub fn dispatch(cli: Cli, out: &mut String, err: &mut String) -> u8 {
    let result = match cli.command {
        Command::Run(args) => run_command(&args, None, out),
        Command::Sweep { run, param, values } => match parse_values(&values) {
            Ok(vals) => run_command(&run, Some(SweepAxis::new(param, vals)), out),
            Err(e) => Err(Failure::Usage(e)),
        },
        Command::Diff { a, b, tol } => diff_command(&a, &b, tol, out),
        Command::ExampleConfig { model, out: path } => {
            let text = Experiment::example_json(model);
            match path {
                Some(p) => fs::write(&p, text)
                    .with_context(|| format!("writing {}", p.display()))
                    .map_err(Failure::Io),
                None => {
                    out.push_str(text);
                    Ok(())
                }
            }
        }
        Command::Serve {
            bind,
            cors_origins,
            max_replication_years,
        } => serve(ServeConfig {
            bind,
            cors_origins,
            max_replication_years,
        })
        .map_err(Failure::Io),
        Command::Selftest { model } => {
            let models = match model {
                SuiteChoice::Ccu => vec![ModelId::Ccu],
                SuiteChoice::Stroke => vec![ModelId::Stroke],
                SuiteChoice::All => vec![ModelId::Ccu, ModelId::Stroke],
            };
            let report = run_suite(&models);
            let _ = writeln!(out, "{report}");
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Tolerance)
            }
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(m) => {
                    let _ = writeln!(err, "error: {m}");
                }
                Failure::Config(c) => {
                    let _ = writeln!(err, "error: invalid experiment");
                    for e in c.errors() {
                        let _ = writeln!(err, "  {e}");
                    }
                }
                Failure::Io(e) => {
                    let _ = writeln!(err, "error: {e:#}");
                }
                Failure::Tolerance => {}
            }
            f.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some(2), Some("3")).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(2), Some("3")).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some("3")).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), 0);
        assert!(resolve_seed(None, None, Some("abc")).is_err());
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("23:28").unwrap(), vec![23.0, 24.0, 25.0, 26.0, 27.0, 28.0]);
        assert_eq!(parse_values("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_values("5, 7").unwrap(), vec![5.0, 7.0]);
        assert_eq!(parse_values("24").unwrap(), vec![24.0]);
        for bad in ["", "3:1", "1:2:0", "a:b", "1:2:3:4", "1,,2"] {
            assert!(parse_values(bad).is_err(), "{bad}");
        }
    }
}
