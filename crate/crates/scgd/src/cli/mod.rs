//! Command-line front end for running, validating, and plotting benchmarks.
//!
//! Exit codes are part of the interface: 0 on success, 2 for configuration
//! and usage problems (unknown keys or profiles, unreadable files, bad
//! flags), 3 when the optimization itself fails (divergence, an oracle that
//! does not converge). `run`/`reproduce` write their artifacts before
//! reporting a partial failure, so a diverging method still leaves the
//! surviving records on disk.

pub mod config;

use crate::bench::csv::{
    aggregate_from_csv, aggregate_to_csv, runs_from_csv, runs_to_csv, AGGREGATE_HEADER,
    RUNS_HEADER,
};
use crate::bench::profiles::{instantiate, Overrides, PreparedExperiment, PROFILE_NAMES};
use crate::bench::svg::{render_gap_plot, PlotSpec};
use crate::bench::{aggregate, run_experiment, AggregateRecord, ExperimentOutcome, Method};
use crate::optimizer::{validate_conditions, FloorSchedule};
use crate::policies::{LambdaSchedule, PolicyKind};
use crate::{Result, ScgdError};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
/// Configuration or usage problem (bad config key, unknown profile, missing file).
pub const EXIT_CONFIG: i32 = 2;
/// The optimization itself failed (divergence, oracle breakdown).
pub const EXIT_RUN: i32 = 3;

/// Coordinate-descent benchmark harness.
#[derive(Debug, Parser)]
#[command(name = "scgd", version, about = "Stochastic coordinate descent benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a configuration file.
    ///
    /// Writes runs.csv, aggregate.csv, gaps.svg, and manifest.json into the
    /// output directory (one subdirectory per instance for multi-instance
    /// configurations).
    Run {
        /// Experiment configuration file (flat `key = value` lines).
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Output directory for artifacts (created if missing).
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Re-run a named built-in profile and write the same artifacts as `run`.
    Reproduce {
        /// Profile name (see --help for the list).
        #[arg(long, value_name = "NAME")]
        profile: String,
        /// Output directory for artifacts (created if missing).
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check the convergence conditions of a configuration's schedule.
    ///
    /// Prints one PASS/FAIL/CANNOT VERIFY line per condition and method.
    /// The exit code reports whether the check ran, not its verdict.
    Validate {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Solve a configuration's objective exactly and print the solution.
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Render an optimality-gap SVG from a runs or aggregate CSV.
    ///
    /// The schema is detected from the header line; per-run records are
    /// aggregated across seeds first.
    Plot {
        /// Input CSV (runs.csv or aggregate.csv schema).
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Plot title (defaults to a generic one).
        #[arg(long, value_name = "TEXT")]
        title: Option<String>,
    },
}

/// Overrides shared by `run` and `reproduce`.
#[derive(Debug, Args)]
pub struct OverrideArgs {
    /// Use run seeds 0..N instead of the configured seed list.
    #[arg(long, value_name = "N")]
    pub seeds: Option<u64>,
    /// Budget in effective passes over the data.
    #[arg(long, value_name = "N")]
    pub passes: Option<u64>,
    /// Comma-separated method subset (e.g. FULL,UNIFORM,MUSKETEER-ABS).
    #[arg(long, value_name = "LIST")]
    pub methods: Option<String>,
    /// Dataset rows.
    #[arg(long, value_name = "N", conflicts_with = "scale")]
    pub n: Option<usize>,
    /// Dataset columns.
    #[arg(long, value_name = "P")]
    pub p: Option<usize>,
    /// Multiply the configured dataset rows by this factor.
    #[arg(long, value_name = "F")]
    pub scale: Option<f64>,
    /// Worker threads for the run grid (default: all cores).
    #[arg(long, value_name = "K")]
    pub parallel: Option<usize>,
    /// Record wall-clock milliseconds in runs.csv.
    ///
    /// Timings vary between machines and runs, so this breaks byte-for-byte
    /// reproducibility of the artifacts; it is off by default.
    #[arg(long)]
    pub record_wall_time: bool,
}

impl OverrideArgs {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            p: self.p,
            n_scale: self.scale,
            seeds: self.seeds,
            passes: self.passes,
            methods: self.methods.as_ref().map(|list| {
                list.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect()
            }),
            record_wall_time: self.record_wall_time,
        }
    }
}

/// Exactly one of a configuration file or a built-in profile name.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Experiment configuration file (flat `key = value` lines).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Built-in profile name.
    #[arg(long, value_name = "NAME")]
    pub profile: Option<String>,
}

impl SourceArgs {
    fn instances(&self) -> Result<Vec<PreparedExperiment>> {
        match (&self.config, &self.profile) {
            (Some(path), None) => config::experiments_from_file(path),
            (None, Some(name)) => instantiate(name, &Overrides::default()),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }
}

/// Parse arguments and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Map an error to the exit-code contract: inputs and configuration → 2,
/// failures of the optimization itself → 3.
fn exit_code(err: &ScgdError) -> i32 {
    match err {
        ScgdError::InvalidConfig(_)
        | ScgdError::UnknownProfile(_)
        | ScgdError::Parse { .. }
        | ScgdError::Io { .. }
        | ScgdError::DimensionMismatch { .. }
        | ScgdError::IndexOutOfRange { .. }
        | ScgdError::InvalidSmoothing(_)
        | ScgdError::LambdaOutOfRange(_)
        | ScgdError::CannotVerify(_) => EXIT_CONFIG,
        _ => EXIT_RUN,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, out, overrides } => {
            let instances =
                config::experiments_from_file_with(&config, &overrides.to_overrides())?;
            execute(instances, &out, overrides.parallel, "run")
        }
        Command::Reproduce { profile, out, overrides } => {
            let instances = instantiate(&profile, &overrides.to_overrides())?;
            execute(instances, &out, overrides.parallel, "reproduce")
        }
        Command::Validate { source } => cmd_validate(&source.instances()?),
        Command::Oracle { source } => cmd_oracle(&source.instances()?),
        Command::Plot { input, out, title } => cmd_plot(&input, &out, title),
    }
}

#[derive(serde::Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    profiles_available: Vec<&'static str>,
    instances: Vec<InstanceEntry>,
}

#[derive(serde::Serialize)]
struct InstanceEntry {
    resolved: crate::bench::profiles::ResolvedProfile,
    f_star: f64,
    record_wall_time: bool,
    artifacts: Vec<String>,
    failures: Vec<FailureEntry>,
}

#[derive(serde::Serialize)]
struct FailureEntry {
    method: String,
    seed: u64,
    message: String,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| ScgdError::io(path, e))
}

/// Run every instance, write its artifacts, and assemble the manifest.
/// Returns exit code 3 when any individual run failed (after writing
/// everything that survived), 0 otherwise.
fn execute(
    instances: Vec<PreparedExperiment>,
    out: &Path,
    parallel: Option<usize>,
    command: &str,
) -> Result<i32> {
    let outcomes: Vec<ExperimentOutcome> = match parallel {
        None => instances.iter().map(|i| run_experiment(&i.config)).collect::<Result<_>>()?,
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| ScgdError::InvalidConfig(format!("cannot build thread pool: {e}")))?;
            pool.install(|| {
                instances.iter().map(|i| run_experiment(&i.config)).collect::<Result<_>>()
            })?
        }
    };

    let multi = instances.len() > 1;
    let mut entries = Vec::with_capacity(instances.len());
    let mut total_failures = 0usize;
    for (instance, outcome) in instances.iter().zip(&outcomes) {
        let label = &instance.resolved.label;
        let dir = if multi { out.join(label) } else { out.to_path_buf() };
        std::fs::create_dir_all(&dir).map_err(|e| ScgdError::io(&dir, e))?;

        write_text(&dir.join("runs.csv"), &runs_to_csv(&outcome.records))?;
        let rows = aggregate_rows(outcome)?;
        write_text(&dir.join("aggregate.csv"), &aggregate_to_csv(&rows))?;
        let title = if label.is_empty() {
            instance.resolved.profile.clone()
        } else {
            format!("{} {label}", instance.resolved.profile)
        };
        let spec = PlotSpec { title, ..PlotSpec::default() };
        write_text(&dir.join("gaps.svg"), &render_gap_plot(&rows, &spec))?;

        let prefix = if multi { format!("{label}/") } else { String::new() };
        total_failures += outcome.failures.len();
        println!(
            "{}{} records, {} failures -> {}",
            if label.is_empty() { String::new() } else { format!("[{label}] ") },
            outcome.records.len(),
            outcome.failures.len(),
            dir.display()
        );
        entries.push(InstanceEntry {
            resolved: instance.resolved.clone(),
            f_star: outcome.f_star,
            record_wall_time: instance.config.options.record_wall_time,
            artifacts: ["runs.csv", "aggregate.csv", "gaps.svg"]
                .iter()
                .map(|name| format!("{prefix}{name}"))
                .collect(),
            failures: outcome
                .failures
                .iter()
                .map(|f| FailureEntry {
                    method: f.method.clone(),
                    seed: f.seed,
                    message: f.message.clone(),
                })
                .collect(),
        });
    }

    let manifest = Manifest {
        tool: "scgd",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        profiles_available: PROFILE_NAMES.to_vec(),
        instances: entries,
    };
    let manifest_path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| ScgdError::InvalidConfig(format!("cannot serialize manifest: {e}")))?;
    text.push('\n');
    write_text(&manifest_path, &text)?;
    println!("manifest: {}", manifest_path.display());

    if total_failures > 0 {
        eprintln!("error: {total_failures} run(s) failed; see manifest.json for details");
        Ok(EXIT_RUN)
    } else {
        Ok(EXIT_OK)
    }
}

/// Aggregate run records across seeds. When some runs failed the surviving
/// records no longer share a common grid, so fall back to an empty aggregate
/// rather than refuse to write artifacts.
fn aggregate_rows(outcome: &ExperimentOutcome) -> Result<Vec<AggregateRecord>> {
    match aggregate(&outcome.records) {
        Ok(rows) => Ok(rows),
        Err(_) if !outcome.failures.is_empty() => {
            eprintln!("note: skipping aggregate statistics (failed runs left an uneven grid)");
            Ok(Vec::new())
        }
        Err(err) => Err(err),
    }
}

/// The effective lower bound βₜ on any coordinate's sampling probability,
/// determined by the policy: full updates touch every coordinate (β = 1),
/// uniform sampling gives β = 1/p, and the adaptive mixture keeps at least
/// λₜ/p of the uniform distribution.
fn floor_for(method: &Method, p: usize, lambda: LambdaSchedule) -> FloorSchedule {
    match method.policy {
        PolicyKind::Full => FloorSchedule::Constant(1.0),
        PolicyKind::Uniform | PolicyKind::UniformIs => FloorSchedule::Constant(1.0 / p as f64),
        PolicyKind::Musketeer | PolicyKind::MusketeerIs => match lambda {
            LambdaSchedule::Constant(bar) => FloorSchedule::Constant(bar / p as f64),
            LambdaSchedule::InverseLog => FloorSchedule::InverseLogOverDim { dim: p },
        },
    }
}

fn cmd_validate(instances: &[PreparedExperiment]) -> Result<i32> {
    let mut all_pass = true;
    for instance in instances {
        let resolved = &instance.resolved;
        let p = instance.config.objective.dim();
        for (name, method) in resolved.methods.iter().zip(&instance.config.methods) {
            let floor = floor_for(method, p, resolved.musketeer.lambda);
            let report = validate_conditions(&instance.config.schedule, &floor);
            all_pass &= report.all_pass();
            let head = if resolved.label.is_empty() {
                name.clone()
            } else {
                format!("[{}] {name}", resolved.label)
            };
            let floor_text = match floor {
                FloorSchedule::Constant(beta) => format!("beta = {beta}"),
                FloorSchedule::InverseLogOverDim { dim } => {
                    format!("beta_t = 1/({dim} ln(t+e))")
                }
            };
            println!("{head} ({floor_text})");
            print!("{report}");
        }
    }
    println!("OVERALL: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok(EXIT_OK)
}

fn cmd_oracle(instances: &[PreparedExperiment]) -> Result<i32> {
    for instance in instances {
        let resolved = &instance.resolved;
        let objective = &instance.config.objective;
        let (theta_star, f_star) = objective.solve_oracle()?;
        let grad = objective.exact_gradient(&theta_star, None)?;
        let grad_inf = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        let head = if resolved.label.is_empty() {
            resolved.objective.clone()
        } else {
            format!("[{}] {}", resolved.label, resolved.objective)
        };
        match &resolved.dataset {
            Some(data) => println!(
                "{head}: n = {}, p = {}, mu = {}",
                data.n, data.p, resolved.mu
            ),
            None => println!("{head}: p = {}", objective.dim()),
        }
        println!("f* = {f_star}");
        println!("max|grad f(theta*)| = {grad_inf:e}");
        let shown = theta_star.len().min(8);
        let coords: Vec<String> =
            theta_star.iter().take(shown).map(|v| format!("{v}")).collect();
        let ellipsis = if theta_star.len() > shown { " ..." } else { "" };
        println!("theta*[0..{shown}] = {}{ellipsis}", coords.join(" "));
    }
    Ok(EXIT_OK)
}

fn cmd_plot(input: &Path, out: &Path, title: Option<String>) -> Result<i32> {
    let text = std::fs::read_to_string(input).map_err(|e| ScgdError::io(input, e))?;
    let rows = match text.lines().next() {
        Some(header) if header == RUNS_HEADER => aggregate(&runs_from_csv(input, &text)?)?,
        Some(header) if header == AGGREGATE_HEADER => aggregate_from_csv(input, &text)?,
        Some(header) => {
            return Err(ScgdError::parse(
                input,
                1,
                format!(
                    "unrecognized header '{header}' (expected '{RUNS_HEADER}' or '{AGGREGATE_HEADER}')"
                ),
            ))
        }
        None => return Err(ScgdError::parse(input, 1, "empty file".to_string())),
    };
    let spec = match title {
        Some(title) => PlotSpec { title, ..PlotSpec::default() },
        None => PlotSpec::default(),
    };
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| ScgdError::io(parent, e))?;
        }
    }
    write_text(out, &render_gap_plot(&rows, &spec))?;
    println!("{} series -> {}", count_series(&rows), out.display());
    Ok(EXIT_OK)
}

fn count_series(rows: &[AggregateRecord]) -> usize {
    let mut names: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    names.dedup();
    names.sort_unstable();
    names.dedup();
    names.len()
}
