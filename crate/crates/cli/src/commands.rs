use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use votesim_core::engine::{self, replay, sweep_with_jobs, SweepAxis, SweepError};

use crate::output;
use crate::scenario::{Scenario, ScenarioError};
use crate::trajfile::{self, TrajectoryFileError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
    #[error("{path}: {source}")]
    Trajectory {
        path: PathBuf,
        source: TrajectoryFileError,
    },
    #[error("{0}")]
    ReplayMismatch(String),
    #[error("replay diverged at step {step}: {field}")]
    Diverged { step: u64, field: String },
}

impl CliError {
    /// Stable, greppable error code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Scenario(ScenarioError::Io { .. }) | CliError::Io { .. } => "E_IO",
            CliError::Scenario(ScenarioError::Parse(_)) => "E_PARSE",
            CliError::Scenario(ScenarioError::Schema { .. }) => "E_SCHEMA",
            CliError::Run(_) => "E_RUN",
            CliError::Trajectory { .. } => "E_TRAJECTORY",
            CliError::ReplayMismatch(_) => "E_REPLAY_MISMATCH",
            CliError::Diverged { .. } => "E_REPLAY_DIVERGED",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "E_USAGE" => 2,
            "E_PARSE" | "E_SCHEMA" => 3,
            "E_IO" => 4,
            "E_RUN" => 5,
            "E_TRAJECTORY" => 6,
            "E_REPLAY_MISMATCH" => 7,
            _ => 8,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(path)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Run(format!("csv: {e}")))?;
    Ok(buf)
}

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub scenario: PathBuf,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub record_voters: bool,
    pub no_trajectory: bool,
}

#[derive(Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub steps: u64,
    pub abstention_rate: f64,
    pub files: Vec<PathBuf>,
}

pub fn cmd_run(args: &RunArgs) -> Result<RunSummary, CliError> {
    let scenario = Scenario::load(&args.scenario)?.with_seed(args.seed);
    let record_voters = args.record_voters || scenario.output.record_voters;
    let out = engine::run(
        &scenario.params,
        &scenario.candidates,
        &scenario.schedule,
        record_voters,
    )
    .map_err(|e| CliError::Run(e.to_string()))?;

    let seed = scenario.params.seed;
    let result = csv_bytes(|b| {
        output::write_result(b, seed, out.world.time, &scenario.candidates, &out.metrics)
    })?;
    let series = csv_bytes(|b| output::write_series(b, seed, &scenario.candidates, &out.metrics))?;

    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let mut files = vec![
        write_file(&args.out, output::RESULT_FILE, &result)?,
        write_file(&args.out, output::SERIES_FILE, &series)?,
    ];
    if scenario.output.trajectory && !args.no_trajectory {
        files.push(write_file(
            &args.out,
            trajfile::FILE_NAME,
            &trajfile::encode(&out.trajectory),
        )?);
    }
    Ok(RunSummary {
        seed,
        steps: out.world.time,
        abstention_rate: out.metrics.final_result.abstention_rate(),
        files,
    })
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub scenario: PathBuf,
    pub axis: String,
    pub values: String,
    pub seeds: String,
    pub jobs: Option<usize>,
    pub out: PathBuf,
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|v| v.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!(
            "--values expects a comma-separated list of numbers, got `{text}`"
        ))),
    }
}

/// Accepts `a..b` (inclusive) or a comma-separated list.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("--seeds expects `a..b` or `s1,s2,...`, got `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<PathBuf>, CliError> {
    let axis: SweepAxis = args
        .axis
        .parse()
        .map_err(|e: SweepError| CliError::Usage(e.to_string()))?;
    let values = parse_values(&args.values)?;
    let seeds = parse_seeds(&args.seeds)?;
    let scenario = Scenario::load(&args.scenario)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = sweep_with_jobs(
        &scenario.params,
        &scenario.candidates,
        &scenario.schedule,
        axis,
        &values,
        &seeds,
        jobs,
    )
    .map_err(|e| match e {
        SweepError::UnknownAxis(_) | SweepError::BadValue(..) => CliError::Usage(e.to_string()),
        SweepError::Run { .. } => CliError::Run(e.to_string()),
    })?;

    let table = csv_bytes(|b| output::write_sweep(b, axis, &scenario.candidates, &rows))?;
    let aggregate = output::aggregate(&rows);
    let agg = csv_bytes(|b| output::write_aggregate(b, axis, &scenario.candidates, &aggregate))?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    Ok(vec![
        write_file(&args.out, output::SWEEP_FILE, &table)?,
        write_file(&args.out, output::SWEEP_AGGREGATE_FILE, &agg)?,
    ])
}

#[derive(Debug, Clone)]
pub struct ReplayArgs {
    pub trajectory: PathBuf,
    pub scenario: PathBuf,
    pub seed: Option<u64>,
}

/// Returns the number of records checked when the replay is faithful.
pub fn cmd_replay(args: &ReplayArgs) -> Result<usize, CliError> {
    let bytes = fs::read(&args.trajectory).map_err(io_err(&args.trajectory))?;
    let trajectory = trajfile::decode(&bytes).map_err(|source| CliError::Trajectory {
        path: args.trajectory.clone(),
        source,
    })?;
    let scenario = Scenario::load(&args.scenario)?.with_seed(args.seed);
    let report = replay(
        &trajectory,
        &scenario.params,
        &scenario.candidates,
        &scenario.schedule,
    )
    .map_err(|e| match e {
        engine::ReplayError::Mismatch(m) => CliError::ReplayMismatch(m),
        engine::ReplayError::Engine(e) => CliError::Run(e.to_string()),
    })?;
    match report.first_divergence {
        None => Ok(report.records_compared),
        Some(d) => Err(CliError::Diverged {
            step: d.step,
            field: d.field,
        }),
    }
}
