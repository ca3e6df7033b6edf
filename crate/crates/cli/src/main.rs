use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use simcli::commands::{cmd_replay, cmd_run, cmd_sweep, CliError, ReplayArgs, RunArgs, SweepArgs};

#[derive(Parser)]
#[command(name = "simcli", version, about = "Headless election simulator with scandals and abstention")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write result.csv, series.csv and trajectory.bin-v1.
    Run {
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Store every voter position in the trajectory.
        #[arg(long)]
        record_voters: bool,
        /// Skip writing the trajectory file.
        #[arg(long)]
        no_trajectory: bool,
    },
    /// Run the scenario over a grid of parameter values and seeds.
    Sweep {
        scenario: PathBuf,
        /// scandal-potential, falloff-rate, appeasement-delta, max-openness, max-tolerance or num-voters.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. 0,0.25,0.5.
        #[arg(long)]
        values: String,
        /// Inclusive range `1..30` or a comma-separated list.
        #[arg(long)]
        seeds: String,
        /// Maximum worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-execute a scenario and check it against a recorded trajectory.
    Replay {
        trajectory: PathBuf,
        scenario: PathBuf,
        /// Seed the original run was overridden with, if any.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn report(err: &CliError) {
    let color = std::env::var_os("SIMCLI_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    let label = if color { "\x1b[31merror\x1b[0m" } else { "error" };
    eprintln!("{label}[{}]: {err}", err.code());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&CliError::Usage(e.render().to_string().trim_end().to_string()));
            return ExitCode::from(2);
        }
    };

    let outcome = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            record_voters,
            no_trajectory,
        } => cmd_run(&RunArgs {
            scenario,
            seed,
            out,
            record_voters,
            no_trajectory,
        })
        .map(|s| {
            println!(
                "seed {}: {} steps, abstention rate {}",
                s.seed, s.steps, s.abstention_rate
            );
            for f in s.files {
                println!("wrote {}", f.display());
            }
        }),
        Command::Sweep {
            scenario,
            axis,
            values,
            seeds,
            jobs,
            out,
        } => cmd_sweep(&SweepArgs {
            scenario,
            axis,
            values,
            seeds,
            jobs,
            out,
        })
        .map(|files| {
            for f in files {
                println!("wrote {}", f.display());
            }
        }),
        Command::Replay {
            trajectory,
            scenario,
            seed,
        } => cmd_replay(&ReplayArgs {
            trajectory,
            scenario,
            seed,
        })
        .map(|n| println!("replay ok: {n} records match")),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
