use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use sobench::cli::{self, RunFlags};
use sobench::problems::ProblemRegistry;
use std::path::PathBuf;
use std::process::ExitCode;

/// Benchmark simulation-optimization algorithms on noisy testbed problems.
#[derive(Parser)]
#[command(name = "sobench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered problems and algorithms
    List,
    /// Run macroreplications of each selected (problem, algorithm) pair
    Run {
        /// Plain-text key=value config file; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated problem ids, or "all"
        #[arg(long)]
        problems: Option<String>,
        /// Comma-separated algorithm ids, or "all"
        #[arg(long)]
        algorithms: Option<String>,
        /// Independent runs per (problem, algorithm) pair
        #[arg(long)]
        macroreps: Option<u32>,
        /// Replication budget per run, overriding each problem's default
        #[arg(long)]
        budget: Option<u64>,
        /// Master seed; everything else derives from it
        #[arg(long)]
        seed: Option<u64>,
        /// Start every run from the problem's deliberately poor initial point
        #[arg(long)]
        bad_start: bool,
        /// Worker threads (default: all cores); outputs do not depend on this
        #[arg(long)]
        jobs: Option<usize>,
        /// Output root directory (default "out")
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate trajectory CSVs of one problem into solution-quality curves
    Report {
        /// Trajectory CSV files produced by `run`
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Directory for curve CSVs (default: `curves/` beside the inputs)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(parsed) => parsed,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help on stdout and usage errors on stderr.
            err.print().expect("write to terminal");
            return ExitCode::from(code);
        }
    };

    let registry = ProblemRegistry::builtin();
    let result = match parsed.command {
        Command::List => {
            print!("{}", cli::cmd_list(&registry));
            Ok(())
        }
        Command::Run {
            config,
            problems,
            algorithms,
            macroreps,
            budget,
            seed,
            bad_start,
            jobs,
            out,
        } => {
            let flags = RunFlags {
                config,
                problems,
                algorithms,
                macroreps,
                budget,
                seed,
                bad_start,
                out,
            };
            cli::resolve_config(&registry, &flags)
                .and_then(|config| cli::cmd_run(&registry, &config, jobs))
        }
        Command::Report { inputs, out } => cli::cmd_report(&registry, &inputs, out.as_deref()),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
