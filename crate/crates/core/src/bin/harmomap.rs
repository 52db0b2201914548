use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use harmomap::experiments::{list_experiments, load_config, registry, run_experiment, ExperimentReport};
use harmomap::Error;

#[derive(Parser)]
#[command(name = "harmomap", version, about = "Free-particle to oscillator mapping experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the registered experiments.
    List,
    /// Run one experiment, or `all` with the bundled defaults.
    Run {
        experiment: String,
        /// JSON config; the bundled default is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for `run all`.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const CONFIG_ERROR: u8 = 2;
const NUMERICAL_ERROR: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => CONFIG_ERROR,
        _ => NUMERICAL_ERROR,
    }
}

fn finish(results: Vec<(String, harmomap::Result<ExperimentReport>)>) -> ExitCode {
    let mut code = 0;
    for (name, result) in results {
        match result {
            Ok(report) => {
                print!("{}", report.summary());
                if !report.pass {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("{name}: {e}");
                code = code.max(error_code(&e));
            }
        }
    }
    ExitCode::from(code)
}

fn run(experiment: String, config: Option<PathBuf>, out: Option<PathBuf>, jobs: usize) -> ExitCode {
    let out = out.as_deref();
    if experiment == "all" {
        if config.is_some() {
            eprintln!("`run all` uses the bundled configs; drop --config");
            return ExitCode::from(CONFIG_ERROR);
        }
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("thread pool: {e}");
                return ExitCode::from(NUMERICAL_ERROR);
            }
        };
        let results = pool.install(|| {
            use rayon::prelude::*;
            list_experiments()
                .par_iter()
                .map(|name| (name.to_string(), run_experiment(&registry::default_config(name), out)))
                .collect()
        });
        return finish(results);
    }
    if !list_experiments().contains(&experiment.as_str()) {
        eprintln!("unknown experiment \"{experiment}\" (see `harmomap list`)");
        return ExitCode::from(CONFIG_ERROR);
    }
    let cfg = match config {
        Some(path) => match load_config(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(error_code(&e));
            }
        },
        None => registry::default_config(&experiment),
    };
    if cfg.experiment != experiment {
        eprintln!("config is for \"{}\", not \"{experiment}\"", cfg.experiment);
        return ExitCode::from(CONFIG_ERROR);
    }
    finish(vec![(experiment, run_experiment(&cfg, out))])
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for name in list_experiments() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            out,
            jobs,
        } => run(experiment, config, out, jobs),
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!("{}: ok ({})", config.display(), cfg.experiment);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                ExitCode::from(error_code(&e))
            }
        },
    }
}
