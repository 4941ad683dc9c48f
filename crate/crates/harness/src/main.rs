use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use fraclog_harness::experiments::{self, EXPERIMENTS};
use fraclog_harness::{run_acceptance, ExperimentConfig, ExperimentReport};

const DEFAULT_SEED: u64 = 20240611;

#[derive(Parser)]
#[command(
    name = "fraclog",
    version,
    about = "Experiments for the logarithmic fractional Schrödinger solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available experiments.
    List,
    /// Run one experiment, or `all` with default configurations.
    Run {
        name: String,
        /// TOML config; defaults to the experiment's built-in configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the resolved config as TOML instead of running.
        #[arg(long)]
        print_config: bool,
    },
    /// Run the acceptance suite; exits nonzero if any criterion fails.
    Check {
        #[arg(long, default_value = "fraclog-check")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn summarize(report: &ExperimentReport) {
    for a in &report.assertions {
        let verdict = match a.verdict {
            fraclog_harness::Verdict::Pass => "pass",
            fraclog_harness::Verdict::Fail => "FAIL",
            fraclog_harness::Verdict::Diagnostic => "info",
        };
        println!("  [{verdict}] {} = {:.4e}  {}", a.id, a.measured, a.detail);
    }
}

fn resolve(name: &str, config: Option<&PathBuf>, out: Option<&PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let exp = experiments::find(name)?;
    let mut cfg = match config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.name != name {
                bail!("config names experiment {:?}, not {name:?}", cfg.name);
            }
            cfg
        }
        None => match seed {
            Some(s) => exp.configured(s, &exp.default_config().output_dir),
            None => exp.default_config(),
        },
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(name: &str, config: Option<PathBuf>, out: Option<PathBuf>, seed: Option<u64>, print: bool) -> Result<bool> {
    let names: Vec<&str> = if name == "all" {
        if config.is_some() {
            bail!("`run all` uses the built-in configurations; pass --config with a single experiment");
        }
        EXPERIMENTS.iter().map(|e| e.name).collect()
    } else {
        vec![name]
    };
    let mut ok = true;
    for n in names {
        let out_dir = match (&out, name == "all") {
            (Some(o), true) => Some(o.join(n)),
            (o, _) => o.clone(),
        };
        let cfg = resolve(n, config.as_ref(), out_dir.as_ref(), seed)?;
        if print {
            print!("{}", cfg.to_toml());
            continue;
        }
        let report = experiments::run(&cfg)?;
        let status = if report.passed() { "passed" } else { "FAILED" };
        println!("{n}: {status} ({})", cfg.output_dir.display());
        summarize(&report);
        ok &= report.passed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for e in EXPERIMENTS {
                println!("{:<18} {}", e.name, e.summary);
            }
            Ok(true)
        }
        Command::Run {
            name,
            config,
            out,
            seed,
            print_config,
        } => run(&name, config, out, seed, print_config),
        Command::Check { out, seed } => run_acceptance(&out, seed).map(|outcomes| {
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
            failed == 0
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
