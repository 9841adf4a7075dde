use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qstirling::cli::{self, Output};
use qstirling::config::RunConfig;
use qstirling::cycle::SweepMode;

#[derive(Parser)]
#[command(name = "qstirling", version, about = "Finite-time quantum Stirling engine")]
struct Args {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set f=3`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bath coupling spectra of both baths
    Spectrum,
    /// Time-dependent rates along a symmetric cycle
    Rates {
        /// Driven-stroke duration in units of tau_D
        #[arg(long)]
        tau: f64,
    },
    /// Single cycle: trajectory, energy ledger and distances
    Cycle,
    /// Duration sweep
    Sweep {
        #[arg(long, value_parser = ["symmetric", "fix-ab", "fix-cd"])]
        mode: String,
    },
    /// Closed-form limiting cycles
    Oracles,
    /// Print the resolved configuration
    Config,
}

fn resolve(args: &Args) -> qstirling::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| qstirling::Error::Argument(format!("--set expects KEY=VALUE, got `{o}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> qstirling::Result<Output> {
    let cfg = resolve(args)?;
    match &args.command {
        Command::Spectrum => cli::spectrum(&cfg),
        Command::Rates { tau } => cli::rates(&cfg, *tau),
        Command::Cycle => cli::cycle(&cfg),
        Command::Sweep { mode } => cli::sweep(&cfg, SweepMode::parse(mode)?),
        Command::Oracles => cli::oracles(&cfg),
        Command::Config => {
            print!("{}", cfg.render());
            Ok(Output { files: vec![], failures: 0, summary: vec![] })
        }
    }
    .and_then(|out| {
        for p in out.write(&cfg.output_dir)? {
            eprintln!("wrote {}", p.display());
        }
        Ok(out)
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            if out.failures > 0 {
                eprintln!("{} run(s) failed", out.failures);
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
