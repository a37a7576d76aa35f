//! Command-line front end: `gen`, `eval`, `train` and `sweep`.
//!
//! Exit status is 0 on success, 2 for configuration errors and 3 for
//! runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meqc::bench::{
    build_scenario, emit_csv, parse_config, run_eval, run_sweep, run_train, write_atomic, write_learning_curve,
    ExperimentConfig,
};
use meqc::Error;

#[derive(Parser)]
#[command(name = "meqc", version, about = "Mobile edge-quantum offloading lab")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Generate a scenario file.
    Gen(Common),
    /// Evaluate the configured policies; writes a CSV.
    Eval(Common),
    /// Train the multi-agent PPO learner; writes a checkpoint, the learning
    /// curve and a greedy trajectory into the output directory.
    Train(Common),
    /// Run the configured parameter sweep; writes a CSV.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> meqc::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
                line: None,
                message: format!("{}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn output(cfg: &ExperimentConfig, default: &str) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn run(verb: &Verb) -> meqc::Result<()> {
    match verb {
        Verb::Gen(c) => {
            let cfg = load(c)?;
            let path = output(&cfg, "scenario.toml");
            write_atomic(&path, build_scenario(&cfg, cfg.seed)?.to_toml()?.as_bytes())?;
            println!("wrote {}", path.display());
        }
        Verb::Eval(c) => {
            let cfg = load(c)?;
            let path = output(&cfg, "eval.csv");
            emit_csv(&run_eval(&cfg)?, &path)?;
            println!("wrote {}", path.display());
        }
        Verb::Train(c) => {
            let cfg = load(c)?;
            let dir = output(&cfg, "train_out");
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
            let run = run_train(&cfg)?;
            run.outcome.checkpoint().save(&dir.join("checkpoint.json"))?;
            write_learning_curve(&run.outcome.curve, &dir.join("learning_curve.csv"))?;
            let mut traj = Vec::new();
            run.trajectory.write_csv(&mut traj)?;
            write_atomic(&dir.join("trajectory.csv"), &traj)?;
            if let Some(reason) = &run.outcome.halted {
                eprintln!("training halted early: {reason}");
            }
            println!("greedy mean cost {:.6e}; wrote {}", run.stats.mean_cost, dir.display());
        }
        Verb::Sweep(c) => {
            let cfg = load(c)?;
            let path = output(&cfg, "sweep.csv");
            emit_csv(&run_sweep(&cfg)?, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidConfig(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.verb) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

