use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wilc::config::ExperimentConfig;
use wilc::experiment::{cmd_learn, cmd_simulate, cmd_sweep_alpha, cmd_tune, DEFAULT_ALPHAS};
use wilc::Error;

#[derive(Parser)]
#[command(
    name = "wilc",
    version,
    about = "Wavelet-filtered learning control experiments for a pneumatic servo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Single trial with no learned profile; writes trace.csv.
    Simulate(Common),
    /// Learning run; writes summary.csv and one trace per iteration.
    Learn(Common),
    /// Learning curves for several learning gains; writes sweep.csv.
    SweepAlpha {
        #[command(flatten)]
        common: Common,
        /// Comma-separated learning gains in (0, 2).
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS.to_vec())]
        alphas: Vec<f64>,
    },
    /// GA tuning of the fuzzy controller; writes ga_history.csv and best_controller.toml.
    Tune {
        #[command(flatten)]
        common: Common,
        /// Follow with a learning run using the tuned controller (into OUT/learn).
        #[arg(long)]
        chain_learn: bool,
    },
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), Error> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(common) => {
            let (cfg, out) = load(&common)?;
            let r = cmd_simulate(&cfg, &out)?;
            println!("rms {:.6e}", r.rms);
            println!("wrote {}", r.trace.display());
        }
        Command::Learn(common) => {
            let (cfg, out) = load(&common)?;
            let r = cmd_learn(&cfg, &out)?;
            for rec in &r.curve.records {
                println!("k {:2}  rms {:.6e}", rec.k, rec.rms);
            }
            println!("wrote {}", r.summary.display());
        }
        Command::SweepAlpha { common, alphas } => {
            let (cfg, out) = load(&common)?;
            let r = cmd_sweep_alpha(&cfg, &alphas, &out)?;
            for (alpha, c) in &r.curves {
                let rms: Vec<String> = c.rms().iter().map(|v| format!("{v:.3e}")).collect();
                println!("alpha {alpha:<4} {}", rms.join(" "));
            }
            println!("wrote {}", r.path.display());
        }
        Command::Tune {
            common,
            chain_learn,
        } => {
            let (cfg, out) = load(&common)?;
            let r = cmd_tune(&cfg, &out, chain_learn)?;
            if let Some(up) = r.results.bootstrap.ultimate {
                println!("ultimate gain {:.4}, period {:.4} s", up.ku, up.tu);
            }
            for g in &r.history.generations {
                println!(
                    "generation {}  best {:.6e}  mean {:.6e}",
                    g.index, g.best_fitness, g.mean_fitness
                );
            }
            println!("best genes {:?}", r.best.genes);
            println!(
                "wrote {} and {}",
                r.history_path.display(),
                r.controller_path.display()
            );
            if let Some(l) = &r.learn {
                println!("chained learning: final rms {:.6e}", l.curve.last().rms);
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Divergence { .. } => 3,
        Error::UltimateGainNotFound { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
