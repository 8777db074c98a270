//! The four experiment commands and their CSV outputs.
//!
//! Every command is a deterministic function of the config (including its
//! seed). Files are written once each into the output directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ControllerConfig, ExperimentConfig, ModeConfig};
use crate::dynamics::{Plant, PneumaticPlant};
use crate::error::{Error, Result};
use crate::ga::{evolve, Chromosome, FitnessProblem, GaConfig, GaHistory};
use crate::ilc::{run_learning, IterationRecord, LearningCurve, LearningMode, TrialSetup};
use crate::pid::{find_ultimate_gain, zn_tune, PidGains, UltimatePoint, UltimateSearch};
use crate::trajectory::generate_trajectory;

pub const TRACE_HEADER: [&str; 10] = [
    "t", "y_d", "y_k", "e_k", "u_l", "u_f", "u_total", "x_v", "P_a", "P_b",
];
pub const SUMMARY_HEADER: [&str; 3] = ["k", "rms", "ratio"];
pub const SWEEP_HEADER: [&str; 3] = ["alpha", "k", "rms"];
pub const HISTORY_HEADER: [&str; 9] = [
    "generation",
    "best",
    "mean",
    "S_I1",
    "S_I2",
    "S_O1",
    "D_I1",
    "D_I2",
    "D_O1",
];

/// First-trial PID gains and, when searched, the stability point behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bootstrap {
    pub gains: PidGains,
    pub ultimate: Option<UltimatePoint>,
}

/// The step-response search the config describes.
pub fn ultimate_search(cfg: &ExperimentConfig) -> UltimateSearch {
    let l = cfg.plant.stroke;
    UltimateSearch {
        start: cfg.pid.step_start.unwrap_or(0.25 * l),
        target: cfg.pid.step_target.unwrap_or(0.75 * l),
        k_lo: cfg.pid.k_lo,
        k_hi: cfg.pid.k_hi,
        horizon: cfg.pid.horizon,
        sample_period: cfg.trial.sample_period,
        u_limit: Some(cfg.trial.u_limit),
    }
}

/// Configured PID gains, or stability-limit tuning on the configured plant.
pub fn bootstrap(cfg: &ExperimentConfig) -> Result<Bootstrap> {
    if let Some(gains) = cfg.pid.gains {
        return Ok(Bootstrap {
            gains,
            ultimate: None,
        });
    }
    let plant = PneumaticPlant::new(cfg.plant)?;
    let up = find_ultimate_gain(&plant, &ultimate_search(cfg))?;
    log::info!("ultimate gain {:.4}, period {:.4} s", up.ku, up.tu);
    Ok(Bootstrap {
        gains: zn_tune(&up),
        ultimate: Some(up),
    })
}

/// Learning setup for the pneumatic plant. `bootstrap` is required when
/// the config asks for GA-bootstrap mode.
pub fn build_setup(
    cfg: &ExperimentConfig,
    bootstrap: Option<PidGains>,
) -> Result<TrialSetup<PneumaticPlant>> {
    cfg.validate()?;
    let plant = PneumaticPlant::new(cfg.plant)?;
    let reference = generate_trajectory(
        &cfg.trajectory,
        cfg.samples(),
        cfg.trial.sample_period,
        plant.output_range(),
    )?;
    let mut setup = TrialSetup::new(reference, plant, cfg.controller.feedback(cfg.plant.stroke)?);
    setup.alpha = cfg.ilc.alpha;
    setup.wavelet = cfg.ilc.wavelet_config();
    setup.filter = cfg.ilc.filter;
    setup.iterations = cfg.ilc.iterations;
    setup.u_limit = cfg.trial.u_limit;
    setup.disturbance = cfg.disturbance.clone();
    setup.disturbance.seed = cfg.seed;
    setup.mode = match cfg.ilc.mode {
        ModeConfig::Normal => LearningMode::Normal,
        ModeConfig::GaBootstrap => LearningMode::GaBootstrap(bootstrap.ok_or_else(|| {
            Error::config("ilc.mode", "GA-bootstrap mode needs first-trial PID gains")
        })?),
    };
    Ok(setup)
}

fn bootstrap_if_needed(cfg: &ExperimentConfig) -> Result<Option<Bootstrap>> {
    match cfg.ilc.mode {
        ModeConfig::GaBootstrap => bootstrap(cfg).map(Some),
        ModeConfig::Normal => Ok(None),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

/// Per-sample trace of one trial.
pub fn write_trace(path: &Path, reference: &[f64], rec: &IterationRecord) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRACE_HEADER)?;
    let ts = rec.y.sample_period();
    for (i, (p, r)) in rec.probes.iter().zip(reference).enumerate() {
        let row = [
            i as f64 * ts,
            *r,
            rec.y[i],
            rec.e[i],
            rec.u_l[i],
            rec.u_f[i],
            rec.u_total[i],
            p.x_v,
            p.p_a,
            p.p_b,
        ];
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn summary_rows(curve: &LearningCurve) -> Vec<[String; 3]> {
    curve
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let ratio = if i == 0 {
                String::new()
            } else {
                curve.ratios[i - 1].to_string()
            };
            [r.k.to_string(), r.rms.to_string(), ratio]
        })
        .collect()
}

/// `k, rms, ratio` per iteration; the first ratio is empty.
pub fn write_summary(path: &Path, curve: &LearningCurve) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for row in summary_rows(curve) {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `alpha, k, rms`.
pub fn write_sweep(path: &Path, curves: &[(f64, LearningCurve)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SWEEP_HEADER)?;
    for (alpha, c) in curves {
        for r in &c.records {
            w.write_record([alpha.to_string(), r.k.to_string(), r.rms.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `generation, best, mean` and the best genes of each generation.
pub fn write_history(path: &Path, history: &GaHistory) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(HISTORY_HEADER)?;
    for g in &history.generations {
        let mut row = vec![
            g.index.to_string(),
            g.best_fitness.to_string(),
            g.mean_fitness.to_string(),
        ];
        row.extend(g.best.genes.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_file_name(k: usize) -> String {
    format!("trace_k{k:02}.csv")
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub rms: f64,
    pub trace: PathBuf,
}

/// One trial with a zero feedforward profile (the first trial of a learning run).
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<SimulateReport> {
    let boot = bootstrap_if_needed(cfg)?;
    let mut setup = build_setup(cfg, boot.map(|b| b.gains))?;
    setup.iterations = 1;
    let curve = run_learning(&setup)?;
    let rec = curve.last();
    let trace = out.join("trace.csv");
    write_trace(&trace, setup.reference.samples(), rec)?;
    Ok(SimulateReport {
        rms: rec.rms,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct LearnReport {
    pub curve: LearningCurve,
    pub summary: PathBuf,
    pub traces: Vec<PathBuf>,
}

/// A full learning run: summary plus one trace per iteration.
pub fn cmd_learn(cfg: &ExperimentConfig, out: &Path) -> Result<LearnReport> {
    let boot = bootstrap_if_needed(cfg)?;
    let setup = build_setup(cfg, boot.map(|b| b.gains))?;
    let curve = run_learning(&setup)?;
    let summary = out.join("summary.csv");
    write_summary(&summary, &curve)?;
    let mut traces = Vec::with_capacity(curve.records.len());
    for rec in &curve.records {
        let p = out.join(trace_file_name(rec.k));
        write_trace(&p, setup.reference.samples(), rec)?;
        traces.push(p);
    }
    Ok(LearnReport {
        curve,
        summary,
        traces,
    })
}

/// Learning gains swept by default.
pub const DEFAULT_ALPHAS: [f64; 6] = [0.1, 0.3, 0.6, 1.0, 1.4, 1.8];

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub curves: Vec<(f64, LearningCurve)>,
    pub path: PathBuf,
}

/// One learning curve per α with a common seed.
pub fn cmd_sweep_alpha(cfg: &ExperimentConfig, alphas: &[f64], out: &Path) -> Result<SweepReport> {
    if alphas.is_empty() {
        return Err(Error::config("alphas", "need at least one learning gain"));
    }
    for a in alphas {
        if !(*a > 0.0 && *a < 2.0) {
            return Err(Error::config(
                "alphas",
                format!("{a} outside (0, 2), where learning is guaranteed to contract"),
            ));
        }
    }
    let boot = bootstrap_if_needed(cfg)?;
    let base = build_setup(cfg, boot.map(|b| b.gains))?;
    let curves: Vec<(f64, LearningCurve)> = alphas
        .par_iter()
        .map(|&alpha| {
            let mut s = base.clone();
            s.alpha = alpha;
            run_learning(&s).map(|c| (alpha, c))
        })
        .collect::<Result<_>>()?;
    let path = out.join("sweep.csv");
    write_sweep(&path, &curves)?;
    Ok(SweepReport { curves, path })
}

/// What a tuning run found, written next to the history.
#[derive(Debug, Clone, Serialize)]
pub struct TuneResults {
    pub best_fitness: f64,
    pub initial_mean_fitness: f64,
    pub genes: [f64; 6],
    pub bootstrap: Bootstrap,
}

#[derive(Debug, Clone)]
pub struct TuneReport {
    pub best: Chromosome,
    pub history: GaHistory,
    pub results: TuneResults,
    pub history_path: PathBuf,
    pub controller_path: PathBuf,
    pub results_path: PathBuf,
    /// Present when the tuned controller was chained into a learning run.
    pub learn: Option<LearnReport>,
}

#[derive(Serialize)]
struct ControllerFile<'a> {
    controller: &'a ControllerConfig,
}

/// GA over the membership genes, then optionally a learning run with the winner.
pub fn cmd_tune(cfg: &ExperimentConfig, out: &Path, chain_learn: bool) -> Result<TuneReport> {
    let ga = GaConfig {
        seed: cfg.seed,
        ..cfg.ga.unwrap_or_default()
    };
    let ControllerConfig::Fuzzy {
        universes,
        rules,
        inference,
        ..
    } = &cfg.controller
    else {
        return Err(Error::config(
            "controller.kind",
            "tuning needs a fuzzy controller",
        ));
    };
    let boot = bootstrap(cfg)?;
    let base = build_setup(cfg, Some(boot.gains))?;
    let problem = FitnessProblem {
        base,
        universes: cfg.controller.universes(cfg.plant.stroke),
        bootstrap: boot.gains,
        iterations: ga.fitness_iterations,
    };
    let (best, history) = evolve(&ga, &problem)?;
    let last = history.generations.last().expect("non-empty");

    let history_path = out.join("ga_history.csv");
    write_history(&history_path, &history)?;

    let tuned = ControllerConfig::Fuzzy {
        genes: best.genes,
        universes: *universes,
        rules: *rules,
        inference: *inference,
    };
    let controller_path = out.join("best_controller.toml");
    let text =
        toml::to_string(&ControllerFile { controller: &tuned }).expect("controller serializes");
    std::fs::write(&controller_path, text)?;

    let results = TuneResults {
        best_fitness: last.best_fitness,
        initial_mean_fitness: history.generations[0].mean_fitness,
        genes: best.genes,
        bootstrap: boot,
    };
    let results_path = out.join("tune_results.toml");
    std::fs::write(
        &results_path,
        toml::to_string(&results).expect("results serialize"),
    )?;

    let learn = if chain_learn {
        let mut next = cfg.clone();
        next.controller = tuned;
        Some(cmd_learn(&next, &out.join("learn"))?)
    } else {
        None
    };
    Ok(TuneReport {
        best,
        history,
        results,
        history_path,
        controller_path,
        results_path,
        learn,
    })
}
