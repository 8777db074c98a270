//! Real-coded elitist genetic algorithm over the six membership genes.
//!
//! Each generation: tournament selection, blend (BLX-0.5) crossover, Gaussian
//! mutation clipped to the gene bounds, and elitism. Every child draws from
//! its own generator derived from `(seed, generation, index)`, and fitness
//! is evaluated in parallel, so a run is reproducible regardless of thread
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Plant;
use crate::error::{Error, Result};
use crate::fuzzy::{build_memberships, SfDcGenes, Universes};
use crate::ilc::{run_learning, Feedback, LearningMode, TrialSetup};
use crate::pid::PidGains;

/// Genes in the order `[S_I1, S_I2, S_O1, D_I1, D_I2, D_O1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: [f64; 6],
}

impl Chromosome {
    pub fn to_genes(&self) -> SfDcGenes {
        SfDcGenes::from_array(self.genes)
    }

    pub fn in_bounds(&self) -> bool {
        self.genes
            .iter()
            .zip(SfDcGenes::BOUNDS)
            .all(|(v, (lo, hi))| *v >= lo && *v <= hi)
    }
}

impl From<SfDcGenes> for Chromosome {
    fn from(g: SfDcGenes) -> Self {
        Chromosome {
            genes: g.to_array(),
        }
    }
}

/// Clamp every gene into its interval.
pub fn clip_to_bounds(c: &Chromosome) -> Chromosome {
    let mut genes = c.genes;
    for (v, (lo, hi)) in genes.iter_mut().zip(SfDcGenes::BOUNDS) {
        *v = v.clamp(lo, hi);
    }
    Chromosome { genes }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_std: f64,
    pub elitism_count: usize,
    pub tournament_size: usize,
    /// Set from the run seed; not read from config files.
    #[serde(skip)]
    pub seed: u64,
    /// Learning trials per fitness evaluation.
    pub fitness_iterations: usize,
    /// Stop once the best fitness is at or below this value.
    pub early_stop_fitness: Option<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            generations: 5,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_std: 0.1,
            elitism_count: 1,
            tournament_size: 3,
            seed: 0,
            fitness_iterations: 3,
            early_stop_fitness: None,
        }
    }
}

/// Half-width extension of the blend crossover interval.
const BLEND: f64 = 0.5;

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("ga.population_size", "must be >= 2"));
        }
        for (name, v) in [
            ("ga.crossover_rate", self.crossover_rate),
            ("ga.mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if !(self.mutation_std >= 0.0) {
            return Err(Error::config("ga.mutation_std", "must be >= 0"));
        }
        if self.elitism_count < 1 || self.elitism_count > self.population_size {
            return Err(Error::config(
                "ga.elitism_count",
                "must lie in [1, population_size]",
            ));
        }
        if self.tournament_size < 1 {
            return Err(Error::config("ga.tournament_size", "must be >= 1"));
        }
        if self.fitness_iterations < 1 {
            return Err(Error::config("ga.fitness_iterations", "must be >= 1"));
        }
        Ok(())
    }
}

/// One evaluated generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub index: usize,
    pub population: Vec<Chromosome>,
    pub fitness: Vec<f64>,
    pub best: Chromosome,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaHistory {
    /// Generation 0 is the random initial population.
    pub generations: Vec<Generation>,
}

impl GaHistory {
    pub fn best_fitness(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.best_fitness).collect()
    }

    pub fn mean_fitness(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.mean_fitness).collect()
    }
}

fn rng_for(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

/// Indices sorted best first; NaN sorts last, ties keep index order.
fn ranking(fitness: &[f64]) -> Vec<usize> {
    let key = |f: f64| if f.is_nan() { f64::INFINITY } else { f };
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| key(fitness[a]).total_cmp(&key(fitness[b])).then(a.cmp(&b)));
    idx
}

fn tournament(fitness: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] < fitness[best] || (fitness[best].is_nan() && !fitness[c].is_nan()) {
            best = c;
        }
    }
    best
}

fn breed(pop: &[Chromosome], fitness: &[f64], cfg: &GaConfig, rng: &mut ChaCha8Rng) -> Chromosome {
    let a = pop[tournament(fitness, cfg.tournament_size, rng)];
    let b = pop[tournament(fitness, cfg.tournament_size, rng)];
    let mut genes = a.genes;
    if rng.random::<f64>() < cfg.crossover_rate {
        for (g, (x, y)) in genes.iter_mut().zip(a.genes.iter().zip(&b.genes)) {
            let (lo, hi) = (x.min(*y), x.max(*y));
            let d = BLEND * (hi - lo);
            *g = lo - d + rng.random::<f64>() * (hi - lo + 2.0 * d);
        }
    }
    for (g, (lo, hi)) in genes.iter_mut().zip(SfDcGenes::BOUNDS) {
        if rng.random::<f64>() < cfg.mutation_rate {
            let std = cfg.mutation_std * (hi - lo);
            if std > 0.0 {
                let n = Normal::new(0.0, std).expect("positive std");
                *g += n.sample(rng);
            }
        }
    }
    clip_to_bounds(&Chromosome { genes })
}

fn evaluate<F>(pop: &[Chromosome], fitness: &F) -> Vec<f64>
where
    F: Fn(&Chromosome) -> f64 + Sync,
{
    pop.par_iter().map(fitness).collect()
}

fn record(index: usize, population: Vec<Chromosome>, fitness: Vec<f64>) -> Generation {
    let order = ranking(&fitness);
    let best = population[order[0]];
    let best_fitness = fitness[order[0]];
    let mean_fitness = fitness.iter().sum::<f64>() / fitness.len() as f64;
    Generation {
        index,
        population,
        fitness,
        best,
        best_fitness,
        mean_fitness,
    }
}

/// Minimize an arbitrary fitness over the gene box.
pub fn evolve_with<F>(cfg: &GaConfig, fitness: F) -> Result<(Chromosome, GaHistory)>
where
    F: Fn(&Chromosome) -> f64 + Sync,
{
    cfg.validate()?;
    let init: Vec<Chromosome> = (0..cfg.population_size)
        .map(|i| {
            let mut rng = rng_for(cfg.seed, 0, i);
            let mut genes = [0.0; 6];
            for (g, (lo, hi)) in genes.iter_mut().zip(SfDcGenes::BOUNDS) {
                *g = rng.random_range(lo..=hi);
            }
            Chromosome { genes }
        })
        .collect();
    let f0 = evaluate(&init, &fitness);
    let mut history = GaHistory {
        generations: vec![record(0, init, f0)],
    };

    for gen in 1..=cfg.generations {
        let prev = history.generations.last().expect("non-empty");
        if cfg
            .early_stop_fitness
            .is_some_and(|t| prev.best_fitness <= t)
        {
            log::info!(
                "early stop after generation {} at fitness {}",
                prev.index,
                prev.best_fitness
            );
            break;
        }
        let order = ranking(&prev.fitness);
        let elites: Vec<usize> = order[..cfg.elitism_count].to_vec();
        let children: Vec<Chromosome> = (cfg.elitism_count..cfg.population_size)
            .map(|i| {
                breed(
                    &prev.population,
                    &prev.fitness,
                    cfg,
                    &mut rng_for(cfg.seed, gen, i),
                )
            })
            .collect();
        let child_fitness = evaluate(&children, &fitness);

        let mut population: Vec<Chromosome> = elites.iter().map(|&i| prev.population[i]).collect();
        let mut fit: Vec<f64> = elites.iter().map(|&i| prev.fitness[i]).collect();
        population.extend(children);
        fit.extend(child_fitness);
        let g = record(gen, population, fit);
        log::info!(
            "generation {gen}: best {:.6e}, mean {:.6e}",
            g.best_fitness,
            g.mean_fitness
        );
        history.generations.push(g);
    }
    let best = history.generations.last().expect("non-empty").best;
    Ok((best, history))
}

/// Everything a pneumatic (or other plant) fitness evaluation needs.
#[derive(Debug, Clone)]
pub struct FitnessProblem<P> {
    /// Reference, plant, learning gain, wavelet and disturbance; feedback
    /// rules and inference are taken from it when it holds a fuzzy controller.
    pub base: TrialSetup<P>,
    pub universes: Universes,
    /// PID that drives the first trial of every evaluation.
    pub bootstrap: PidGains,
    pub iterations: usize,
}

impl<P: Plant + Clone> FitnessProblem<P> {
    /// Smallest per-trial rms over `iterations` learning trials, the first
    /// under the bootstrap PID. Diverged runs score the divergence guard;
    /// any other failure scores infinity.
    pub fn fitness(&self, c: &Chromosome) -> f64 {
        let mut fz = match build_memberships(&c.to_genes(), &self.universes) {
            Ok(f) => f,
            Err(_) => return f64::INFINITY,
        };
        if let Feedback::Fuzzy(base) = &self.base.feedback {
            fz = fz.with_rules(base.rules).with_inference(base.inference);
        }
        let mut setup = self.base.clone();
        setup.feedback = Feedback::Fuzzy(fz);
        setup.mode = LearningMode::GaBootstrap(self.bootstrap);
        setup.iterations = self.iterations;
        match run_learning(&setup) {
            Ok(curve) => curve.min_rms(),
            Err(Error::Divergence { guard, .. }) => guard,
            Err(e) => {
                log::warn!("fitness evaluation failed: {e}");
                f64::INFINITY
            }
        }
    }
}

/// Tune the membership genes for a learning setup.
pub fn evolve<P: Plant + Clone>(
    cfg: &GaConfig,
    problem: &FitnessProblem<P>,
) -> Result<(Chromosome, GaHistory)> {
    evolve_with(cfg, |c| problem.fitness(c))
}
