//! Tunes the six membership genes with the GA: first on a quadratic bowl,
//! where the optimum is known, then on the cylinder's learning fitness.

use wilc::config::ExperimentConfig;
use wilc::experiment::{bootstrap, build_setup};
use wilc::fuzzy::Universes;
use wilc::ga::{evolve, evolve_with, Chromosome, FitnessProblem, GaConfig};

fn main() -> wilc::Result<()> {
    let target = [0.3, 0.7, 0.55, 0.6, 0.9, 0.75];
    let bowl = |c: &Chromosome| {
        c.genes
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
    };
    let (best, h) = evolve_with(
        &GaConfig {
            generations: 30,
            seed: 7,
            ..GaConfig::default()
        },
        bowl,
    )?;
    println!(
        "bowl: best {:.4?} after {} generations (fitness {:.2e})",
        best.genes,
        h.generations.len() - 1,
        bowl(&best)
    );

    let cfg = ExperimentConfig::default();
    let boot = bootstrap(&cfg)?;
    let problem = FitnessProblem {
        base: build_setup(&cfg, Some(boot.gains))?,
        universes: Universes::for_stroke(cfg.plant.stroke),
        bootstrap: boot.gains,
        iterations: 3,
    };
    let (best, h) = evolve(&GaConfig::default(), &problem)?;
    for g in &h.generations {
        println!(
            "generation {}: best {:.4e}, mean {:.4e}",
            g.index, g.best_fitness, g.mean_fitness
        );
    }
    println!("tuned genes {:.5?}", best.genes);
    Ok(())
}
