use proptest::prelude::*;

use wilc::fuzzy::SfDcGenes;
use wilc::ga::{clip_to_bounds, evolve_with, Chromosome, GaConfig};

fn sphere(c: &Chromosome) -> f64 {
    c.genes.iter().map(|g| (g - 0.6) * (g - 0.6)).sum()
}

proptest! {
    #[test]
    fn clipping_lands_in_bounds_and_is_idempotent(genes in prop::array::uniform6(-5.0..5.0f64)) {
        let c = clip_to_bounds(&Chromosome { genes });
        prop_assert!(c.in_bounds());
        prop_assert_eq!(clip_to_bounds(&c), c);
        for (i, (lo, hi)) in SfDcGenes::BOUNDS.iter().enumerate() {
            if (*lo..=*hi).contains(&genes[i]) {
                prop_assert_eq!(c.genes[i], genes[i]);
            }
        }
    }

    #[test]
    fn every_individual_is_in_bounds(seed in any::<u64>(), mutation_std in 0.0..2.0f64) {
        let cfg = GaConfig { seed, mutation_std, mutation_rate: 0.5, generations: 4, ..GaConfig::default() };
        let (best, h) = evolve_with(&cfg, sphere).unwrap();
        prop_assert!(best.in_bounds());
        for g in &h.generations {
            prop_assert_eq!(g.population.len(), cfg.population_size);
            prop_assert!(g.population.iter().all(Chromosome::in_bounds));
        }
    }

    #[test]
    fn best_fitness_never_increases(seed in any::<u64>()) {
        let cfg = GaConfig { seed, generations: 8, ..GaConfig::default() };
        let (_, h) = evolve_with(&cfg, sphere).unwrap();
        prop_assert!(h.best_fitness().windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn same_seed_same_history() {
    let cfg = GaConfig {
        seed: 42,
        generations: 6,
        ..GaConfig::default()
    };
    assert_eq!(
        evolve_with(&cfg, sphere).unwrap(),
        evolve_with(&cfg, sphere).unwrap()
    );
}

#[test]
fn different_seeds_differ() {
    let a = evolve_with(
        &GaConfig {
            seed: 1,
            ..GaConfig::default()
        },
        sphere,
    )
    .unwrap();
    let b = evolve_with(
        &GaConfig {
            seed: 2,
            ..GaConfig::default()
        },
        sphere,
    )
    .unwrap();
    assert_ne!(a.1.generations[0].population, b.1.generations[0].population);
}

#[test]
fn generation_zero_is_the_initial_population() {
    let cfg = GaConfig {
        generations: 5,
        ..GaConfig::default()
    };
    let (_, h) = evolve_with(&cfg, sphere).unwrap();
    assert_eq!(h.generations.len(), 6);
    assert_eq!(h.generations[0].index, 0);
}
