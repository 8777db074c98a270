//! Learning curves for several learning gains on the default cylinder, run
//! in parallel.

use rayon::prelude::*;
use wilc::config::ExperimentConfig;
use wilc::experiment::{build_setup, DEFAULT_ALPHAS};
use wilc::ilc::run_learning;

fn main() -> wilc::Result<()> {
    let base = build_setup(&ExperimentConfig::default(), None)?;
    let curves: Vec<_> = DEFAULT_ALPHAS
        .par_iter()
        .map(|&alpha| {
            let mut s = base.clone();
            s.alpha = alpha;
            run_learning(&s).map(|c| (alpha, c.rms()))
        })
        .collect::<wilc::Result<_>>()?;
    for (alpha, rms) in curves {
        let row: Vec<String> = rms.iter().map(|v| format!("{:.2e}", v)).collect();
        println!("alpha {alpha:<4} {}", row.join(" "));
    }
    Ok(())
}
