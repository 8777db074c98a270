//! Splits a noisy profile into its multiresolution bands, keeps only the
//! approximation, and shows how repeated `(1 - W*)` shrinks the signal.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wilc::wavelet::{components, contraction_check, wfilter, WaveletConfig};
use wilc::Signal;

fn main() -> wilc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ts = 1e-3;
    let clean: Vec<f64> = (0..4000)
        .map(|i| (2.0 * PI * 0.5 * i as f64 * ts).sin())
        .collect();
    let noisy: Vec<f64> = clean
        .iter()
        .map(|c| c + 0.2 * rng.random_range(-1.0..1.0))
        .collect();
    let f = Signal::new(noisy, ts)?;
    let cfg = WaveletConfig::default();

    let (a, details) = components(&f, &cfg)?;
    println!("band  one-norm");
    println!("A{:<4} {:.3}", cfg.level, a.norm1());
    for (j, d) in details.iter().enumerate() {
        println!("D{:<4} {:.3}", j + 1, d.norm1());
    }

    let filtered = wfilter(&f, &cfg)?;
    let err = filtered.sub(&Signal::new(clean, ts)?)?.rms();
    println!(
        "\nrms distance to the clean sinusoid: raw {:.4}, filtered {err:.4}",
        0.2 / 3f64.sqrt()
    );

    let norms = contraction_check(&f, 1.0, &cfg, 5)?;
    println!("\n|(1 - W*)^k f|_1 for k = 0..5: {norms:.3?}");
    Ok(())
}
