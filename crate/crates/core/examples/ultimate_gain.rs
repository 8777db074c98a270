//! Stability-limit gain search and the resulting PID gains, first on
//! `1/(s+1)^3` (analytic K_u = 8, T_u = 2π/√3) and then on the cylinder.

use wilc::config::ExperimentConfig;
use wilc::experiment::bootstrap;
use wilc::ilc::{LinearPlant, TransferFunction};
use wilc::pid::{find_ultimate_gain, zn_tune, UltimateSearch};

fn main() -> wilc::Result<()> {
    let plant = LinearPlant::new(TransferFunction::new(vec![1.0], vec![1.0, 3.0, 3.0, 1.0])?)?;
    let up = find_ultimate_gain(&plant, &UltimateSearch::default())?;
    println!(
        "1/(s+1)^3: K_u = {:.3} (8), T_u = {:.3} ({:.3})",
        up.ku,
        up.tu,
        2.0 * std::f64::consts::PI / 3f64.sqrt()
    );
    println!("  gains {:?}", zn_tune(&up));

    let b = bootstrap(&ExperimentConfig::default())?;
    if let Some(up) = b.ultimate {
        println!("cylinder:  K_u = {:.3}, T_u = {:.4} s", up.ku, up.tu);
    }
    println!("  gains {:?}", b.gains);
    Ok(())
}
