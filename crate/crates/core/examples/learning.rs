//! Ten learning trials on the default cylinder with 5 N force noise: the
//! tracking error falls and the learned profile takes over from feedback.

use wilc::config::ExperimentConfig;
use wilc::experiment::build_setup;
use wilc::ilc::run_learning;

fn main() -> wilc::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.disturbance.nonrepeatable_std = 5.0;
    let curve = run_learning(&build_setup(&cfg, None)?)?;
    println!(
        "{:>3} {:>11} {:>8} {:>10}",
        "k", "rms (m)", "ratio", "|u_f|/|u_l|"
    );
    for (i, r) in curve.records.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            format!("{:.3}", curve.ratios[i - 1])
        };
        let split = if r.u_l.norm2() > 0.0 {
            format!("{:.3}", r.u_f.norm2() / r.u_l.norm2())
        } else {
            "-".into()
        };
        println!("{:>3} {:>11.4e} {ratio:>8} {split:>10}", r.k, r.rms);
    }
    Ok(())
}
