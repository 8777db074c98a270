//! Control surface of the default fuzzy PD controller on a coarse grid,
//! with its small-signal PD gains.

use wilc::config::DEFAULT_GENES;
use wilc::fuzzy::{build_memberships, fuzzy_pd, SfDcGenes, Universes};

fn main() -> wilc::Result<()> {
    let cfg = build_memberships(
        &SfDcGenes::from_array(DEFAULT_GENES),
        &Universes::for_stroke(0.5),
    )?;
    println!("error centers     {:.4?}", cfg.input_e.centers());
    println!("difference centers {:.5?}", cfg.input_de.centers());
    println!("output centers    {:.4?}", cfg.output.centers());
    println!(
        "small-signal K_p = {:.2}, K_d = {:.2}\n",
        cfg.small_signal_kp(),
        cfg.small_signal_kd()
    );

    let (ue, ud) = (cfg.input_e.bound(), cfg.input_de.bound());
    let steps = 8;
    print!("{:>9}", "e \\ de");
    for j in 0..=steps {
        print!("{:>8.4}", -ud + 2.0 * ud * j as f64 / steps as f64);
    }
    println!();
    for i in 0..=steps {
        let e = -ue + 2.0 * ue * i as f64 / steps as f64;
        print!("{e:>9.4}");
        for j in 0..=steps {
            let de = -ud + 2.0 * ud * j as f64 / steps as f64;
            print!("{:>8.3}", fuzzy_pd(e, de, &cfg));
        }
        println!();
    }
    Ok(())
}
