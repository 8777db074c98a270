//! Open-loop valve step on the default cylinder: piston travel, chamber
//! pressures and spool opening every 50 ms.

use wilc::plant::{self, PlantParams, PlantState};

fn main() -> wilc::Result<()> {
    let p = PlantParams::default();
    let mut s = PlantState::rest(0.1, &p);
    println!(
        "{:>6} {:>9} {:>9} {:>10} {:>10} {:>10}",
        "t", "x_p", "v_p", "P_a", "P_b", "x_v"
    );
    for i in 0..=400 {
        if i % 50 == 0 {
            let t = i as f64 * 1e-3;
            println!(
                "{t:6.3} {:9.5} {:9.5} {:10.0} {:10.0} {:10.2e}",
                s.x_p, s.v_p, s.p_a, s.p_b, s.x_v
            );
        }
        s = plant::step(&s, 0.3, 1e-3, &p)?;
    }
    Ok(())
}
