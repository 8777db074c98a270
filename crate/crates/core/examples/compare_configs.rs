//! Loads config files and compares their learning curves, e.g.
//! `cargo run --example compare_configs -- examples/default.toml examples/heavy_cylinder.toml`.

use wilc::config::ExperimentConfig;
use wilc::experiment::build_setup;
use wilc::ilc::run_learning;

fn main() -> wilc::Result<()> {
    let mut paths: Vec<String> = std::env::args().skip(1).collect();
    if paths.is_empty() {
        let dir = env!("CARGO_MANIFEST_DIR");
        paths = vec![
            format!("{dir}/examples/default.toml"),
            format!("{dir}/examples/heavy_cylinder.toml"),
        ];
    }
    for p in paths {
        let cfg = ExperimentConfig::load(std::path::Path::new(&p))?;
        let rms = run_learning(&build_setup(&cfg, None)?)?.rms();
        let row: Vec<String> = rms.iter().map(|v| format!("{:.2e}", v)).collect();
        println!(
            "{p}\n  {}\n  last/first {:.3}",
            row.join(" "),
            rms[rms.len() - 1] / rms[0]
        );
    }
    Ok(())
}
