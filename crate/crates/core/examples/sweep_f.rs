//! Drive the config-based runner: sweep the interpolation parameter and
//! write CSV tables plus a manifest under `out/example_sweep`.
//!
//!     cargo run --release --example sweep_f

use qchaos::runner::{self, ConfigFile, Experiment, ExperimentConfig};

fn main() -> qchaos::Result<()> {
    let file = ConfigFile::parse(
        r#"
f_values = [1.0, 0.9, 0.8, 0.5, 0.0]
n = 8
p = 5
seeds = 4
output_path = "out/example_sweep"
"#,
    )?;
    let cfg = ExperimentConfig::resolve(Experiment::SweepF, &file)?;
    let manifest = runner::run(&cfg)?;
    for (key, value) in &manifest.derived {
        println!("{key:<32} {value:.6}");
    }
    println!("wrote {:?} to {}", manifest.outputs, cfg.output_path.display());
    Ok(())
}
