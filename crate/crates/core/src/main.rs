use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use qchaos::runner::{self, ConfigFile, Experiment, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "qchaos",
    version,
    about = "Subsystem entropy production and random-matrix diagnostics",
    after_help = config_help()
)]
struct Cli {
    /// spin-evolve | baker-evolve | spectrum | levels | residuals | sweep-f
    experiment: String,

    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    dim: Option<usize>,

    #[arg(long)]
    f: Option<f64>,

    #[arg(long)]
    hbar: Option<f64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_help() -> String {
    let mut text = String::from("Config keys:\n");
    for (key, desc) in ConfigFile::KEYS {
        text.push_str(&format!("  {key:<18} {desc}\n"));
    }
    text
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let experiment: Experiment = match cli.experiment.parse() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}\n");
            let _ = Cli::command().print_help();
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        seed: cli.seed,
        dim: cli.dim,
        f: cli.f,
        hbar: cli.hbar,
        out: cli.out,
    };
    let result = runner::load_config(experiment, cli.config.as_deref(), &overrides).and_then(|cfg| runner::run(&cfg));
    match result {
        Ok(manifest) => {
            eprintln!(
                "{} finished in {:.2?}; wrote {} to {}",
                experiment.name(),
                manifest.duration,
                manifest.outputs.join(", "),
                manifest.config.output_path.display()
            );
            for (key, value) in &manifest.derived {
                println!("{key} = {value}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
