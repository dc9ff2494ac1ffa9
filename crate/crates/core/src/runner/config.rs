//! Flat key-value experiment configuration.
//!
//! Files are TOML with top-level keys only; every key is optional and
//! unknown keys are rejected. [`ExperimentConfig::resolve`] fills in
//! experiment-dependent defaults and validates the combination, and
//! [`ExperimentConfig::to_file`] produces the fully explicit echo stored in
//! run manifests.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baker::BakerConvention;
use crate::dynamics::{EvolutionConfig, TensorSplit};
use crate::error::{QchaosError, Result};
use crate::hamiltonian::HarperParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    SpinEvolve,
    BakerEvolve,
    Spectrum,
    Levels,
    Residuals,
    SweepF,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SpinEvolve,
        Experiment::BakerEvolve,
        Experiment::Spectrum,
        Experiment::Levels,
        Experiment::Residuals,
        Experiment::SweepF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpinEvolve => "spin-evolve",
            Experiment::BakerEvolve => "baker-evolve",
            Experiment::Spectrum => "spectrum",
            Experiment::Levels => "levels",
            Experiment::Residuals => "residuals",
            Experiment::SweepF => "sweep-f",
        }
    }
}

impl FromStr for Experiment {
    type Err = QchaosError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('_', "-").to_ascii_lowercase();
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| QchaosError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Random symmetric (GOE convention).
    Hc,
    /// Harper matrix.
    Hr,
    /// Harper matrix with entries beyond the band `|m − n| ≤ f·N` randomized.
    Hf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateKind {
    BasisZero,
    BasisIndex,
    RandomProduct,
}

/// Resolved initial state choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    BasisZero,
    BasisIndex(usize),
    RandomProduct,
}

/// On-disk form: every key optional, unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsystem_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transient_cut: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baker_convention: Option<BakerConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| QchaosError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QchaosError::io(path, e))?;
        ConfigFile::parse(&text).map_err(|e| match e {
            QchaosError::Config(msg) => QchaosError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Keys accepted in config files, with a short description.
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        (
            "experiment",
            "spin_evolve | baker_evolve | spectrum | levels | residuals | sweep_f (must match the subcommand)",
        ),
        ("hamiltonian", "hc | hr | hf"),
        ("gamma1", "Harper hopping coefficient (default 0.5)"),
        ("gamma2", "Harper potential coefficient (default 2.5)"),
        ("f", "correlation fraction for hf, in [0, 1]"),
        ("f_values", "list of f values for sweep_f (default [0.9, 0.8, 0.7])"),
        ("dim", "matrix dimension N (alternative to n)"),
        ("n", "number of qubits, N = 2^n (default 8; baker default dim 128)"),
        ("p", "number of kept qubits, subsystem dimension 2^p (default 5)"),
        (
            "subsystem_dim",
            "kept subsystem dimension d1 (alternative to p; baker default 8)",
        ),
        ("hbar", "reduced Planck constant (default 0.1)"),
        ("dt", "sampling interval (default 0.1)"),
        (
            "num_samples",
            "number of samples or baker steps (default 1024; baker 512)",
        ),
        (
            "transient_cut",
            "samples dropped before spectral analysis (default 128)",
        ),
        (
            "initial_state",
            "basis_zero | basis_index | random_product (default basis_zero)",
        ),
        ("initial_index", "basis index for basis_index"),
        ("seed", "master seed (default 0)"),
        ("seeds", "number of pooled replicates (default 1)"),
        ("bin_count", "histogram bins for residual parameters (default 32)"),
        ("spacing_bins", "histogram bins for spacings.csv on [0, 4) (default 40)"),
        ("baker_convention", "saraceno | balazs_voros (default saraceno)"),
        ("output_path", "output directory (default out/<experiment>)"),
    ];
}

/// Fully resolved and validated experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub hamiltonian: HamiltonianKind,
    pub harper: HarperParams,
    pub f: Option<f64>,
    pub f_values: Vec<f64>,
    pub split: TensorSplit,
    pub qubits: Option<(u32, u32)>,
    pub evolution: EvolutionConfig,
    pub initial_state: InitialState,
    pub seed: u64,
    pub seeds: usize,
    pub bin_count: usize,
    pub spacing_bins: usize,
    pub baker_convention: BakerConvention,
    pub output_path: PathBuf,
}

fn config_err(msg: impl Into<String>) -> QchaosError {
    QchaosError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.split.total()
    }

    /// Applies defaults for `experiment` and validates every combination
    /// before any computation runs.
    pub fn resolve(experiment: Experiment, file: &ConfigFile) -> Result<Self> {
        if let Some(declared) = file.experiment {
            if declared != experiment {
                return Err(config_err(format!(
                    "config declares experiment '{}' but '{}' was requested",
                    declared.name(),
                    experiment.name()
                )));
            }
        }
        let is_baker = experiment == Experiment::BakerEvolve;

        let hamiltonian = match (experiment, file.hamiltonian) {
            (Experiment::BakerEvolve, Some(_)) => {
                return Err(config_err("baker_evolve does not take a hamiltonian"));
            }
            (Experiment::SweepF, Some(h)) if h != HamiltonianKind::Hf => {
                return Err(config_err("sweep_f always uses hamiltonian = \"hf\""));
            }
            (Experiment::SweepF, _) => HamiltonianKind::Hf,
            (_, Some(h)) => h,
            (_, None) => HamiltonianKind::Hr,
        };

        let harper = HarperParams {
            gamma1: file.gamma1.unwrap_or(HarperParams::default().gamma1),
            gamma2: file.gamma2.unwrap_or(HarperParams::default().gamma2),
        };
        if !harper.gamma1.is_finite() || !harper.gamma2.is_finite() {
            return Err(config_err("gamma1 and gamma2 must be finite"));
        }

        let check_f = |f: f64| -> Result<f64> {
            if (0.0..=1.0).contains(&f) {
                Ok(f)
            } else {
                Err(config_err(format!("f must lie in [0, 1], got {f}")))
            }
        };
        let f = match (experiment, hamiltonian, file.f) {
            (Experiment::SweepF, _, Some(_)) => {
                return Err(config_err("sweep_f takes f_values, not f"));
            }
            (Experiment::SweepF, _, None) => None,
            (_, HamiltonianKind::Hf, Some(f)) => Some(check_f(f)?),
            (_, HamiltonianKind::Hf, None) => return Err(config_err("hamiltonian = \"hf\" requires f")),
            (_, _, Some(_)) => return Err(config_err("f is only meaningful for hamiltonian = \"hf\"")),
            (_, _, None) => None,
        };
        let f_values = match (experiment, &file.f_values) {
            (Experiment::SweepF, Some(values)) if values.is_empty() => {
                return Err(config_err("f_values must not be empty"));
            }
            (Experiment::SweepF, Some(values)) => values.iter().map(|&f| check_f(f)).collect::<Result<_>>()?,
            (Experiment::SweepF, None) => vec![0.9, 0.8, 0.7],
            (_, Some(_)) => return Err(config_err("f_values is only used by sweep_f")),
            (_, None) => Vec::new(),
        };

        let (split, qubits) = resolve_split(file, is_baker)?;

        let defaults = EvolutionConfig::default();
        let evolution = EvolutionConfig {
            hbar: file.hbar.unwrap_or(defaults.hbar),
            dt: if is_baker { 1.0 } else { file.dt.unwrap_or(defaults.dt) },
            num_samples: file
                .num_samples
                .unwrap_or(if is_baker { 512 } else { defaults.num_samples }),
            transient_cut: file.transient_cut.unwrap_or(defaults.transient_cut),
        };
        if is_baker && (file.dt.is_some() || file.hbar.is_some()) {
            return Err(config_err("baker_evolve is a discrete map; dt and hbar do not apply"));
        }
        evolution.validate().map_err(|e| config_err(e.to_string()))?;
        let needs_spectrum = matches!(
            experiment,
            Experiment::Spectrum | Experiment::BakerEvolve | Experiment::SweepF | Experiment::SpinEvolve
        );
        if needs_spectrum && evolution.num_samples - evolution.transient_cut < crate::diagnostics::MIN_WINDOW {
            return Err(config_err(format!(
                "num_samples - transient_cut must be at least {}",
                crate::diagnostics::MIN_WINDOW
            )));
        }

        let initial_state = match (
            file.initial_state.unwrap_or(InitialStateKind::BasisZero),
            file.initial_index,
        ) {
            (InitialStateKind::BasisIndex, Some(i)) if i < split.total() => InitialState::BasisIndex(i),
            (InitialStateKind::BasisIndex, Some(i)) => {
                return Err(config_err(format!(
                    "initial_index {i} out of range for dimension {}",
                    split.total()
                )));
            }
            (InitialStateKind::BasisIndex, None) => {
                return Err(config_err("initial_state = \"basis_index\" requires initial_index"));
            }
            (_, Some(_)) => return Err(config_err("initial_index requires initial_state = \"basis_index\"")),
            (InitialStateKind::BasisZero, None) => InitialState::BasisZero,
            (InitialStateKind::RandomProduct, None) => InitialState::RandomProduct,
        };

        let seeds = file.seeds.unwrap_or(1);
        if seeds == 0 {
            return Err(config_err("seeds must be at least 1"));
        }
        let bin_count = file.bin_count.unwrap_or(32);
        if bin_count < 4 || bin_count > split.total() {
            return Err(config_err(format!(
                "bin_count must lie in [4, N = {}], got {bin_count}",
                split.total()
            )));
        }
        let spacing_bins = file.spacing_bins.unwrap_or(40);
        if spacing_bins == 0 {
            return Err(config_err("spacing_bins must be positive"));
        }
        if !is_baker && file.baker_convention.is_some() {
            return Err(config_err("baker_convention is only used by baker_evolve"));
        }
        if experiment == Experiment::Levels && split.total() < 3 {
            return Err(config_err("levels needs dim >= 3"));
        }
        let min_dim = match hamiltonian {
            HamiltonianKind::Hc => 2,
            _ => 3,
        };
        if !is_baker && split.total() < min_dim {
            return Err(config_err(format!("dimension must be at least {min_dim}")));
        }

        Ok(ExperimentConfig {
            experiment,
            hamiltonian,
            harper,
            f,
            f_values,
            split,
            qubits,
            evolution,
            initial_state,
            seed: file.seed.unwrap_or(0),
            seeds,
            bin_count,
            spacing_bins,
            baker_convention: file.baker_convention.unwrap_or_default(),
            output_path: file
                .output_path
                .clone()
                .unwrap_or_else(|| PathBuf::from("out").join(experiment.name())),
        })
    }

    /// Explicit echo: resolving the result again reproduces `self`.
    pub fn to_file(&self) -> ConfigFile {
        let is_baker = self.experiment == Experiment::BakerEvolve;
        let (initial_state, initial_index) = match self.initial_state {
            InitialState::BasisZero => (InitialStateKind::BasisZero, None),
            InitialState::BasisIndex(i) => (InitialStateKind::BasisIndex, Some(i)),
            InitialState::RandomProduct => (InitialStateKind::RandomProduct, None),
        };
        let (dim, n, p, subsystem_dim) = match self.qubits {
            Some((n, p)) => (None, Some(n), Some(p), None),
            None => (Some(self.dim()), None, None, Some(self.split.dim_keep)),
        };
        ConfigFile {
            experiment: Some(self.experiment),
            hamiltonian: (!is_baker).then_some(self.hamiltonian),
            gamma1: (!is_baker).then_some(self.harper.gamma1),
            gamma2: (!is_baker).then_some(self.harper.gamma2),
            f: self.f,
            f_values: (self.experiment == Experiment::SweepF).then(|| self.f_values.clone()),
            dim,
            n,
            p,
            subsystem_dim,
            hbar: (!is_baker).then_some(self.evolution.hbar),
            dt: (!is_baker).then_some(self.evolution.dt),
            num_samples: Some(self.evolution.num_samples),
            transient_cut: Some(self.evolution.transient_cut),
            initial_state: Some(initial_state),
            initial_index,
            seed: Some(self.seed),
            seeds: Some(self.seeds),
            bin_count: Some(self.bin_count),
            spacing_bins: Some(self.spacing_bins),
            baker_convention: is_baker.then_some(self.baker_convention),
            output_path: Some(self.output_path.clone()),
        }
    }
}

fn resolve_split(file: &ConfigFile, is_baker: bool) -> Result<(TensorSplit, Option<(u32, u32)>)> {
    let dim = match (file.dim, file.n) {
        (Some(_), Some(_)) => return Err(config_err("give either dim or n, not both")),
        (Some(d), None) => d,
        (None, Some(n)) => {
            if !(2..=20).contains(&n) {
                return Err(config_err(format!("n must lie in [2, 20], got {n}")));
            }
            1usize << n
        }
        (None, None) if is_baker => 128,
        (None, None) => 256,
    };
    if dim < 2 {
        return Err(config_err(format!("dim must be at least 2, got {dim}")));
    }
    if is_baker && dim % 2 != 0 {
        return Err(config_err(format!("baker dimension must be even, got {dim}")));
    }
    let keep = match (file.subsystem_dim, file.p) {
        (Some(_), Some(_)) => return Err(config_err("give either subsystem_dim or p, not both")),
        (Some(d), None) => d,
        (None, Some(p)) => {
            if p == 0 || p >= 31 {
                return Err(config_err(format!("p must be positive, got {p}")));
            }
            1usize << p
        }
        (None, None) if is_baker => 8,
        (None, None) => 32,
    };
    if keep < 2 || keep >= dim || dim % keep != 0 {
        return Err(config_err(format!(
            "subsystem dimension {keep} must be a proper factor of {dim}"
        )));
    }
    let split = TensorSplit::new(keep, dim / keep).map_err(|e| config_err(e.to_string()))?;
    let qubits = match (
        dim.is_power_of_two(),
        keep.is_power_of_two(),
        file.dim,
        file.subsystem_dim,
    ) {
        (true, true, None, None) => Some((dim.trailing_zeros(), keep.trailing_zeros())),
        _ => None,
    };
    if let (Some(n), Some(p)) = (file.n, file.p) {
        if p >= n {
            return Err(config_err(format!("p = {p} must be less than n = {n}")));
        }
    }
    Ok((split, qubits))
}
