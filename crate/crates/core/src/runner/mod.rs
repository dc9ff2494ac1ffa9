//! Config-driven experiments with deterministic seeding and plain-text
//! outputs.
//!
//! Seeds: a master seed `s` yields the sub-seed for `(stage, replicate)` as
//! the first `u64` of a ChaCha8 generator seeded with `s` on stream
//! `(stage << 32) | replicate`. Stages are listed in [`Stage`].

pub mod config;
pub mod csv;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baker::{baker_entropy_series, build_baker_unitary_with, BakerUnitary};
use crate::diagnostics::{
    ks_distance, level_spacings, power_spectrum, residual_parameters, spectral_flatness, EntropySeries, PowerSpectrum,
    ResidualReport, SpacingReference, SpacingSample,
};
use crate::dynamics::{eig_symmetric, entropy_series_with, PureState};
use crate::error::{QchaosError, Result, StageContext};
use crate::hamiltonian::{
    build_harper, build_interpolated, build_random_symmetric, center_mean, HamiltonianMatrix, RngSeed,
};

pub use config::{ConfigFile, Experiment, ExperimentConfig, HamiltonianKind, InitialState};
pub use csv::{emit_csv, Table};

/// Upper edge of the spacing histogram written to `spacings.csv`.
pub const SPACING_HISTOGRAM_MAX: f64 = 4.0;

/// Independent random streams derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    /// Random symmetric matrix draw.
    Hamiltonian = 1,
    /// Replacement entries of `H(f)`.
    Interpolation = 2,
    /// Random product initial state.
    InitialState = 3,
}

pub fn sub_seed(master: u64, stage: Stage, replicate: usize) -> RngSeed {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((stage as u64) << 32) | replicate as u64);
    RngSeed(rng.next_u64())
}

/// Centered Hamiltonian for one replicate. `f` overrides the config value
/// (used by the sweep).
pub fn build_hamiltonian(cfg: &ExperimentConfig, f: Option<f64>, replicate: usize) -> Result<HamiltonianMatrix> {
    let dim = cfg.dim();
    let h = match cfg.hamiltonian {
        HamiltonianKind::Hc => build_random_symmetric(dim, sub_seed(cfg.seed, Stage::Hamiltonian, replicate))?,
        HamiltonianKind::Hr => build_harper(dim, cfg.harper)?,
        HamiltonianKind::Hf => {
            let f = f.or(cfg.f).ok_or_else(|| QchaosError::Config("hf requires f".into()))?;
            let base = build_harper(dim, cfg.harper)?;
            build_interpolated(&base, f, sub_seed(cfg.seed, Stage::Interpolation, replicate))?
        }
    };
    Ok(center_mean(&h))
}

pub fn initial_state(cfg: &ExperimentConfig, replicate: usize) -> Result<PureState> {
    match cfg.initial_state {
        InitialState::BasisZero => PureState::basis(cfg.dim(), 0),
        InitialState::BasisIndex(i) => PureState::basis(cfg.dim(), i),
        InitialState::RandomProduct => Ok(PureState::random_product(
            cfg.split,
            sub_seed(cfg.seed, Stage::InitialState, replicate),
        )),
    }
}

/// Entropy series of one spin-system replicate.
pub fn spin_series(cfg: &ExperimentConfig, f: Option<f64>, replicate: usize) -> Result<EntropySeries> {
    let h = build_hamiltonian(cfg, f, replicate).stage("hamiltonian construction")?;
    let decomp = eig_symmetric(&h).stage("diagonalization")?;
    let psi = initial_state(cfg, replicate).stage("initial state")?;
    entropy_series_with(&decomp, &psi, cfg.split, &cfg.evolution).stage("entropy evolution")
}

pub fn baker_unitary(cfg: &ExperimentConfig) -> Result<BakerUnitary> {
    build_baker_unitary_with(cfg.dim(), cfg.baker_convention).stage("baker map construction")
}

/// Entropy series of one baker's-map replicate.
pub fn baker_series(cfg: &ExperimentConfig, u: &BakerUnitary, replicate: usize) -> Result<EntropySeries> {
    let psi = initial_state(cfg, replicate).stage("initial state")?;
    baker_entropy_series(u, &psi, cfg.split, cfg.evolution.num_samples)
        .and_then(|s| s.with_transient_cut(cfg.evolution.transient_cut))
        .stage("baker iteration")
}

/// Per-replicate summary of an entropy series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub series: EntropySeries,
    pub spectrum: PowerSpectrum,
    pub flatness: f64,
}

impl SeriesSummary {
    pub fn new(series: EntropySeries) -> Result<Self> {
        let spectrum = power_spectrum(&series).stage("power spectrum")?;
        let flatness = spectral_flatness(&spectrum).stage("spectral flatness")?;
        Ok(SeriesSummary {
            series,
            spectrum,
            flatness,
        })
    }
}

/// Pooled statistics over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledSeries {
    pub replicates: Vec<SeriesSummary>,
}

impl PooledSeries {
    fn mean_of(&self, f: impl Fn(&SeriesSummary) -> f64) -> f64 {
        self.replicates.iter().map(f).sum::<f64>() / self.replicates.len() as f64
    }

    pub fn steady_mean(&self) -> f64 {
        self.mean_of(|r| r.series.steady_mean())
    }

    pub fn flatness(&self) -> f64 {
        self.mean_of(|r| r.flatness)
    }

    /// Mean number of samples needed to reach 90% of the steady mean.
    pub fn rise_samples(&self) -> f64 {
        self.mean_of(|r| r.series.rise_index(0.9).unwrap_or(r.series.len()) as f64)
    }

    pub fn max_entropy(&self) -> f64 {
        self.replicates
            .iter()
            .flat_map(|r| r.series.values().iter().copied())
            .fold(0.0, f64::max)
    }

    fn mean_columns(&self, column: impl Fn(&SeriesSummary) -> &[f64]) -> Vec<f64> {
        let n = self.replicates.len() as f64;
        let len = column(&self.replicates[0]).len();
        (0..len)
            .map(|k| self.replicates.iter().map(|r| column(r)[k]).sum::<f64>() / n)
            .collect()
    }

    pub fn entropy_table(&self) -> Table {
        let first = &self.replicates[0].series;
        let mean = self.mean_columns(|r| r.series.values());
        Table::new("t", "s_R", first.times().zip(mean).collect())
    }

    pub fn spectrum_table(&self) -> Table {
        let freqs = self.replicates[0].spectrum.frequencies.clone();
        let mean = self.mean_columns(|r| &r.spectrum.power);
        Table::new("freq", "power", freqs.into_iter().zip(mean).collect())
    }
}

/// Spin-system entropy series for every replicate, in replicate order.
pub fn pooled_spin_series(cfg: &ExperimentConfig, f: Option<f64>) -> Result<PooledSeries> {
    let replicates = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| SeriesSummary::new(spin_series(cfg, f, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PooledSeries { replicates })
}

pub fn pooled_baker_series(cfg: &ExperimentConfig) -> Result<PooledSeries> {
    let u = baker_unitary(cfg)?;
    let replicates = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| SeriesSummary::new(baker_series(cfg, &u, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PooledSeries { replicates })
}

/// Unit-mean spacings of every replicate, pooled.
pub fn pooled_spacings(cfg: &ExperimentConfig) -> Result<SpacingSample> {
    let samples = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| {
            let h = build_hamiltonian(cfg, None, r).stage("hamiltonian construction")?;
            let decomp = eig_symmetric(&h).stage("diagonalization")?;
            level_spacings(&decomp).stage("level spacings")
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpacingSample::pooled(&samples))
}

/// Residual reports of every replicate.
pub fn pooled_residuals(cfg: &ExperimentConfig, f: Option<f64>) -> Result<Vec<ResidualReport>> {
    (0..cfg.seeds)
        .into_par_iter()
        .map(|r| {
            let h = build_hamiltonian(cfg, f, r).stage("hamiltonian construction")?;
            let decomp = eig_symmetric(&h).stage("diagonalization")?;
            residual_parameters(&decomp, cfg.bin_count).stage("residual parameters")
        })
        .collect()
}

fn mean_residual(reports: &[ResidualReport]) -> f64 {
    reports.iter().map(ResidualReport::mean).sum::<f64>() / reports.len() as f64
}

/// Outcome of a run. `duration` is reported but not persisted so that
/// manifests stay byte-identical across re-runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub artifact_version: String,
    pub duration: Duration,
    pub derived: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    artifact_version: String,
    outputs: Vec<String>,
    derived: BTreeMap<String, f64>,
    config: ConfigFile,
}

pub const MANIFEST_NAME: &str = "manifest.txt";

impl RunManifest {
    pub fn render(&self) -> String {
        let file = ManifestFile {
            artifact_version: self.artifact_version.clone(),
            outputs: self.outputs.clone(),
            derived: self.derived.clone(),
            config: self.config.to_file(),
        };
        toml::to_string(&file).expect("manifest always serializes")
    }

    /// Recovers the config echo from a manifest, ready to re-run.
    pub fn config_from_text(text: &str) -> Result<(Experiment, ConfigFile)> {
        let file: ManifestFile = toml::from_str(text).map_err(|e| QchaosError::Config(e.message().to_string()))?;
        let experiment = file
            .config
            .experiment
            .ok_or_else(|| QchaosError::Config("manifest config has no experiment".into()))?;
        Ok((experiment, file.config))
    }
}

/// Runs an experiment, writing its CSV outputs and `manifest.txt` into
/// `cfg.output_path`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let mut derived = BTreeMap::new();
    let mut tables: Vec<(&str, Table)> = Vec::new();

    match cfg.experiment {
        Experiment::SpinEvolve | Experiment::Spectrum => {
            let pooled = pooled_spin_series(cfg, None)?;
            record_series(&mut derived, "", &pooled);
            tables.push(("entropy.csv", pooled.entropy_table()));
            if cfg.experiment == Experiment::Spectrum {
                tables.push(("spectrum.csv", pooled.spectrum_table()));
            }
        }
        Experiment::BakerEvolve => {
            let pooled = pooled_baker_series(cfg)?;
            record_series(&mut derived, "", &pooled);
            tables.push(("entropy.csv", pooled.entropy_table()));
            tables.push(("spectrum.csv", pooled.spectrum_table()));
        }
        Experiment::Levels => {
            let sample = pooled_spacings(cfg)?;
            derived.insert("num_spacings".into(), sample.len() as f64);
            derived.insert(
                "ks_distance_wigner".into(),
                ks_distance(&sample, SpacingReference::Wigner).stage("KS distance")?,
            );
            derived.insert(
                "ks_distance_poisson".into(),
                ks_distance(&sample, SpacingReference::Poisson).stage("KS distance")?,
            );
            let hist = sample.histogram(cfg.spacing_bins, SPACING_HISTOGRAM_MAX);
            tables.push(("spacings.csv", Table::new("s", "density", hist)));
        }
        Experiment::Residuals => {
            let reports = pooled_residuals(cfg, None)?;
            derived.insert("mean_residual".into(), mean_residual(&reports));
            let n = reports.len() as f64;
            let rows = (0..cfg.dim())
                .map(|k| (k as f64, reports.iter().map(|r| r.r_values[k]).sum::<f64>() / n))
                .collect();
            tables.push(("residuals.csv", Table::new("eigenvector", "r", rows)));
        }
        Experiment::SweepF => {
            let mut flat_rows = Vec::new();
            let mut resid_rows = Vec::new();
            for &f in &cfg.f_values {
                let pooled = pooled_spin_series(cfg, Some(f))?;
                let prefix = format!("f{f}_");
                record_series(&mut derived, &prefix, &pooled);
                let r = mean_residual(&pooled_residuals(cfg, Some(f))?);
                derived.insert(format!("{prefix}mean_residual"), r);
                flat_rows.push((f, pooled.flatness()));
                resid_rows.push((f, r));
            }
            tables.push(("sweep_flatness.csv", Table::new("f", "spectral_flatness", flat_rows)));
            tables.push(("sweep_residual.csv", Table::new("f", "mean_residual", resid_rows)));
        }
    }

    let dir = &cfg.output_path;
    std::fs::create_dir_all(dir).map_err(|e| QchaosError::io(dir, e))?;
    for (name, table) in &tables {
        emit_csv(table, &dir.join(name)).stage("writing outputs")?;
    }
    let manifest = RunManifest {
        config: cfg.clone(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        duration: start.elapsed(),
        derived,
        outputs: tables.iter().map(|(name, _)| name.to_string()).collect(),
    };
    csv::write_atomic(&dir.join(MANIFEST_NAME), &manifest.render())?;
    Ok(manifest)
}

fn record_series(derived: &mut BTreeMap<String, f64>, prefix: &str, pooled: &PooledSeries) {
    derived.insert(format!("{prefix}steady_mean_entropy"), pooled.steady_mean());
    derived.insert(format!("{prefix}spectral_flatness"), pooled.flatness());
    derived.insert(format!("{prefix}rise_samples_90"), pooled.rise_samples());
    derived.insert(format!("{prefix}max_entropy"), pooled.max_entropy());
}

/// Loads a config file, applies overrides, and resolves it.
pub fn load_config(experiment: Experiment, path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut file = match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    overrides.apply(&mut file);
    ExperimentConfig::resolve(experiment, &file)
}

/// Command-line overrides of config keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub f: Option<f64>,
    pub hbar: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ConfigFile) {
        if let Some(seed) = self.seed {
            file.seed = Some(seed);
        }
        if let Some(dim) = self.dim {
            file.dim = Some(dim);
            file.n = None;
            if let Some(p) = file.p.take() {
                file.subsystem_dim.get_or_insert(1 << p);
            }
        }
        if let Some(f) = self.f {
            file.f = Some(f);
        }
        if let Some(hbar) = self.hbar {
            file.hbar = Some(hbar);
        }
        if let Some(out) = &self.out {
            file.output_path = Some(out.clone());
        }
    }
}
