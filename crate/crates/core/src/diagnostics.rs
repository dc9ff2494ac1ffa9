//! Stationary and dynamical chaos indicators: power spectra of entropy
//! fluctuations and their flatness, nearest-neighbour level spacings with
//! Wigner/Poisson references, and eigenvector residual parameters.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::dynamics::SpectralDecomposition;
use crate::error::{QchaosError, Result};

/// Guard added to every bin before taking logarithms in [`spectral_flatness`].
pub const FLATNESS_EPSILON: f64 = 1e-300;

/// Minimum analyzed window for [`power_spectrum`].
pub const MIN_WINDOW: usize = 8;

/// Uniformly sampled entropy time series in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    dt: f64,
    values: Vec<f64>,
    transient_cut: usize,
}

impl EntropySeries {
    pub fn new(dt: f64, values: Vec<f64>, transient_cut: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(QchaosError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if values.is_empty() {
            return Err(QchaosError::InsufficientData("entropy series is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < -1e-9) {
            return Err(QchaosError::InvalidParameter(format!(
                "entropy values must be finite and non-negative, found {bad}"
            )));
        }
        if transient_cut >= values.len() {
            return Err(QchaosError::InvalidParameter(format!(
                "transient_cut {transient_cut} must be below series length {}",
                values.len()
            )));
        }
        Ok(EntropySeries {
            dt,
            values,
            transient_cut,
        })
    }

    pub fn with_transient_cut(self, transient_cut: usize) -> Result<Self> {
        EntropySeries::new(self.dt, self.values, transient_cut)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transient_cut(&self) -> usize {
        self.transient_cut
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample times `k·dt`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.dt)
    }

    /// Samples after the transient.
    pub fn steady_window(&self) -> &[f64] {
        &self.values[self.transient_cut..]
    }

    /// Mean over the post-transient window.
    pub fn steady_mean(&self) -> f64 {
        let w = self.steady_window();
        w.iter().sum::<f64>() / w.len() as f64
    }

    /// First sample index at which the series reaches `fraction` of its
    /// steady-state mean, if any.
    pub fn rise_index(&self, fraction: f64) -> Option<usize> {
        let target = fraction * self.steady_mean();
        self.values.iter().position(|&v| v >= target)
    }
}

/// One-sided power spectrum with frequencies in cycles per time unit.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
}

/// Periodogram of the post-transient fluctuation: the window mean is
/// removed, no taper is applied, and bins `k = 0..=M/2` are returned as
/// `|X_k|²` at frequency `k/(M·dt)`.
pub fn power_spectrum(series: &EntropySeries) -> Result<PowerSpectrum> {
    let window = series.steady_window();
    let m = window.len();
    if m < MIN_WINDOW {
        return Err(QchaosError::InsufficientData(format!(
            "post-transient window has {m} samples, need at least {MIN_WINDOW}"
        )));
    }
    let mean = window.iter().sum::<f64>() / m as f64;
    let mut buffer: Vec<Complex64> = window.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buffer);
    let bins = m / 2 + 1;
    let frequencies = (0..bins).map(|k| k as f64 / (m as f64 * series.dt())).collect();
    let power = buffer[..bins].iter().map(|z| z.norm_sqr()).collect();
    Ok(PowerSpectrum { frequencies, power })
}

/// Geometric-to-arithmetic mean ratio of the positive-frequency bins.
pub fn spectral_flatness(spectrum: &PowerSpectrum) -> Result<f64> {
    let bins = spectrum.power.get(1..).unwrap_or(&[]);
    if bins.is_empty() {
        return Err(QchaosError::InsufficientData("no positive-frequency bins".into()));
    }
    if !bins.iter().any(|&p| p > 0.0) {
        return Err(QchaosError::InsufficientData(
            "all positive-frequency power is zero".into(),
        ));
    }
    let n = bins.len() as f64;
    let log_mean = bins.iter().map(|&p| (p + FLATNESS_EPSILON).ln()).sum::<f64>() / n;
    let mean = bins.iter().map(|&p| p + FLATNESS_EPSILON).sum::<f64>() / n;
    Ok((log_mean.exp() / mean).clamp(0.0, 1.0))
}

/// Nearest-neighbour spacings scaled to unit mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSample {
    spacings: Vec<f64>,
}

impl SpacingSample {
    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    /// Concatenates samples that were each normalized separately.
    pub fn pooled<'a>(samples: impl IntoIterator<Item = &'a SpacingSample>) -> SpacingSample {
        SpacingSample {
            spacings: samples.into_iter().flat_map(|s| s.spacings.iter().copied()).collect(),
        }
    }

    /// Wraps raw spacings without renormalizing.
    pub fn from_spacings(spacings: Vec<f64>) -> Result<Self> {
        if spacings.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(QchaosError::InvalidParameter(
                "spacings must be finite and non-negative".into(),
            ));
        }
        Ok(SpacingSample { spacings })
    }

    /// Histogram as `(bin centre, density)` on `[0, upper)`. Densities are
    /// normalized against the whole sample, including points beyond `upper`.
    pub fn histogram(&self, bins: usize, upper: f64) -> Vec<(f64, f64)> {
        let width = upper / bins as f64;
        let mut counts = vec![0usize; bins];
        for &s in &self.spacings {
            let idx = (s / width).floor() as usize;
            if idx < bins {
                counts[idx] += 1;
            }
        }
        let total = self.spacings.len() as f64;
        counts
            .iter()
            .enumerate()
            .map(|(k, &c)| ((k as f64 + 0.5) * width, c as f64 / (total * width)))
            .collect()
    }
}

/// Spacings of the sorted spectrum divided by their mean; no unfolding.
pub fn level_spacings(decomp: &SpectralDecomposition) -> Result<SpacingSample> {
    level_spacings_from(decomp.eigenvalues().as_slice())
}

pub fn level_spacings_from(eigenvalues: &[f64]) -> Result<SpacingSample> {
    if eigenvalues.len() < 3 {
        return Err(QchaosError::InsufficientData(format!(
            "need at least 3 eigenvalues, got {}",
            eigenvalues.len()
        )));
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(QchaosError::NonFiniteInput("eigenvalues must be finite".into()));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    if mean <= 0.0 {
        return Err(QchaosError::InsufficientData("spectrum is fully degenerate".into()));
    }
    Ok(SpacingSample {
        spacings: gaps.into_iter().map(|g| g / mean).collect(),
    })
}

/// Unit-mean GOE surmise `(π/2) s exp(−πs²/4)`.
pub fn wigner_surmise(s: f64) -> Result<f64> {
    check_spacing(s)?;
    Ok(0.5 * PI * s * (-0.25 * PI * s * s).exp())
}

/// Unit-mean Poisson density `exp(−s)`.
pub fn poisson_density(s: f64) -> Result<f64> {
    check_spacing(s)?;
    Ok((-s).exp())
}

fn check_spacing(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(QchaosError::Domain(format!("spacing must be non-negative, got {s}")));
    }
    Ok(())
}

/// Reference spacing distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpacingReference {
    Wigner,
    Poisson,
}

impl SpacingReference {
    pub fn cdf(self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            SpacingReference::Wigner => 1.0 - (-0.25 * PI * s * s).exp(),
            SpacingReference::Poisson => 1.0 - (-s).exp(),
        }
    }

    pub fn density(self, s: f64) -> Result<f64> {
        match self {
            SpacingReference::Wigner => wigner_surmise(s),
            SpacingReference::Poisson => poisson_density(s),
        }
    }
}

/// Two-sided Kolmogorov–Smirnov statistic against a reference CDF.
pub fn ks_distance(sample: &SpacingSample, reference: SpacingReference) -> Result<f64> {
    if sample.is_empty() {
        return Err(QchaosError::InsufficientData("empty spacing sample".into()));
    }
    let mut sorted = sample.spacings.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = reference.cdf(s);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// Residual parameter of every eigenvector, in eigenvalue order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub r_values: Vec<f64>,
    pub bin_count: usize,
}

impl ResidualReport {
    pub fn mean(&self) -> f64 {
        self.r_values.iter().sum::<f64>() / self.r_values.len() as f64
    }
}

fn gaussian_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * (1.0 + erf((x - mean) / (sd * std::f64::consts::SQRT_2)))
}

/// Residual of a single vector: `(1/N)·sqrt(Σ_k (p_k − p_k⁰)²)` where `p_k` is
/// the fraction of components in bin `k` of a uniform histogram over
/// `μ ± 4σ` (outliers go to the end bins) and `p_k⁰` the Gaussian mass of
/// the same bin, with the end bins extended to ±∞.
pub fn residual_of_vector(components: &[f64], bin_count: usize) -> Result<f64> {
    let n = components.len();
    if bin_count < 4 || n < bin_count {
        return Err(QchaosError::InvalidParameter(format!(
            "need bin_count >= 4 and at least bin_count components, got bin_count={bin_count}, N={n}"
        )));
    }
    let nf = n as f64;
    let mean = components.iter().sum::<f64>() / nf;
    let sd = (components.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf).sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(QchaosError::DegenerateVector(
            "eigenvector components have zero spread".into(),
        ));
    }
    let lo = mean - 4.0 * sd;
    let width = 8.0 * sd / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    for &x in components {
        let idx = ((x - lo) / width).floor();
        let idx = if idx < 0.0 {
            0
        } else {
            (idx as usize).min(bin_count - 1)
        };
        counts[idx] += 1;
    }
    let sum_sq: f64 = (0..bin_count)
        .map(|k| {
            let left = if k == 0 {
                0.0
            } else {
                gaussian_cdf(lo + k as f64 * width, mean, sd)
            };
            let right = if k + 1 == bin_count {
                1.0
            } else {
                gaussian_cdf(lo + (k + 1) as f64 * width, mean, sd)
            };
            let observed = counts[k] as f64 / nf;
            (observed - (right - left)).powi(2)
        })
        .sum();
    Ok(sum_sq.sqrt() / nf)
}

pub fn residual_parameters(decomp: &SpectralDecomposition, bin_count: usize) -> Result<ResidualReport> {
    let v = decomp.eigenvectors();
    let r_values = (0..v.ncols())
        .into_par_iter()
        .map(|k| {
            let column: Vec<f64> = v.column(k).iter().copied().collect();
            residual_of_vector(&column, bin_count)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResidualReport { r_values, bin_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn series(values: Vec<f64>, cut: usize) -> EntropySeries {
        EntropySeries::new(1.0, values, cut).unwrap()
    }

    fn naive_dft_power(x: &[f64]) -> Vec<f64> {
        let m = x.len();
        (0..=m / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let a = -2.0 * PI * (k * j) as f64 / m as f64;
                    re += v * a.cos();
                    im += v * a.sin();
                }
                re * re + im * im
            })
            .collect()
    }

    #[test]
    fn series_validation() {
        assert!(EntropySeries::new(1.0, vec![], 0).is_err());
        assert!(EntropySeries::new(1.0, vec![0.1, 0.2], 2).is_err());
        assert!(EntropySeries::new(0.0, vec![0.1], 0).is_err());
        assert!(EntropySeries::new(1.0, vec![-0.1], 0).is_err());
    }

    #[test]
    fn constant_series_has_no_power() {
        let s = series(vec![0.7; 64], 0);
        let p = power_spectrum(&s).unwrap();
        assert_eq!(p.power.len(), 33);
        assert!(p.power.iter().all(|&x| x <= 1e-20));
    }

    #[test]
    fn cosine_lands_in_one_bin() {
        let x: Vec<f64> = (0..64)
            .map(|j| 1.0 + 0.3 * (2.0 * PI * 5.0 * j as f64 / 64.0).cos())
            .collect();
        let p = power_spectrum(&series(x, 0)).unwrap();
        let peak = p.power[5];
        for (k, &v) in p.power.iter().enumerate() {
            if k != 5 {
                assert!(v <= 1e-16 * peak, "bin {k}: {v}");
            }
        }
        assert!((p.frequencies[5] - 5.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_matches_naive_dft() {
        let raw: Vec<f64> = (0..160)
            .map(|j| ((j * 37 % 101) as f64 * 0.013).sin().abs() + 0.2)
            .collect();
        let s = series(raw.clone(), 32);
        let p = power_spectrum(&s).unwrap();
        let window = &raw[32..];
        let mean = window.iter().sum::<f64>() / 128.0;
        let centered: Vec<f64> = window.iter().map(|v| v - mean).collect();
        let want = naive_dft_power(&centered);
        let scale = want.iter().cloned().fold(0.0, f64::max);
        for (a, b) in p.power.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-9 * scale);
        }
        assert!(p.power[0] <= 1e-16 * 128.0 * 128.0);
    }

    #[test]
    fn spectrum_rejects_short_window() {
        let s = series(vec![0.1; 12], 5);
        assert!(matches!(power_spectrum(&s), Err(QchaosError::InsufficientData(_))));
    }

    #[test]
    fn flatness_extremes() {
        let flat = PowerSpectrum {
            frequencies: (0..33).map(f64::from).collect(),
            power: vec![2.5; 33],
        };
        assert!((spectral_flatness(&flat).unwrap() - 1.0).abs() < 1e-12);

        let mut power = vec![0.0; 65];
        power[10] = 4.0;
        let line = PowerSpectrum {
            frequencies: (0..65).map(f64::from).collect(),
            power,
        };
        // geometric mean exp((ln 4 + 63 ln ε)/64) over arithmetic mean ≈ 4/64
        let eps = FLATNESS_EPSILON;
        let want = ((4.0f64 + eps).ln() / 64.0 + 63.0 * eps.ln() / 64.0).exp() / ((4.0 + 64.0 * eps) / 64.0);
        let got = spectral_flatness(&line).unwrap();
        assert!(got <= 1e-4);
        assert!((got - want).abs() <= 1e-12 * want.max(1e-300));
    }

    #[test]
    fn flatness_errors() {
        let none = PowerSpectrum {
            frequencies: vec![0.0],
            power: vec![1.0],
        };
        assert!(spectral_flatness(&none).is_err());
        let zero = PowerSpectrum {
            frequencies: vec![0.0, 1.0, 2.0],
            power: vec![1.0, 0.0, 0.0],
        };
        assert!(spectral_flatness(&zero).is_err());
    }

    #[test]
    fn spacings_examples() {
        let s = level_spacings_from(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.spacings(), &[1.0, 1.0, 1.0]);
        let s = level_spacings_from(&[3.0, 0.0, 1.0]).unwrap();
        assert!((s.spacings()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.spacings()[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!(level_spacings_from(&[0.0, 1.0]).is_err());
        assert!(level_spacings_from(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn surmise_values() {
        assert_eq!(wigner_surmise(0.0).unwrap(), 0.0);
        assert_eq!(poisson_density(0.0).unwrap(), 1.0);
        assert!((poisson_density(1.0).unwrap() - 0.36788).abs() < 1e-5);
        assert!(wigner_surmise(-0.1).is_err());
        assert!(poisson_density(-1.0).is_err());
        // derivative of s·exp(−πs²/4) vanishes at s = sqrt(2/π)
        let peak = (2.0 / PI).sqrt();
        assert!((peak - 0.79788).abs() < 1e-5);
        let h = 1e-4;
        assert!(wigner_surmise(peak).unwrap() > wigner_surmise(peak - h).unwrap());
        assert!(wigner_surmise(peak).unwrap() > wigner_surmise(peak + h).unwrap());
    }

    #[test]
    fn ks_quantile_sample() {
        for reference in [SpacingReference::Wigner, SpacingReference::Poisson] {
            let n = 200;
            let quantiles: Vec<f64> = (1..=n)
                .map(|k| {
                    let u = (k as f64 - 0.5) / n as f64;
                    match reference {
                        SpacingReference::Wigner => (-4.0 * (1.0 - u).ln() / PI).sqrt(),
                        SpacingReference::Poisson => -(1.0 - u).ln(),
                    }
                })
                .collect();
            let sample = SpacingSample::from_spacings(quantiles).unwrap();
            let d = ks_distance(&sample, reference).unwrap();
            assert!(d <= 0.5 / n as f64 + 1e-12, "{d}");
        }
    }

    #[test]
    fn ks_single_point() {
        let sample = SpacingSample::from_spacings(vec![1.0]).unwrap();
        let d = ks_distance(&sample, SpacingReference::Poisson).unwrap();
        let f = 1.0 - (-1.0f64).exp();
        assert!((d - f.max(1.0 - f)).abs() < 1e-12);
        assert!((d - 0.6321).abs() < 1e-4);
        let empty = SpacingSample::from_spacings(vec![]).unwrap();
        assert!(ks_distance(&empty, SpacingReference::Wigner).is_err());
    }

    #[test]
    fn residual_of_gaussian_quantiles_is_small() {
        let n = 256;
        let bins = 32;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let comps: Vec<f64> = (1..=n)
            .map(|k| normal.inverse_cdf((k as f64 - 0.5) / n as f64))
            .collect();
        let r = residual_of_vector(&comps, bins).unwrap();
        assert!(r <= 2.0 / (n as f64 * (bins as f64).sqrt()), "{r}");

        let two_point: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 0.25 } else { -0.25 }).collect();
        let r2 = residual_of_vector(&two_point, 8).unwrap();
        // components sit at μ ± σ, i.e. on the left edges of bins 3 and 5 of 8
        let cdf = |x: f64| normal.cdf(x);
        let edges: Vec<f64> = (0..=8).map(|k| -4.0 + k as f64).collect();
        let mut sum = 0.0;
        for k in 0..8 {
            let left = if k == 0 { 0.0 } else { cdf(edges[k]) };
            let right = if k == 7 { 1.0 } else { cdf(edges[k + 1]) };
            let observed = if k == 3 || k == 5 { 0.5 } else { 0.0 };
            sum += (observed - (right - left)).powi(2);
        }
        assert!((r2 - sum.sqrt() / n as f64).abs() < 1e-15, "{r2}");
        assert!(r2 > r);
    }

    #[test]
    fn residual_errors() {
        assert!(matches!(
            residual_of_vector(&[0.5; 64], 8),
            Err(QchaosError::DegenerateVector(_))
        ));
        assert!(residual_of_vector(&[0.1, 0.2, 0.3], 4).is_err());
        assert!(residual_of_vector(&[0.1; 16], 3).is_err());
    }
}
