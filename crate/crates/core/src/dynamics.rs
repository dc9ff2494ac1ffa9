//! Exact unitary evolution through a single upfront diagonalization,
//! partial traces over tensor factors, and reduced von Neumann entropy.
//!
//! Index convention for a bipartite space of dimension `D = d1·d2`: the
//! global index is `g = a·d2 + b` with `a` the kept (first) factor and `b`
//! the dropped (second) one. For `n` qubits with the first `p` kept this is
//! ordinary big-endian qubit ordering.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::EntropySeries;
use crate::error::{QchaosError, Result};
use crate::hamiltonian::{HamiltonianMatrix, RngSeed};

/// Eigenvalues at or below this are treated as exact zeros in `λ ln λ`.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;

/// Tolerance used when validating states and density matrices.
pub const STATE_TOLERANCE: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Rebuilds `V·diag(λ)·Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |m, k| {
            self.eigenvectors[(m, k)] * self.eigenvalues[k]
        });
        scaled * self.eigenvectors.transpose()
    }
}

/// Diagonalizes a real symmetric Hamiltonian.
pub fn eig_symmetric(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    eig_symmetric_matrix(h.entries())
}

pub(crate) fn eig_symmetric_matrix(h: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(QchaosError::Shape("matrix must be square".into()));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(QchaosError::NonFiniteInput(
            "cannot diagonalize a matrix with non-finite entries".into(),
        ));
    }
    let eig = SymmetricEigen::try_new(h.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        QchaosError::DiagonalizationFailure(format!(
            "symmetric eigensolver did not converge for a {}x{} matrix",
            h.nrows(),
            h.ncols()
        ))
    })?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = DMatrix::from_fn(n, n, |m, k| eig.eigenvectors[(m, order[k])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Complex state vector of unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Accepts `amplitudes` if the norm is 1 within [`STATE_TOLERANCE`].
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QchaosError::InvalidDimension("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QchaosError::NonFiniteInput("state has non-finite amplitudes".into()));
        }
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(QchaosError::InvalidParameter(format!(
                "state is not normalized: |psi|^2 = {}",
                norm * norm
            )));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QchaosError::InvalidParameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        PureState::new(amplitudes.unscale(norm))
    }

    pub(crate) fn from_raw(amplitudes: DVector<Complex64>) -> Self {
        PureState { amplitudes }
    }

    /// Computational basis state `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(QchaosError::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    /// Tensor product `first ⊗ second` in subsystem-major order.
    pub fn product(first: &PureState, second: &PureState) -> Self {
        let d2 = second.dim();
        let v = DVector::from_fn(first.dim() * d2, |g, _| {
            first.amplitudes[g / d2] * second.amplitudes[g % d2]
        });
        PureState { amplitudes: v }
    }

    /// Product of two independent Haar-random factors.
    pub fn random_product(split: TensorSplit, seed: RngSeed) -> Self {
        let mut rng = seed.rng();
        let first = haar_vector(split.dim_keep, &mut rng);
        let second = haar_vector(split.dim_drop, &mut rng);
        PureState::product(&first, &second)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap_modulus(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }
}

fn haar_vector<R: Rng>(dim: usize, rng: &mut R) -> PureState {
    let v = DVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let norm = v.norm();
    PureState {
        amplitudes: v.unscale(norm),
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within
    /// [`STATE_TOLERANCE`].
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = DensityMatrix { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(entries: DMatrix<Complex64>) -> Self {
        DensityMatrix { entries }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Self {
        let v = &state.amplitudes;
        DensityMatrix {
            entries: v * v.adjoint(),
        }
    }

    /// `diag(p)` for a probability vector.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let d = probabilities.len();
        DensityMatrix::new(DMatrix::from_fn(d, d, |m, n| {
            if m == n {
                Complex64::new(probabilities[m], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        DensityMatrix::diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QchaosError::NonFiniteInput(
                "density matrix has non-finite entries".into(),
            ));
        }
        let eig = SymmetricEigen::try_new(self.entries.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
            QchaosError::DiagonalizationFailure(format!(
                "Hermitian eigensolver did not converge for a {}x{} density matrix",
                self.dim(),
                self.dim()
            ))
        })?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    fn validate(&self) -> Result<Vec<f64>> {
        let d = self.entries.nrows();
        if d == 0 || !self.entries.is_square() {
            return Err(QchaosError::InvalidDensityMatrix(
                "density matrix must be non-empty and square".into(),
            ));
        }
        for m in 0..d {
            for n in m..d {
                let gap = (self.entries[(m, n)] - self.entries[(n, m)].conj()).norm();
                if gap > STATE_TOLERANCE {
                    return Err(QchaosError::InvalidDensityMatrix(format!(
                        "not Hermitian at ({m}, {n}): deviation {gap:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(QchaosError::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let values = self.eigenvalues()?;
        if values[0] < -STATE_TOLERANCE {
            return Err(QchaosError::InvalidDensityMatrix(format!(
                "negative eigenvalue {:e}",
                values[0]
            )));
        }
        Ok(values)
    }
}

/// Factorization `D = dim_keep · dim_drop` of the state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSplit {
    pub dim_keep: usize,
    pub dim_drop: usize,
}

impl TensorSplit {
    pub fn new(dim_keep: usize, dim_drop: usize) -> Result<Self> {
        if dim_keep == 0 || dim_drop == 0 {
            return Err(QchaosError::InvalidDimension("tensor factors must be positive".into()));
        }
        Ok(TensorSplit { dim_keep, dim_drop })
    }

    /// `n` qubits with the first `p` kept.
    pub fn qubits(n: u32, p: u32) -> Result<Self> {
        if p == 0 || p >= n || n > 30 {
            return Err(QchaosError::InvalidDimension(format!(
                "need 0 < p < n <= 30 qubits, got n={n}, p={p}"
            )));
        }
        TensorSplit::new(1 << p, 1 << (n - p))
    }

    pub fn total(&self) -> usize {
        self.dim_keep * self.dim_drop
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(QchaosError::Shape(format!(
                "split {}x{} does not match state dimension {dim}",
                self.dim_keep, self.dim_drop
            )));
        }
        Ok(())
    }
}

/// Which factor survives the partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Borrowed input to [`partial_trace`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(state: &'a PureState) -> Self {
        StateRef::Pure(state)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(rho: &'a DensityMatrix) -> Self {
        StateRef::Mixed(rho)
    }
}

/// Reduced density matrix of the kept factor.
///
/// Pure inputs are reshaped to a `d1×d2` coefficient matrix `M` and reduced
/// as `M·M†` (or `Mᵀ·M̄`), never forming the full `D×D` projector.
pub fn partial_trace<'a>(state: impl Into<StateRef<'a>>, split: TensorSplit, keep: Keep) -> Result<DensityMatrix> {
    let (d1, d2) = (split.dim_keep, split.dim_drop);
    match state.into() {
        StateRef::Pure(psi) => {
            split.check(psi.dim())?;
            let coeffs = DMatrix::from_fn(d1, d2, |a, b| psi.amplitudes[a * d2 + b]);
            let reduced = match keep {
                Keep::First => &coeffs * coeffs.adjoint(),
                Keep::Second => coeffs.transpose() * coeffs.conjugate(),
            };
            Ok(DensityMatrix::from_raw(reduced))
        }
        StateRef::Mixed(rho) => {
            split.check(rho.dim())?;
            let e = &rho.entries;
            let reduced = match keep {
                Keep::First => DMatrix::from_fn(d1, d1, |a, a2| (0..d2).map(|b| e[(a * d2 + b, a2 * d2 + b)]).sum()),
                Keep::Second => DMatrix::from_fn(d2, d2, |b, b2| (0..d1).map(|a| e[(a * d2 + b, a * d2 + b2)]).sum()),
            };
            Ok(DensityMatrix::from_raw(reduced))
        }
    }
}

/// `−Σ λ ln λ` in nats. Eigenvalues at or below [`EIGENVALUE_CLAMP`] contribute
/// nothing.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let values = rho.validate()?;
    Ok(entropy_of_spectrum(&values))
}

pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > EIGENVALUE_CLAMP)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

/// Time grid and `ħ` for entropy time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub hbar: f64,
    pub dt: f64,
    pub num_samples: usize,
    pub transient_cut: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            hbar: 0.1,
            dt: 0.1,
            num_samples: 1024,
            transient_cut: 128,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(QchaosError::InvalidParameter(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(QchaosError::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.num_samples == 0 {
            return Err(QchaosError::InvalidParameter("num_samples must be positive".into()));
        }
        if self.transient_cut >= self.num_samples {
            return Err(QchaosError::InvalidParameter(format!(
                "transient_cut {} must be below num_samples {}",
                self.transient_cut, self.num_samples
            )));
        }
        Ok(())
    }
}

/// Exact propagator `exp(−iHt/ħ)` acting on a fixed initial state.
///
/// The eigenbasis coefficients of the initial state are computed once; each
/// evaluation then costs two real matrix-vector products.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    decomp: &'a SpectralDecomposition,
    coeff_re: DVector<f64>,
    coeff_im: DVector<f64>,
    hbar: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(decomp: &'a SpectralDecomposition, initial: &PureState, hbar: f64) -> Result<Self> {
        if initial.dim() != decomp.dim() {
            return Err(QchaosError::Shape(format!(
                "state dimension {} does not match Hamiltonian dimension {}",
                initial.dim(),
                decomp.dim()
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(QchaosError::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        let vt = decomp.eigenvectors.transpose();
        let re = initial.amplitudes.map(|z| z.re);
        let im = initial.amplitudes.map(|z| z.im);
        Ok(Propagator {
            decomp,
            coeff_re: &vt * re,
            coeff_im: &vt * im,
            hbar,
        })
    }

    /// State at time `t`.
    pub fn at(&self, t: f64) -> PureState {
        let n = self.decomp.dim();
        let mut re = DVector::zeros(n);
        let mut im = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.decomp.eigenvalues[k] * t / self.hbar);
            let c = Complex64::new(self.coeff_re[k], self.coeff_im[k]) * phase;
            re[k] = c.re;
            im[k] = c.im;
        }
        let v = &self.decomp.eigenvectors;
        let out_re = v * re;
        let out_im = v * im;
        PureState::from_raw(DVector::from_fn(n, |g, _| Complex64::new(out_re[g], out_im[g])))
    }
}

/// `V·diag(exp(−iλt/ħ))·Vᵀ·ψ`.
pub fn propagate(initial: &PureState, decomp: &SpectralDecomposition, t: f64, hbar: f64) -> Result<PureState> {
    if !t.is_finite() {
        return Err(QchaosError::InvalidParameter("time must be finite".into()));
    }
    Ok(Propagator::new(decomp, initial, hbar)?.at(t))
}

/// Reduced entropy of the pure state `psi` with the first factor kept.
pub fn reduced_entropy(psi: &PureState, split: TensorSplit) -> Result<f64> {
    von_neumann_entropy(&partial_trace(psi, split, Keep::First)?)
}

/// `s_R(k·dt)` for `k = 0..num_samples` under `h`, keeping the first factor.
pub fn entropy_series(
    h: &HamiltonianMatrix,
    initial: &PureState,
    split: TensorSplit,
    cfg: &EvolutionConfig,
) -> Result<EntropySeries> {
    cfg.validate()?;
    split.check(h.dim())?;
    let decomp = eig_symmetric(h)?;
    entropy_series_with(&decomp, initial, split, cfg)
}

/// Same as [`entropy_series`] for an already diagonalized Hamiltonian.
pub fn entropy_series_with(
    decomp: &SpectralDecomposition,
    initial: &PureState,
    split: TensorSplit,
    cfg: &EvolutionConfig,
) -> Result<EntropySeries> {
    cfg.validate()?;
    split.check(decomp.dim())?;
    let propagator = Propagator::new(decomp, initial, cfg.hbar)?;
    let values = (0..cfg.num_samples)
        .into_par_iter()
        .map(|k| reduced_entropy(&propagator.at(k as f64 * cfg.dt), split))
        .collect::<Result<Vec<f64>>>()?;
    EntropySeries::new(cfg.dt, values, cfg.transient_cut)
}
