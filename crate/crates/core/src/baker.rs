//! Quantized baker's map `B = G_N⁻¹ · blockdiag(G_{N/2}, G_{N/2})` built from
//! discrete Fourier blocks, and subsystem entropy under its iteration.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::EntropySeries;
use crate::dynamics::{reduced_entropy, PureState, TensorSplit};
use crate::error::{QchaosError, Result};

const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Phase offset of the Fourier blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BakerConvention {
    /// Half-integer offsets (antiperiodic boundary conditions).
    #[default]
    Saraceno,
    /// Integer offsets, the plain DFT.
    BalazsVoros,
}

impl BakerConvention {
    fn offset(self) -> f64 {
        match self {
            BakerConvention::Saraceno => 0.5,
            BakerConvention::BalazsVoros => 0.0,
        }
    }
}

/// `M`-dimensional Fourier matrix
/// `G[k][m] = M^{-1/2} exp(−2πi(k+a)(m+a)/M)` with offset `a`.
pub fn fourier_block(dim: usize, convention: BakerConvention) -> DMatrix<Complex64> {
    let a = convention.offset();
    let scale = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |k, m| {
        let phase = -2.0 * PI * (k as f64 + a) * (m as f64 + a) / dim as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Unitary one-step map on an `N`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct BakerUnitary {
    entries: DMatrix<Complex64>,
}

impl BakerUnitary {
    /// Wraps any square unitary matrix.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(QchaosError::InvalidDimension(
                "unitary must be non-empty and square".into(),
            ));
        }
        let u = BakerUnitary { entries };
        let err = u.unitarity_error();
        if !(err <= UNITARITY_TOLERANCE) {
            return Err(QchaosError::InvalidParameter(format!(
                "matrix is not unitary: max |U†U − I| = {err:e}"
            )));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `max |U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        (self.entries.adjoint() * &self.entries - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// One application of the map. The result is not renormalized.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.dim() != self.dim() {
            return Err(QchaosError::Shape(format!(
                "state dimension {} does not match map dimension {}",
                state.dim(),
                self.dim()
            )));
        }
        Ok(PureState::from_raw(&self.entries * state.amplitudes()))
    }
}

/// Baker's map in the half-integer (Saraceno) convention.
pub fn build_baker_unitary(dim: usize) -> Result<BakerUnitary> {
    build_baker_unitary_with(dim, BakerConvention::Saraceno)
}

pub fn build_baker_unitary_with(dim: usize, convention: BakerConvention) -> Result<BakerUnitary> {
    if dim < 2 || dim % 2 != 0 {
        return Err(QchaosError::InvalidDimension(format!(
            "baker's map needs an even dimension >= 2, got {dim}"
        )));
    }
    let half = dim / 2;
    let block = fourier_block(half, convention);
    let mut blocks = DMatrix::<Complex64>::zeros(dim, dim);
    blocks.view_mut((0, 0), (half, half)).copy_from(&block);
    blocks.view_mut((half, half), (half, half)).copy_from(&block);
    let inverse = fourier_block(dim, convention).adjoint();
    BakerUnitary::from_matrix(inverse * blocks)
}

/// `s_R` after `k = 0..=num_steps` applications of `u`, keeping the first
/// factor of `split`. The series has `dt = 1` and no transient cut.
pub fn baker_entropy_series(
    u: &BakerUnitary,
    initial: &PureState,
    split: TensorSplit,
    num_steps: usize,
) -> Result<EntropySeries> {
    if num_steps == 0 {
        return Err(QchaosError::InvalidParameter("num_steps must be positive".into()));
    }
    if split.total() != u.dim() || initial.dim() != u.dim() {
        return Err(QchaosError::Shape(format!(
            "split {}x{} and state dimension {} must match map dimension {}",
            split.dim_keep,
            split.dim_drop,
            initial.dim(),
            u.dim()
        )));
    }
    let mut values = Vec::with_capacity(num_steps + 1);
    let mut state = initial.clone();
    values.push(reduced_entropy(&state, split)?);
    let mut scratch = DVector::<Complex64>::zeros(u.dim());
    for _ in 0..num_steps {
        u.entries.mul_to(state.amplitudes(), &mut scratch);
        state = PureState::from_raw(scratch.clone());
        values.push(reduced_entropy(&state, split)?);
    }
    EntropySeries::new(1.0, values, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_map_is_unitary() {
        let u = build_baker_unitary(2).unwrap();
        assert!(u.unitarity_error() <= 1e-12);
        let bv = build_baker_unitary_with(2, BakerConvention::BalazsVoros).unwrap();
        assert!(bv.unitarity_error() <= 1e-12);
    }

    #[test]
    fn rejects_odd_or_zero_dim() {
        assert!(build_baker_unitary(0).is_err());
        assert!(build_baker_unitary(7).is_err());
        assert!(build_baker_unitary(1).is_err());
    }

    #[test]
    fn dim4_matches_formula() {
        // independent entry-by-entry evaluation of G_4^† · blockdiag(G_2, G_2)
        let g = |m: usize, k: usize, j: usize| {
            let phase = -2.0 * PI * (k as f64 + 0.5) * (j as f64 + 0.5) / m as f64;
            Complex64::from_polar(1.0 / (m as f64).sqrt(), phase)
        };
        let u = build_baker_unitary(4).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let mut want = Complex64::new(0.0, 0.0);
                for mid in 0..4 {
                    let inv = g(4, mid, r).conj();
                    let blk = if (mid < 2) == (col < 2) {
                        g(2, mid % 2, col % 2)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    want += inv * blk;
                }
                assert!((u.entries()[(r, col)] - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn working_size_is_unitary() {
        let u = build_baker_unitary(128).unwrap();
        assert_eq!(u.dim(), 128);
        assert!(u.unitarity_error() <= 1e-10);
    }

    #[test]
    fn identity_map_produces_no_entropy() {
        let id = BakerUnitary::from_matrix(DMatrix::identity(16, 16)).unwrap();
        let split = TensorSplit::new(4, 4).unwrap();
        let psi = PureState::basis(16, 5).unwrap();
        let s = baker_entropy_series(&id, &psi, split, 20).unwrap();
        assert_eq!(s.values().len(), 21);
        assert!(s.values().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn series_rejects_mismatched_split() {
        let u = build_baker_unitary(16).unwrap();
        let psi = PureState::basis(16, 0).unwrap();
        assert!(baker_entropy_series(&u, &psi, TensorSplit::new(2, 4).unwrap(), 4).is_err());
    }

    #[test]
    fn from_matrix_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(BakerUnitary::from_matrix(m).is_err());
    }
}
