//! Dense real symmetric Hamiltonians: the GOE-style random matrix `H_c`,
//! the torus Harper matrix `H_r`, and the partially randomized family `H(f)`
//! interpolating between the two.
//!
//! All random draws come from a ChaCha8 stream seeded with [`RngSeed`], and
//! consume it in row-major upper-triangle order so that a seed pins the
//! matrix bit-for-bit.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{QchaosError, Result};

/// Seed for every random draw in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    RandomSymmetric,
    Harper,
    Interpolated,
}

/// Coefficients of `γ1·T + γ2·V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarperParams {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for HarperParams {
    fn default() -> Self {
        HarperParams {
            gamma1: 0.5,
            gamma2: 2.5,
        }
    }
}

/// Parameters that produced a matrix, kept for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FamilyParams {
    pub harper: Option<HarperParams>,
    pub f: Option<f64>,
    pub seed: Option<RngSeed>,
    pub centered: bool,
}

/// Dense real symmetric `N×N` Hamiltonian with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: DMatrix<f64>,
    family: Family,
    params: FamilyParams,
}

impl HamiltonianMatrix {
    /// Wraps an arbitrary matrix, checking that it is square, finite and
    /// exactly symmetric.
    pub fn from_matrix(entries: DMatrix<f64>, family: Family, params: FamilyParams) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(QchaosError::InvalidDimension(format!(
                "Hamiltonian must be a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(QchaosError::NonFiniteInput("Hamiltonian has non-finite entries".into()));
        }
        let n = entries.nrows();
        for m in 0..n {
            for k in (m + 1)..n {
                if entries[(m, k)] != entries[(k, m)] {
                    return Err(QchaosError::InvalidParameter(format!(
                        "Hamiltonian is not symmetric at ({m}, {k})"
                    )));
                }
            }
        }
        Ok(HamiltonianMatrix {
            entries,
            family,
            params,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }
}

/// GOE-convention random symmetric matrix: off-diagonal entries are
/// `Normal(0, 1)`, diagonal entries `Normal(0, 2)`.
pub fn build_random_symmetric(dim: usize, seed: RngSeed) -> Result<HamiltonianMatrix> {
    if dim < 2 {
        return Err(QchaosError::InvalidDimension(format!(
            "random symmetric matrix needs dim >= 2, got {dim}"
        )));
    }
    let mut rng = seed.rng();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim {
        for n in m..dim {
            let z: f64 = rng.sample(StandardNormal);
            if m == n {
                h[(m, m)] = z * std::f64::consts::SQRT_2;
            } else {
                h[(m, n)] = z;
                h[(n, m)] = z;
            }
        }
    }
    Ok(HamiltonianMatrix {
        entries: h,
        family: Family::RandomSymmetric,
        params: FamilyParams {
            seed: Some(seed),
            ..FamilyParams::default()
        },
    })
}

/// Harper matrix on the torus: periodic nearest-neighbour hopping of
/// amplitude 1/2 scaled by `gamma1`, plus the diagonal `gamma2·cos(2πj/N)`
/// with 1-based `j`.
pub fn build_harper(dim: usize, params: HarperParams) -> Result<HamiltonianMatrix> {
    if dim < 3 {
        return Err(QchaosError::InvalidDimension(format!(
            "Harper matrix needs dim >= 3, got {dim}"
        )));
    }
    if !params.gamma1.is_finite() || !params.gamma2.is_finite() {
        return Err(QchaosError::InvalidParameter(
            "Harper coefficients must be finite".into(),
        ));
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let hop = 0.5 * params.gamma1;
    for i in 0..dim {
        let j = (i + 1) % dim;
        h[(i, j)] = hop;
        h[(j, i)] = hop;
        h[(i, i)] = params.gamma2 * (2.0 * PI * (i + 1) as f64 / dim as f64).cos();
    }
    Ok(HamiltonianMatrix {
        entries: h,
        family: Family::Harper,
        params: FamilyParams {
            harper: Some(params),
            ..FamilyParams::default()
        },
    })
}

/// Replaces every entry of `base` with `|m − n| > f·N` by a fresh
/// `Normal(0, 1)` draw, mirrored across the diagonal. Entries inside the band
/// are copied unchanged.
pub fn build_interpolated(base: &HamiltonianMatrix, f: f64, seed: RngSeed) -> Result<HamiltonianMatrix> {
    if !(0.0..=1.0).contains(&f) {
        return Err(QchaosError::InvalidParameter(format!(
            "correlation fraction f must lie in [0, 1], got {f}"
        )));
    }
    let dim = base.dim();
    let threshold = f * dim as f64;
    let mut rng = seed.rng();
    let mut h = base.entries.clone();
    for m in 0..dim {
        for n in (m + 1)..dim {
            if (n - m) as f64 > threshold {
                let z: f64 = rng.sample(StandardNormal);
                h[(m, n)] = z;
                h[(n, m)] = z;
            }
        }
    }
    Ok(HamiltonianMatrix {
        entries: h,
        family: Family::Interpolated,
        params: FamilyParams {
            harper: base.params.harper,
            f: Some(f),
            seed: Some(seed),
            centered: false,
        },
    })
}

/// Subtracts the mean of all `N²` entries from every entry.
pub fn center_mean(h: &HamiltonianMatrix) -> HamiltonianMatrix {
    let n2 = (h.dim() * h.dim()) as f64;
    let mean = h.entries.sum() / n2;
    let entries = h.entries.map(|x| x - mean);
    HamiltonianMatrix {
        entries,
        family: h.family,
        params: FamilyParams {
            centered: true,
            ..h.params
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_asym(a: &DMatrix<f64>) -> f64 {
        let mut worst = 0.0f64;
        for m in 0..a.nrows() {
            for n in 0..a.ncols() {
                worst = worst.max((a[(m, n)] - a[(n, m)]).abs());
            }
        }
        worst
    }

    #[test]
    fn random_symmetric_rejects_small_dim() {
        assert!(matches!(
            build_random_symmetric(1, RngSeed(0)),
            Err(QchaosError::InvalidDimension(_))
        ));
        assert!(build_random_symmetric(0, RngSeed(0)).is_err());
    }

    #[test]
    fn random_symmetric_dim2_is_symmetric() {
        let h = build_random_symmetric(2, RngSeed(9)).unwrap();
        assert_eq!(h.entries(), &h.entries().transpose());
    }

    #[test]
    fn random_symmetric_working_size() {
        let h = build_random_symmetric(256, RngSeed(11)).unwrap();
        assert_eq!(h.dim(), 256);
        assert_eq!(max_asym(h.entries()), 0.0);
        assert_eq!(h.family(), Family::RandomSymmetric);
    }

    #[test]
    fn random_symmetric_moments() {
        let h = build_random_symmetric(64, RngSeed(3)).unwrap();
        let mut off = Vec::new();
        for m in 0..64 {
            for n in (m + 1)..64 {
                off.push(h.entries()[(m, n)]);
            }
        }
        let count = off.len() as f64;
        assert_eq!(off.len(), 64 * 63 / 2);
        let mean = off.iter().sum::<f64>() / count;
        let var = off.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        assert!(mean.abs() < 4.0 / count.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.25, "variance {var}");
    }

    #[test]
    fn random_symmetric_is_deterministic() {
        let a = build_random_symmetric(32, RngSeed(5)).unwrap();
        let b = build_random_symmetric(32, RngSeed(5)).unwrap();
        let c = build_random_symmetric(32, RngSeed(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.entries(), c.entries());
    }

    #[test]
    fn harper_potential_only() {
        let h = build_harper(
            4,
            HarperParams {
                gamma1: 0.0,
                gamma2: 1.0,
            },
        )
        .unwrap();
        let expected = [0.0, -1.0, 0.0, 1.0];
        for m in 0..4 {
            for n in 0..4 {
                let want = if m == n { expected[m] } else { 0.0 };
                assert!((h.entries()[(m, n)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn harper_hopping_layout() {
        let h = build_harper(
            5,
            HarperParams {
                gamma1: 1.0,
                gamma2: 0.0,
            },
        )
        .unwrap();
        let e = h.entries();
        assert_eq!(e[(0, 4)], 0.5);
        assert_eq!(e[(4, 0)], 0.5);
        assert_eq!(e[(1, 2)], 0.5);
        assert_eq!(e[(0, 2)], 0.0);
        assert_eq!(e.sum(), 5.0);
    }

    #[test]
    fn harper_rejects_small_dim() {
        assert!(build_harper(2, HarperParams::default()).is_err());
    }

    #[test]
    fn interpolated_endpoints() {
        let base = build_harper(16, HarperParams::default()).unwrap();
        let same = build_interpolated(&base, 1.0, RngSeed(1)).unwrap();
        assert_eq!(same.entries(), base.entries());

        let scrambled = build_interpolated(&base, 0.0, RngSeed(1)).unwrap();
        for m in 0..16 {
            assert_eq!(scrambled.entries()[(m, m)], base.entries()[(m, m)]);
            for n in 0..16 {
                if m != n {
                    assert_ne!(scrambled.entries()[(m, n)], base.entries()[(m, n)]);
                }
            }
        }
        assert_eq!(max_asym(scrambled.entries()), 0.0);
    }

    #[test]
    fn interpolated_replacement_count() {
        let base = build_harper(256, HarperParams::default()).unwrap();
        let h = build_interpolated(&base, 0.9, RngSeed(2)).unwrap();
        // brute-force enumeration of the pairs the rule should touch
        let mut expected = 0usize;
        let mut changed = 0usize;
        for m in 0..256usize {
            for n in 0..256usize {
                let far = m.abs_diff(n) as f64 > 0.9 * 256.0;
                if far {
                    expected += 1;
                }
                if h.entries()[(m, n)] != base.entries()[(m, n)] {
                    assert!(far);
                    changed += 1;
                }
            }
        }
        assert_eq!(expected, 650);
        assert_eq!(changed, 650);
    }

    #[test]
    fn interpolated_rejects_bad_f() {
        let base = build_harper(8, HarperParams::default()).unwrap();
        assert!(build_interpolated(&base, -0.1, RngSeed(0)).is_err());
        assert!(build_interpolated(&base, 1.5, RngSeed(0)).is_err());
        assert!(build_interpolated(&base, f64::NAN, RngSeed(0)).is_err());
    }

    #[test]
    fn center_mean_cases() {
        let ones = HamiltonianMatrix::from_matrix(
            DMatrix::from_element(3, 3, 1.0),
            Family::RandomSymmetric,
            FamilyParams::default(),
        )
        .unwrap();
        assert!(center_mean(&ones).entries().iter().all(|&x| x == 0.0));

        let h = build_harper(8, HarperParams::default()).unwrap();
        let c = center_mean(&h);
        assert!((c.entries().sum() / 64.0).abs() < 1e-14);
        let shift = c.entries()[(0, 0)] - h.entries()[(0, 0)];
        for (a, b) in c.entries().iter().zip(h.entries().iter()) {
            assert!((a - b - shift).abs() < 1e-15);
        }
        let again = center_mean(&c);
        for (a, b) in again.entries().iter().zip(c.entries().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(max_asym(c.entries()), 0.0);
        assert!(c.params().centered);
    }
}
