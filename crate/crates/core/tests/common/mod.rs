//! Independent reference implementations used only by the test suites.
//! Nothing here calls into the propagator or partial-trace code it checks.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring with a 20-term Taylor series.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * c(scale, 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=20 {
        term = &term * &x * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(−iHt/ħ)` for a real symmetric `H`.
pub fn propagator(h: &DMatrix<f64>, t: f64, hbar: f64) -> DMatrix<Complex64> {
    let a = h.map(|x| c(0.0, -x * t / hbar));
    expm(&a)
}

/// `ρ_R[a][a'] = Σ_b ρ[(a,b),(a',b)]` written as explicit loops.
pub fn naive_partial_trace_first(rho: &DMatrix<Complex64>, d1: usize, d2: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(d1, d1);
    for a in 0..d1 {
        for a2 in 0..d1 {
            let mut acc = c(0.0, 0.0);
            for b in 0..d2 {
                acc += rho[(a * d2 + b, a2 * d2 + b)];
            }
            out[(a, a2)] = acc;
        }
    }
    out
}

pub fn naive_partial_trace_second(rho: &DMatrix<Complex64>, d1: usize, d2: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(d2, d2);
    for b in 0..d2 {
        for b2 in 0..d2 {
            let mut acc = c(0.0, 0.0);
            for a in 0..d1 {
                acc += rho[(a * d2 + b, a * d2 + b2)];
            }
            out[(b, b2)] = acc;
        }
    }
    out
}

/// `ρ_R[a][a'] = Σ_b ψ[a,b]·conj(ψ[a',b])` straight from the amplitudes.
pub fn naive_pure_partial_trace(psi: &DVector<Complex64>, d1: usize, d2: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(d1, d1);
    for a in 0..d1 {
        for a2 in 0..d1 {
            let mut acc = c(0.0, 0.0);
            for b in 0..d2 {
                acc += psi[a * d2 + b] * psi[a2 * d2 + b].conj();
            }
            out[(a, a2)] = acc;
        }
    }
    out
}

/// Entropy from the eigenvalues of a Hermitian matrix.
pub fn naive_entropy(rho: &DMatrix<Complex64>) -> f64 {
    let eig = rho.clone().symmetric_eigenvalues();
    eig.iter().filter(|&&l| l > 1e-12).map(|&l| -l * l.ln()).sum()
}

/// Full-density-matrix entropy series with dense matrix exponentials.
pub fn naive_entropy_series(
    h: &DMatrix<f64>,
    psi0: &DVector<Complex64>,
    d1: usize,
    d2: usize,
    hbar: f64,
    dt: f64,
    samples: usize,
) -> Vec<f64> {
    let rho0 = psi0 * psi0.adjoint();
    (0..samples)
        .map(|k| {
            let u = propagator(h, k as f64 * dt, hbar);
            let rho = &u * &rho0 * u.adjoint();
            naive_entropy(&naive_partial_trace_first(&rho, d1, d2))
        })
        .collect()
}

/// Classical RK4 for `iħ dψ/dt = Hψ`.
pub fn rk4(h: &DMatrix<f64>, psi0: &DVector<Complex64>, t: f64, hbar: f64, step: f64) -> DVector<Complex64> {
    let hc = h.map(|x| c(0.0, -x / hbar));
    let rhs = |v: &DVector<Complex64>| &hc * v;
    let steps = (t / step).round() as usize;
    let dt = t / steps as f64;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        let k1 = rhs(&psi);
        let k2 = rhs(&(&psi + &k1 * c(dt / 2.0, 0.0)));
        let k3 = rhs(&(&psi + &k2 * c(dt / 2.0, 0.0)));
        let k4 = rhs(&(&psi + &k3 * c(dt, 0.0)));
        psi += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
    }
    psi
}

/// Deterministic pseudo-random complex unit vector (SplitMix64 based, not
/// the crate's RNG).
pub fn test_state(dim: usize, seed: u64) -> DVector<Complex64> {
    let mut state = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let v = DVector::from_fn(dim, |_, _| c(next(), next()));
    let norm = v.norm();
    v.unscale(norm)
}

/// Deterministic real symmetric test matrix.
pub fn test_symmetric(dim: usize, seed: u64) -> DMatrix<f64> {
    let v = test_state(dim * dim, seed);
    let mut m = DMatrix::from_fn(dim, dim, |i, j| v[i * dim + j].re * 4.0);
    m = &m + m.transpose();
    m
}
