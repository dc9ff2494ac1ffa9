//! Entropy production in subsystems as a dynamical signature of quantum
//! chaos.
//!
//! The crate builds random, Harper and partially randomized Hamiltonians
//! ([`hamiltonian`]) and the quantized baker's map ([`baker`]), evolves pure
//! states and tracks the von Neumann entropy of a subsystem ([`dynamics`]),
//! and measures how broad-band that entropy signal is alongside the usual
//! stationary random-matrix diagnostics ([`diagnostics`]). The [`runner`]
//! module ties everything into reproducible, config-driven experiments.

pub mod baker;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod runner;

pub use baker::{baker_entropy_series, build_baker_unitary, build_baker_unitary_with, BakerConvention, BakerUnitary};
pub use diagnostics::{
    ks_distance, level_spacings, level_spacings_from, poisson_density, power_spectrum, residual_parameters,
    spectral_flatness, wigner_surmise, EntropySeries, PowerSpectrum, ResidualReport, SpacingReference, SpacingSample,
};
pub use dynamics::{
    eig_symmetric, entropy_series, entropy_series_with, partial_trace, propagate, von_neumann_entropy, DensityMatrix,
    EvolutionConfig, Keep, Propagator, PureState, SpectralDecomposition, TensorSplit,
};
pub use error::{QchaosError, Result};
pub use hamiltonian::{
    build_harper, build_interpolated, build_random_symmetric, center_mean, Family, HamiltonianMatrix, HarperParams,
    RngSeed,
};
