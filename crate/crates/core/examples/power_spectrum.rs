//! Spectral flatness of the subsystem entropy signal: broad-band for the
//! random Hamiltonian, a few sharp lines for Harper.
//!
//!     cargo run --release --example power_spectrum

use qchaos::{
    build_harper, build_random_symmetric, center_mean, entropy_series, power_spectrum, spectral_flatness,
    EvolutionConfig, HamiltonianMatrix, HarperParams, PureState, RngSeed, TensorSplit,
};

fn report(name: &str, h: &HamiltonianMatrix, split: TensorSplit) -> qchaos::Result<()> {
    let cfg = EvolutionConfig::default();
    let psi = PureState::random_product(split, RngSeed(5));
    let series = entropy_series(h, &psi, split, &cfg)?;
    let spectrum = power_spectrum(&series)?;
    let peak = spectrum
        .power
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| spectrum.frequencies[k])
        .unwrap_or(0.0);
    println!(
        "{name}: flatness {:.3}, strongest line at {peak:.3}",
        spectral_flatness(&spectrum)?
    );
    Ok(())
}

fn main() -> qchaos::Result<()> {
    let split = TensorSplit::qubits(8, 5)?;
    let dim = 256;
    report("H_c", &center_mean(&build_random_symmetric(dim, RngSeed(3))?), split)?;
    report("H_r", &center_mean(&build_harper(dim, HarperParams::default())?), split)?;
    Ok(())
}
