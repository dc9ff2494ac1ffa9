//! Quantum baker's map on 128 states, split as 8 x 16.
//!
//!     cargo run --release --example baker_map

use qchaos::{
    baker_entropy_series, build_baker_unitary, power_spectrum, spectral_flatness, PureState, RngSeed, TensorSplit,
};

fn main() -> qchaos::Result<()> {
    let u = build_baker_unitary(128)?;
    println!("unitarity error {:.2e}", u.unitarity_error());
    let split = TensorSplit::new(8, 16)?;
    let psi = PureState::random_product(split, RngSeed(11));
    let series = baker_entropy_series(&u, &psi, split, 512)?.with_transient_cut(64)?;
    for (step, s) in series.values().iter().enumerate().take(12) {
        println!("step {step:>3}: s = {s:.5}");
    }
    println!(
        "steady mean {:.4} (ln 8 = {:.4}), flatness {:.3}",
        series.steady_mean(),
        8f64.ln(),
        spectral_flatness(&power_spectrum(&series)?)?
    );
    Ok(())
}
