//! Evolve a product state of 8 spins under the random and Harper
//! Hamiltonians and watch the entropy of the first 5 spins.
//!
//!     cargo run --release --example spin_evolve

use qchaos::{
    build_harper, build_random_symmetric, center_mean, entropy_series, EvolutionConfig, HarperParams, PureState,
    RngSeed, TensorSplit,
};

fn main() -> qchaos::Result<()> {
    let split = TensorSplit::qubits(8, 5)?;
    let dim = split.dim_keep * split.dim_drop;
    let cfg = EvolutionConfig::default();
    let psi = PureState::basis(dim, 0)?;

    let chaotic = center_mean(&build_random_symmetric(dim, RngSeed(1))?);
    let regular = center_mean(&build_harper(dim, HarperParams::default())?);

    let hc = entropy_series(&chaotic, &psi, split, &cfg)?;
    let hr = entropy_series(&regular, &psi, split, &cfg)?;

    println!("{:>8} {:>10} {:>10}", "t", "s(H_c)", "s(H_r)");
    for k in (0..cfg.num_samples).step_by(64) {
        println!(
            "{:>8.2} {:>10.5} {:>10.5}",
            k as f64 * cfg.dt,
            hc.values()[k],
            hr.values()[k]
        );
    }
    println!(
        "steady mean: H_c {:.4}, H_r {:.4} (bound ln 8 = {:.4})",
        hc.steady_mean(),
        hr.steady_mean(),
        8f64.ln()
    );
    Ok(())
}
