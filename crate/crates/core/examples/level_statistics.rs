//! Nearest-neighbour spacings compared with the Wigner surmise and the
//! Poisson law.
//!
//!     cargo run --release --example level_statistics

use qchaos::{
    build_harper, build_random_symmetric, eig_symmetric, ks_distance, level_spacings, poisson_density, wigner_surmise,
    HarperParams, RngSeed, SpacingReference, SpacingSample,
};

fn main() -> qchaos::Result<()> {
    let dim = 256;
    let mut pooled = Vec::new();
    for seed in 0..20 {
        pooled.extend_from_slice(
            level_spacings(&eig_symmetric(&build_random_symmetric(dim, RngSeed(seed))?)?)?.spacings(),
        );
    }
    let hc = SpacingSample::from_spacings(pooled)?;
    let hr = level_spacings(&eig_symmetric(&build_harper(dim, HarperParams::default())?)?)?;

    for (name, s) in [("H_c", &hc), ("H_r", &hr)] {
        println!(
            "{name}: {} spacings, KS Wigner {:.4}, KS Poisson {:.4}",
            s.len(),
            ks_distance(s, SpacingReference::Wigner)?,
            ks_distance(s, SpacingReference::Poisson)?
        );
    }

    println!("\n{:>6} {:>8} {:>8} {:>8}", "s", "H_c", "Wigner", "Poisson");
    for (s, density) in hc.histogram(16, 4.0) {
        println!(
            "{s:>6.2} {density:>8.4} {:>8.4} {:>8.4}",
            wigner_surmise(s)?,
            poisson_density(s)?
        );
    }
    Ok(())
}
