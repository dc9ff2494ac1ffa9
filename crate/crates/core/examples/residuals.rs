//! How Gaussian are the eigenvector components? The residual parameter
//! shrinks as the band of Harper entries kept in H(f) narrows.
//!
//!     cargo run --release --example residuals

use qchaos::{build_harper, build_interpolated, eig_symmetric, residual_parameters, HarperParams, RngSeed};

fn main() -> qchaos::Result<()> {
    let dim = 256;
    let base = build_harper(dim, HarperParams::default())?;
    for f in [1.0, 0.9, 0.7, 0.4, 0.0] {
        let h = build_interpolated(&base, f, RngSeed(17))?;
        let report = residual_parameters(&eig_symmetric(&h)?, 32)?;
        let max = report.r_values.iter().cloned().fold(0.0, f64::max);
        println!("f = {f:.1}: mean r {:.3e}, max r {max:.3e}", report.mean());
    }
    Ok(())
}
