//! Closed-form stable constants next to their quadrature references.
//!
//! `cargo run --example stable_constants`

use multistable::quad::QuadratureConfig;
use multistable::special::{c_alpha, c_alpha_quadrature, sas_abs_moment, sin2_integral, sin2_integral_with};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadratureConfig::default();
    println!("{:>6} {:>22} {:>10} {:>22}", "alpha", "C_alpha", "|gap|", "E|S|^(alpha/2)");
    for alpha in [0.3, 0.8, 1.0, 1.2, 1.5, 1.8, 1.95] {
        let closed = c_alpha(alpha)?;
        let reference = c_alpha_quadrature(alpha, &quad)?;
        let moment = sas_abs_moment(alpha, 1.0, 0.5 * alpha)?;
        println!(
            "{alpha:>6} {closed:>22.16} {:>10.2e} {moment:>22.16}",
            (closed - reference).abs()
        );
    }
    println!("int u^-2 sin^2 u du = {:.16} (pi/2 = {:.16})", sin2_integral(1.0)?, std::f64::consts::FRAC_PI_2);
    println!("quadrature path: {:.16}", sin2_integral_with(1.0, &quad)?);
    Ok(())
}
