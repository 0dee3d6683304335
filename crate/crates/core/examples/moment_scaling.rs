//! Increment moments `E|Y(t+eps) - Y(t)|^eta` against their predicted power
//! law, at a reduced scale.
//!
//! `cargo run --release --example moment_scaling`

use multistable::engine::SeriesConfig;
use multistable::estimation::{estimate_increment_moments, fit_scaling, MonteCarlo};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let spec = ProcessSpec::levy(
        FuncSpec::parse("1.5+0.3*sin(2*pi*t)", domain)?,
        FuncSpec::constant(1.0, domain),
        domain,
        (1.2, 1.8),
    )?;
    let eps: Vec<f64> = (4..=10).map(|k| 0.5f64.powi(k)).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mc = MonteCarlo::new(1_000, SeriesConfig::with_terms(10_000), 7).with_workers(workers);
    let me = estimate_increment_moments(&spec, 0.3, 0.5, &eps, &mc)?;
    let fit = fit_scaling(&me)?;

    println!("{:>12} {:>14} {:>12} {:>14}", "eps", "estimate", "stderr", "theory");
    for p in &me.points {
        let theory = me.theory.map(|(s, c)| (c + s * p.eps.ln()).exp()).unwrap_or(f64::NAN);
        println!("{:>12.4e} {:>14.6e} {:>12.2e} {:>14.6e}", p.eps, p.estimate, p.stderr, theory);
    }
    println!(
        "slope {:.4} +- {:.4} (theory {:.4}), prefactor ratio {:.3}",
        fit.slope,
        fit.slope_se,
        fit.theory_slope.unwrap_or(f64::NAN),
        fit.prefactor_ratio().unwrap_or(f64::NAN)
    );
    Ok(())
}
