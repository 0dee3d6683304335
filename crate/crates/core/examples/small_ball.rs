//! Empirical small-ball probabilities of normalized increments and the
//! implied constant `K` in `P(|dY| < x r^h) <= K x`.
//!
//! `cargo run --release --example small_ball`

use multistable::engine::SeriesConfig;
use multistable::estimation::{small_ball_probe, MonteCarlo};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let spec = ProcessSpec::levy(
        FuncSpec::constant(1.5, domain),
        FuncSpec::constant(1.0, domain),
        domain,
        (1.5, 1.5),
    )?;
    let r: Vec<f64> = (4..=8).map(|k| 0.5f64.powi(k)).collect();
    let x = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 100.0];
    let mc = MonteCarlo::new(2_000, SeriesConfig::with_terms(10_000), 4);
    let rep = small_ball_probe(&spec, 0.3, &r, &x, &mc)?;
    for (r, k) in &rep.k_by_r {
        println!("r = {r:.5}: max P/x = {k:.4}");
    }
    println!("empirical K = {:.4}", rep.k);
    Ok(())
}
