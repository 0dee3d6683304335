//! Diagonal paths of a multistable Lévy motion and of an lmmm on a grid,
//! written as CSV to stdout.
//!
//! `cargo run --release --example sample_path > paths.csv`

use multistable::engine::{build_environment, DiagonalEvaluator, SeriesConfig};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let levy = ProcessSpec::levy(
        FuncSpec::parse("1.5+0.3*sin(2*pi*t)", domain)?,
        FuncSpec::constant(1.0, domain),
        domain,
        (1.2, 1.8),
    )?;
    let lmmm = ProcessSpec::lmmm(
        FuncSpec::parse("1.7+0.2*sin(2*pi*t)", domain)?,
        FuncSpec::parse("0.7+0.1*t", domain)?,
        FuncSpec::constant(1.0, domain),
        domain,
        (1.5, 1.9),
    )?;
    let grid: Vec<f64> = (0..=256).map(|k| k as f64 / 256.0).collect();
    let cfg = SeriesConfig::with_terms(20_000);
    let seed = 42;

    let mut columns = Vec::new();
    for spec in [&levy, &lmmm] {
        let env = build_environment(spec, &cfg, seed, 0)?;
        columns.push(DiagonalEvaluator::new(spec, &cfg, &grid)?.eval(&env)?);
    }
    println!("t,levy,lmmm");
    for (k, t) in grid.iter().enumerate() {
        println!("{t:.16e},{:.16e},{:.16e}", columns[0][k], columns[1][k]);
    }
    Ok(())
}
