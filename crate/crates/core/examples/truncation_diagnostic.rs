//! How far a path moves when the series length doubles, against the
//! a-priori remainder proxy, with and without the Gaussian remainder.
//!
//! `cargo run --release --example truncation_diagnostic`

use multistable::engine::{truncation_diagnostic, SeriesConfig};
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
    let grid: Vec<f64> = (1..=16).map(|k| k as f64 / 16.0).collect();
    for n in [1_000, 5_000, 20_000] {
        for (label, cfg) in [("gaussian", SeriesConfig::with_terms(n)), ("truncate", SeriesConfig::truncated(n))] {
            let rep = truncation_diagnostic(&spec, &grid, &cfg, 5, 20)?;
            println!(
                "N = {n:>6} {label:<9} max |Y_2N - Y_N| = {:.3e}   proxy = {:.3e}",
                rep.max_discrepancy, rep.proxy
            );
        }
    }
    Ok(())
}
