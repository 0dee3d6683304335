//! Kernel regularity conditions evaluated along shrinking `r`: exact for the
//! Lévy kernel, by quadrature for lmmm.
//!
//! `cargo run --release --example condition_probes`

use multistable::estimation::{condition_probe, Condition};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;
use multistable::quad::QuadratureConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let one = FuncSpec::constant(1.0, domain);
    let levy = ProcessSpec::levy(FuncSpec::parse("1.5+0.3*sin(2*pi*t)", domain)?, one.clone(), domain, (1.2, 1.8))?;
    let lmmm = ProcessSpec::lmmm(
        FuncSpec::parse("1.7+0.2*sin(2*pi*t)", domain)?,
        FuncSpec::parse("0.7+0.1*t", domain)?,
        one,
        domain,
        (1.5, 1.9),
    )?;
    let quad = QuadratureConfig::default();
    let r: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(2 * k)).collect();
    for (name, spec) in [("levy", &levy), ("lmmm", &lmmm)] {
        println!("{name}, t = 0.3");
        for cond in Condition::ALL {
            let values = condition_probe(spec, cond, 0.3, &r, &quad)?;
            let shown: Vec<String> = values.iter().map(|p| format!("{:.6}", p.value)).collect();
            println!("  {cond:>4}: {}", shown.join(" "));
        }
    }
    Ok(())
}
