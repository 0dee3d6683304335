//! Pathwise Hölder exponents at `t = 0.5` for three processes, with the
//! theoretical target where one exists.
//!
//! `cargo run --release --example holder_exponent`

use multistable::engine::SeriesConfig;
use multistable::estimation::holder::dyadic_levels;
use multistable::estimation::{holder_pathwise, MonteCarlo};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let one = FuncSpec::constant(1.0, domain);
    let smooth = ProcessSpec::levy(FuncSpec::parse("1.5+0.3*sin(2*pi*t)", domain)?, one.clone(), domain, (1.2, 1.8))?;
    let rough = ProcessSpec::levy(FuncSpec::parse("0.8+0.1*abs(t-0.5)^0.5", domain)?, one.clone(), domain, (0.8, 0.9))?
        .with_alpha_holder(0.5);
    let lmmm = ProcessSpec::lmmm(
        FuncSpec::parse("1.7+0.2*sin(2*pi*t)", domain)?,
        FuncSpec::parse("0.7+0.1*t", domain)?,
        one,
        domain,
        (1.5, 1.9),
    )?;
    let mc = MonteCarlo::new(100, SeriesConfig::with_terms(20_000), 3);
    for (name, spec, levels) in [
        ("smooth alpha >= 1", &smooth, dyadic_levels(0.25, 11)),
        ("rough alpha < 1", &rough, dyadic_levels(2f64.powi(-10), 9)),
        ("lmmm", &lmmm, dyadic_levels(0.25, 11)),
    ] {
        let h = holder_pathwise(spec, 0.5, &levels, &mc, 1_000, 0.95)?;
        println!(
            "{name:<18} estimate {:.4}  95% CI [{:.4}, {:.4}]  target {}  ({}; {} zero increments dropped)",
            h.estimate,
            h.ci.0,
            h.ci.1,
            h.theory().map_or("none".into(), |v| format!("{v:.4}")),
            h.note,
            h.drop_count
        );
    }
    Ok(())
}
