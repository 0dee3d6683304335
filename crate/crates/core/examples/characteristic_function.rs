//! Numerical characteristic function of a normalized Lévy increment next to
//! the empirical one, plus the constant-alpha closed form.
//!
//! `cargo run --release --example characteristic_function`

use multistable::engine::SeriesConfig;
use multistable::estimation::{ecf_compare, levy_increment_cf, MonteCarlo};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;
use multistable::quad::QuadratureConfig;
use multistable::special::sas_cf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = (0.0, 1.0);
    let one = FuncSpec::constant(1.0, domain);
    let varying = ProcessSpec::levy(FuncSpec::parse("1.5+0.3*sin(2*pi*t)", domain)?, one.clone(), domain, (1.2, 1.8))?;
    let constant = ProcessSpec::levy(FuncSpec::constant(1.5, domain), one, domain, (1.5, 1.5))?;
    let quad = QuadratureConfig::default();
    let (t, r) = (0.3, 2f64.powi(-6));

    println!("constant alpha 1.5: numeric vs closed form");
    for v in [0.5, 1.0, 2.0, 4.0] {
        let numeric = levy_increment_cf(&constant, t, r, v, &quad)?;
        println!("  v = {v}: {numeric:.12} vs {:.12}", sas_cf(1.5, 1.0, v));
    }

    let v: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
    let mc = MonteCarlo::new(2_000, SeriesConfig::with_terms(10_000), 11);
    let report = ecf_compare(&varying, t, r, &v, &mc, &quad)?;
    println!("varying alpha: empirical vs numeric CF ({} paths)", report.paths);
    for k in 0..v.len() {
        println!("  v = {:.1}: {:.4} vs {:.4}", v[k], report.empirical[k], report.reference[k]);
    }
    println!("sup gap {:.4}", report.sup_gap);
    Ok(())
}
