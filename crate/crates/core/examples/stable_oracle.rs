//! The series at a constant index against Chambers-Mallows-Stuck draws, by a
//! two-sample Kolmogorov-Smirnov test.
//!
//! `cargo run --release --example stable_oracle`

use multistable::engine::{build_environment, DiagonalEvaluator, SeriesConfig};
use multistable::estimation::{ks_two_sample, par_map_indexed};
use multistable::expr::FuncSpec;
use multistable::kernels::ProcessSpec;
use multistable::rng::{substream, Stream};
use multistable::special::cms_sample;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 5_000;
    let cfg = SeriesConfig::with_terms(5_000);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    for alpha in [0.8, 1.2, 1.5, 1.8] {
        let domain = (0.0, 1.0);
        let spec = ProcessSpec::levy(
            FuncSpec::constant(alpha, domain),
            FuncSpec::constant(1.0, domain),
            domain,
            (alpha, alpha),
        )?;
        let evaluator = DiagonalEvaluator::new(&spec, &cfg, &[1.0])?;
        let series = par_map_indexed(workers, n, |p| {
            let env = build_environment(&spec, &cfg, 1, p as u64)?;
            Ok(evaluator.eval(&env)?[0])
        })?;
        let mut rng = substream(2, 0, Stream::Auxiliary);
        let direct: Vec<f64> = (0..n).map(|_| cms_sample(alpha, 1.0, &mut rng)).collect();
        let ks = ks_two_sample(&series, &direct)?;
        println!(
            "alpha {alpha}: D = {:.4}, 5% critical {:.4}, 1% critical {:.4}",
            ks.statistic, ks.critical_05, ks.critical_01
        );
    }
    Ok(())
}
