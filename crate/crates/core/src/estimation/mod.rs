//! Monte Carlo estimators built on the series engine.
//!
//! Every estimator draws environment `p` for path `p`, evaluates paths in
//! parallel on a dedicated pool, and reduces per-path results sequentially
//! in path order, so reports are identical for any worker count.

pub mod cf;
pub mod holder;
pub mod ks;
pub mod moments;
pub mod probes;
pub mod small_ball;

pub use cf::{ecf_compare, ecf_compare_closed_form, empirical_increment_cf, levy_increment_cf, EcfReport};
pub use holder::{holder_of_signal, holder_pathwise, holder_target, HolderEstimate, HolderMethod, TargetKind};
pub use ks::{ks_two_sample, KsResult};
pub use moments::{
    estimate_increment_moments, fit_scaling, theoretical_scaling, MomentEstimate, MomentPoint, ScalingFit,
};
pub use probes::{condition_probe, Condition, ProbeValue};
pub use small_ball::{small_ball_probe, SmallBallReport};

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{EngineError, SeriesConfig};
use crate::kernels::KernelError;
use crate::quad::QuadError;
use crate::special::SpecialError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("non-positive moment estimate {estimate} at eps = {eps}")]
    NonPositive { eps: f64, estimate: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl EstimationError {
    /// Whether the failure comes from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            EstimationError::Quadrature(_) | EstimationError::NonPositive { .. } => true,
            EstimationError::Engine(EngineError::NonFinite { .. }) => true,
            EstimationError::Special(SpecialError::Quadrature(_)) => true,
            EstimationError::Kernel(KernelError::Quadrature(_)) => true,
            _ => false,
        }
    }
}

/// Sampling parameters shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub paths: usize,
    pub series: SeriesConfig,
    pub seed: u64,
    pub workers: usize,
}

impl MonteCarlo {
    pub fn new(paths: usize, series: SeriesConfig, seed: u64) -> Self {
        MonteCarlo {
            paths,
            series,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn check(&self, min_paths: usize) -> Result<(), EstimationError> {
        if self.paths < min_paths {
            return Err(EstimationError::Invalid(format!(
                "at least {min_paths} paths required, got {}",
                self.paths
            )));
        }
        if self.workers == 0 {
            return Err(EstimationError::Invalid("workers must be at least 1".into()));
        }
        self.series.validate()?;
        Ok(())
    }
}

/// `f(0), ..., f(n-1)` computed on `workers` threads, returned in index order.
pub fn par_map_indexed<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>, EstimationError>
where
    T: Send,
    F: Fn(usize) -> Result<T, EstimationError> + Sync + Send,
{
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EstimationError::Pool(e.to_string()))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Mean and standard error of the mean, summed in slice order.
pub(crate) fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Median of a non-empty slice.
pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Empirical quantile with linear interpolation between order statistics.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let a = par_map_indexed(1, 100, |i| Ok(i * i)).unwrap();
        let b = par_map_indexed(4, 100, |i| Ok(i * i)).unwrap();
        assert_eq!(a, b);
        assert_eq!(b[7], 49);
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[0.0, 1.0, 2.0], 0.25), 0.5);
    }
}
