//! Pointwise Hölder exponent by per-path log-log regression.

use rand::Rng;
use serde::Serialize;

use super::{median, par_map_indexed, quantile_sorted, EstimationError, MonteCarlo};
use crate::engine::{build_environment, DiagonalEvaluator};
use crate::kernels::{KernelError, ProcessKind, ProcessSpec};
use crate::rng::{mix, substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HolderMethod {
    Pathwise,
    Moment,
}

/// What the theory says about the exponent at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// The almost-sure exponent is known.
    Exact,
    /// Only `H_t <= h(t)` is known.
    UpperBound,
    /// No statement (rough `alpha >= 1`, or the boundary `1/alpha = beta`).
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub t: f64,
    pub estimate: f64,
    pub ci: (f64, f64),
    pub method: HolderMethod,
    /// Localisability exponent, an upper bound for the Hölder exponent.
    pub upper_bound: f64,
    pub target: Option<f64>,
    pub target_kind: TargetKind,
    pub note: String,
    /// Dropped (path, level) pairs with a zero increment.
    pub drop_count: usize,
    /// Paths left with fewer than two usable levels.
    pub dropped_paths: usize,
    pub paths: usize,
    pub slopes: Vec<f64>,
}

impl HolderEstimate {
    /// Theory column: the exact exponent, or the upper bound when that is all
    /// that is known.
    pub fn theory(&self) -> Option<f64> {
        match self.target_kind {
            TargetKind::Exact | TargetKind::UpperBound => self.target,
            TargetKind::None => None,
        }
    }
}

/// Theoretical exponent at `t` and its status.
///
/// Lévy motion: `1/alpha(t)` when `alpha(t) >= 1` and `alpha` is smooth;
/// `min(1/alpha, beta)` when `alpha(t) < 1` and `alpha` has Hölder exponent
/// `beta` at `t` (a constant `alpha` counts as `beta = inf`). Other kernels:
/// `H(t)` as an upper bound.
pub fn holder_target(spec: &ProcessSpec, t: f64) -> Result<(Option<f64>, TargetKind, String), KernelError> {
    let h = spec.localisability(t)?;
    if spec.kind() != ProcessKind::Levy {
        return Ok((Some(h), TargetKind::UpperBound, "upper bound H(t)".into()));
    }
    let alpha = spec.alpha_at(t)?;
    let beta = spec.alpha_holder;
    if alpha >= 1.0 {
        return Ok(match beta {
            None => (Some(h), TargetKind::Exact, "1/alpha(t), smooth alpha".into()),
            Some(_) => (
                None,
                TargetKind::None,
                "no theoretical target: rough alpha with alpha(t) >= 1".into(),
            ),
        });
    }
    Ok(match beta {
        Some(b) if b == h => (None, TargetKind::None, "boundary case 1/alpha(t) = beta".into()),
        Some(b) => (Some(h.min(b)), TargetKind::Exact, format!("min(1/alpha(t), beta = {b})")),
        None if spec.alpha.is_constant() => (Some(h), TargetKind::Exact, "1/alpha, constant alpha".into()),
        None => (
            None,
            TargetKind::None,
            "no theoretical target: declare the Hölder exponent of alpha".into(),
        ),
    })
}

fn check_levels(r_levels: &[f64]) -> Result<(), EstimationError> {
    if r_levels.len() < 2 {
        return Err(EstimationError::Invalid("at least two r levels required".into()));
    }
    if r_levels.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(EstimationError::Invalid("r levels must be positive".into()));
    }
    if r_levels.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(EstimationError::Invalid("r levels must be strictly decreasing".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln|inc_k|` on `ln r_k` over the non-zero
/// increments, with the number of dropped levels.
fn path_slope(r_levels: &[f64], increments: &[f64]) -> (Option<f64>, usize) {
    let mut x = Vec::with_capacity(r_levels.len());
    let mut y = Vec::with_capacity(r_levels.len());
    for (&r, &d) in r_levels.iter().zip(increments) {
        if d != 0.0 {
            x.push(r.ln());
            y.push(d.abs().ln());
        }
    }
    let dropped = r_levels.len() - x.len();
    if x.len() < 2 {
        return (None, dropped);
    }
    let n = x.len() as f64;
    let xbar = x.iter().sum::<f64>() / n;
    let ybar = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    (Some(sxy / sxx), dropped)
}

/// Slope of `ln|g(t + r) - g(t)|` against `ln r` for a deterministic signal.
pub fn holder_of_signal<G: Fn(f64) -> f64>(g: G, t: f64, r_levels: &[f64]) -> Result<f64, EstimationError> {
    check_levels(r_levels)?;
    let g0 = g(t);
    let inc: Vec<f64> = r_levels.iter().map(|&r| g(t + r) - g0).collect();
    path_slope(r_levels, &inc)
        .0
        .ok_or_else(|| EstimationError::Invalid("signal is flat at every level".into()))
}

const BOOTSTRAP_SALT: u64 = 0xb0_07_57_a9;

/// Median over paths of the per-path regression slope, with a percentile
/// bootstrap interval for the median at level `confidence`.
pub fn holder_pathwise(
    spec: &ProcessSpec,
    t: f64,
    r_levels: &[f64],
    mc: &MonteCarlo,
    bootstrap: usize,
    confidence: f64,
) -> Result<HolderEstimate, EstimationError> {
    mc.check(1)?;
    check_levels(r_levels)?;
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(EstimationError::Invalid(format!("confidence {confidence} outside (0, 1)")));
    }
    let mut grid: Vec<f64> = std::iter::once(t).chain(r_levels.iter().map(|r| t + r)).collect();
    grid.sort_by(f64::total_cmp);
    let evaluator = DiagonalEvaluator::new(spec, &mc.series, &grid)?;
    let base = grid.iter().position(|&g| g == t).unwrap();
    let columns: Vec<usize> = r_levels
        .iter()
        .map(|r| grid.iter().position(|&g| g == t + r).unwrap())
        .collect();

    let per_path = par_map_indexed(mc.workers, mc.paths, |p| {
        let env = build_environment(spec, &mc.series, mc.seed, p as u64)?;
        let y = evaluator.eval(&env)?;
        let inc: Vec<f64> = columns.iter().map(|&k| y[k] - y[base]).collect();
        Ok(path_slope(r_levels, &inc))
    })?;

    let mut slopes = Vec::with_capacity(mc.paths);
    let mut drop_count = 0;
    let mut dropped_paths = 0;
    for (slope, dropped) in per_path {
        drop_count += dropped;
        match slope {
            Some(s) => slopes.push(s),
            None => dropped_paths += 1,
        }
    }
    if slopes.is_empty() {
        return Err(EstimationError::Invalid("every path had fewer than two non-zero increments".into()));
    }
    let estimate = median(&slopes);

    let mut rng = substream(mix(mc.seed, BOOTSTRAP_SALT), 0, Stream::Auxiliary);
    let mut medians = Vec::with_capacity(bootstrap);
    let mut resample = vec![0.0; slopes.len()];
    for _ in 0..bootstrap {
        for slot in resample.iter_mut() {
            *slot = slopes[rng.random_range(0..slopes.len())];
        }
        medians.push(median(&resample));
    }
    medians.sort_by(f64::total_cmp);
    let ci = if medians.is_empty() {
        (estimate, estimate)
    } else {
        let tail = 0.5 * (1.0 - confidence);
        (quantile_sorted(&medians, tail), quantile_sorted(&medians, 1.0 - tail))
    };

    let (target, target_kind, note) = holder_target(spec, t)?;
    Ok(HolderEstimate {
        t,
        estimate,
        ci,
        method: HolderMethod::Pathwise,
        upper_bound: spec.localisability(t)?,
        target,
        target_kind,
        note,
        drop_count,
        dropped_paths,
        paths: mc.paths,
        slopes,
    })
}

/// `r_0 2^{-k}` for `k = 0..count`.
pub fn dyadic_levels(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| r0 * 0.5f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SeriesConfig;
    use crate::expr::FuncSpec;

    fn unit() -> (f64, f64) {
        (0.0, 1.0)
    }

    #[test]
    fn injected_power_signal() {
        let u = 0.5;
        let levels = dyadic_levels(2f64.powi(-3), 8);
        let est = holder_of_signal(|s: f64| (s - u).abs().powf(0.7), u, &levels).unwrap();
        assert!((est - 0.7).abs() < 1e-6, "{est}");
    }

    #[test]
    fn level_validation() {
        assert!(holder_of_signal(|s| s, 0.5, &[0.1]).is_err());
        assert!(holder_of_signal(|s| s, 0.5, &[0.1, 0.2]).is_err());
        assert!(holder_of_signal(|_| 1.0, 0.5, &[0.2, 0.1]).is_err());
    }

    #[test]
    fn zero_increments_are_dropped() {
        let (slope, dropped) = path_slope(&[0.5, 0.25, 0.125], &[1.0, 0.0, 0.25]);
        assert_eq!(dropped, 1);
        assert!((slope.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn targets_by_regime() {
        let one = FuncSpec::constant(1.0, unit());
        let smooth = FuncSpec::parse("1.5+0.1*sin(2*pi*t)", unit()).unwrap();
        let spec = ProcessSpec::levy(smooth, one.clone(), unit(), (1.3, 1.7)).unwrap();
        let (target, kind, _) = holder_target(&spec, 0.5).unwrap();
        assert_eq!(kind, TargetKind::Exact);
        assert!((target.unwrap() - 1.0 / 1.5).abs() < 1e-12);

        let rough = FuncSpec::parse("0.8+0.1*abs(t-0.5)^0.5", unit()).unwrap();
        let spec = ProcessSpec::levy(rough.clone(), one.clone(), unit(), (0.75, 0.9))
            .unwrap()
            .with_alpha_holder(0.5);
        let (target, kind, _) = holder_target(&spec, 0.5).unwrap();
        assert_eq!(kind, TargetKind::Exact);
        assert_eq!(target, Some(0.5));

        let spec = ProcessSpec::levy(
            FuncSpec::parse("1.5+0.1*abs(t-0.5)^0.5", unit()).unwrap(),
            one.clone(),
            unit(),
            (1.4, 1.7),
        )
        .unwrap()
        .with_alpha_holder(0.5);
        assert_eq!(holder_target(&spec, 0.5).unwrap().1, TargetKind::None);

        let lmmm = ProcessSpec::lmmm(
            FuncSpec::constant(1.7, unit()),
            FuncSpec::parse("0.7+0.1*t", unit()).unwrap(),
            one,
            unit(),
            (1.7, 1.7),
        )
        .unwrap();
        let (target, kind, _) = holder_target(&lmmm, 0.5).unwrap();
        assert_eq!(kind, TargetKind::UpperBound);
        assert!((target.unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pathwise_estimate_is_reproducible() {
        let spec = ProcessSpec::levy(
            FuncSpec::constant(1.5, unit()),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (1.5, 1.5),
        )
        .unwrap();
        let levels = dyadic_levels(0.125, 5);
        let mc = MonteCarlo::new(20, SeriesConfig::with_terms(2_000), 3);
        let a = holder_pathwise(&spec, 0.5, &levels, &mc, 200, 0.95).unwrap();
        let b = holder_pathwise(&spec, 0.5, &levels, &mc.with_workers(3), 200, 0.95).unwrap();
        assert_eq!(a, b);
        assert!(a.ci.0 <= a.estimate && a.estimate <= a.ci.1);
        assert!(a.estimate > 0.0 && a.estimate <= 1.5);
    }
}
