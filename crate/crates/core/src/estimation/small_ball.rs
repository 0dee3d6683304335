//! Empirical small-ball probabilities `P(|Y(t+r) - Y(t)| < x r^{h(t)})`.

use serde::Serialize;

use super::{par_map_indexed, EstimationError, MonteCarlo};
use crate::engine::{build_environment, DiagonalEvaluator};
use crate::kernels::ProcessSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBallReport {
    pub t: f64,
    /// `(r, x, probability)`.
    pub rows: Vec<(f64, f64, f64)>,
    /// For each `r`, the largest `probability / x` over the positive `x`.
    pub k_by_r: Vec<(f64, f64)>,
    /// Largest `probability / x` over all rows: the empirical constant `K`.
    pub k: f64,
    pub paths: usize,
}

/// One environment per path; every `r` uses the same paths.
pub fn small_ball_probe(
    spec: &ProcessSpec,
    t: f64,
    r_list: &[f64],
    x_list: &[f64],
    mc: &MonteCarlo,
) -> Result<SmallBallReport, EstimationError> {
    mc.check(1)?;
    if r_list.is_empty() || r_list.iter().any(|r| !(*r > 0.0)) {
        return Err(EstimationError::Invalid("r list must be non-empty and positive".into()));
    }
    if x_list.iter().any(|x| !(*x >= 0.0)) {
        return Err(EstimationError::Invalid("x list must be non-negative".into()));
    }
    let mut grid: Vec<f64> = std::iter::once(t).chain(r_list.iter().map(|r| t + r)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let evaluator = DiagonalEvaluator::new(spec, &mc.series, &grid)?;
    let base = grid.iter().position(|&g| g == t).unwrap();
    let columns: Vec<usize> = r_list
        .iter()
        .map(|r| grid.iter().position(|&g| g == t + r).unwrap())
        .collect();
    let h = spec.localisability(t)?;

    let per_path = par_map_indexed(mc.workers, mc.paths, |p| {
        let env = build_environment(spec, &mc.series, mc.seed, p as u64)?;
        let y = evaluator.eval(&env)?;
        Ok(columns.iter().map(|&k| (y[k] - y[base]).abs()).collect::<Vec<f64>>())
    })?;

    let mut rows = Vec::new();
    let mut k_by_r = Vec::new();
    let mut k_all = 0.0f64;
    for (c, &r) in r_list.iter().enumerate() {
        let scale = r.powf(h);
        let mut k_r = 0.0f64;
        for &x in x_list {
            let hits = per_path.iter().filter(|row| row[c] < x * scale).count();
            let prob = hits as f64 / mc.paths as f64;
            rows.push((r, x, prob));
            if x > 0.0 {
                k_r = k_r.max(prob / x);
            }
        }
        k_by_r.push((r, k_r));
        k_all = k_all.max(k_r);
    }
    Ok(SmallBallReport {
        t,
        rows,
        k_by_r,
        k: k_all,
        paths: mc.paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SeriesConfig;
    use crate::expr::FuncSpec;

    #[test]
    fn limits_and_stability_across_scales() {
        let spec = ProcessSpec::levy(
            FuncSpec::constant(1.5, (0.0, 1.0)),
            FuncSpec::constant(1.0, (0.0, 1.0)),
            (0.0, 1.0),
            (1.5, 1.5),
        )
        .unwrap();
        let rs: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
        let xs = [0.0, 0.05, 0.1, 0.2, 1e9];
        let mc = MonteCarlo::new(4_000, SeriesConfig::with_terms(5_000), 2);
        let report = small_ball_probe(&spec, 0.5, &rs, &xs, &mc).unwrap();
        for &(_, x, p) in &report.rows {
            if x == 0.0 {
                assert_eq!(p, 0.0);
            }
            if x == 1e9 {
                assert_eq!(p, 1.0);
            }
        }
        let ks: Vec<f64> = report.k_by_r.iter().map(|k| k.1).collect();
        let (lo, hi) = ks.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &k| (lo.min(k), hi.max(k)));
        assert!(lo > 0.0 && hi / lo < 2.0, "{ks:?}");
    }
}
