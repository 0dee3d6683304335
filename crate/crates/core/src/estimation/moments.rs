//! Incremental moments `E|Y(t+eps) - Y(t)|^eta` and their power-law fits.

use serde::Serialize;

use super::{mean_and_stderr, par_map_indexed, EstimationError, MonteCarlo};
use crate::engine::{build_environment, DiagonalEvaluator};
use crate::kernels::{sigma_lmmm, Kernel, ProcessKind, ProcessSpec};
use crate::special::sas_abs_moment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPoint {
    pub eps: f64,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub t: f64,
    pub eta: f64,
    pub points: Vec<MomentPoint>,
    pub paths: usize,
    pub n_terms: usize,
    pub seed: u64,
    /// `(slope, intercept)` of the asymptotic law, when known for the process.
    pub theory: Option<(f64, f64)>,
}

/// `E|Y(t+eps) - Y(t)|^eta` for every `eps`, one environment per path.
///
/// Each path evaluates `Y` at `t` and at every `t + eps` from the same
/// environment; paths are independent, so each column is an i.i.d. sample.
pub fn estimate_increment_moments(
    spec: &ProcessSpec,
    t: f64,
    eta: f64,
    eps_list: &[f64],
    mc: &MonteCarlo,
) -> Result<MomentEstimate, EstimationError> {
    mc.check(2)?;
    if !(eta > 0.0 && eta < spec.stability.0) {
        return Err(EstimationError::Invalid(format!(
            "moment order {eta} must lie in (0, {}) for the moment to exist",
            spec.stability.0
        )));
    }
    if eps_list.is_empty() {
        return Err(EstimationError::Invalid("eps list is empty".into()));
    }
    if let Some(&bad) = eps_list.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(EstimationError::Invalid(format!("eps = {bad} must be finite and non-negative")));
    }

    let mut grid: Vec<f64> = std::iter::once(t)
        .chain(eps_list.iter().filter(|&&e| e > 0.0).map(|e| t + e))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let column: Vec<Option<usize>> = eps_list
        .iter()
        .map(|&e| (e > 0.0).then(|| grid.iter().position(|&g| g == t + e).unwrap()))
        .collect();
    let base = grid.iter().position(|&g| g == t).unwrap();
    let evaluator = DiagonalEvaluator::new(spec, &mc.series, &grid)?;

    let per_path = par_map_indexed(mc.workers, mc.paths, |p| {
        let env = build_environment(spec, &mc.series, mc.seed, p as u64)?;
        let y = evaluator.eval(&env)?;
        Ok(column
            .iter()
            .map(|c| c.map_or(0.0, |k| (y[k] - y[base]).abs().powf(eta)))
            .collect::<Vec<f64>>())
    })?;

    let mut points = Vec::with_capacity(eps_list.len());
    let mut samples = vec![0.0; mc.paths];
    for (k, &eps) in eps_list.iter().enumerate() {
        for (p, row) in per_path.iter().enumerate() {
            samples[p] = row[k];
        }
        let (estimate, stderr) = if column[k].is_some() {
            mean_and_stderr(&samples)
        } else {
            (0.0, 0.0)
        };
        points.push(MomentPoint { eps, estimate, stderr });
    }

    Ok(MomentEstimate {
        t,
        eta,
        points,
        paths: mc.paths,
        n_terms: mc.series.n_terms,
        seed: mc.seed,
        theory: theoretical_scaling(spec, t, eta).ok(),
    })
}

/// `(eta h(t), log K)` with `E|Y(t+eps) - Y(t)|^eta ~ K eps^{eta h(t)}`.
///
/// `K = |b(t) sigma(t)|^eta E|S|^eta` for a unit-scale symmetric stable `S`
/// of index `alpha(t)`. `sigma = 1` for Lévy motion; for lmmm it is the scale
/// of the tangent well-balanced lfsm.
pub fn theoretical_scaling(spec: &ProcessSpec, t: f64, eta: f64) -> Result<(f64, f64), EstimationError> {
    let alpha = spec.alpha_at(t)?;
    let b = spec.b.eval(t).map_err(crate::kernels::KernelError::from)?.abs();
    let (h, sigma) = match (&spec.kernel, spec.kind()) {
        (_, ProcessKind::Levy) => (1.0 / alpha, 1.0),
        (Kernel::Lmmm { hurst, .. }, _) => {
            let h = hurst.eval(t).map_err(crate::kernels::KernelError::from)?;
            (h, sigma_lmmm(alpha, h)?)
        }
        (Kernel::Lfsm { hurst, b_plus, b_minus, .. }, _) if b_plus == b_minus => {
            (*hurst, b_plus.abs() * sigma_lmmm(alpha, *hurst)?)
        }
        _ => {
            return Err(EstimationError::Invalid(
                "no moment asymptotics for an unbalanced lfsm kernel".into(),
            ))
        }
    };
    let moment = sas_abs_moment(alpha, b * sigma, eta)?;
    Ok((eta * h, moment.ln()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub intercept_se: f64,
    /// Weighted residuals `(y - fit) / se_y`, or plain residuals when unweighted.
    pub residuals: Vec<f64>,
    pub chi2: f64,
    pub weighted: bool,
    pub theory_slope: Option<f64>,
    pub theory_intercept: Option<f64>,
}

impl ScalingFit {
    /// `exp(intercept - theory_intercept)`.
    pub fn prefactor_ratio(&self) -> Option<f64> {
        self.theory_intercept.map(|c| (self.intercept - c).exp())
    }
}

/// Weighted least squares of `ln m(eps)` on `ln eps`, with weights
/// `(m / se)^2` from the delta method. Falls back to ordinary least squares
/// when some standard error is zero.
pub fn fit_scaling(me: &MomentEstimate) -> Result<ScalingFit, EstimationError> {
    if me.points.len() < 3 {
        return Err(EstimationError::Invalid(format!(
            "at least 3 eps levels required, got {}",
            me.points.len()
        )));
    }
    for p in &me.points {
        if !(p.estimate > 0.0) || !(p.eps > 0.0) {
            return Err(EstimationError::NonPositive {
                eps: p.eps,
                estimate: p.estimate,
            });
        }
    }
    let x: Vec<f64> = me.points.iter().map(|p| p.eps.ln()).collect();
    let y: Vec<f64> = me.points.iter().map(|p| p.estimate.ln()).collect();
    let weighted = me.points.iter().all(|p| p.stderr > 0.0 && p.stderr.is_finite());
    let w: Vec<f64> = if weighted {
        me.points.iter().map(|p| (p.estimate / p.stderr).powi(2)).collect()
    } else {
        vec![1.0; x.len()]
    };

    let sw: f64 = w.iter().sum();
    let xbar = w.iter().zip(&x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = w.iter().zip(&y).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(&x).map(|(w, x)| w * (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = w.iter().zip(x.iter().zip(&y)).map(|(w, (x, y))| w * (x - xbar) * (y - ybar)).sum();
    if !(sxx > 0.0) {
        return Err(EstimationError::Invalid("eps levels must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let raw: Vec<f64> = x.iter().zip(&y).map(|(x, y)| y - (intercept + slope * x)).collect();
    let residuals: Vec<f64> = raw.iter().zip(&w).map(|(r, w)| r * w.sqrt()).collect();
    let chi2: f64 = residuals.iter().map(|r| r * r).sum();
    // inverse-variance weights give the variances directly; otherwise scale by
    // the residual variance
    let scale = if weighted {
        1.0
    } else {
        chi2 / (x.len() as f64 - 2.0)
    };
    let slope_se = (scale / sxx).sqrt();
    let intercept_se = (scale * (1.0 / sw + xbar * xbar / sxx)).sqrt();
    Ok(ScalingFit {
        slope,
        slope_se,
        intercept,
        intercept_se,
        residuals,
        chi2,
        weighted,
        theory_slope: me.theory.map(|t| t.0),
        theory_intercept: me.theory.map(|t| t.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SeriesConfig;
    use crate::expr::FuncSpec;

    fn unit() -> (f64, f64) {
        (0.0, 1.0)
    }

    fn levy(alpha: f64) -> ProcessSpec {
        ProcessSpec::levy(
            FuncSpec::constant(alpha, unit()),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (alpha, alpha),
        )
        .unwrap()
    }

    fn synthetic(c: f64, s: f64, se: f64) -> MomentEstimate {
        MomentEstimate {
            t: 0.5,
            eta: 0.5,
            points: (4..=10)
                .map(|k| {
                    let eps = 2f64.powi(-k);
                    MomentPoint {
                        eps,
                        estimate: c * eps.powf(s),
                        stderr: se,
                    }
                })
                .collect(),
            paths: 1,
            n_terms: 1,
            seed: 0,
            theory: None,
        }
    }

    #[test]
    fn exact_power_law_recovered() {
        let fit = fit_scaling(&synthetic(1.7, 0.37, 0.0)).unwrap();
        assert!(!fit.weighted);
        assert!((fit.slope - 0.37).abs() < 1e-12);
        assert!((fit.intercept - 1.7f64.ln()).abs() < 1e-12);
        let fit = fit_scaling(&synthetic(1.7, 0.37, 0.01)).unwrap();
        assert!(fit.weighted);
        assert!((fit.slope - 0.37).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let fit = fit_scaling(&synthetic(2.0, 0.0, 0.0)).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let mut me = synthetic(1.0, 0.5, 0.0);
        me.points.truncate(2);
        assert!(fit_scaling(&me).is_err());
        let mut me = synthetic(1.0, 0.5, 0.0);
        me.points[3].estimate = 0.0;
        assert!(matches!(fit_scaling(&me), Err(EstimationError::NonPositive { .. })));
    }

    #[test]
    fn theory_values() {
        let (slope, _) = theoretical_scaling(&levy(1.5), 0.5, 0.5).unwrap();
        assert!((slope - 1.0 / 3.0).abs() < 1e-15);
        let (_, intercept) = theoretical_scaling(&levy(1.0), 0.5, 0.5).unwrap();
        assert!((intercept - 2f64.sqrt().ln()).abs() < 1e-12);
        let lmmm = ProcessSpec::lmmm(
            FuncSpec::constant(1.7, unit()),
            FuncSpec::constant(0.7, unit()),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (1.7, 1.7),
        )
        .unwrap();
        let (slope, intercept) = theoretical_scaling(&lmmm, 0.5, 0.5).unwrap();
        assert!((slope - 0.35).abs() < 1e-15);
        let sigma = sigma_lmmm(1.7, 0.7).unwrap();
        let expected = sas_abs_moment(1.7, 1.0, 0.5).unwrap().ln() + 0.5 * sigma.ln();
        assert!((intercept - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_eps_gives_zero() {
        let mc = MonteCarlo::new(50, SeriesConfig::with_terms(500), 1);
        let me = estimate_increment_moments(&levy(1.5), 0.5, 0.5, &[0.0, 0.125], &mc).unwrap();
        assert_eq!(me.points[0].estimate, 0.0);
        assert!(me.points[1].estimate > 0.0);
    }

    #[test]
    fn moment_order_checked() {
        let mc = MonteCarlo::new(10, SeriesConfig::with_terms(100), 1);
        assert!(estimate_increment_moments(&levy(1.5), 0.5, 1.5, &[0.1], &mc).is_err());
        assert!(estimate_increment_moments(&levy(1.5), 0.5, 0.5, &[], &mc).is_err());
    }

    #[test]
    fn constant_alpha_moment_matches_stable_law() {
        // increments of constant-alpha Lévy motion are SaS with scale eps^{1/alpha}
        let eps = 2f64.powi(-6);
        let mc = MonteCarlo::new(10_000, SeriesConfig::with_terms(5_000), 11);
        let me = estimate_increment_moments(&levy(1.5), 0.5, 0.5, &[eps], &mc).unwrap();
        let exact = sas_abs_moment(1.5, eps.powf(1.0 / 1.5), 0.5).unwrap();
        let p = me.points[0];
        assert!((p.estimate - exact).abs() < 3.0 * p.stderr, "{p:?} vs {exact}");
    }

    #[test]
    fn stderr_follows_root_n() {
        let eps = [2f64.powi(-5)];
        let small = MonteCarlo::new(4_000, SeriesConfig::with_terms(2_000), 5);
        let large = MonteCarlo {
            paths: 16_000,
            ..small
        };
        let a = estimate_increment_moments(&levy(1.5), 0.5, 0.5, &eps, &small).unwrap();
        let b = estimate_increment_moments(&levy(1.5), 0.5, 0.5, &eps, &large).unwrap();
        let ratio = a.points[0].stderr / b.points[0].stderr;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }
}
