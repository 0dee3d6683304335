//! Characteristic function of normalized Lévy increments.
//!
//! For the Lévy kernel the increment `D = (Y(t+r) - Y(t)) / r^{1/alpha(t)}`
//! is an integral against one Poisson random measure, so
//!
//! ```text
//! E exp(i v D) = exp(-2 int_E int_0^inf sin^2(v g(x, y) / 2) dy m(dx))
//! ```
//!
//! where `g(x, y)` is the contribution of a point at `x` with arrival value
//! `y`. Points in `(t, t+r]` only carry the `alpha(t+r)` term and give a
//! closed form; points in `[0, t]` carry the difference of both terms, which
//! leaves one oscillatory integral.

use serde::Serialize;

use super::{par_map_indexed, EstimationError, MonteCarlo};
use crate::engine::{build_environment, DiagonalEvaluator};
use crate::kernels::{KernelError, ProcessKind, ProcessSpec};
use crate::quad::{gk15, tanh_sinh, QuadratureConfig};
use crate::special::{c_alpha, sas_cf, sin2_integral_with};

fn check_levy(spec: &ProcessSpec, t: f64, r: f64) -> Result<(), EstimationError> {
    if spec.kind() != ProcessKind::Levy {
        return Err(EstimationError::Invalid("characteristic function requires the Lévy kernel".into()));
    }
    if !(r > 0.0 && t > 0.0 && t + r < 1.0) {
        return Err(EstimationError::Invalid(format!(
            "need 0 < t < t + r < 1, got t = {t}, r = {r}"
        )));
    }
    Ok(())
}

/// The integration runs at least to `Z_MIN` in the scaled variable and on
/// until the phase turns fast enough for `sin^2` to average to 1/2 over the
/// remainder, or until `Z_CAP`, past which the remainder is below 1e-19.
const Z_MIN: f64 = 1e4;
const Z_CAP: f64 = 1e12;
const FAST_PHASE: f64 = 100.0;

/// `alpha int_0^inf s^{-alpha-1} sin^2(a s^rho - b s) ds`.
fn difference_integral(alpha: f64, rho: f64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64, EstimationError> {
    let k = a.abs().max(b.abs());
    if k == 0.0 {
        return Ok(0.0);
    }
    // s = z / k brings both coefficients to order one
    let a = a * k.powf(-rho);
    let b = b / k;
    let phase = |z: f64| a * z.powf(rho) - b * z;
    let integrand = |z: f64| z.powf(-alpha - 1.0) * phase(z).sin().powi(2);

    let head = tanh_sinh(|z, _, _| integrand(z), 0.0, 1.0, cfg)?;
    // panels in w = ln z, each covering at most about one radian of phase
    // z dphi/dz, which vanishes at most once
    let phase_rate = |z: f64| (a * rho * z.powf(rho) - b * z).abs();
    let g = |w: f64| {
        let z = w.exp();
        integrand(z) * z
    };
    let (w_min, w_cap) = (Z_MIN.ln(), Z_CAP.ln());
    let mut w = 0.0;
    let mut body = 0.0;
    while w < w_cap && (w < w_min || phase_rate(w.exp()) < FAST_PHASE) {
        let fastest = phase_rate(w.exp()).max(phase_rate((w + 0.25).exp()));
        let step = (1.0 / fastest).min(0.25);
        let w_next = w + step;
        body += gk15(&g, w, w_next).0;
        w = w_next;
    }
    let tail = 0.5 * (-alpha * w).exp() / alpha;
    Ok(alpha * k.powf(alpha) * (head + body + tail))
}

/// `E cos(v D)` from the integral formula.
pub fn levy_increment_cf(
    spec: &ProcessSpec,
    t: f64,
    r: f64,
    v: f64,
    quad: &QuadratureConfig,
) -> Result<f64, EstimationError> {
    check_levy(spec, t, r)?;
    if !(v >= 0.0) {
        return Err(EstimationError::Invalid(format!("v = {v} must be non-negative")));
    }
    if v == 0.0 {
        return Ok(1.0);
    }
    let a1 = spec.alpha_at(t)?;
    let a2 = spec.alpha_at(t + r)?;
    let b1 = spec.b.eval(t).map_err(KernelError::from)?;
    let b2 = spec.b.eval(t + r).map_err(KernelError::from)?;
    let norm = r.powf(1.0 / a1);
    let big_a = v * b2 * c_alpha(a2)?.powf(1.0 / a2) / (2.0 * norm);
    let big_b = v * b1 * c_alpha(a1)?.powf(1.0 / a1) / (2.0 * norm);

    // x in (t, t+r]: int_0^inf sin^2(A y^{-1/a2}) dy = a2 |A|^{a2} int z^{-a2-1} sin^2 z dz
    let fresh = a2 * big_a.abs().powf(a2) * sin2_integral_with(a2, quad)?;
    // x in [0, t], with y = s^{-a1}
    let carried = if a1 == a2 && b1 == b2 {
        0.0
    } else {
        difference_integral(a1, a1 / a2, big_a, big_b, quad)?
    };
    Ok((-2.0 * (t * carried + r * fresh)).exp())
}

/// Normalized increments `(Y(t+r) - Y(t)) / r^{h(t)}`, one per path.
fn normalized_increments(spec: &ProcessSpec, t: f64, r: f64, mc: &MonteCarlo) -> Result<Vec<f64>, EstimationError> {
    mc.check(1)?;
    let evaluator = DiagonalEvaluator::new(spec, &mc.series, &[t, t + r])?;
    let norm = r.powf(spec.localisability(t)?);
    par_map_indexed(mc.workers, mc.paths, |p| {
        let env = build_environment(spec, &mc.series, mc.seed, p as u64)?;
        let y = evaluator.eval(&env)?;
        Ok((y[1] - y[0]) / norm)
    })
}

/// Cosine averages of the normalized increment over paths.
pub fn empirical_increment_cf(
    spec: &ProcessSpec,
    t: f64,
    r: f64,
    v_grid: &[f64],
    mc: &MonteCarlo,
) -> Result<Vec<f64>, EstimationError> {
    let d = normalized_increments(spec, t, r, mc)?;
    let n = d.len() as f64;
    Ok(v_grid
        .iter()
        .map(|&v| d.iter().map(|x| (v * x).cos()).sum::<f64>() / n)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcfReport {
    pub t: f64,
    pub r: f64,
    pub v: Vec<f64>,
    pub empirical: Vec<f64>,
    pub reference: Vec<f64>,
    pub gaps: Vec<f64>,
    pub sup_gap: f64,
    pub paths: usize,
}

fn report(t: f64, r: f64, v: &[f64], empirical: Vec<f64>, reference: Vec<f64>, paths: usize) -> EcfReport {
    let gaps: Vec<f64> = empirical.iter().zip(&reference).map(|(e, c)| (e - c).abs()).collect();
    let sup_gap = gaps.iter().copied().fold(0.0, f64::max);
    EcfReport {
        t,
        r,
        v: v.to_vec(),
        empirical,
        reference,
        gaps,
        sup_gap,
        paths,
    }
}

/// Empirical CF against [`levy_increment_cf`] on `v_grid`.
pub fn ecf_compare(
    spec: &ProcessSpec,
    t: f64,
    r: f64,
    v_grid: &[f64],
    mc: &MonteCarlo,
    quad: &QuadratureConfig,
) -> Result<EcfReport, EstimationError> {
    check_levy(spec, t, r)?;
    let reference = v_grid
        .iter()
        .map(|&v| levy_increment_cf(spec, t, r, v, quad))
        .collect::<Result<Vec<_>, _>>()?;
    let empirical = empirical_increment_cf(spec, t, r, v_grid, mc)?;
    Ok(report(t, r, v_grid, empirical, reference, mc.paths))
}

/// Empirical CF against `exp(-|b v|^alpha)` for a constant `alpha` and `b`.
pub fn ecf_compare_closed_form(
    spec: &ProcessSpec,
    t: f64,
    r: f64,
    v_grid: &[f64],
    mc: &MonteCarlo,
) -> Result<EcfReport, EstimationError> {
    check_levy(spec, t, r)?;
    if !(spec.alpha.is_constant() && spec.b.is_constant()) {
        return Err(EstimationError::Invalid("closed-form CF needs constant alpha and b".into()));
    }
    let alpha = spec.alpha_at(t)?;
    let b = spec.b.eval(t).map_err(KernelError::from)?.abs();
    let reference: Vec<f64> = v_grid.iter().map(|&v| sas_cf(alpha, b, v)).collect();
    let empirical = empirical_increment_cf(spec, t, r, v_grid, mc)?;
    Ok(report(t, r, v_grid, empirical, reference, mc.paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FuncSpec;

    fn unit() -> (f64, f64) {
        (0.0, 1.0)
    }

    fn varying() -> ProcessSpec {
        ProcessSpec::levy(
            FuncSpec::parse("1.5+0.3*sin(2*pi*t)", unit()).unwrap(),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (1.2, 1.8),
        )
        .unwrap()
    }

    #[test]
    fn cf_at_zero_is_one() {
        let cf = levy_increment_cf(&varying(), 0.3, 2f64.powi(-6), 0.0, &Default::default()).unwrap();
        assert_eq!(cf, 1.0);
    }

    #[test]
    fn constant_alpha_matches_closed_form() {
        for &alpha in &[0.7, 1.0, 1.5, 1.9] {
            let spec = ProcessSpec::levy(
                FuncSpec::constant(alpha, unit()),
                FuncSpec::constant(1.0, unit()),
                unit(),
                (alpha, alpha),
            )
            .unwrap();
            for k in 0..=25 {
                let v = 0.2 * k as f64;
                let cf = levy_increment_cf(&spec, 0.3, 2f64.powi(-6), v, &Default::default()).unwrap();
                assert!((cf - sas_cf(alpha, 1.0, v)).abs() < 1e-6, "alpha {alpha} v {v}");
            }
        }
    }

    #[test]
    fn varying_alpha_cf_is_monotone_and_close_to_tangent() {
        let spec = varying();
        let t = 0.3;
        let alpha_t = spec.alpha_at(t).unwrap();
        let mut prev = 1.0;
        for k in 1..=25 {
            let v = 0.2 * k as f64;
            let cf = levy_increment_cf(&spec, t, 2f64.powi(-6), v, &Default::default()).unwrap();
            assert!(cf <= prev + 1e-12, "v {v}");
            assert!(cf > 0.0);
            // the tangent law is SaS(alpha(t)); the correction is small at this r
            assert!((cf - sas_cf(alpha_t, 1.0, v)).abs() < 0.05, "v {v}: {cf}");
            prev = cf;
        }
    }

    #[test]
    fn difference_integral_against_direct_sum() {
        // a = b, rho = 1 gives zero phase; only the capped remainder is left
        let zero = difference_integral(1.5, 1.0, 2.0, 2.0, &Default::default()).unwrap();
        assert!(zero < 1e-17, "{zero}");
        // b = 0: substituting z = s^rho gives a closed form
        let alpha = 1.6;
        let rho = 0.98;
        let a = 0.7;
        let got = difference_integral(alpha, rho, a, 0.0, &Default::default()).unwrap();
        let beta = alpha / rho;
        let expected = alpha / rho * a.powf(beta) * sin2_integral_with(beta, &Default::default()).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = varying();
        assert!(levy_increment_cf(&spec, 0.3, 0.8, 1.0, &Default::default()).is_err());
        assert!(levy_increment_cf(&spec, 0.3, 0.1, -1.0, &Default::default()).is_err());
    }
}
