//! Kernel conditions evaluated as numbers at `(t, r)`.
//!
//! Each condition is an integral of the kernel against the control measure,
//! possibly normalized by a power of `r`; the caller judges boundedness.
//! For the Lévy kernel the integrals are lengths of intervals and are
//! returned in closed form. For lmmm they are reduced by an affine change of
//! variables to integrals of `|1-y|^k - |y|^k` over the line and computed
//! by quadrature.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::EstimationError;
use crate::kernels::{integrate_symmetric_line, symmetric_increment, Kernel, KernelError, ProcessSpec};
use crate::quad::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `r^{-h alpha} int |f(t+r,t,x) - f(t,t,x)|^alpha m(dx)`.
    C9,
    /// `int f(t+r,t,x)^2 m(dx)`.
    C11,
    /// `int f(t+r,t+r,x)^2 m(dx)`.
    C12,
    /// `int f(t,t,x)^2 m(dx)`; the condition takes its infimum over `t`.
    C13,
    /// `r^{-1-2(h-1/alpha)} int (f(t+r,t,x) - f(t,t,x))^2 m(dx)`.
    Cu14,
    /// `r^{-2} int (f(t+r,t+r,x) - f(t+r,t,x))^2 m(dx)`.
    Cu15,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::C9,
        Condition::C11,
        Condition::C12,
        Condition::C13,
        Condition::Cu14,
        Condition::Cu15,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Condition::C9 => "C9",
            Condition::C11 => "C11",
            Condition::C12 => "C12",
            Condition::C13 => "C13",
            Condition::Cu14 => "Cu14",
            Condition::Cu15 => "Cu15",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Condition {
    type Err = EstimationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| EstimationError::Invalid(format!("unknown condition '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeValue {
    pub t: f64,
    pub r: f64,
    pub value: f64,
}

/// Lévy kernel `1_[0,t]` with Lebesgue measure on `[0, 1]`.
fn levy_probe(condition: Condition, t: f64, r: f64) -> f64 {
    let covered = (t + r).clamp(0.0, 1.0);
    match condition {
        // the increment kernel is 1_(t, t+r], of mass r, and r^{-h alpha} = 1/r
        Condition::C9 | Condition::Cu14 => {
            if t + r <= 1.0 {
                1.0
            } else {
                (1.0 - t) / r
            }
        }
        Condition::C11 | Condition::C12 => covered,
        Condition::C13 => t.clamp(0.0, 1.0),
        // f(v,u,x) does not depend on u
        Condition::Cu15 => 0.0,
    }
}

/// `int (|1-y|^k - |y|^k)^2 dy`, finite for `|k| < 1/2`.
fn square_integral(kappa: f64, quad: &QuadratureConfig) -> Result<f64, EstimationError> {
    if !(kappa.abs() < 0.5) {
        return Err(EstimationError::Invalid(format!(
            "square integral diverges for exponent {kappa}; need |H - 1/alpha| < 1/2"
        )));
    }
    Ok(integrate_symmetric_line(
        |y, one_minus_y| symmetric_increment(y, one_minus_y, kappa).powi(2),
        quad,
    )?)
}

fn lmmm_probe(
    spec: &ProcessSpec,
    condition: Condition,
    t: f64,
    r: f64,
    quad: &QuadratureConfig,
) -> Result<f64, EstimationError> {
    let (alpha, hurst) = match &spec.kernel {
        Kernel::Lmmm { alpha, hurst } => (alpha, hurst),
        _ => unreachable!(),
    };
    let kappa_at = |u: f64| -> Result<f64, EstimationError> {
        Ok(hurst.eval(u).map_err(KernelError::from)? - 1.0 / alpha.eval(u).map_err(KernelError::from)?)
    };
    let s = t + r;
    Ok(match condition {
        Condition::C9 => {
            // x = t + r y
            let a = spec.alpha_at(t)?;
            let h = hurst.eval(t).map_err(KernelError::from)?;
            let kappa = kappa_at(t)?;
            let integral = integrate_symmetric_line(
                |y, one_minus_y| symmetric_increment(y, one_minus_y, kappa).abs().powf(a),
                quad,
            )?;
            r.powf(1.0 + kappa * a - h * a) * integral
        }
        Condition::Cu14 => square_integral(kappa_at(t)?, quad)?,
        // x = s y: int (|s-x|^k - |x|^k)^2 dx = s^{1+2k} int (|1-y|^k - |y|^k)^2 dy
        Condition::C11 => {
            let kappa = kappa_at(t)?;
            s.abs().powf(1.0 + 2.0 * kappa) * square_integral(kappa, quad)?
        }
        Condition::C12 => {
            let kappa = kappa_at(s)?;
            s.abs().powf(1.0 + 2.0 * kappa) * square_integral(kappa, quad)?
        }
        Condition::C13 => {
            let kappa = kappa_at(t)?;
            t.abs().powf(1.0 + 2.0 * kappa) * square_integral(kappa, quad)?
        }
        Condition::Cu15 => {
            let k1 = kappa_at(s)?;
            let k0 = kappa_at(t)?;
            if k1.abs() >= 0.5 || k0.abs() >= 0.5 {
                return Err(EstimationError::Invalid(
                    "square integral diverges; need |H - 1/alpha| < 1/2".into(),
                ));
            }
            let (c1, c0) = (s.abs().powf(k1), s.abs().powf(k0));
            let integral = integrate_symmetric_line(
                |y, one_minus_y| {
                    let d = c1 * symmetric_increment(y, one_minus_y, k1) - c0 * symmetric_increment(y, one_minus_y, k0);
                    d * d
                },
                quad,
            )?;
            s.abs() * integral / (r * r)
        }
    })
}

/// Value of `condition` at `t` for every `r` in `r_list`.
pub fn condition_probe(
    spec: &ProcessSpec,
    condition: Condition,
    t: f64,
    r_list: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<ProbeValue>, EstimationError> {
    if let Some(&bad) = r_list.iter().find(|r| !(**r > 0.0)) {
        return Err(EstimationError::Invalid(format!("r = {bad} must be positive")));
    }
    r_list
        .iter()
        .map(|&r| {
            let value = match spec.kernel {
                Kernel::Levy => levy_probe(condition, t, r),
                Kernel::Lmmm { .. } => lmmm_probe(spec, condition, t, r, quad)?,
                Kernel::Lfsm { .. } => {
                    return Err(EstimationError::Invalid(format!(
                        "condition {condition} is not implemented for the lfsm control kernel"
                    )))
                }
            };
            Ok(ProbeValue { t, r, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FuncSpec;
    use crate::kernels::sigma_lmmm;

    fn unit() -> (f64, f64) {
        (0.0, 1.0)
    }

    fn lmmm(alpha: &str, hurst: &str) -> ProcessSpec {
        ProcessSpec::lmmm(
            FuncSpec::parse(alpha, unit()).unwrap(),
            FuncSpec::parse(hurst, unit()).unwrap(),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (1.5, 1.9),
        )
        .unwrap()
    }

    #[test]
    fn levy_values() {
        let spec = ProcessSpec::levy(
            FuncSpec::parse("1.5+0.3*sin(2*pi*t)", unit()).unwrap(),
            FuncSpec::constant(1.0, unit()),
            unit(),
            (1.2, 1.8),
        )
        .unwrap();
        let q = QuadratureConfig::default();
        let rs = [0.1, 0.013, 1e-5];
        for c in [Condition::C9, Condition::Cu14] {
            assert!(condition_probe(&spec, c, 0.37, &rs, &q).unwrap().iter().all(|p| p.value == 1.0));
        }
        assert!(condition_probe(&spec, Condition::Cu15, 0.37, &rs, &q)
            .unwrap()
            .iter()
            .all(|p| p.value == 0.0));
        assert_eq!(condition_probe(&spec, Condition::C13, 0.37, &rs, &q).unwrap()[0].value, 0.37);
    }

    #[test]
    fn tags_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.tag().parse::<Condition>().unwrap(), c);
        }
        assert!("C10".parse::<Condition>().is_err());
    }

    #[test]
    fn lmmm_c9_is_scale_power() {
        let spec = lmmm("1.7", "0.7");
        let q = QuadratureConfig::default();
        let sigma = sigma_lmmm(1.7, 0.7).unwrap();
        for p in condition_probe(&spec, Condition::C9, 0.4, &[0.1, 0.01], &q).unwrap() {
            assert!((p.value - sigma.powf(1.7)).abs() < 1e-10 * p.value);
        }
    }

    #[test]
    fn lmmm_square_integral_against_fourier_identity() {
        // Plancherel with the transform of |x|^k:
        // int (|1-y|^k - |y|^k)^2 dy = (16/pi) Gamma(k+1)^2 sin^2(pi k/2) 2^{-1-2k} int u^{-2-2k} sin^2 u du
        use crate::special::{gamma_fn, sin2_integral};
        use std::f64::consts::PI;
        let q = QuadratureConfig::default();
        for (alpha, hurst) in [(1.7, 0.7), (1.5, 0.5), (1.9, 0.9), (1.2, 0.6)] {
            let kappa: f64 = hurst - 1.0 / alpha;
            let expected = 16.0 / PI
                * gamma_fn(kappa + 1.0).unwrap().powi(2)
                * (PI * kappa / 2.0).sin().powi(2)
                * 2f64.powf(-1.0 - 2.0 * kappa)
                * sin2_integral(1.0 + 2.0 * kappa).unwrap();
            let got = square_integral(kappa, &q).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-10, "k {kappa}: {got} vs {expected}");
        }
        let spec = lmmm("1.7", "0.7");
        let c13 = condition_probe(&spec, Condition::C13, 1.0, &[0.1], &q).unwrap()[0].value;
        assert!((c13 - 0.104_348_216_822_978_65).abs() < 1e-12, "{c13}");
    }

    #[test]
    fn lmmm_cu15_bounded_for_smooth_parameters() {
        let spec = lmmm("1.7+0.2*sin(2*pi*t)", "0.7+0.1*t");
        let q = QuadratureConfig::default();
        let vals = condition_probe(&spec, Condition::Cu15, 0.4, &[0.05, 0.01, 0.002], &q).unwrap();
        for p in &vals {
            assert!(p.value.is_finite() && p.value > 0.0);
        }
        // a C^1 exponent makes the ratio converge as r -> 0
        assert!((vals[1].value / vals[2].value - 1.0).abs() < 0.2, "{vals:?}");
    }
}
