//! Special functions for symmetric stable laws: the series normalizing
//! constant `C_eta`, the `sin^2` tail integral, absolute moments, Gamma, and
//! a Chambers–Mallows–Stuck sampler used as an independent reference for the
//! series simulator.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::quad::{oscillatory_tail, QuadError, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("moment of order {eta} does not exist for stability index {alpha}")]
    InfiniteMoment { eta: f64, alpha: f64 },
    #[error("Gamma has a pole at {0}")]
    Pole(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

fn check_open_0_2(name: &'static str, value: f64) -> Result<(), SpecialError> {
    if value > 0.0 && value < 2.0 {
        Ok(())
    } else {
        Err(SpecialError::OutOfRange {
            name,
            value,
            range: "(0, 2)",
        })
    }
}

/// Gamma function. Poles at the non-positive integers are errors.
pub fn gamma_fn(x: f64) -> Result<f64, SpecialError> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(SpecialError::Pole(x));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `C_eta = (int_0^inf x^{-eta} sin x dx)^{-1}` in closed form.
///
/// Uses `int_0^inf x^{-eta} sin x dx = Gamma(2-eta) sin(pi(1-eta)/2) / (1-eta)`,
/// whose removable singularity at `eta = 1` gives `pi/2`.
pub fn c_alpha(eta: f64) -> Result<f64, SpecialError> {
    check_open_0_2("eta", eta)?;
    let delta = 1.0 - eta;
    let sinc = if delta == 0.0 {
        FRAC_PI_2
    } else {
        (FRAC_PI_2 * delta).sin() / delta
    };
    Ok(1.0 / (gamma_fn(2.0 - eta)? * sinc))
}

/// `int_0^inf x^{-eta} sin x dx` by quadrature: power series on `[0, pi]`
/// and half-period panels with alternating-series acceleration beyond.
pub fn sine_integral_quadrature(eta: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    check_open_0_2("eta", eta)?;
    // int_0^pi x^{-eta} sin x dx = sum_k (-1)^k pi^{2k+2-eta} / ((2k+1)! (2k+2-eta))
    let mut head = 0.0;
    let mut fact = 1.0; // (2k+1)!
    let mut k = 0;
    loop {
        let p = 2.0 * k as f64 + 2.0 - eta;
        let term = PI.powf(p) / (fact * p);
        head += if k % 2 == 0 { term } else { -term };
        if term < 1e-18 * head.abs() || k > 60 {
            break;
        }
        k += 1;
        fact *= (2 * k) as f64 * (2 * k + 1) as f64;
    }
    let tail = oscillatory_tail(|x| x.powf(-eta) * x.sin(), PI, PI, cfg)?;
    Ok(head + tail)
}

/// Reference value of `C_eta` through quadrature.
pub fn c_alpha_quadrature(eta: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    Ok(1.0 / sine_integral_quadrature(eta, cfg)?)
}

/// `int_0^inf u^{-eta-1} sin^2(u) du` for `eta in (0, 2)`.
///
/// Power series on `[0, pi/4]`; beyond, `sin^2 u = (1 - cos 2u)/2` splits the
/// integrand into an elementary power and an oscillatory part summed over
/// half periods of `cos 2u`.
pub fn sin2_integral_with(eta: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    check_open_0_2("eta", eta)?;
    let a = FRAC_PI_4;
    // sin^2 u = sum_{k>=1} (-1)^{k+1} 2^{2k-1} u^{2k} / (2k)!
    let mut head = 0.0;
    let mut fact = 2.0; // (2k)!
    let mut pow2 = 2.0; // 2^{2k-1}
    let mut k = 1;
    loop {
        let p = 2.0 * k as f64 - eta;
        let term = pow2 * a.powf(p) / (fact * p);
        head += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 * head.abs() || k > 60 {
            break;
        }
        k += 1;
        fact *= (2 * k - 1) as f64 * (2 * k) as f64;
        pow2 *= 4.0;
    }
    let power_part = a.powf(-eta) / (2.0 * eta);
    let cosine_part = oscillatory_tail(|u| u.powf(-eta - 1.0) * (2.0 * u).cos(), a, FRAC_PI_2, cfg)?;
    Ok(head + power_part - 0.5 * cosine_part)
}

pub fn sin2_integral(eta: f64) -> Result<f64, SpecialError> {
    sin2_integral_with(eta, &QuadratureConfig::default())
}

/// `E|X|^eta` for `X` symmetric `alpha`-stable with scale `sigma`:
/// `sigma^eta 2^{eta-1} Gamma(1 - eta/alpha) / (eta int_0^inf u^{-eta-1} sin^2 u du)`.
pub fn sas_abs_moment(alpha: f64, sigma: f64, eta: f64) -> Result<f64, SpecialError> {
    check_open_0_2("alpha", alpha)?;
    if !(sigma > 0.0) {
        return Err(SpecialError::OutOfRange {
            name: "sigma",
            value: sigma,
            range: "(0, inf)",
        });
    }
    if !(eta > 0.0) {
        return Err(SpecialError::OutOfRange {
            name: "eta",
            value: eta,
            range: "(0, alpha)",
        });
    }
    if eta >= alpha {
        return Err(SpecialError::InfiniteMoment { eta, alpha });
    }
    Ok(sigma.powf(eta) * stable_moment_prefactor(alpha, eta)?)
}

/// The unit-scale factor `2^{eta-1} Gamma(1 - eta/alpha) / (eta int u^{-eta-1} sin^2 u du)`.
pub fn stable_moment_prefactor(alpha: f64, eta: f64) -> Result<f64, SpecialError> {
    if eta >= alpha {
        return Err(SpecialError::InfiniteMoment { eta, alpha });
    }
    let numerator = 2f64.powf(eta - 1.0) * gamma_fn(1.0 - eta / alpha)?;
    Ok(numerator / (eta * sin2_integral(eta)?))
}

/// Chambers–Mallows–Stuck transform for a symmetric stable variate from an
/// angle `v` uniform on `(-pi/2, pi/2)` and a unit exponential `w`.
/// Odd in `v`.
pub fn cms_transform(alpha: f64, sigma: f64, v: f64, w: f64) -> f64 {
    let x = if alpha == 1.0 {
        v.tan()
    } else {
        let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
        let b = ((1.0 - alpha) * v).cos() / w;
        a * b.powf((1.0 - alpha) / alpha)
    };
    sigma * x
}

/// One draw from the symmetric `alpha`-stable law with scale `sigma`
/// (characteristic function `exp(-sigma^alpha |v|^alpha)`).
pub fn cms_sample<R: Rng + ?Sized>(alpha: f64, sigma: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha <= 2.0 && sigma > 0.0);
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    cms_transform(alpha, sigma, v, w)
}

/// Characteristic function of the symmetric stable law.
pub fn sas_cf(alpha: f64, sigma: f64, v: f64) -> f64 {
    (-(sigma * v.abs()).powf(alpha)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(4.0).unwrap() - 6.0).abs() < 1e-13);
        // reference: Gamma(1/3) = 2.678938534707747633...
        let g = gamma_fn(1.0 / 3.0).unwrap();
        assert!(((g - 2.678_938_534_707_747_6) / g).abs() < 1e-12, "{g}");
        assert!(matches!(gamma_fn(0.0), Err(SpecialError::Pole(_))));
        assert!(matches!(gamma_fn(-2.0), Err(SpecialError::Pole(_))));
        // reflection region
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_accuracy_on_unit_to_ten() {
        // Gamma(x + 1) = x Gamma(x) and factorials
        let mut fact = 1.0;
        for n in 1..=10 {
            let g = gamma_fn(n as f64).unwrap();
            assert!(((g - fact) / fact).abs() < 1e-12, "n = {n}");
            fact *= n as f64;
        }
        for k in 1..100 {
            let x = 0.1 * k as f64;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(((lhs - rhs) / lhs).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn c_alpha_known_values() {
        assert!((c_alpha(1.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((c_alpha(1.5).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
        let cfg = QuadratureConfig::default();
        assert!((c_alpha(0.5).unwrap() - c_alpha_quadrature(0.5, &cfg).unwrap()).abs() < 1e-8);
        assert!(c_alpha(0.0).is_err());
        assert!(c_alpha(2.0).is_err());
    }

    #[test]
    fn quadrature_oracle_grid() {
        let cfg = QuadratureConfig::default();
        for k in 0..20 {
            let eta = 0.05 + 1.9 * k as f64 / 19.0;
            let closed = c_alpha(eta).unwrap();
            let quad = c_alpha_quadrature(eta, &cfg).unwrap();
            assert!((closed - quad).abs() <= 1e-8, "eta {eta}: {closed} vs {quad}");
        }
    }

    #[test]
    fn c_alpha_continuous_through_one() {
        let below = c_alpha(1.0 - 1e-9).unwrap();
        let above = c_alpha(1.0 + 1e-9).unwrap();
        assert!((below - 2.0 / PI).abs() < 1e-8);
        assert!((above - 2.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn sin2_values() {
        assert!((sin2_integral(1.0).unwrap() - FRAC_PI_2).abs() < 1e-10);
        // integration by parts: int u^{-eta-1} sin^2 u = 2^{eta-1} / (eta C_eta)
        for &eta in &[0.5, 0.3, 1.2, 1.7, 1.99] {
            let quad = sin2_integral(eta).unwrap();
            let closed = 2f64.powf(eta - 1.0) / (eta * c_alpha(eta).unwrap());
            assert!(((quad - closed) / closed).abs() < 1e-9, "eta {eta}: {quad} vs {closed}");
            assert!(quad.is_finite() && quad > 0.0);
        }
        assert!(sin2_integral(2.0).is_err());
    }

    #[test]
    fn cauchy_half_moment() {
        // int |x|^{1/2} / (pi (1 + x^2)) dx = 1 / cos(pi/4) = sqrt 2
        let m = sas_abs_moment(1.0, 1.0, 0.5).unwrap();
        assert!((m - 2f64.sqrt()).abs() < 1e-9, "{m}");
    }

    #[test]
    fn moment_formula_and_scaling() {
        let m = sas_abs_moment(1.5, 1.0, 1.0).unwrap();
        let expected = gamma_fn(1.0 / 3.0).unwrap() / FRAC_PI_2;
        assert!((m - expected).abs() < 1e-9);
        let m2 = sas_abs_moment(1.5, 2.0, 1.0).unwrap();
        assert!((m2 - 2.0 * m).abs() < 1e-9);
        assert!(matches!(
            sas_abs_moment(1.5, 1.0, 1.5),
            Err(SpecialError::InfiniteMoment { .. })
        ));
        assert!(sas_abs_moment(1.5, 0.0, 0.5).is_err());
        let mut prev = 0.0;
        for k in 1..10 {
            let v = sas_abs_moment(1.2, 0.3 * k as f64, 0.7).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn cms_near_gaussian_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| cms_sample(2.0 - 1e-9, 1.0, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 2.0).abs() < 0.1, "{var}");
    }

    #[test]
    fn cms_cauchy_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut xs: Vec<f64> = (0..100_000).map(|_| cms_sample(1.0, 1.0, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        assert!(xs[50_000].abs() < 0.02);
    }

    #[test]
    fn cms_half_moment_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 200_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| cms_sample(1.5, 1.0, &mut rng).abs().sqrt())
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let se = sd / (n as f64).sqrt();
        let exact = sas_abs_moment(1.5, 1.0, 0.5).unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn cms_first_moment_million() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let a = cms_sample(1.5, 1.0, &mut rng).abs();
            sum += a;
            sum_sq += a * a;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean) * n as f64 / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let exact = sas_abs_moment(1.5, 1.0, 1.0).unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
        assert!(((mean - exact) / exact).abs() < 0.02, "{mean} vs {exact}");
    }

    #[test]
    fn cms_is_odd_in_the_angle() {
        for &alpha in &[0.6, 1.0, 1.5, 1.9] {
            for &(v, w) in &[(0.3, 0.7), (1.2, 2.5), (0.01, 0.1)] {
                assert_eq!(cms_transform(alpha, 1.3, -v, w), -cms_transform(alpha, 1.3, v, w));
            }
        }
    }
}
