//! Kernels `f(t, u, x)` and the measure spaces their series points are drawn
//! from.
//!
//! The finite and sigma-finite constructions share one code path: every
//! sampled point carries a weight `w(x)`, equal to the total mass `m(E)` for
//! a finite measure and to the density ratio `r(x)` for a sigma-finite one.
//! The series engine always multiplies by `w(V_i)^{1/alpha(u)}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

use crate::expr::{validate_range, ExprError, FuncSpec};
use crate::quad::{tanh_sinh, QuadError, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("invalid process: {0}")]
    Invalid(String),
}

const BAND_TABLE_LEN: usize = 10_000;

/// Cumulative probabilities `P(J <= j)` of the band law `6 / (pi^2 j^2)`.
fn band_cdf() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let norm = 6.0 / (PI * PI);
        // P(J > j) = norm * psi'(j + 1)
        (1..=BAND_TABLE_LEN)
            .map(|j| 1.0 - norm * trigamma_large(j as f64 + 1.0))
            .collect()
    })
}

/// `psi'(x)` for `x >= 2` by recurrence up to 20 and the asymptotic series.
fn trigamma_large(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x
        + 0.5 * x2
        + (1.0 / x) * x2 * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * 5.0 / 66.0))))
}

/// Band index `j >= 1` with `P(J = j) = 6 / (pi^2 j^2)`, by inversion of the
/// cumulative law. Beyond the table the tail `P(J > j) ~ 6 / (pi^2 (j + 1/2))`
/// is inverted directly, so no truncation of `j` takes place.
pub fn sample_band<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let table = band_cdf();
    if u < table[BAND_TABLE_LEN - 1] {
        return table.partition_point(|&c| c <= u) as u64 + 1;
    }
    let q = (1.0 - u).max(f64::MIN_POSITIVE);
    let j = (6.0 / (PI * PI * q) - 0.5).ceil();
    (j as u64).max(BAND_TABLE_LEN as u64 + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Lebesgue measure on `[lo, hi)`; sampled uniformly with weight `hi - lo`.
    Uniform { lo: f64, hi: f64 },
    /// Lebesgue measure on the real line, sampled through unit bands
    /// `[-j, -j+1) U [j-1, j)` chosen with probability `6 / (pi^2 j^2)`;
    /// weight `pi^2 j^2 / 3`.
    ZetaBands,
}

impl MeasureSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            MeasureSpec::Uniform { .. } => "uniform",
            MeasureSpec::ZetaBands => "zeta-bands",
        }
    }

    /// Draws a point from the normalized measure and returns it with its weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match *self {
            MeasureSpec::Uniform { lo, hi } => (lo + (hi - lo) * rng.random::<f64>(), hi - lo),
            MeasureSpec::ZetaBands => {
                let j = sample_band(rng);
                let offset: f64 = rng.random();
                let jf = j as f64;
                let x = if rng.random::<bool>() {
                    jf - 1.0 + offset
                } else {
                    -jf + offset
                };
                (x, PI * PI * jf * jf / 3.0)
            }
        }
    }

    /// Weight of a point of the support.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            MeasureSpec::Uniform { lo, hi } => hi - lo,
            MeasureSpec::ZetaBands => {
                let j = if x >= 0.0 { x.floor() + 1.0 } else { (-x).ceil() };
                PI * PI * j * j / 3.0
            }
        }
    }
}

/// `f(t, u, .)` with `u` frozen: the kernel a series sum actually evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSection {
    /// `1_[0,t](x)`, closed at both ends.
    Indicator,
    /// `|t - x|^k - |x|^k`.
    Symmetric { kappa: f64 },
    /// `b+ ((t-x)_+^k - (-x)_+^k) + b- ((t-x)_-^k - (-x)_-^k)`.
    Balanced { kappa: f64, b_plus: f64, b_minus: f64 },
}

fn pos_pow(y: f64, kappa: f64) -> f64 {
    if y > 0.0 {
        y.powf(kappa)
    } else {
        0.0
    }
}

impl KernelSection {
    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match *self {
            KernelSection::Indicator => {
                if x >= 0.0 && x <= t {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSection::Symmetric { kappa } => {
                if kappa == 0.0 {
                    0.0
                } else {
                    (t - x).abs().powf(kappa) - x.abs().powf(kappa)
                }
            }
            KernelSection::Balanced {
                kappa,
                b_plus,
                b_minus,
            } => {
                let plus = pos_pow(t - x, kappa) - pos_pow(-x, kappa);
                let minus = pos_pow(x - t, kappa) - pos_pow(x, kappa);
                b_plus * plus + b_minus * minus
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Levy,
    Lmmm { alpha: FuncSpec, hurst: FuncSpec },
    Lfsm {
        alpha: f64,
        hurst: f64,
        b_plus: f64,
        b_minus: f64,
    },
}

impl Kernel {
    pub fn tag(&self) -> &'static str {
        match self {
            Kernel::Levy => "levy",
            Kernel::Lmmm { .. } => "lmmm",
            Kernel::Lfsm { .. } => "lfsm",
        }
    }

    /// Support of `t` for which the kernel is defined.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Kernel::Levy => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Freezes `u`.
    pub fn section(&self, u: f64) -> Result<KernelSection, KernelError> {
        Ok(match self {
            Kernel::Levy => KernelSection::Indicator,
            Kernel::Lmmm { alpha, hurst } => KernelSection::Symmetric {
                kappa: hurst.eval(u)? - 1.0 / alpha.eval(u)?,
            },
            Kernel::Lfsm {
                alpha,
                hurst,
                b_plus,
                b_minus,
            } => KernelSection::Balanced {
                kappa: hurst - 1.0 / alpha,
                b_plus: *b_plus,
                b_minus: *b_minus,
            },
        })
    }

    pub fn evaluate(&self, t: f64, u: f64, x: f64) -> Result<f64, KernelError> {
        Ok(self.section(u)?.eval(t, x))
    }

    /// Notes on the regimes where theory applies.
    pub fn validity_notes(&self) -> &'static str {
        match self {
            Kernel::Levy => "stability index in (0,2); moment asymptotics need alpha in (1,2)",
            Kernel::Lmmm { .. } => "Hölder upper bound requires H(u) - 1/alpha(u) >= 0",
            Kernel::Lfsm { .. } => "constant parameters; b+ = b- = 1 is the well-balanced case",
        }
    }
}

/// Lévy kernel `1_[0,t](x)` with Lebesgue probability measure on `[0, 1]`.
pub fn levy_kernel() -> (Kernel, MeasureSpec) {
    (Kernel::Levy, MeasureSpec::Uniform { lo: 0.0, hi: 1.0 })
}

/// Linear multistable multifractional kernel with its band measure on the line.
pub fn lmmm_kernel(alpha: &FuncSpec, hurst: &FuncSpec) -> (Kernel, MeasureSpec) {
    (
        Kernel::Lmmm {
            alpha: alpha.clone(),
            hurst: hurst.clone(),
        },
        MeasureSpec::ZetaBands,
    )
}

/// Linear fractional stable motion kernel with constant parameters.
pub fn lfsm_kernel(alpha: f64, hurst: f64, b_plus: f64, b_minus: f64) -> Result<Kernel, KernelError> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(KernelError::Invalid(format!("alpha = {alpha} outside (0,2)")));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(KernelError::Invalid(format!("H = {hurst} outside (0,1)")));
    }
    Ok(Kernel::Lfsm {
        alpha,
        hurst,
        b_plus,
        b_minus,
    })
}

/// `|1-x|^k - |x|^k` with `1 - x` passed separately so the singular point
/// `x = 1` is resolved, and the large-|x| difference formed without
/// cancellation.
pub fn symmetric_increment(x: f64, one_minus_x: f64, kappa: f64) -> f64 {
    let ax = x.abs();
    if ax > 2.0 {
        // |x-1|^k - |x|^k = |x|^k expm1(k ln|1 - 1/x|)
        ax.powf(kappa) * (kappa * (-1.0 / x).ln_1p()).exp_m1()
    } else {
        one_minus_x.abs().powf(kappa) - ax.powf(kappa)
    }
}

fn symmetric_increment_pow(x: f64, one_minus_x: f64, kappa: f64, p: f64) -> f64 {
    symmetric_increment(x, one_minus_x, kappa).abs().powf(p)
}

/// `int_R g(x, 1 - x) dx` for an integrand symmetric under `x -> 1 - x`, with
/// algebraic singularities allowed at 0 and 1, a possible kink at 1/2 and a
/// power-law tail. Splits at 0, 1/2, 1 and 50; the tail is mapped to `(0, 1]`
/// by `x = 50 / s`.
pub fn integrate_symmetric_line<G: Fn(f64, f64) -> f64>(
    g: G,
    cfg: &QuadratureConfig,
) -> Result<f64, KernelError> {
    const X_MAX: f64 = 50.0;
    let middle = 2.0 * tanh_sinh(|x, _, _| g(x, 1.0 - x), 0.0, 0.5, cfg)?;
    let near = tanh_sinh(|x, da, _| g(x, -da), 1.0, X_MAX, cfg)?;
    let far = tanh_sinh(
        |s, _, _| {
            let x = X_MAX / s;
            g(x, 1.0 - x) * X_MAX / (s * s)
        },
        0.0,
        1.0,
        cfg,
    )?;
    Ok(middle + 2.0 * (near + far))
}

/// Scale of the tangent well-balanced lfsm at `t`:
/// `( int_R | |1-x|^k - |x|^k |^alpha dx )^{1/alpha}` with `k = H - 1/alpha`.
pub fn sigma_lmmm(alpha_t: f64, hurst_t: f64) -> Result<f64, KernelError> {
    sigma_lmmm_with(alpha_t, hurst_t, &QuadratureConfig::default())
}

pub fn sigma_lmmm_with(alpha_t: f64, hurst_t: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    if !(alpha_t > 0.0 && alpha_t < 2.0) {
        return Err(KernelError::Invalid(format!("alpha = {alpha_t} outside (0,2)")));
    }
    if !(hurst_t > 0.0 && hurst_t < 1.0) {
        return Err(KernelError::Invalid(format!("H = {hurst_t} outside (0,1)")));
    }
    let kappa = hurst_t - 1.0 / alpha_t;
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let integral = lmmm_abs_integral(kappa, alpha_t, cfg)?;
    Ok(integral.powf(1.0 / alpha_t))
}

/// Monte Carlo estimate of [`sigma_lmmm`] with its standard error, as an
/// independent check on the quadrature. Folds the integrand about `x = 1/2`,
/// samples `[0, 1/2 + L)` in `strata` equal strata (two draws each) and the tail
/// beyond by a Pareto proposal matched to the integrand's decay.
pub fn sigma_lmmm_monte_carlo<R: Rng + ?Sized>(
    alpha_t: f64,
    hurst_t: f64,
    strata: usize,
    rng: &mut R,
) -> Result<(f64, f64), KernelError> {
    if !(alpha_t > 0.0 && alpha_t < 2.0) || !(hurst_t > 0.0 && hurst_t < 1.0) {
        return Err(KernelError::Invalid(format!("alpha = {alpha_t}, H = {hurst_t} out of range")));
    }
    if strata == 0 {
        return Err(KernelError::Invalid("strata must be positive".into()));
    }
    let kappa = hurst_t - 1.0 / alpha_t;
    if kappa == 0.0 {
        return Ok((0.0, 0.0));
    }
    const HALF_WIDTH: f64 = 50.0;
    let g = |y: f64| {
        let x = 0.5 + y;
        symmetric_increment_pow(x, 1.0 - x, kappa, alpha_t)
    };
    let width = HALF_WIDTH / strata as f64;
    let (mut body, mut body_var) = (0.0, 0.0);
    for k in 0..strata {
        let lo = k as f64 * width;
        let a = g(lo + width * rng.random::<f64>());
        let b = g(lo + width * rng.random::<f64>());
        body += 0.5 * (a + b) * width;
        // unbiased variance of a two-draw stratum mean
        body_var += 0.25 * (a - b) * (a - b) * width * width;
    }
    // tail decays like y^{-(1-k) alpha}
    let tail_index = (1.0 - kappa) * alpha_t - 1.0;
    if tail_index <= 0.0 {
        return Err(KernelError::Invalid(format!("integrand tail not integrable (kappa = {kappa})")));
    }
    let tail_draws = strata.max(2);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..tail_draws {
        let u: f64 = 1.0 - rng.random::<f64>();
        let y = HALF_WIDTH * u.powf(-1.0 / tail_index);
        let density = tail_index * HALF_WIDTH.powf(tail_index) * y.powf(-tail_index - 1.0);
        let w = g(y) / density;
        sum += w;
        sum_sq += w * w;
    }
    let m = tail_draws as f64;
    let tail = sum / m;
    let tail_var = (sum_sq / m - tail * tail).max(0.0) / (m - 1.0);
    let integral = 2.0 * (body + tail);
    let integral_se = 2.0 * (body_var + tail_var).sqrt();
    let sigma = integral.powf(1.0 / alpha_t);
    // delta method for I^{1/alpha}
    let sigma_se = sigma / (alpha_t * integral) * integral_se;
    Ok((sigma, sigma_se))
}

/// `int_R | |1-x|^k - |x|^k |^p dx`.
pub fn lmmm_abs_integral(kappa: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    if kappa == 0.0 {
        return Ok(0.0);
    }
    integrate_symmetric_line(|x, y| symmetric_increment_pow(x, y, kappa, p), cfg)
}

/// A process: kernel, measure, model functions and the bounds they must
/// respect.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub kernel: Kernel,
    pub measure: MeasureSpec,
    pub alpha: FuncSpec,
    pub b: FuncSpec,
    pub hurst: Option<FuncSpec>,
    pub domain: (f64, f64),
    /// `[c, d]`, the range of the stability index.
    pub stability: (f64, f64),
    /// Declared Hölder exponent of `alpha`, when `alpha` is not C^1.
    pub alpha_holder: Option<f64>,
    warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    Levy,
    Lmmm,
    LfsmControl,
}

const VALIDATION_GRID: usize = 201;

fn check_stability(stability: (f64, f64)) -> Result<(), KernelError> {
    let (c, d) = stability;
    if !(c > 0.0 && c <= d && d < 2.0) {
        return Err(KernelError::Invalid(format!(
            "stability bounds [{c}, {d}] must satisfy 0 < c <= d < 2"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: &FuncSpec, stability: (f64, f64)) -> Result<(), KernelError> {
    let report = validate_range(alpha, stability.0, stability.1, VALIDATION_GRID)?;
    if !report.passed {
        return Err(KernelError::Invalid(format!(
            "alpha ranges over [{}, {}] which is not inside [{}, {}]",
            report.min, report.max, stability.0, stability.1
        )));
    }
    Ok(())
}

fn check_domain(domain: (f64, f64), support: (f64, f64)) -> Result<(), KernelError> {
    if !(domain.0 < domain.1) || domain.0 < support.0 || domain.1 > support.1 {
        return Err(KernelError::Invalid(format!(
            "domain ({}, {}) is not a nonempty interval inside the kernel support [{}, {}]",
            domain.0, domain.1, support.0, support.1
        )));
    }
    Ok(())
}

impl ProcessSpec {
    pub fn levy(
        alpha: FuncSpec,
        b: FuncSpec,
        domain: (f64, f64),
        stability: (f64, f64),
    ) -> Result<Self, KernelError> {
        let (kernel, measure) = levy_kernel();
        check_stability(stability)?;
        check_domain(domain, kernel.support())?;
        check_alpha(&alpha, stability)?;
        Ok(ProcessSpec {
            kernel,
            measure,
            alpha,
            b,
            hurst: None,
            domain,
            stability,
            alpha_holder: None,
            warnings: Vec::new(),
        })
    }

    pub fn lmmm(
        alpha: FuncSpec,
        hurst: FuncSpec,
        b: FuncSpec,
        domain: (f64, f64),
        stability: (f64, f64),
    ) -> Result<Self, KernelError> {
        let (kernel, measure) = lmmm_kernel(&alpha, &hurst);
        check_stability(stability)?;
        check_domain(domain, kernel.support())?;
        check_alpha(&alpha, stability)?;
        let h_report = validate_range(&hurst, 0.0, 1.0, VALIDATION_GRID)?;
        if !(h_report.min > 0.0 && h_report.max < 1.0) {
            return Err(KernelError::Invalid(format!(
                "H ranges over [{}, {}] which is not inside (0, 1)",
                h_report.min, h_report.max
            )));
        }
        let mut warnings = Vec::new();
        let mut worst = f64::INFINITY;
        let mut at = f64::NAN;
        for t in alpha.grid(VALIDATION_GRID) {
            let kappa = hurst.eval(t)? - 1.0 / alpha.eval(t)?;
            if kappa < worst {
                worst = kappa;
                at = t;
            }
        }
        if worst < 0.0 {
            warnings.push(format!(
                "H - 1/alpha = {worst:.6} < 0 at t = {at:.6}: the Hölder upper bound is not asserted in this regime"
            ));
        }
        Ok(ProcessSpec {
            kernel,
            measure,
            alpha,
            b,
            hurst: Some(hurst),
            domain,
            stability,
            alpha_holder: None,
            warnings,
        })
    }

    pub fn lfsm_control(
        alpha: f64,
        hurst: f64,
        b_plus: f64,
        b_minus: f64,
        domain: (f64, f64),
    ) -> Result<Self, KernelError> {
        let kernel = lfsm_kernel(alpha, hurst, b_plus, b_minus)?;
        check_domain(domain, kernel.support())?;
        let mut warnings = Vec::new();
        if hurst - 1.0 / alpha < 0.0 {
            warnings.push(format!(
                "H - 1/alpha = {:.6} < 0: the Hölder upper bound is not asserted in this regime",
                hurst - 1.0 / alpha
            ));
        }
        Ok(ProcessSpec {
            kernel,
            measure: MeasureSpec::ZetaBands,
            alpha: FuncSpec::constant(alpha, domain),
            b: FuncSpec::constant(1.0, domain),
            hurst: Some(FuncSpec::constant(hurst, domain)),
            domain,
            stability: (alpha, alpha),
            alpha_holder: None,
            warnings,
        })
    }

    /// Declares the Hölder exponent of a non-smooth `alpha`.
    pub fn with_alpha_holder(mut self, beta: f64) -> Self {
        self.alpha_holder = Some(beta);
        self
    }

    pub fn kind(&self) -> ProcessKind {
        match self.kernel {
            Kernel::Levy => ProcessKind::Levy,
            Kernel::Lmmm { .. } => ProcessKind::Lmmm,
            Kernel::Lfsm { .. } => ProcessKind::LfsmControl,
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn alpha_at(&self, u: f64) -> Result<f64, KernelError> {
        let a = self.alpha.eval(u)?;
        if !(a > 0.0 && a < 2.0) {
            return Err(KernelError::Invalid(format!("alpha({u}) = {a} outside (0,2)")));
        }
        Ok(a)
    }

    /// Localisability exponent `h(t)`: `1/alpha(t)` for Lévy, `H(t)` otherwise.
    pub fn localisability(&self, t: f64) -> Result<f64, KernelError> {
        match &self.hurst {
            Some(h) if self.kind() != ProcessKind::Levy => Ok(h.eval(t)?),
            _ => Ok(1.0 / self.alpha_at(t)?),
        }
    }

    /// Largest `|w(x)^{1/alpha(u)} f(t, u, x)|` over the given points.
    pub fn max_weighted_kernel(&self, grid: &[f64], points: &[f64], weights: &[f64]) -> Result<f64, KernelError> {
        let mut best = 0.0f64;
        for &t in grid {
            let a = 1.0 / self.alpha_at(t)?;
            let section = self.kernel.section(t)?;
            for (&x, &w) in points.iter().zip(weights) {
                best = best.max((w.powf(a) * section.eval(t, x)).abs());
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};

    #[test]
    fn sigma_monte_carlo_agrees_with_quadrature() {
        let mut rng = substream(11, 0, Stream::Auxiliary);
        for &(alpha, hurst) in &[(1.7, 0.73), (1.5, 0.8), (1.9, 0.6)] {
            let q = sigma_lmmm(alpha, hurst).unwrap();
            let (mc, se) = sigma_lmmm_monte_carlo(alpha, hurst, 200_000, &mut rng).unwrap();
            assert!((mc - q).abs() <= 4.0 * se + 1e-12, "{alpha} {hurst}: {mc} +- {se} vs {q}");
            assert!((mc / q - 1.0).abs() < 0.005);
        }
    }

    fn unit() -> (f64, f64) {
        (0.0, 1.0)
    }

    #[test]
    fn levy_indicator_convention() {
        let (k, m) = levy_kernel();
        assert_eq!(k.evaluate(0.5, 0.2, 0.3).unwrap(), 1.0);
        assert_eq!(k.evaluate(0.5, 0.9, 0.7).unwrap(), 0.0);
        assert_eq!(k.evaluate(0.0, 0.4, 0.0).unwrap(), 1.0);
        assert_eq!(k.evaluate(0.5, 0.4, 0.5).unwrap(), 1.0);
        assert_eq!(m.weight(0.3), 1.0);
    }

    #[test]
    fn lmmm_degenerate_and_unit_values() {
        // H - 1/alpha = 0
        let alpha = FuncSpec::parse("1.6", unit()).unwrap();
        let h = FuncSpec::parse("0.625", unit()).unwrap();
        let (k, _) = lmmm_kernel(&alpha, &h);
        for &x in &[-3.2, 0.4, 0.9, 17.0] {
            assert_eq!(k.evaluate(0.7, 0.3, x).unwrap(), 0.0);
        }
        let h = FuncSpec::parse("0.8", unit()).unwrap();
        let (k, _) = lmmm_kernel(&alpha, &h);
        assert_eq!(k.evaluate(1.0, 0.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn basel_masses_sum_to_one() {
        let norm = 6.0 / (PI * PI);
        let head: f64 = (1..=1_000_000u64).rev().map(|j| norm / (j as f64 * j as f64)).sum();
        let tail = norm * trigamma_large(1_000_001.0);
        assert!((head + tail - 1.0).abs() < 1e-12);
        let table = band_cdf();
        assert!((table[0] - norm).abs() < 1e-14);
        assert!((table[1] - norm * 1.25).abs() < 1e-14);
    }

    #[test]
    fn band_frequencies_match_law() {
        let mut rng = substream(1, 0, Stream::Points);
        let n = 1_000_000;
        let mut counts = [0u64; 11];
        for _ in 0..n {
            let j = sample_band(&mut rng);
            if j <= 10 {
                counts[j as usize] += 1;
            }
        }
        for (j, &c) in counts.iter().enumerate().skip(1) {
            let p = 6.0 / (PI * PI * (j * j) as f64);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let freq = c as f64 / n as f64;
            assert!((freq - p).abs() < 3.0 * se, "band {j}: {freq} vs {p}");
        }
    }

    #[test]
    fn band_points_and_weights() {
        let mut rng = substream(2, 0, Stream::Points);
        for _ in 0..10_000 {
            let (x, w) = MeasureSpec::ZetaBands.sample(&mut rng);
            assert!(w > 0.0);
            assert_eq!(w, MeasureSpec::ZetaBands.weight(x));
        }
    }

    #[test]
    fn balanced_reduces_to_symmetric() {
        let alpha = 1.6;
        let hurst = 0.8;
        let lfsm = lfsm_kernel(alpha, hurst, 1.0, 1.0).unwrap();
        let a = FuncSpec::constant(alpha, unit());
        let h = FuncSpec::constant(hurst, unit());
        let (lmmm, _) = lmmm_kernel(&a, &h);
        let mut rng = substream(3, 0, Stream::Auxiliary);
        for _ in 0..100 {
            let t: f64 = 4.0 * rng.random::<f64>() - 2.0;
            let x: f64 = 10.0 * rng.random::<f64>() - 5.0;
            let lhs = lfsm.evaluate(t, 0.5, x).unwrap();
            let rhs = lmmm.evaluate(t, 0.5, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "t {t} x {x}");
        }
    }

    #[test]
    fn one_sided_lfsm_vanishes_right_of_t() {
        let k = lfsm_kernel(1.5, 0.8, 1.0, 0.0).unwrap();
        assert_eq!(k.evaluate(0.5, 0.0, 0.9).unwrap(), 0.0);
        assert_eq!(k.evaluate(0.5, 0.0, 3.0).unwrap(), 0.0);
        for &x in &[-2.0, 0.3, 5.0] {
            assert_eq!(k.evaluate(0.0, 0.0, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn kernels_finite_on_random_triples() {
        let alpha = FuncSpec::parse("1.7+0.2*sin(2*pi*t)", unit()).unwrap();
        let hurst = FuncSpec::parse("0.7+0.1*t", unit()).unwrap();
        let kernels = [
            levy_kernel(),
            lmmm_kernel(&alpha, &hurst),
            (lfsm_kernel(1.2, 0.4, 1.0, -0.5).unwrap(), MeasureSpec::ZetaBands),
        ];
        let mut rng = substream(4, 0, Stream::Auxiliary);
        for (k, m) in &kernels {
            for _ in 0..100_000 {
                let t: f64 = rng.random();
                let u: f64 = rng.random();
                let (x, _) = m.sample(&mut rng);
                assert!(!k.evaluate(t, u, x).unwrap().is_nan());
            }
        }
    }

    #[test]
    fn sigma_degenerate_is_zero() {
        assert_eq!(sigma_lmmm(1.6, 0.625).unwrap(), 0.0);
    }

    #[test]
    fn sigma_integrand_is_reflection_symmetric() {
        let kappa = 0.8 - 1.0 / 1.6;
        for k in 0..200 {
            let x = -20.0 + 0.2037 * k as f64;
            let a = symmetric_increment_pow(x, 1.0 - x, kappa, 1.6);
            let b = symmetric_increment_pow(1.0 - x, x, kappa, 1.6);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "x {x}: {a} vs {b}");
        }
    }

    #[test]
    fn sigma_against_stratified_monte_carlo() {
        // independent oracle: stratified sampling on (0,1) plus a Pareto map of
        // (1, inf) matched to the tail exponent
        let alpha = 1.6;
        let hurst = 0.8;
        let kappa = hurst - 1.0 / alpha;
        let g = |x: f64| ((1.0 - x).abs().powf(kappa) - x.abs().powf(kappa)).abs().powf(alpha);
        let n = 10_000_000 / 2;
        let mut rng = substream(5, 0, Stream::Auxiliary);
        let mut middle = 0.0;
        for i in 0..n {
            let x = (i as f64 + rng.random::<f64>()) / n as f64;
            middle += g(x);
        }
        middle /= n as f64;
        let beta = (1.0 - kappa) * alpha - 1.0;
        let mut tail = 0.0;
        for i in 0..n {
            let u = (i as f64 + rng.random::<f64>()) / n as f64;
            let x = u.powf(-1.0 / beta);
            tail += g(x) / (beta * x.powf(-beta - 1.0));
        }
        tail /= n as f64;
        let mc = (middle + 2.0 * tail).powf(1.0 / alpha);
        let quad = sigma_lmmm(alpha, hurst).unwrap();
        assert!(quad > 0.0);
        assert!(((quad - mc) / mc).abs() < 0.005, "{quad} vs {mc}");
    }

    #[test]
    fn sigma_finite_for_negative_exponent() {
        let s = sigma_lmmm(1.5, 0.4).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn spec_validation() {
        let alpha = FuncSpec::parse("1.5+0.3*sin(2*pi*t)", unit()).unwrap();
        let one = FuncSpec::constant(1.0, unit());
        assert!(ProcessSpec::levy(alpha.clone(), one.clone(), unit(), (1.1, 1.9)).is_ok());
        assert!(ProcessSpec::levy(alpha.clone(), one.clone(), unit(), (1.3, 1.9)).is_err());
        assert!(ProcessSpec::levy(alpha.clone(), one.clone(), (0.0, 2.0), (1.1, 1.9)).is_err());
        assert!(ProcessSpec::levy(alpha.clone(), one.clone(), unit(), (1.1, 2.0)).is_err());

        let hurst = FuncSpec::parse("0.55", unit()).unwrap();
        let alpha = FuncSpec::parse("1.5", unit()).unwrap();
        let spec = ProcessSpec::lmmm(alpha.clone(), hurst, one.clone(), unit(), (1.5, 1.5)).unwrap();
        assert_eq!(spec.warnings().len(), 1);
        let bad_h = FuncSpec::parse("1.2", unit()).unwrap();
        assert!(ProcessSpec::lmmm(alpha, bad_h, one, unit(), (1.5, 1.5)).is_err());
    }

    #[test]
    fn localisability_exponents() {
        let unit_b = FuncSpec::constant(1.0, unit());
        let levy = ProcessSpec::levy(FuncSpec::constant(1.5, unit()), unit_b.clone(), unit(), (1.5, 1.5)).unwrap();
        assert!((levy.localisability(0.3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let lmmm = ProcessSpec::lmmm(
            FuncSpec::constant(1.7, unit()),
            FuncSpec::parse("0.7+0.1*t", unit()).unwrap(),
            unit_b,
            unit(),
            (1.5, 1.9),
        )
        .unwrap();
        assert!((lmmm.localisability(0.5).unwrap() - 0.75).abs() < 1e-15);
    }
}
