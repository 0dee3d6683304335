//! Truncated Ferguson–Klass–LePage series.
//!
//! A [`PoissonEnvironment`] holds one realization of the arrival times
//! `Gamma_i`, points `V_i`, signs `gamma_i` and weights `w(V_i)`. The field is
//!
//! ```text
//! X(t, u) = b(u) C_{alpha(u)}^{1/alpha(u)} sum_i gamma_i Gamma_i^{-1/alpha(u)} w(V_i)^{1/alpha(u)} f(t, u, V_i)
//! ```
//!
//! and the multistable process is its diagonal `Y(t) = X(t, t)`.
//!
//! The series is cut after `N` terms. By default the discarded remainder is
//! replaced by a Gaussian field with the same covariance: conditionally on
//! `Gamma_N`, the discarded terms are a Poisson process of unit rate on
//! `(Gamma_N, inf)`, whose small-jump sum is close to Gaussian. That field is
//! carried by `M` extra points with normal coefficients and arrival values
//! drawn from a Pareto law on `(Gamma_N, inf)`, so that for every pair
//! `(t, u), (t', u')` the covariance
//! `int_{Gamma_N}^inf s^{-1/alpha(u) - 1/alpha(u')} ds E[w^{..} f f']` is exact.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{KernelError, KernelSection, ProcessSpec};
use crate::rng::{substream, Stream};
use crate::special::{c_alpha, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("grid point {t} is outside the process domain [{lo}, {hi}]")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },
    #[error("grid must be non-empty and strictly increasing")]
    BadGrid,
    #[error("non-finite field value at t = {t}, u = {u}")]
    NonFinite { t: f64, u: f64 },
    #[error("invalid series configuration: {0}")]
    Config(String),
}

/// What replaces the discarded series remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum TailMode {
    /// Plain truncation.
    Truncate,
    /// Gaussian remainder carried by `points` auxiliary points.
    Gaussian { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesConfig {
    pub n_terms: usize,
    pub tail: TailMode,
    /// Neumaier-compensated summation instead of plain ascending order.
    pub compensated: bool,
    /// Multiplier on `C_alpha^{1/alpha}`; 1 except for fault injection.
    #[doc(hidden)]
    pub norm_fault: f64,
}

pub const DEFAULT_TERMS: usize = 20_000;

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig::with_terms(DEFAULT_TERMS)
    }
}

impl SeriesConfig {
    /// `n` series terms and a Gaussian remainder on `n / 4` points.
    pub fn with_terms(n: usize) -> Self {
        SeriesConfig {
            n_terms: n,
            tail: TailMode::Gaussian {
                points: (n / 4).max(1),
            },
            compensated: false,
            norm_fault: 1.0,
        }
    }

    pub fn truncated(n: usize) -> Self {
        SeriesConfig {
            tail: TailMode::Truncate,
            ..SeriesConfig::with_terms(n)
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n_terms < 1 {
            return Err(EngineError::Config("n_terms must be at least 1".into()));
        }
        if let TailMode::Gaussian { points } = self.tail {
            if points < 1 {
                return Err(EngineError::Config("tail points must be at least 1".into()));
            }
        }
        if !(self.norm_fault > 0.0) {
            return Err(EngineError::Config("norm_fault must be positive".into()));
        }
        Ok(())
    }
}

/// Raw draws for the Gaussian remainder; coefficients depend on `Gamma_N`
/// and are rebuilt when an environment is cut shorter.
#[derive(Debug, Clone, PartialEq)]
struct TailDraws {
    uniforms: Vec<f64>,
    normals: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
    /// Pareto index of the sampled arrival values, `2 / d`.
    pareto: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct TailTerms {
    coef: Vec<f64>,
    log_ratio: Vec<f64>,
    points: Vec<f64>,
}

impl TailDraws {
    fn terms(&self, gamma_n: f64) -> TailTerms {
        let m = self.uniforms.len() as f64;
        let q = self.pareto;
        let mut coef = Vec::with_capacity(self.uniforms.len());
        let mut log_ratio = Vec::with_capacity(self.uniforms.len());
        let log_gamma_n = gamma_n.ln();
        let norm = 1.0 / (m * (q - 1.0)).sqrt();
        for j in 0..self.uniforms.len() {
            // s = Gamma_N U^{-1/(q-1)}, density (q-1) Gamma_N^{q-1} s^{-q}
            let log_s = log_gamma_n - self.uniforms[j].ln() / (q - 1.0);
            let c = self.normals[j] * norm * (0.5 * q * log_s - 0.5 * (q - 1.0) * log_gamma_n).exp();
            coef.push(c);
            log_ratio.push(self.weights[j].ln() - log_s);
        }
        TailTerms {
            coef,
            log_ratio,
            points: self.points.clone(),
        }
    }
}

/// One realization of the series ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonEnvironment {
    pub arrivals: Vec<f64>,
    pub points: Vec<f64>,
    pub signs: Vec<f64>,
    pub weights: Vec<f64>,
    /// `ln w_i - ln Gamma_i`.
    log_ratio: Vec<f64>,
    tail_draws: Option<TailDraws>,
    tail: Option<TailTerms>,
    pub seed: u64,
    pub index: u64,
}

/// Draws environment `index` under `seed`. Arrivals, points, signs and the
/// remainder come from four independent substreams, so the first `N` terms
/// of a longer environment coincide with an `N`-term one.
pub fn build_environment(
    spec: &ProcessSpec,
    cfg: &SeriesConfig,
    seed: u64,
    index: u64,
) -> Result<PoissonEnvironment, EngineError> {
    cfg.validate()?;
    let n = cfg.n_terms;
    let mut arrivals_rng = substream(seed, index, Stream::Arrivals);
    let mut points_rng = substream(seed, index, Stream::Points);
    let mut signs_rng = substream(seed, index, Stream::Signs);

    let mut arrivals = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut log_ratio = Vec::with_capacity(n);
    let mut gamma = 0.0;
    for _ in 0..n {
        let e: f64 = Exp1.sample(&mut arrivals_rng);
        gamma += e;
        let (x, w) = spec.measure.sample(&mut points_rng);
        let sign = if signs_rng.random::<bool>() { 1.0 } else { -1.0 };
        arrivals.push(gamma);
        points.push(x);
        signs.push(sign);
        weights.push(w);
        log_ratio.push(if w == 1.0 { -gamma.ln() } else { w.ln() - gamma.ln() });
    }

    let tail_draws = match cfg.tail {
        TailMode::Truncate => None,
        TailMode::Gaussian { points: m } => {
            let mut rng = substream(seed, index, Stream::Tail);
            let mut draws = TailDraws {
                uniforms: Vec::with_capacity(m),
                normals: Vec::with_capacity(m),
                points: Vec::with_capacity(m),
                weights: Vec::with_capacity(m),
                pareto: 2.0 / spec.stability.1,
            };
            for _ in 0..m {
                // (0, 1]
                draws.uniforms.push(1.0 - rng.random::<f64>());
                draws.normals.push(StandardNormal.sample(&mut rng));
                let (x, w) = spec.measure.sample(&mut rng);
                draws.points.push(x);
                draws.weights.push(w);
            }
            Some(draws)
        }
    };
    let tail = tail_draws.as_ref().map(|d| d.terms(gamma));
    Ok(PoissonEnvironment {
        arrivals,
        points,
        signs,
        weights,
        log_ratio,
        tail_draws,
        tail,
        seed,
        index,
    })
}

impl PoissonEnvironment {
    pub fn n_terms(&self) -> usize {
        self.arrivals.len()
    }

    pub fn has_gaussian_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// The first `n` terms, with the remainder (if any) re-attached at `Gamma_n`.
    pub fn truncated(&self, n: usize) -> PoissonEnvironment {
        let n = n.min(self.n_terms()).max(1);
        let gamma_n = self.arrivals[n - 1];
        PoissonEnvironment {
            arrivals: self.arrivals[..n].to_vec(),
            points: self.points[..n].to_vec(),
            signs: self.signs[..n].to_vec(),
            weights: self.weights[..n].to_vec(),
            log_ratio: self.log_ratio[..n].to_vec(),
            tail: self.tail_draws.as_ref().map(|d| d.terms(gamma_n)),
            tail_draws: self.tail_draws.clone(),
            seed: self.seed,
            index: self.index,
        }
    }

    /// Every sign (and remainder coefficient) flipped.
    pub fn negated(&self) -> PoissonEnvironment {
        let mut env = self.clone();
        env.signs.iter_mut().for_each(|s| *s = -*s);
        if let Some(d) = env.tail_draws.as_mut() {
            d.normals.iter_mut().for_each(|z| *z = -*z);
        }
        if let Some(t) = env.tail.as_mut() {
            t.coef.iter_mut().for_each(|c| *c = -*c);
        }
        env
    }

    /// Remainder points, empty without a Gaussian tail.
    pub fn tail_points(&self) -> &[f64] {
        self.tail.as_ref().map_or(&[], |t| &t.points)
    }
}

struct Accumulator {
    sum: f64,
    comp: f64,
    compensated: bool,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Accumulator {
            sum: 0.0,
            comp: 0.0,
            compensated,
        }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        if self.compensated {
            let t = self.sum + x;
            if self.sum.abs() >= x.abs() {
                self.comp += (self.sum - t) + x;
            } else {
                self.comp += (x - t) + self.sum;
            }
            self.sum = t;
        } else {
            self.sum += x;
        }
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
fn series_sum<F: Fn(f64) -> f64>(
    coef: &[f64],
    log_ratio: &[f64],
    points: &[f64],
    inv_alpha: f64,
    kernel: F,
    acc: &mut Accumulator,
) {
    for i in 0..coef.len() {
        let f = kernel(points[i]);
        if f != 0.0 {
            acc.add(coef[i] * (inv_alpha * log_ratio[i]).exp() * f);
        }
    }
}

/// Per-`u` factors of the field: `1/alpha(u)`, `b(u) C^{1/alpha(u)}` and the
/// frozen kernel.
#[derive(Debug, Clone, Copy)]
pub struct FieldSection {
    pub inv_alpha: f64,
    pub scale: f64,
    pub kernel: KernelSection,
}

impl FieldSection {
    pub fn new(spec: &ProcessSpec, cfg: &SeriesConfig, u: f64) -> Result<Self, EngineError> {
        let alpha = spec.alpha_at(u)?;
        let inv_alpha = 1.0 / alpha;
        let b = spec.b.eval(u).map_err(KernelError::from)?;
        let scale = b * c_alpha(alpha)?.powf(inv_alpha) * cfg.norm_fault;
        Ok(FieldSection {
            inv_alpha,
            scale,
            kernel: spec.kernel.section(u)?,
        })
    }
}

/// `X(t, u)` for a prepared section, summed in ascending index order.
pub fn eval_section(env: &PoissonEnvironment, section: &FieldSection, t: f64, compensated: bool) -> f64 {
    let mut acc = Accumulator::new(compensated);
    let a = section.inv_alpha;
    match section.kernel {
        KernelSection::Indicator => {
            let k = |x: f64| if x >= 0.0 && x <= t { 1.0 } else { 0.0 };
            series_sum(&env.signs, &env.log_ratio, &env.points, a, k, &mut acc);
            if let Some(tail) = &env.tail {
                series_sum(&tail.coef, &tail.log_ratio, &tail.points, a, k, &mut acc);
            }
        }
        KernelSection::Symmetric { kappa } => {
            if kappa != 0.0 {
                let k = |x: f64| (t - x).abs().powf(kappa) - x.abs().powf(kappa);
                series_sum(&env.signs, &env.log_ratio, &env.points, a, k, &mut acc);
                if let Some(tail) = &env.tail {
                    series_sum(&tail.coef, &tail.log_ratio, &tail.points, a, k, &mut acc);
                }
            }
        }
        other => {
            let k = |x: f64| other.eval(t, x);
            series_sum(&env.signs, &env.log_ratio, &env.points, a, k, &mut acc);
            if let Some(tail) = &env.tail {
                series_sum(&tail.coef, &tail.log_ratio, &tail.points, a, k, &mut acc);
            }
        }
    }
    section.scale * acc.total()
}

/// `X(t, u)` for one environment.
pub fn eval_field(
    env: &PoissonEnvironment,
    spec: &ProcessSpec,
    cfg: &SeriesConfig,
    t: f64,
    u: f64,
) -> Result<f64, EngineError> {
    let section = FieldSection::new(spec, cfg, u)?;
    let v = eval_section(env, &section, t, cfg.compensated);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EngineError::NonFinite { t, u })
    }
}

/// `Y(t) = X(t, t)`.
pub fn eval_diagonal(
    env: &PoissonEnvironment,
    spec: &ProcessSpec,
    cfg: &SeriesConfig,
    t: f64,
) -> Result<f64, EngineError> {
    eval_field(env, spec, cfg, t, t)
}

/// One path of the diagonal process on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

fn check_grid(spec: &ProcessSpec, grid: &[f64]) -> Result<(), EngineError> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(EngineError::BadGrid);
    }
    let (lo, hi) = spec.domain;
    for &t in grid {
        if !(t >= lo && t <= hi) {
            return Err(EngineError::OutsideDomain { t, lo, hi });
        }
    }
    Ok(())
}

/// Diagonal evaluation on a fixed grid with the per-`u` factors
/// (`1/alpha(u)`, `b(u) C^{1/alpha(u)}`, kernel section) computed once and
/// reused for every environment.
#[derive(Debug, Clone)]
pub struct DiagonalEvaluator {
    grid: Vec<f64>,
    sections: Vec<FieldSection>,
    compensated: bool,
}

impl DiagonalEvaluator {
    pub fn new(spec: &ProcessSpec, cfg: &SeriesConfig, grid: &[f64]) -> Result<Self, EngineError> {
        cfg.validate()?;
        check_grid(spec, grid)?;
        let sections = grid
            .iter()
            .map(|&t| FieldSection::new(spec, cfg, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DiagonalEvaluator {
            grid: grid.to_vec(),
            sections,
            compensated: cfg.compensated,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn sections(&self) -> &[FieldSection] {
        &self.sections
    }

    pub fn eval(&self, env: &PoissonEnvironment) -> Result<Vec<f64>, EngineError> {
        self.grid
            .iter()
            .zip(&self.sections)
            .map(|(&t, section)| {
                let v = eval_section(env, section, t, self.compensated);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EngineError::NonFinite { t, u: t })
                }
            })
            .collect()
    }

    pub fn path(&self, env: &PoissonEnvironment) -> Result<PathSample, EngineError> {
        Ok(PathSample {
            grid: self.grid.clone(),
            values: self.eval(env)?,
            seed: env.seed,
            index: env.index,
        })
    }
}

/// `Y(t_k)` for every grid point, all from the same environment.
pub fn eval_diagonal_path(
    env: &PoissonEnvironment,
    spec: &ProcessSpec,
    cfg: &SeriesConfig,
    grid: &[f64],
) -> Result<PathSample, EngineError> {
    DiagonalEvaluator::new(spec, cfg, grid)?.path(env)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub n_terms: usize,
    pub pilot: usize,
    /// Largest `|Y_2N(t) - Y_N(t)|` over the grid and pilot environments.
    pub max_discrepancy: f64,
    /// `(sum_{i>N} i^{-2/d})^{1/2}` times the largest `|w^{1/alpha} f|`.
    pub proxy: f64,
    pub tail_sum: f64,
    pub kernel_bound: f64,
}

/// `sum_{i > n} i^{-p}` by the midpoint rule, accurate to `O(n^{-p-2})`.
pub fn power_tail_sum(n: usize, p: f64) -> f64 {
    (n as f64 + 0.5).powf(1.0 - p) / (p - 1.0)
}

/// Compares `N`-term and `2N`-term paths built from the same streams.
pub fn truncation_diagnostic(
    spec: &ProcessSpec,
    grid: &[f64],
    cfg: &SeriesConfig,
    seed: u64,
    pilot: usize,
) -> Result<TruncationReport, EngineError> {
    if pilot < 1 {
        return Err(EngineError::Config("pilot must be at least 1".into()));
    }
    let n = cfg.n_terms;
    // same remainder size, so the first N terms and the tail draws coincide
    let long_cfg = SeriesConfig {
        n_terms: 2 * n,
        ..*cfg
    };
    let evaluator = DiagonalEvaluator::new(spec, cfg, grid)?;
    let mut max_discrepancy = 0.0f64;
    let mut kernel_bound = 0.0f64;
    for p in 0..pilot {
        let long = build_environment(spec, &long_cfg, seed, p as u64)?;
        let short = long.truncated(n);
        let a = evaluator.eval(&long)?;
        let b = evaluator.eval(&short)?;
        for (x, y) in a.iter().zip(&b) {
            max_discrepancy = max_discrepancy.max((x - y).abs());
        }
        kernel_bound = kernel_bound.max(spec.max_weighted_kernel(grid, &short.points, &short.weights)?);
    }
    let tail_sum = power_tail_sum(n, 2.0 / spec.stability.1);
    Ok(TruncationReport {
        n_terms: n,
        pilot,
        max_discrepancy,
        proxy: tail_sum.sqrt() * kernel_bound,
        tail_sum,
        kernel_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FuncSpec;

    fn levy_const(alpha: f64) -> ProcessSpec {
        ProcessSpec::levy(
            FuncSpec::constant(alpha, (0.0, 1.0)),
            FuncSpec::constant(1.0, (0.0, 1.0)),
            (0.0, 1.0),
            (alpha, alpha),
        )
        .unwrap()
    }

    #[test]
    fn arrivals_increasing_and_deterministic() {
        let spec = levy_const(1.5);
        let cfg = SeriesConfig::with_terms(500);
        let env = build_environment(&spec, &cfg, 9, 4).unwrap();
        assert!(env.arrivals[0] > 0.0);
        assert!(env.arrivals.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(env.points.len(), 500);
        assert_eq!(env, build_environment(&spec, &cfg, 9, 4).unwrap());
        assert_ne!(env, build_environment(&spec, &cfg, 9, 5).unwrap());
    }

    #[test]
    fn first_arrival_is_unit_exponential() {
        let spec = levy_const(1.5);
        let cfg = SeriesConfig::truncated(1);
        let n = 100_000;
        let mut sum = 0.0;
        let mut signs = 0.0;
        for i in 0..n {
            let env = build_environment(&spec, &cfg, 21, i).unwrap();
            sum += env.arrivals[0];
            signs += env.signs[0];
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
        // Rademacher mean, 3 standard errors
        assert!((signs / n as f64).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn coupled_prefix_matches() {
        let spec = levy_const(1.2);
        let short = build_environment(&spec, &SeriesConfig::with_terms(100), 3, 0).unwrap();
        let long_cfg = SeriesConfig {
            n_terms: 200,
            ..SeriesConfig::with_terms(100)
        };
        let long = build_environment(&spec, &long_cfg, 3, 0).unwrap();
        assert_eq!(&long.arrivals[..100], &short.arrivals[..]);
        assert_eq!(&long.points[..100], &short.points[..]);
        assert_eq!(&long.signs[..100], &short.signs[..]);
        let cut = long.truncated(100);
        let cfg = SeriesConfig::with_terms(100);
        for &t in &[0.2, 0.7, 1.0] {
            let a = eval_diagonal(&cut, &spec, &cfg, t).unwrap();
            let b = eval_diagonal(&short, &spec, &cfg, t).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn levy_vanishes_at_zero_time() {
        let spec = levy_const(1.5);
        let cfg = SeriesConfig::with_terms(1000);
        let env = build_environment(&spec, &cfg, 1, 1).unwrap();
        // P(V_i = 0) = 0, so every indicator 1_[0,0](V_i) vanishes
        assert_eq!(eval_field(&env, &spec, &cfg, 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sign_flip_negates() {
        let alpha = FuncSpec::parse("1.5+0.3*sin(2*pi*t)", (0.0, 1.0)).unwrap();
        let spec = ProcessSpec::levy(alpha, FuncSpec::constant(1.0, (0.0, 1.0)), (0.0, 1.0), (1.2, 1.8)).unwrap();
        let cfg = SeriesConfig::with_terms(2000);
        let env = build_environment(&spec, &cfg, 5, 2).unwrap();
        let neg = env.negated();
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let a = eval_diagonal(&env, &spec, &cfg, t).unwrap();
            let b = eval_diagonal(&neg, &spec, &cfg, t).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn constant_alpha_levy_is_piecewise_constant() {
        let spec = levy_const(1.5);
        let cfg = SeriesConfig::with_terms(50);
        let env = build_environment(&spec, &cfg, 8, 0).unwrap();
        let mut jumps: Vec<f64> = env.points.iter().chain(env.tail_points()).copied().collect();
        jumps.sort_by(f64::total_cmp);
        let grid: Vec<f64> = (1..2000).map(|k| k as f64 / 2000.0).collect();
        let path = eval_diagonal_path(&env, &spec, &cfg, &grid).unwrap();
        for k in 1..grid.len() {
            let covered = jumps.iter().any(|&v| v > grid[k - 1] && v <= grid[k]);
            if !covered {
                assert_eq!(path.values[k], path.values[k - 1], "step {k}");
            }
        }
    }

    #[test]
    fn single_point_grid_matches_field() {
        let spec = levy_const(1.3);
        let cfg = SeriesConfig::with_terms(300);
        let env = build_environment(&spec, &cfg, 2, 2).unwrap();
        let path = eval_diagonal_path(&env, &spec, &cfg, &[0.4]).unwrap();
        assert_eq!(path.values[0], eval_field(&env, &spec, &cfg, 0.4, 0.4).unwrap());
        assert!(matches!(
            eval_diagonal_path(&env, &spec, &cfg, &[0.4, 0.3]),
            Err(EngineError::BadGrid)
        ));
        assert!(matches!(
            eval_diagonal_path(&env, &spec, &cfg, &[1.4]),
            Err(EngineError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn compensated_sum_agrees() {
        let spec = levy_const(1.9);
        let plain = SeriesConfig::with_terms(5000);
        let comp = SeriesConfig {
            compensated: true,
            ..plain
        };
        let env = build_environment(&spec, &plain, 4, 0).unwrap();
        let a = eval_diagonal(&env, &spec, &plain, 0.8).unwrap();
        let b = eval_diagonal(&env, &spec, &comp, 0.8).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn tail_proxy_behaviour() {
        let mut prev = f64::INFINITY;
        for &n in &[100, 1_000, 10_000, 100_000] {
            let v = power_tail_sum(n, 2.0 / 1.5);
            assert!(v < prev);
            prev = v;
        }
        assert!(power_tail_sum(10_000, 2.0 / 1.95) > power_tail_sum(10_000, 2.0 / 1.2));
        // midpoint rule against a direct partial sum
        let direct: f64 = (101..2_000_000u64).rev().map(|i| (i as f64).powf(-2.0)).sum::<f64>() + 1.0 / 2e6;
        assert!((power_tail_sum(100, 2.0) - direct).abs() < 1e-6);
    }

    #[test]
    fn truncation_discrepancy_within_proxy() {
        let spec = levy_const(1.5);
        let grid: Vec<f64> = (1..=20).map(|k| k as f64 / 20.0).collect();
        let report = truncation_diagnostic(&spec, &grid, &SeriesConfig::with_terms(10_000), 17, 4).unwrap();
        assert!(report.max_discrepancy < 10.0 * report.proxy, "{report:?}");
        let plain = truncation_diagnostic(&spec, &grid, &SeriesConfig::truncated(10_000), 17, 4).unwrap();
        assert!(plain.max_discrepancy < 10.0 * plain.proxy, "{plain:?}");
    }

    #[test]
    fn gaussian_tail_variance_is_exact() {
        // Var of the remainder at X(1) for constant alpha = d equals
        // C^{2/alpha} Gamma_N^{1-2/alpha} / (2/alpha - 1) for every environment
        let spec = levy_const(1.8);
        let cfg = SeriesConfig {
            n_terms: 1000,
            tail: TailMode::Gaussian { points: 400 },
            ..Default::default()
        };
        let env = build_environment(&spec, &cfg, 3, 3).unwrap();
        let tail = env.tail.as_ref().unwrap();
        let normals = &env.tail_draws.as_ref().unwrap().normals;
        let a = 1.0 / 1.8;
        // conditional variance given the draws: replace each normal by its variance
        let var: f64 = (0..normals.len())
            .map(|j| (tail.coef[j] / normals[j] * (a * tail.log_ratio[j]).exp()).powi(2))
            .sum();
        let gamma_n = *env.arrivals.last().unwrap();
        let expected = gamma_n.powf(1.0 - 2.0 * a) / (2.0 * a - 1.0);
        assert!(((var - expected) / expected).abs() < 1e-10, "{var} vs {expected}");
    }
}
