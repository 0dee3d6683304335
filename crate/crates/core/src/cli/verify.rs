//! The acceptance suite: closed-form constants against quadrature, the series
//! against an independent stable sampler, moment scaling, Hölder exponents,
//! the increment characteristic function, condition probes, determinism and
//! the expression parser.

use std::collections::BTreeMap;
use std::f64::consts::{E, FRAC_PI_2};
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;

use crate::engine::{build_environment, DiagonalEvaluator, SeriesConfig};
use crate::estimation::{
    condition_probe, ecf_compare, ecf_compare_closed_form, ks_two_sample, par_map_indexed, Condition,
    HolderEstimate, MonteCarlo,
};
use crate::expr::{parse_expr, ExprError, FuncSpec};
use crate::kernels::{sigma_lmmm, sigma_lmmm_monte_carlo, ProcessSpec};
use crate::quad::QuadratureConfig;
use crate::rng::{mix, substream, Stream};
use crate::special::{c_alpha, c_alpha_quadrature, cms_sample, sin2_integral_with};

use super::commands::{holder_run, moment_tables, moments_run};
use super::config::{HolderConfig, LogSpec, MomentsConfig, ProcessConfig, ProcessTag, Profile, RunConfig, VerifyConfig};
use super::CliError;

pub const ALL_CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// One measured quantity and the interval it must fall in.
#[derive(Debug, Clone, PartialEq)]
pub struct SubCheck {
    pub label: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl SubCheck {
    fn at_most(label: impl Into<String>, value: f64, upper: f64) -> Self {
        SubCheck {
            label: label.into(),
            value,
            lower: None,
            upper: Some(upper),
        }
    }

    fn within(label: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        SubCheck {
            label: label.into(),
            value,
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite()
            && self.lower.is_none_or(|l| self.value >= l)
            && self.upper.is_none_or(|u| self.value <= u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub criterion: u8,
    pub name: &'static str,
    pub checks: Vec<SubCheck>,
    /// Constants and estimates worth keeping in the manifest.
    pub derived: BTreeMap<String, f64>,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(SubCheck::passed)
    }

    /// `criterion 3 PASS moment scaling, Lévy: ...`.
    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "criterion {:>2} {} {}:",
            self.criterion,
            if self.passed() { "PASS" } else { "FAIL" },
            self.name
        );
        for (k, s) in self.checks.iter().enumerate() {
            let bound = match (s.lower, s.upper) {
                (Some(l), Some(u)) => format!("in [{l:.4e}, {u:.4e}]"),
                (None, Some(u)) => format!("<= {u:.4e}"),
                (Some(l), None) => format!(">= {l:.4e}"),
                (None, None) => String::new(),
            };
            let sep = if k == 0 { " " } else { "; " };
            let mark = if s.passed() { "" } else { " (failed)" };
            let _ = write!(line, "{sep}{} = {:.6e} {bound}{mark}", s.label, s.value);
        }
        let _ = write!(line, " [{:.1} s]", self.seconds);
        line
    }
}

/// Resolved verification parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub profile: Profile,
    pub criteria: Vec<u8>,
    pub seed: u64,
    pub workers: usize,
    pub norm_fault: f64,
    /// Used by the constant cross-check only.
    pub constant_quadrature: QuadratureConfig,
    /// Used by the characteristic function and the probes.
    pub quadrature: QuadratureConfig,
}

impl VerifySettings {
    pub fn from_config(
        vc: &VerifyConfig,
        seed: u64,
        workers: usize,
        quadrature: QuadratureConfig,
    ) -> Result<Self, CliError> {
        let criteria = vc.checks.clone().unwrap_or_else(|| ALL_CRITERIA.to_vec());
        if criteria.is_empty() {
            return Err(CliError::Config("verify.checks: list is empty".into()));
        }
        if let Some(bad) = criteria.iter().find(|c| !ALL_CRITERIA.contains(c)) {
            return Err(CliError::Config(format!("verify.checks: no criterion {bad}")));
        }
        let norm_fault = vc.norm_fault.unwrap_or(1.0);
        if !(norm_fault > 0.0) {
            return Err(CliError::Config("verify.norm_fault: must be positive".into()));
        }
        let constant_quadrature = vc.quadrature.unwrap_or(quadrature);
        constant_quadrature
            .validate()
            .map_err(|e| CliError::Config(format!("verify.quadrature: {e}")))?;
        Ok(VerifySettings {
            profile: vc.profile,
            criteria,
            seed,
            workers: workers.max(1),
            norm_fault,
            constant_quadrature,
            quadrature,
        })
    }

    /// Full profile at the given seed.
    pub fn full(seed: u64, workers: usize) -> Self {
        VerifySettings::from_config(&VerifyConfig::default(), seed, workers, QuadratureConfig::default())
            .expect("default settings are valid")
    }

    fn full_scale(&self) -> bool {
        self.profile == Profile::Full
    }

    fn series(&self, full: usize, quick: usize) -> SeriesConfig {
        SeriesConfig {
            norm_fault: self.norm_fault,
            ..SeriesConfig::with_terms(if self.full_scale() { full } else { quick })
        }
    }

    fn count(&self, full: usize, quick: usize) -> usize {
        if self.full_scale() {
            full
        } else {
            quick
        }
    }

    fn seed_for(&self, criterion: u64) -> u64 {
        mix(self.seed, criterion)
    }
}

const SMOOTH_ALPHA: &str = "1.5+0.3*sin(2*pi*t)";
const LMMM_ALPHA: &str = "1.7+0.2*sin(2*pi*t)";
const LMMM_HURST: &str = "0.7+0.1*t";
const ROUGH_ALPHA: &str = "0.8+0.1*abs(t-0.5)^0.5";

fn process(kind: ProcessTag, alpha: &str, hurst: Option<&str>, stability: [f64; 2]) -> ProcessConfig {
    ProcessConfig {
        kind,
        alpha: alpha.into(),
        b: "1".into(),
        hurst: hurst.map(Into::into),
        domain: [0.0, 1.0],
        stability: Some(stability),
        alpha_holder: None,
        b_plus: 1.0,
        b_minus: 1.0,
    }
}

fn dyadic(start_exp: i32, count: i32) -> LogSpec {
    LogSpec::Powers {
        start_exp,
        stop_exp: start_exp - count + 1,
        base: 2.0,
    }
}

/// Moment-scaling run for the varying-alpha Lévy motion.
pub fn levy_moments_config(s: &VerifySettings) -> RunConfig {
    RunConfig {
        process: Some(process(ProcessTag::Levy, SMOOTH_ALPHA, None, [1.2, 1.8])),
        series: s.series(20_000, 4_000),
        m_paths: s.count(5_000, 500),
        seed: s.seed_for(3),
        moments: Some(MomentsConfig {
            t: 0.3,
            eta: 0.5,
            eps: dyadic(-4, 7),
        }),
        ..RunConfig::default()
    }
}

/// Moment-scaling run for lmmm.
pub fn lmmm_moments_config(s: &VerifySettings) -> RunConfig {
    RunConfig {
        process: Some(process(ProcessTag::Lmmm, LMMM_ALPHA, Some(LMMM_HURST), [1.5, 1.9])),
        series: s.series(20_000, 4_000),
        m_paths: s.count(5_000, 500),
        seed: s.seed_for(4),
        moments: Some(MomentsConfig {
            t: 0.3,
            eta: 0.5,
            eps: dyadic(-4, 7),
        }),
        ..RunConfig::default()
    }
}

fn holder_config(s: &VerifySettings, criterion: u64, process: ProcessConfig, levels: LogSpec) -> RunConfig {
    RunConfig {
        process: Some(process),
        series: s.series(20_000, 4_000),
        m_paths: 100,
        seed: s.seed_for(criterion),
        holder: Some(HolderConfig {
            t: vec![0.5],
            r_levels: levels,
            bootstrap: s.count(2_000, 200),
            confidence: 0.95,
        }),
        ..RunConfig::default()
    }
}

/// Smooth alpha >= 1 at `t = 0.5`; `alpha(0.5) = 1.5`.
pub fn smooth_holder_config(s: &VerifySettings) -> RunConfig {
    holder_config(s, 5, process(ProcessTag::Levy, SMOOTH_ALPHA, None, [1.2, 1.8]), dyadic(-2, 11))
}

/// Rough alpha < 1 with Hölder exponent 1/2 at `t = 0.5`.
pub fn rough_holder_config(s: &VerifySettings) -> RunConfig {
    let mut p = process(ProcessTag::Levy, ROUGH_ALPHA, None, [0.8, 0.9]);
    p.alpha_holder = Some(0.5);
    holder_config(s, 6, p, dyadic(-10, 9))
}

pub fn lmmm_holder_config(s: &VerifySettings) -> RunConfig {
    holder_config(
        s,
        7,
        process(ProcessTag::Lmmm, LMMM_ALPHA, Some(LMMM_HURST), [1.5, 1.9]),
        dyadic(-2, 11),
    )
}

#[derive(Default)]
struct Cache {
    levy_moments: Option<String>,
    smooth: Option<HolderEstimate>,
    rough: Option<HolderEstimate>,
}

fn single_holder(cfg: &RunConfig, workers: usize) -> Result<HolderEstimate, CliError> {
    let (_, mut v) = holder_run(cfg, workers)?;
    Ok(v.remove(0))
}

/// Runs the selected criteria in order.
pub fn run_checks(s: &VerifySettings) -> Result<Vec<CheckOutcome>, CliError> {
    let mut cache = Cache::default();
    let mut out = Vec::with_capacity(s.criteria.len());
    for &c in &s.criteria {
        let start = Instant::now();
        let (name, checks, derived) = match c {
            1 => constants(s)?,
            2 => stable_oracle(s)?,
            3 => levy_moments(s, &mut cache)?,
            4 => lmmm_moments(s)?,
            5 => smooth_holder(s, &mut cache)?,
            6 => rough_holder(s, &mut cache)?,
            7 => holder_bounds(s, &mut cache)?,
            8 => characteristic_function(s)?,
            9 => probes(s)?,
            10 => determinism(s, &mut cache)?,
            11 => parser_suite(),
            _ => return Err(CliError::Config(format!("no criterion {c}"))),
        };
        out.push(CheckOutcome {
            criterion: c,
            name,
            checks,
            derived,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(out)
}

type Outcome = (&'static str, Vec<SubCheck>, BTreeMap<String, f64>);

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

fn constants(s: &VerifySettings) -> Result<Outcome, CliError> {
    let q = &s.constant_quadrature;
    let mut worst: f64 = 0.0;
    let mut derived = BTreeMap::new();
    for k in 0..20 {
        let eta = 0.05 + 0.1 * k as f64;
        let closed = c_alpha(eta).map_err(numerical)?;
        // a failed quadrature counts as a failed comparison
        let gap = match c_alpha_quadrature(eta, q) {
            Ok(v) => (v - closed).abs(),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(gap);
        derived.insert(format!("c_alpha({eta:.2})"), closed);
    }
    let sin2 = sin2_integral_with(1.0, q).map(|v| (v - FRAC_PI_2).abs()).unwrap_or(f64::INFINITY);
    Ok((
        "closed-form constants vs quadrature",
        vec![
            SubCheck::at_most("max |c_alpha - quadrature| over 20 eta", worst, 1e-8),
            SubCheck::at_most("|sin2_integral(1) - pi/2|", sin2, 1e-8),
        ],
        derived,
    ))
}

fn stable_oracle(s: &VerifySettings) -> Result<Outcome, CliError> {
    let envs = s.count(20_000, 2_000);
    let draws = s.count(20_000, 2_000);
    let series = s.series(20_000, 2_000);
    let mut checks = Vec::new();
    let mut derived = BTreeMap::new();
    for (j, &alpha) in [0.8, 1.2, 1.5, 1.8].iter().enumerate() {
        let spec = ProcessSpec::levy(
            FuncSpec::constant(alpha, (0.0, 1.0)),
            FuncSpec::constant(1.0, (0.0, 1.0)),
            (0.0, 1.0),
            (alpha, alpha),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let seed = s.seed_for(200 + j as u64);
        let evaluator = DiagonalEvaluator::new(&spec, &series, &[1.0])?;
        let fkl = par_map_indexed(s.workers, envs, |p| {
            let env = build_environment(&spec, &series, seed, p as u64)?;
            Ok(evaluator.eval(&env)?[0])
        })?;
        let mut rng = substream(seed, 0, Stream::Auxiliary);
        let cms: Vec<f64> = (0..draws).map(|_| cms_sample(alpha, 1.0, &mut rng)).collect();
        let ks = ks_two_sample(&fkl, &cms)?;
        derived.insert(format!("ks_statistic(alpha={alpha})"), ks.statistic);
        checks.push(SubCheck::at_most(
            format!("KS statistic at alpha {alpha}"),
            ks.statistic,
            ks.critical_01,
        ));
    }
    Ok(("series vs independent stable sampler", checks, derived))
}

fn scaling_checks(
    cfg: &RunConfig,
    s: &VerifySettings,
    slope_tol: f64,
    ratio: (f64, f64),
) -> Result<(Vec<SubCheck>, BTreeMap<String, f64>, String), CliError> {
    let (_, me, fit) = moments_run(cfg, s.workers)?;
    let theory_slope = fit
        .theory_slope
        .ok_or_else(|| CliError::Numerical("no theoretical slope".into()))?;
    let prefactor = fit
        .prefactor_ratio()
        .ok_or_else(|| CliError::Numerical("no theoretical intercept".into()))?;
    let mut derived = BTreeMap::new();
    derived.insert("slope".into(), fit.slope);
    derived.insert("slope_se".into(), fit.slope_se);
    derived.insert("theory_slope".into(), theory_slope);
    derived.insert("prefactor_ratio".into(), prefactor);
    let checks = vec![
        SubCheck::at_most("|slope - eta h(t)|", (fit.slope - theory_slope).abs(), slope_tol),
        SubCheck::within("prefactor ratio", prefactor, ratio.0, ratio.1),
    ];
    let (table, summary) = moment_tables(&me, &fit);
    Ok((checks, derived, table + &summary))
}

fn levy_moments(s: &VerifySettings, cache: &mut Cache) -> Result<Outcome, CliError> {
    let cfg = levy_moments_config(s);
    let (checks, derived, csv) = scaling_checks(&cfg, s, 0.03, (0.85, 1.15))?;
    if s.workers == 1 {
        cache.levy_moments = Some(csv);
    }
    Ok(("moment scaling, multistable Lévy motion", checks, derived))
}

fn lmmm_moments(s: &VerifySettings) -> Result<Outcome, CliError> {
    let cfg = lmmm_moments_config(s);
    let (mut checks, mut derived, _) = scaling_checks(&cfg, s, 0.05, (0.8, 1.2))?;
    let spec = cfg.process_spec()?;
    let t = cfg.moments.as_ref().map(|m| m.t).unwrap_or(0.3);
    let alpha = spec.alpha_at(t).map_err(numerical)?;
    let hurst = 0.7 + 0.1 * t;
    let quad = sigma_lmmm(alpha, hurst).map_err(numerical)?;
    let mut rng = substream(s.seed_for(40), 0, Stream::Auxiliary);
    let (mc, se) = sigma_lmmm_monte_carlo(alpha, hurst, 200_000, &mut rng).map_err(numerical)?;
    derived.insert("sigma_quadrature".into(), quad);
    derived.insert("sigma_monte_carlo".into(), mc);
    derived.insert("sigma_monte_carlo_se".into(), se);
    checks.push(SubCheck::at_most("|sigma MC / quadrature - 1|", (mc / quad - 1.0).abs(), 0.005));
    Ok(("moment scaling, lmmm", checks, derived))
}

fn holder_derived(h: &HolderEstimate) -> BTreeMap<String, f64> {
    let mut d = BTreeMap::new();
    d.insert("estimate".into(), h.estimate);
    d.insert("ci_lo".into(), h.ci.0);
    d.insert("ci_hi".into(), h.ci.1);
    d.insert("drop_count".into(), h.drop_count as f64);
    d
}

fn target_of(h: &HolderEstimate) -> Result<f64, CliError> {
    h.theory()
        .ok_or_else(|| CliError::Numerical(format!("no theoretical exponent at t = {}: {}", h.t, h.note)))
}

fn smooth_holder(s: &VerifySettings, cache: &mut Cache) -> Result<Outcome, CliError> {
    let h = single_holder(&smooth_holder_config(s), s.workers)?;
    let target = target_of(&h)?;
    let checks = vec![SubCheck::at_most("|estimate - 1/alpha(0.5)|", (h.estimate - target).abs(), 0.1)];
    let derived = holder_derived(&h);
    cache.smooth = Some(h);
    Ok(("Hölder exponent, smooth alpha >= 1", checks, derived))
}

fn rough_holder(s: &VerifySettings, cache: &mut Cache) -> Result<Outcome, CliError> {
    let h = single_holder(&rough_holder_config(s), s.workers)?;
    let target = target_of(&h)?;
    let checks = vec![SubCheck::at_most(
        "|estimate - min(1/alpha, 1/2)|",
        (h.estimate - target).abs(),
        0.1,
    )];
    let derived = holder_derived(&h);
    cache.rough = Some(h);
    Ok(("Hölder exponent, rough alpha < 1", checks, derived))
}

fn holder_bounds(s: &VerifySettings, cache: &mut Cache) -> Result<Outcome, CliError> {
    let smooth = match cache.smooth.take() {
        Some(h) => h,
        None => single_holder(&smooth_holder_config(s), s.workers)?,
    };
    let rough = match cache.rough.take() {
        Some(h) => h,
        None => single_holder(&rough_holder_config(s), s.workers)?,
    };
    let lmmm = single_holder(&lmmm_holder_config(s), s.workers)?;
    let mut checks = Vec::new();
    let mut derived = BTreeMap::new();
    for (label, h) in [("smooth Lévy", &smooth), ("rough Lévy", &rough), ("lmmm", &lmmm)] {
        let bound = target_of(h)? + 0.1;
        checks.push(SubCheck::at_most(format!("{label} upper CI edge"), h.ci.1, bound));
        for (k, v) in holder_derived(h) {
            derived.insert(format!("{label} {k}"), v);
        }
    }
    Ok(("Hölder upper bounds", checks, derived))
}

fn characteristic_function(s: &VerifySettings) -> Result<Outcome, CliError> {
    let (t, r) = (0.3, 0.5f64.powi(6));
    let v: Vec<f64> = (0..26).map(|k| 5.0 * k as f64 / 25.0).collect();
    let paths = s.count(10_000, 1_000);
    let series = s.series(20_000, 4_000);
    let smooth = RunConfig {
        process: Some(process(ProcessTag::Levy, SMOOTH_ALPHA, None, [1.2, 1.8])),
        ..RunConfig::default()
    }
    .process_spec()?;
    let constant = RunConfig {
        process: Some(process(ProcessTag::Levy, "1.5", None, [1.5, 1.5])),
        ..RunConfig::default()
    }
    .process_spec()?;
    let mc = MonteCarlo::new(paths, series, s.seed_for(8)).with_workers(s.workers);
    let varying = ecf_compare(&smooth, t, r, &v, &mc, &s.quadrature)?;
    let mc = MonteCarlo::new(paths, series, s.seed_for(80)).with_workers(s.workers);
    let control = ecf_compare_closed_form(&constant, t, r, &v, &mc)?;
    let mut derived = BTreeMap::new();
    derived.insert("sup_gap".into(), varying.sup_gap);
    derived.insert("control_sup_gap".into(), control.sup_gap);
    Ok((
        "increment characteristic function",
        vec![
            SubCheck::at_most("sup gap vs numeric CF", varying.sup_gap, 0.02),
            SubCheck::at_most("sup gap vs closed-form CF, constant alpha", control.sup_gap, 0.02),
        ],
        derived,
    ))
}

fn probes(s: &VerifySettings) -> Result<Outcome, CliError> {
    let spec = RunConfig {
        process: Some(process(ProcessTag::Levy, SMOOTH_ALPHA, None, [1.2, 1.8])),
        ..RunConfig::default()
    }
    .process_spec()?;
    let mut rng = substream(s.seed_for(9), 0, Stream::Auxiliary);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t: f64 = rng.random_range(0.01..0.95);
        let r: f64 = rng.random_range(1e-4..(1.0 - t));
        for (cond, exact) in [(Condition::C9, 1.0), (Condition::Cu14, 1.0), (Condition::Cu15, 0.0)] {
            let got = condition_probe(&spec, cond, t, &[r], &s.quadrature)?[0].value;
            worst = worst.max((got - exact).abs());
        }
    }
    Ok((
        "condition probes, Lévy kernel",
        vec![SubCheck::at_most("max |probe - exact| over C9, Cu14, Cu15", worst, 0.0)],
        BTreeMap::new(),
    ))
}

fn determinism(s: &VerifySettings, cache: &mut Cache) -> Result<Outcome, CliError> {
    let cfg = levy_moments_config(s);
    let render = |workers: usize| -> Result<String, CliError> {
        let (_, me, fit) = moments_run(&cfg, workers)?;
        let (a, b) = moment_tables(&me, &fit);
        Ok(a + &b)
    };
    let single = match cache.levy_moments.take() {
        Some(csv) => csv,
        None => render(1)?,
    };
    let eight = render(8)?;
    let same = if single == eight { 1.0 } else { 0.0 };
    Ok((
        "worker-count determinism",
        vec![SubCheck::within("CSV identical for 1 and 8 workers", same, 1.0, 1.0)],
        BTreeMap::new(),
    ))
}

enum Expect {
    Value(&'static str, f64, f64),
    SyntaxAt(&'static str, usize),
    UnknownAt(&'static str, usize),
    Arity(&'static str, usize, usize),
}

const PARSER_CASES: &[Expect] = &[
    Expect::Value("2+3*4", 0.0, 14.0),
    Expect::Value("2^3^2", 0.0, 512.0),
    Expect::Value("-2^2", 0.0, -4.0),
    Expect::Value("8-3-2", 0.0, 3.0),
    Expect::Value("16/4/2", 0.0, 2.0),
    Expect::Value("2^-1", 0.0, 0.5),
    Expect::Value("(1+2)*3", 0.0, 9.0),
    Expect::Value("t^2", 3.0, 9.0),
    Expect::Value("1e-3*1000", 0.0, 1.0),
    Expect::Value("e", 0.0, E),
    Expect::Value("min(2,t)+max(2,t)", 3.0, 5.0),
    Expect::Value("abs(t-0.5)^0.5", 0.5, 0.0),
    Expect::SyntaxAt("1.5+", 4),
    Expect::SyntaxAt("2*)", 2),
    Expect::SyntaxAt("(1+2", 4),
    Expect::SyntaxAt("1 2", 2),
    Expect::SyntaxAt("", 0),
    Expect::SyntaxAt("2 # 3", 2),
    Expect::UnknownAt("x+1", 0),
    Expect::UnknownAt("1+tan(t)", 2),
    Expect::Arity("min(1)", 2, 1),
    Expect::Arity("sin(1,2)", 1, 2),
];

/// Number of parser cases whose outcome differs from the expectation.
pub fn parser_failures() -> usize {
    PARSER_CASES
        .iter()
        .filter(|case| {
            !match **case {
                Expect::Value(src, t, want) => parse_expr(src).and_then(|a| a.eval(t)) == Ok(want),
                Expect::SyntaxAt(src, at) => {
                    matches!(parse_expr(src), Err(ExprError::Syntax { offset, .. }) if offset == at)
                }
                Expect::UnknownAt(src, at) => {
                    matches!(parse_expr(src), Err(ExprError::UnknownIdentifier { offset, .. }) if offset == at)
                }
                Expect::Arity(src, e, f) => matches!(
                    parse_expr(src),
                    Err(ExprError::Arity { expected, found, .. }) if expected == e && found == f
                ),
            }
        })
        .count()
}

fn parser_suite() -> Outcome {
    let mut derived = BTreeMap::new();
    derived.insert("cases".into(), PARSER_CASES.len() as f64);
    (
        "expression parser",
        vec![SubCheck::at_most("failed parser cases", parser_failures() as f64, 0.0)],
        derived,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_cases_hold() {
        assert_eq!(parser_failures(), 0);
    }

    #[test]
    fn acceptance_configs_are_valid() {
        let s = VerifySettings::full(0, 1);
        for cfg in [
            levy_moments_config(&s),
            lmmm_moments_config(&s),
            smooth_holder_config(&s),
            rough_holder_config(&s),
            lmmm_holder_config(&s),
        ] {
            cfg.process_spec().unwrap();
        }
        let eps = levy_moments_config(&s).moments.unwrap().eps.values().unwrap();
        assert_eq!(eps.first(), Some(&0.0625));
        assert_eq!(eps.last(), Some(&(1.0 / 1024.0)));
    }

    #[test]
    fn unknown_criteria_are_rejected() {
        let vc = VerifyConfig {
            checks: Some(vec![12]),
            ..VerifyConfig::default()
        };
        assert!(VerifySettings::from_config(&vc, 0, 1, QuadratureConfig::default()).is_err());
    }

    #[test]
    fn cheap_criteria_pass() {
        let vc = VerifyConfig {
            checks: Some(vec![1, 9, 11]),
            ..VerifyConfig::default()
        };
        let s = VerifySettings::from_config(&vc, 0, 1, QuadratureConfig::default()).unwrap();
        for o in run_checks(&s).unwrap() {
            assert!(o.passed(), "{}", o.summary_line());
        }
    }
}
