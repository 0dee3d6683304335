//! JSON run configuration and manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::SeriesConfig;
use crate::expr::{validate_range, FuncSpec};
use crate::kernels::ProcessSpec;
use crate::quad::QuadratureConfig;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessTag {
    Levy,
    Lmmm,
    LfsmControl,
}

fn default_one() -> String {
    "1".into()
}

fn default_domain() -> [f64; 2] {
    [0.0, 1.0]
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub kind: ProcessTag,
    pub alpha: String,
    #[serde(default = "default_one")]
    pub b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<String>,
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
    /// `[c, d]`; defaults to the range of `alpha` over the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<[f64; 2]>,
    /// Declared Hölder exponent of a non-smooth `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_holder: Option<f64>,
    #[serde(default = "unit")]
    pub b_plus: f64,
    #[serde(default = "unit")]
    pub b_minus: f64,
}

/// A list of points, or `points` equally spaced values from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Uniform { start: f64, stop: f64, points: usize },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match *self {
            GridSpec::List(ref v) => {
                if v.is_empty() {
                    return Err("grid is empty".into());
                }
                Ok(v.clone())
            }
            GridSpec::Uniform { start, stop, points } => {
                if points == 0 {
                    return Err("grid needs at least one point".into());
                }
                if points == 1 {
                    return Ok(vec![start]);
                }
                let step = (stop - start) / (points - 1) as f64;
                Ok((0..points)
                    .map(|k| if k + 1 == points { stop } else { start + k as f64 * step })
                    .collect())
            }
        }
    }
}

/// Explicit values, or `base^k` for integer `k` running from `start_exp` to
/// `stop_exp` inclusive (in either direction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogSpec {
    List(Vec<f64>),
    Powers { start_exp: i32, stop_exp: i32, base: f64 },
}

impl LogSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match *self {
            LogSpec::List(ref v) => v.clone(),
            LogSpec::Powers {
                start_exp,
                stop_exp,
                base,
            } => {
                if !(base > 0.0 && base != 1.0) {
                    return Err(format!("base {base} must be positive and different from 1"));
                }
                let step = if stop_exp >= start_exp { 1 } else { -1 };
                let mut out = Vec::new();
                let mut k = start_exp;
                loop {
                    out.push(base.powi(k));
                    if k == stop_exp {
                        break;
                    }
                    k += step;
                }
                out
            }
        };
        if v.is_empty() {
            return Err("list is empty".into());
        }
        if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err("values must be positive and finite".into());
        }
        Ok(v)
    }
}

fn one_path() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub grid: GridSpec,
    #[serde(default = "one_path")]
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub t: f64,
    pub eta: f64,
    pub eps: LogSpec,
}

fn default_bootstrap() -> usize {
    1000
}

fn default_confidence() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderConfig {
    pub t: Vec<f64>,
    pub r_levels: LogSpec,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// The scales of the acceptance criteria.
    #[default]
    Full,
    /// Reduced scales for smoke tests; statistical checks lose power.
    Quick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub profile: Profile,
    /// Criteria to run (1 to 11); all when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<u8>>,
    /// Multiplier on the series normalization, for fault injection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_fault: Option<f64>,
    /// Quadrature settings for the constant cross-check, for fault injection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

fn default_paths() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessConfig>,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default = "default_paths")]
    pub m_paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            process: None,
            series: SeriesConfig::default(),
            m_paths: default_paths(),
            seed: 0,
            quadrature: QuadratureConfig::default(),
            path: None,
            moments: None,
            holder: None,
            verify: None,
        }
    }
}

fn field<E: std::fmt::Display>(name: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Config(format!("{name}: {e}"))
}

fn constant_of(spec: &FuncSpec, name: &str) -> Result<f64, CliError> {
    if !spec.is_constant() {
        return Err(CliError::Config(format!("{name}: must be a constant for lfsm-control")));
    }
    spec.eval(spec.domain().0).map_err(field(name))
}

impl RunConfig {
    /// Parses a config, or the config echoed inside a run manifest.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") && map.contains_key("version") => {
                map.remove("config").unwrap()
            }
            other => other,
        };
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.series.validate().map_err(field("series"))?;
        cfg.quadrature.validate().map_err(field("quadrature"))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds and validates the process.
    pub fn process_spec(&self) -> Result<ProcessSpec, CliError> {
        let p = self
            .process
            .as_ref()
            .ok_or_else(|| CliError::Config("process: section is required".into()))?;
        let domain = (p.domain[0], p.domain[1]);
        let alpha = FuncSpec::parse(&p.alpha, domain).map_err(field("process.alpha"))?;
        let b = FuncSpec::parse(&p.b, domain).map_err(field("process.b"))?;
        let stability = match p.stability {
            Some([c, d]) => (c, d),
            None => {
                let r = validate_range(&alpha, f64::MIN_POSITIVE, 2.0, 201).map_err(field("process.alpha"))?;
                (r.min, r.max)
            }
        };
        let spec = match p.kind {
            ProcessTag::Levy => ProcessSpec::levy(alpha, b, domain, stability).map_err(field("process"))?,
            ProcessTag::Lmmm => {
                let h = p
                    .hurst
                    .as_ref()
                    .ok_or_else(|| CliError::Config("process.hurst: required for lmmm".into()))?;
                let hurst = FuncSpec::parse(h, domain).map_err(field("process.hurst"))?;
                ProcessSpec::lmmm(alpha, hurst, b, domain, stability).map_err(field("process"))?
            }
            ProcessTag::LfsmControl => {
                let h = p
                    .hurst
                    .as_ref()
                    .ok_or_else(|| CliError::Config("process.hurst: required for lfsm-control".into()))?;
                let hurst = FuncSpec::parse(h, domain).map_err(field("process.hurst"))?;
                let a = constant_of(&alpha, "process.alpha")?;
                let h = constant_of(&hurst, "process.hurst")?;
                ProcessSpec::lfsm_control(a, h, p.b_plus, p.b_minus, domain).map_err(field("process"))?
            }
        };
        Ok(match p.alpha_holder {
            Some(beta) if !(beta > 0.0) => {
                return Err(CliError::Config(format!("process.alpha_holder: {beta} must be positive")))
            }
            Some(beta) => spec.with_alpha_holder(beta),
            None => spec,
        })
    }
}

/// Everything needed to reproduce a run, plus what it computed on the side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub wall_clock_seconds: f64,
    pub n_terms: usize,
    pub drop_counts: BTreeMap<String, usize>,
    pub derived: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            wall_clock_seconds: 0.0,
            n_terms: config.series.n_terms,
            drop_counts: BTreeMap::new(),
            derived: BTreeMap::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_are_exact() {
        let eps = LogSpec::Powers {
            start_exp: -4,
            stop_exp: -10,
            base: 2.0,
        }
        .values()
        .unwrap();
        assert_eq!(eps.len(), 7);
        assert_eq!(eps[0], 0.0625);
        assert_eq!(eps[6], 1.0 / 1024.0);
    }

    #[test]
    fn empty_lists_are_rejected() {
        assert!(LogSpec::List(vec![]).values().is_err());
        assert!(GridSpec::List(vec![]).values().is_err());
    }

    #[test]
    fn uniform_grid_hits_both_ends() {
        let g = GridSpec::Uniform {
            start: 0.0,
            stop: 1.0,
            points: 11,
        }
        .values()
        .unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn manifest_wrapping_is_unwrapped() {
        let cfg = RunConfig {
            seed: 9,
            ..RunConfig::default()
        };
        let manifest = RunManifest::new("path", &cfg);
        let text = serde_json::to_string(&manifest).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        assert!(matches!(
            RunConfig::from_json(r#"{"sede": 1}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn missing_hurst_names_the_field() {
        let cfg = RunConfig::from_json(r#"{"process": {"kind": "lmmm", "alpha": "1.7"}}"#).unwrap();
        match cfg.process_spec() {
            Err(CliError::Config(m)) => assert!(m.starts_with("process.hurst"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
