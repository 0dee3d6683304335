//! The subcommands. Each writes its tables and a `manifest.json` into the
//! output directory and returns the manifest.

use std::path::PathBuf;
use std::time::Instant;

use crate::engine::{build_environment, DiagonalEvaluator};
use crate::estimation::{
    estimate_increment_moments, fit_scaling, holder_pathwise, par_map_indexed, HolderEstimate, MomentEstimate,
    MonteCarlo, ScalingFit,
};
use crate::kernels::{sigma_lmmm, Kernel, ProcessSpec};
use crate::special::c_alpha;

use super::config::{RunConfig, RunManifest};
use super::output::{line_chart, num, opt_num, write_file, Csv, Series};
use super::verify::{run_checks, CheckOutcome, VerifySettings};
use super::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub svg: bool,
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out: PathBuf::from("."),
            svg: false,
            workers: 1,
        }
    }
}

/// Constants at `t` worth recording: `C_alpha`, and for lmmm the tangent scale.
fn derived_at(spec: &ProcessSpec, t: f64, manifest: &mut RunManifest) -> Result<(), CliError> {
    let alpha = spec.alpha_at(t).map_err(|e| CliError::Config(e.to_string()))?;
    let key = |name: &str| format!("{name}(t={t})");
    manifest.derived.insert(key("alpha"), alpha);
    manifest
        .derived
        .insert(key("c_alpha"), c_alpha(alpha).map_err(|e| CliError::Numerical(e.to_string()))?);
    if let Kernel::Lmmm { hurst, .. } = &spec.kernel {
        let h = hurst.eval(t).map_err(|e| CliError::Config(e.to_string()))?;
        manifest.derived.insert(key("hurst"), h);
        let sigma = sigma_lmmm(alpha, h).map_err(|e| CliError::Numerical(e.to_string()))?;
        manifest.derived.insert(key("sigma_lmmm"), sigma);
    }
    Ok(())
}

fn finish(
    mut manifest: RunManifest,
    start: Instant,
    opts: &RunOptions,
    files: Vec<(String, String)>,
) -> Result<RunManifest, CliError> {
    for (name, body) in &files {
        write_file(&opts.out, name, body)?;
        manifest.outputs.push(name.clone());
    }
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&opts.out, "manifest.json", &(text + "\n"))?;
    Ok(manifest)
}

/// Diagonal paths on the configured grid: `t,y` for one path, `path_id,t,y`
/// for several.
pub fn cmd_path(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let spec = cfg.process_spec()?;
    let pc = cfg
        .path
        .as_ref()
        .ok_or_else(|| CliError::Config("path: section is required".into()))?;
    let grid = pc.grid.values().map_err(|e| CliError::Config(format!("path.grid: {e}")))?;
    if pc.paths == 0 {
        return Err(CliError::Config("path.paths: must be at least 1".into()));
    }
    let evaluator = DiagonalEvaluator::new(&spec, &cfg.series, &grid)?;
    let values = par_map_indexed(opts.workers, pc.paths, |p| {
        let env = build_environment(&spec, &cfg.series, cfg.seed, p as u64)?;
        Ok(evaluator.eval(&env)?)
    })?;

    let mut csv = if pc.paths == 1 {
        Csv::new(&["t", "y"])
    } else {
        Csv::new(&["path_id", "t", "y"])
    };
    for (p, ys) in values.iter().enumerate() {
        for (t, y) in grid.iter().zip(ys) {
            if pc.paths == 1 {
                csv.row(&[num(*t), num(*y)]);
            } else {
                csv.row(&[p.to_string(), num(*t), num(*y)]);
            }
        }
    }
    let mut files = vec![("path.csv".to_string(), csv.into_string())];
    if opts.svg {
        let series: Vec<Series> = values
            .iter()
            .enumerate()
            .map(|(p, ys)| Series {
                label: format!("path {p}"),
                x: grid.clone(),
                y: ys.clone(),
            })
            .collect();
        files.push(("path.svg".into(), line_chart("Diagonal path Y(t)", "t", "Y(t)", &series)));
    }

    let mut manifest = RunManifest::new("path", cfg);
    manifest.warnings = spec.warnings().to_vec();
    let mid = grid[grid.len() / 2];
    derived_at(&spec, mid, &mut manifest)?;
    finish(manifest, start, opts, files)
}

/// The two tables written by `moments`: per-eps estimates and the fit.
pub fn moment_tables(me: &MomentEstimate, fit: &ScalingFit) -> (String, String) {
    let mut table = Csv::new(&["eps", "eta", "estimate", "stderr", "theory_estimate"]);
    for p in &me.points {
        let theory = me.theory.map(|(s, c)| (c + s * p.eps.ln()).exp());
        table.row(&[num(p.eps), num(me.eta), num(p.estimate), num(p.stderr), opt_num(theory)]);
    }
    let mut summary = Csv::new(&[
        "slope",
        "slope_se",
        "intercept",
        "intercept_se",
        "theory_slope",
        "theory_intercept",
    ]);
    summary.row(&[
        num(fit.slope),
        num(fit.slope_se),
        num(fit.intercept),
        num(fit.intercept_se),
        opt_num(fit.theory_slope),
        opt_num(fit.theory_intercept),
    ]);
    (table.into_string(), summary.into_string())
}

/// Runs the moment estimator and the fit for `cfg`.
pub fn moments_run(cfg: &RunConfig, workers: usize) -> Result<(ProcessSpec, MomentEstimate, ScalingFit), CliError> {
    let spec = cfg.process_spec()?;
    let mc_cfg = cfg
        .moments
        .as_ref()
        .ok_or_else(|| CliError::Config("moments: section is required".into()))?;
    let eps = mc_cfg
        .eps
        .values()
        .map_err(|e| CliError::Config(format!("moments.eps: {e}")))?;
    let mc = MonteCarlo::new(cfg.m_paths, cfg.series, cfg.seed).with_workers(workers);
    let me = estimate_increment_moments(&spec, mc_cfg.t, mc_cfg.eta, &eps, &mc)?;
    let fit = fit_scaling(&me)?;
    Ok((spec, me, fit))
}

pub fn cmd_moments(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let (spec, me, fit) = moments_run(cfg, opts.workers)?;
    let (table, summary) = moment_tables(&me, &fit);
    let mut files = vec![("moments.csv".to_string(), table), ("fit.csv".to_string(), summary)];
    if opts.svg {
        let x: Vec<f64> = me.points.iter().map(|p| p.eps.ln()).collect();
        let mut series = vec![Series {
            label: "ln estimate".into(),
            x: x.clone(),
            y: me.points.iter().map(|p| p.estimate.ln()).collect(),
        }];
        if let Some((s, c)) = me.theory {
            series.push(Series {
                label: "theory".into(),
                x: x.clone(),
                y: x.iter().map(|x| c + s * x).collect(),
            });
        }
        files.push((
            "moments.svg".into(),
            line_chart("Increment moments", "ln eps", "ln E|dY|^eta", &series),
        ));
    }

    let mut manifest = RunManifest::new("moments", cfg);
    manifest.warnings = spec.warnings().to_vec();
    derived_at(&spec, me.t, &mut manifest)?;
    if let (Some(s), Some(c)) = (fit.theory_slope, fit.theory_intercept) {
        manifest.derived.insert("theory_slope".into(), s);
        manifest.derived.insert("theory_intercept".into(), c);
    }
    if let Some(ratio) = fit.prefactor_ratio() {
        manifest.derived.insert("prefactor_ratio".into(), ratio);
    }
    finish(manifest, start, opts, files)
}

/// Runs the pathwise estimator at every configured `t`.
pub fn holder_run(cfg: &RunConfig, workers: usize) -> Result<(ProcessSpec, Vec<HolderEstimate>), CliError> {
    let spec = cfg.process_spec()?;
    let hc = cfg
        .holder
        .as_ref()
        .ok_or_else(|| CliError::Config("holder: section is required".into()))?;
    if hc.t.is_empty() {
        return Err(CliError::Config("holder.t: list is empty".into()));
    }
    let levels = hc
        .r_levels
        .values()
        .map_err(|e| CliError::Config(format!("holder.r_levels: {e}")))?;
    let mc = MonteCarlo::new(cfg.m_paths, cfg.series, cfg.seed).with_workers(workers);
    let estimates = hc
        .t
        .iter()
        .map(|&t| holder_pathwise(&spec, t, &levels, &mc, hc.bootstrap, hc.confidence))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((spec, estimates))
}

/// `theory` is left empty where no target exists.
pub fn holder_table(estimates: &[HolderEstimate]) -> String {
    let mut csv = Csv::new(&["t", "estimate", "ci_lo", "ci_hi", "theory", "drop_count"]);
    for h in estimates {
        csv.row(&[
            num(h.t),
            num(h.estimate),
            num(h.ci.0),
            num(h.ci.1),
            opt_num(h.theory()),
            h.drop_count.to_string(),
        ]);
    }
    csv.into_string()
}

pub fn cmd_holder(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let (spec, estimates) = holder_run(cfg, opts.workers)?;
    let mut files = vec![("holder.csv".to_string(), holder_table(&estimates))];
    if opts.svg {
        let x: Vec<f64> = estimates.iter().map(|h| h.t).collect();
        let mut series = vec![
            Series {
                label: "estimate".into(),
                x: x.clone(),
                y: estimates.iter().map(|h| h.estimate).collect(),
            },
            Series {
                label: "ci upper".into(),
                x: x.clone(),
                y: estimates.iter().map(|h| h.ci.1).collect(),
            },
        ];
        series.push(Series {
            label: "theory".into(),
            x,
            y: estimates.iter().map(|h| h.theory().unwrap_or(f64::NAN)).collect(),
        });
        files.push((
            "holder.svg".into(),
            line_chart("Pathwise Hölder estimates", "t", "exponent", &series),
        ));
    }

    let mut manifest = RunManifest::new("holder", cfg);
    manifest.warnings = spec.warnings().to_vec();
    for h in &estimates {
        derived_at(&spec, h.t, &mut manifest)?;
        manifest.drop_counts.insert(format!("t={}", h.t), h.drop_count);
        manifest
            .drop_counts
            .insert(format!("t={} paths", h.t), h.dropped_paths);
        manifest.warnings.push(format!("t={}: {}", h.t, h.note));
    }
    finish(manifest, start, opts, files)
}

/// Runs the acceptance checks selected by `cfg.verify` (all criteria at full
/// scale by default) and writes `verify.csv` and `verify.txt`.
pub fn cmd_verify(cfg: &RunConfig, opts: &RunOptions) -> Result<(RunManifest, Vec<CheckOutcome>), CliError> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    let vc = cfg.verify.get_or_insert_with(Default::default).clone();
    let settings = VerifySettings::from_config(&vc, cfg.seed, opts.workers, cfg.quadrature)?;
    let outcomes = run_checks(&settings)?;

    let mut csv = Csv::new(&["criterion", "name", "check", "value", "lower", "upper", "passed"]);
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&o.summary_line());
        text.push('\n');
        for s in &o.checks {
            csv.row(&[
                o.criterion.to_string(),
                o.name.to_string(),
                s.label.clone(),
                num(s.value),
                opt_num(s.lower),
                opt_num(s.upper),
                s.passed().to_string(),
            ]);
        }
    }
    let mut manifest = RunManifest::new("verify", &cfg);
    for o in &outcomes {
        for (k, v) in &o.derived {
            manifest.derived.insert(format!("criterion {}: {k}", o.criterion), *v);
        }
    }
    let manifest = finish(
        manifest,
        start,
        opts,
        vec![("verify.csv".into(), csv.into_string()), ("verify.txt".into(), text)],
    )?;
    Ok((manifest, outcomes))
}
