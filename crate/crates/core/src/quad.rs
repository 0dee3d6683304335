//! Numerical integration: adaptive Gauss–Kronrod, tanh-sinh for endpoint
//! singularities, and alternating-series acceleration for oscillatory tails
//! split at half periods.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: estimate {estimate}, error {error} after {evaluations} evaluations")]
    NoConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid quadrature configuration: {0}")]
    Config(String),
}

/// Tolerances and limits shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection budget for adaptive Gauss–Kronrod, and refinement levels
    /// (capped at 12) for tanh-sinh.
    pub max_subdivisions: usize,
    /// Largest number of half periods summed by the alternating-series
    /// accelerator.
    pub half_periods: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_subdivisions: 400,
            half_periods: 80,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(QuadError::Config("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::Config("max_subdivisions must be at least 1".into()));
        }
        if self.half_periods < 2 {
            return Err(QuadError::Config("half_periods must be at least 2".into()));
        }
        Ok(())
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: (K15 estimate, |K15 - G7|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod on a finite interval. Returns the
/// estimate and its error bound.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), QuadError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut error = e;
    let mut evaluations = 15;
    while error > cfg.target(total) {
        if panels.len() >= cfg.max_subdivisions {
            return Err(QuadError::NoConvergence {
                estimate: total,
                error,
                evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, v0, e0) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        total += v1 + v2 - v0;
        error += e1 + e2 - e0;
        if !total.is_finite() {
            return Err(QuadError::NonFinite { x: mid });
        }
    }
    // resum to avoid drift from the running updates
    let total: f64 = panels.iter().map(|p| p.2).sum();
    Ok((total, error))
}

/// Tanh-sinh quadrature on `[a, b]`. The integrand receives the abscissa and
/// its distances to the two endpoints, so that singular factors like
/// `|x - a|^k` can be formed without cancellation.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, QuadError> {
    use std::f64::consts::FRAC_PI_2;
    if a == b {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    // abscissa weights for node t: returns contribution f * w
    let node = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let cosh_s = s.cosh();
        // distance from the nearer endpoint in the reference interval [-1, 1]
        let complement = 1.0 / (s.abs().exp() * cosh_s);
        if complement == 0.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
        let (x, da, db) = if t < 0.0 {
            let da = half * complement;
            (a + da, da, b - a - da)
        } else if t > 0.0 {
            let db = half * complement;
            (b - db, b - a - db, db)
        } else {
            (center, half, half)
        };
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let fx = f(x, da, db);
        if fx.is_finite() {
            fx * w
        } else {
            0.0
        }
    };
    // far enough out that the node distance to the endpoint underflows
    let t_max = 6.2;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    let levels = cfg.max_subdivisions.clamp(1, 12);
    for _ in 0..levels {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h * half;
        if !next.is_finite() {
            return Err(QuadError::NonFinite { x: center });
        }
        let delta = (next - estimate).abs();
        estimate = next;
        if delta <= cfg.target(estimate) {
            return Ok(estimate);
        }
    }
    Err(QuadError::NoConvergence {
        estimate,
        error: f64::NAN,
        evaluations: 0,
    })
}

/// Sum of `sum_k (-1)^k a_k` by the Cohen–Rodriguez Villegas–Zagier
/// acceleration using the first `n` terms.
pub fn cvz_alternating(terms: &[f64], n: usize) -> f64 {
    let n = n.min(terms.len());
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for (k, a) in terms.iter().take(n).enumerate() {
        c = b - c;
        s += c * a;
        let kf = k as f64;
        let nf = n as f64;
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// Integral of an oscillatory function over `[start, inf)` whose sign
/// alternates between consecutive nodes `start + k * half_period` and whose
/// half-period magnitudes form a completely monotone sequence.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    half_period: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, QuadError> {
    cfg.validate()?;
    let panel_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * 1e-2,
        ..*cfg
    };
    let mut magnitudes: Vec<f64> = Vec::new();
    let mut lead_sign = 0.0;
    let mut previous: Option<f64> = None;
    let mut k = 0;
    while k < cfg.half_periods {
        let lo = start + k as f64 * half_period;
        let (v, _) = adaptive_gk(&f, lo, lo + half_period, &panel_cfg)?;
        if k == 0 {
            lead_sign = if v < 0.0 { -1.0 } else { 1.0 };
        }
        let sign = if k % 2 == 0 { lead_sign } else { -lead_sign };
        magnitudes.push(sign * v);
        k += 1;
        if k % 2 == 0 && k >= 2 {
            let estimate = cvz_alternating(&magnitudes, k);
            if let Some(prev) = previous {
                if (estimate - prev).abs() <= cfg.target(estimate) {
                    return Ok(lead_sign * estimate);
                }
            }
            previous = Some(estimate);
        }
    }
    let estimate = cvz_alternating(&magnitudes, magnitudes.len());
    match previous {
        Some(prev) if (estimate - prev).abs() <= 1e3 * cfg.target(estimate) => {
            Ok(lead_sign * estimate)
        }
        _ => Err(QuadError::NoConvergence {
            estimate: lead_sign * estimate,
            error: previous.map_or(f64::NAN, |p| (estimate - p).abs()),
            evaluations: magnitudes.len(),
        }),
    }
}
