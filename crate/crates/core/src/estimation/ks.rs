//! Two-sample Kolmogorov–Smirnov statistic.

use serde::Serialize;

use super::EstimationError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    /// Asymptotic critical values `c(a) sqrt((n + m) / (n m))`.
    pub critical_05: f64,
    pub critical_01: f64,
}

impl KsResult {
    pub fn passes_05(&self) -> bool {
        self.statistic < self.critical_05
    }

    pub fn passes_01(&self) -> bool {
        self.statistic < self.critical_01
    }
}

/// Asymptotic Kolmogorov quantile `c(a) = sqrt(-ln(a / 2) / 2)`.
fn kolmogorov_c(level: f64) -> f64 {
    (-(0.5 * level).ln() / 2.0).sqrt()
}

/// `sup_x |F_a(x) - F_b(x)|`, with ties between the samples handled by
/// stepping both empirical functions past a shared value together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, EstimationError> {
    if a.is_empty() || b.is_empty() {
        return Err(EstimationError::Invalid("both samples must be non-empty".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(EstimationError::Invalid("samples contain NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] == x {
            i += 1;
        }
        while j < m && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let scale = ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    Ok(KsResult {
        statistic: d,
        n,
        m,
        critical_05: kolmogorov_c(0.05) * scale,
        critical_01: kolmogorov_c(0.01) * scale,
    })
}
