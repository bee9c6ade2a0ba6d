use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::span::IntSpan;
use super::{to_vector, EmbedTranscript};

/// Default constant in the sensitivity-sum audit.
pub const DEFAULT_C_AUDIT: f64 = 4.0;

/// Largest singular value of the whole stream over the smallest nonzero
/// singular value of any prefix. Ranks come from exact integer elimination, so
/// a prefix's smallest nonzero singular value is the `rank`-th largest.
/// Returns 1 for a stream of zero rows.
pub fn online_condition_number(rows: &[Vec<i64>], d: usize) -> f64 {
    let mut span = IntSpan::new(d);
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut smallest = f64::INFINITY;
    for r in rows {
        span.insert(r);
        let a = to_vector(r);
        gram.ger(1.0, &a, &a, 1.0);
        let rank = span.rank();
        if rank == 0 {
            continue;
        }
        let mut eig: Vec<f64> = SymmetricEigen::new(gram.clone()).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        smallest = smallest.min(eig[rank - 1].max(0.0).sqrt());
    }
    if !smallest.is_finite() {
        return 1.0;
    }
    let largest = SymmetricEigen::new(gram).eigenvalues.max().max(0.0).sqrt();
    largest / smallest
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityAudit {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub rho: f64,
    pub kappa_ol: f64,
    /// `S = sum_i s'_i`.
    pub sensitivity_sum: f64,
    /// `C (d ln(n kappa))^max(1, p/2)`.
    pub sum_bound: f64,
    pub sum_ok: bool,
    pub kept: usize,
    /// `2 rho S`.
    pub kept_bound: f64,
    pub kept_ok: bool,
    pub passed: bool,
}

/// Checks `S <= c_audit (d ln(n kappa))^max(1, p/2)` and `kept <= 2 rho S`,
/// with `kappa` the online condition number measured on the transcript.
pub fn sensitivity_sum_audit(transcript: &EmbedTranscript, c_audit: f64) -> SensitivityAudit {
    let cfg = &transcript.config;
    let n = transcript.rows.len();
    let kappa_ol = online_condition_number(&transcript.rows, cfg.d);
    let s = transcript.sensitivity_sum();
    let base = cfg.d as f64 * (n.max(1) as f64 * kappa_ol).ln();
    let sum_bound = c_audit * base.max(0.0).powf((cfg.p / 2.0).max(1.0));
    let kept = transcript.decisions.iter().filter(|d| d.coin).count();
    let kept_bound = 2.0 * transcript.kept.rho * s;
    let sum_ok = s <= sum_bound;
    let kept_ok = kept as f64 <= kept_bound;
    SensitivityAudit {
        n,
        d: cfg.d,
        p: cfg.p,
        rho: transcript.kept.rho,
        kappa_ol,
        sensitivity_sum: s,
        sum_bound,
        sum_ok,
        kept,
        kept_bound,
        kept_ok,
        passed: sum_ok && kept_ok,
    }
}
