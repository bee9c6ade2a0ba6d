//! Online row sampling for `l_p` subspace embeddings.
//!
//! Each arriving integer row `a` gets an online sensitivity `s'`: 1 if `a`
//! leaves the span of the rows kept so far, and otherwise the largest share
//! `|a.x|^p / (|A~ x|_p^p + lambda |x|_p^p)` over `x` in that span. The row is
//! kept with probability `min(rho s', 1)` and, when kept, contributes
//! `|a.x|^p / p_i` to the estimate `|A~ x|_p^p`.
//!
//! For `p = 2` the sensitivity is the ridge leverage score, computed in
//! closed form. Other exponents use a restarted gradient ascent (see
//! [`maximize`]) whose result is inflated by a safety factor.

mod adversary;
mod audit;
mod io;
pub mod maximize;
mod span;
mod verify;

pub use adversary::{run_row_adversary, RandomRows, ResubmissionAdversary, RowAdversary, RowDistribution};
pub use audit::{online_condition_number, sensitivity_sum_audit, SensitivityAudit, DEFAULT_C_AUDIT};
pub use io::{format_row_stream, parse_row_stream};
pub use span::{exact_rank, IntSpan, SpanMode, SpanTracker, SPAN_TOLERANCE};
pub use verify::{verify_embedding, verify_ridge_embedding, EmbeddingReport, VerifyMode, DEFAULT_NET_LIMIT};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, Error, Result};
use crate::seed::{stream_rng, StreamRng};
use maximize::{Problem, SAFETY_FACTOR};

/// Default constant in `rho = K1 eps^-2 (d ln(kappa / eps) + ln ln n)`.
pub const DEFAULT_K1: f64 = 1.0;

/// Parameters of one embedding run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub d: usize,
    pub p: f64,
    pub epsilon: f64,
    /// Caller's upper bound on the online condition number.
    pub kappa_ol_bound: f64,
    pub k1: f64,
    /// Upper bound on the stream length.
    pub n_bound: usize,
    /// Entry bound: every entry lies in `[-B, B]`.
    pub entry_bound: i64,
    pub span_mode: SpanMode,
    /// Seeds the maximizer's restarts (unused for `p = 2`).
    pub maximizer_seed: u64,
}

impl EmbedConfig {
    pub fn new(d: usize, p: f64, epsilon: f64, kappa_ol_bound: f64, n_bound: usize, entry_bound: i64) -> Result<Self> {
        let c = Self {
            d,
            p,
            epsilon,
            kappa_ol_bound,
            k1: DEFAULT_K1,
            n_bound,
            entry_bound,
            span_mode: SpanMode::Exact,
            maximizer_seed: 0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_k1(mut self, k1: f64) -> Result<Self> {
        self.k1 = k1;
        self.validate()?;
        Ok(self)
    }

    pub fn with_span_mode(mut self, mode: SpanMode) -> Self {
        self.span_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain { name: "d", value: 0.0, expected: "at least one column" });
        }
        check_positive("p", self.p)?;
        check_open_unit("epsilon", self.epsilon)?;
        if !(self.kappa_ol_bound >= 1.0 && self.kappa_ol_bound.is_finite()) {
            return Err(Error::Domain {
                name: "kappa_ol_bound",
                value: self.kappa_ol_bound,
                expected: "a finite value >= 1",
            });
        }
        check_positive("K1", self.k1)?;
        if self.n_bound == 0 {
            return Err(Error::Domain { name: "n", value: 0.0, expected: "at least one row" });
        }
        if self.entry_bound < 1 {
            return Err(Error::Domain {
                name: "entry_bound",
                value: self.entry_bound as f64,
                expected: "at least 1",
            });
        }
        if let SpanMode::Tolerance(t) = self.span_mode {
            check_positive("span tolerance", t)?;
        }
        Ok(())
    }

    /// `rho = K1 eps^-2 (d ln(kappa / eps) + max(0, ln ln n))`.
    pub fn rho(&self) -> f64 {
        let n = self.n_bound as f64;
        let lnln = if n > 1.0 { n.ln().ln().max(0.0) } else { 0.0 };
        self.k1 / (self.epsilon * self.epsilon) * (self.d as f64 * (self.kappa_ol_bound / self.epsilon).ln() + lnln)
    }

    /// `lambda = (n B)^-((p + 1) d + p)`.
    pub fn ridge_lambda(&self) -> Result<f64> {
        ridge_lambda(self.n_bound, self.entry_bound, self.p, self.d)
    }
}

/// `(n B)^-((p + 1) d + p)`; an error if it underflows to zero.
pub fn ridge_lambda(n: usize, entry_bound: i64, p: f64, d: usize) -> Result<f64> {
    let exponent = (p + 1.0) * d as f64 + p;
    let lambda = (-(exponent) * ((n as f64) * (entry_bound as f64)).ln()).exp();
    if lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::Numerical(format!(
            "ridge parameter (n B)^-{exponent} underflows for n = {n}, B = {entry_bound}"
        )))
    }
}

/// A stored row with its sampling data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptRow {
    pub row: Vec<i64>,
    pub p_i: f64,
    /// `p_i^(-1/p)`, so that `|scale * a.x|^p = |a.x|^p / p_i`.
    pub scale: f64,
    pub s_prime: f64,
    pub index: usize,
}

/// The kept rows and the parameters they were sampled under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRowSet {
    pub d: usize,
    pub p: f64,
    pub rho: f64,
    pub lambda: f64,
    pub rows: Vec<KeptRow>,
}

impl WeightedRowSet {
    pub fn new(d: usize, p: f64, rho: f64, lambda: f64) -> Self {
        Self { d, p, rho, lambda, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `|A~ x|_p^p = sum_kept |a_i.x|^p / p_i`.
    pub fn estimate(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|k| dot(&k.row, x).abs().powf(self.p) / k.p_i)
            .sum()
    }

    /// `A~^T A~ = sum_kept a_i a_i^T / p_i` (the `p = 2` Gram matrix).
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.d, self.d);
        for k in &self.rows {
            let a = to_vector(&k.row);
            g.ger(1.0 / k.p_i, &a, &a, 1.0);
        }
        g
    }
}

pub(crate) fn dot(row: &[i64], x: &[f64]) -> f64 {
    row.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
}

pub(crate) fn to_vector(row: &[i64]) -> DVector<f64> {
    DVector::from_iterator(row.len(), row.iter().map(|&x| x as f64))
}

/// Gram matrix `A^T A` of unweighted integer rows.
pub fn gram_of_rows(rows: &[Vec<i64>], d: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(d, d);
    for r in rows {
        let a = to_vector(r);
        g.ger(1.0, &a, &a, 1.0);
    }
    g
}

/// What the sampler announced for one arriving row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDecision {
    pub index: usize,
    pub s_prime: f64,
    pub p: f64,
    pub coin: bool,
    /// False when the row left the span of the kept rows.
    pub in_span: bool,
}

/// Everything a run produced: the input rows, the per-row decisions and the kept set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedTranscript {
    pub config: EmbedConfig,
    pub rows: Vec<Vec<i64>>,
    pub decisions: Vec<RowDecision>,
    pub kept: WeightedRowSet,
}

impl EmbedTranscript {
    pub fn sensitivity_sum(&self) -> f64 {
        self.decisions.iter().map(|d| d.s_prime).sum()
    }
}

/// Sensitivity state over a kept set: the span tracker plus the weighted Gram matrix.
#[derive(Debug, Clone)]
struct SensitivityState {
    span: SpanTracker,
    gram: DMatrix<f64>,
}

impl SensitivityState {
    fn new(d: usize, mode: SpanMode) -> Self {
        Self {
            span: SpanTracker::new(d, mode),
            gram: DMatrix::zeros(d, d),
        }
    }

    fn add(&mut self, row: &[i64], p_i: f64) {
        self.span.insert(row);
        let a = to_vector(row);
        self.gram.ger(1.0 / p_i, &a, &a, 1.0);
    }

    /// Returns `(s', in_span)`.
    fn sensitivity<R: Rng + ?Sized>(
        &self,
        a: &[i64],
        kept: &WeightedRowSet,
        restart_rng: &mut R,
    ) -> (f64, bool) {
        if a.iter().all(|&x| x == 0) {
            // No direction gives a zero row any share of the energy.
            return (0.0, true);
        }
        if !self.span.contains(a) {
            return (1.0, false);
        }
        let q = self.span.basis();
        let c = q.tr_mul(&to_vector(a));
        let s = if kept.p == 2.0 {
            let m = q.tr_mul(&self.gram) * q + DMatrix::identity(q.ncols(), q.ncols()) * kept.lambda;
            match m.cholesky() {
                Some(ch) => ch.solve(&c).dot(&c),
                // Not numerically definite: fall back to the largest legal value.
                None => 1.0,
            }
        } else {
            let rows: Vec<(DVector<f64>, f64)> = kept
                .rows
                .iter()
                .map(|k| (q.tr_mul(&to_vector(&k.row)), 1.0 / k.p_i))
                .collect();
            let problem = Problem {
                c: &c,
                rows: &rows,
                q,
                lambda: kept.lambda,
                p: kept.p,
            };
            SAFETY_FACTOR * maximize::maximize(&problem, restart_rng)
        };
        (if s.is_finite() { s.min(1.0) } else { 1.0 }, true)
    }
}

fn check_row(a: &[i64], d: usize, entry_bound: i64, index: usize) -> Result<()> {
    if a.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.len() });
    }
    if let Some(&v) = a.iter().find(|v| v.abs() > entry_bound) {
        return Err(Error::EntryOutOfBound { row: index, value: v, bound: entry_bound });
    }
    Ok(())
}

/// Online sensitivity of `a` with respect to a kept set, computed from scratch.
pub fn online_sensitivity(a: &[i64], kept: &WeightedRowSet, span_mode: SpanMode) -> Result<f64> {
    if !(kept.lambda > 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: kept.lambda,
            expected: "a positive ridge parameter",
        });
    }
    if a.len() != kept.d {
        return Err(Error::DimensionMismatch { expected: kept.d, got: a.len() });
    }
    let mut state = SensitivityState::new(kept.d, span_mode);
    for k in &kept.rows {
        if k.row.len() != kept.d {
            return Err(Error::DimensionMismatch { expected: kept.d, got: k.row.len() });
        }
        state.add(&k.row, k.p_i);
    }
    Ok(state.sensitivity(a, kept, &mut stream_rng(0)).0)
}

/// Algorithm state for a stream of rows; each coin is returned before the
/// next row is accepted.
#[derive(Debug, Clone)]
pub struct OnlineEmbedder {
    config: EmbedConfig,
    state: SensitivityState,
    kept: WeightedRowSet,
    restart_rng: StreamRng,
    seen: usize,
}

impl OnlineEmbedder {
    pub fn new(config: EmbedConfig) -> Result<Self> {
        config.validate()?;
        let lambda = config.ridge_lambda()?;
        Ok(Self {
            state: SensitivityState::new(config.d, config.span_mode),
            kept: WeightedRowSet::new(config.d, config.p, config.rho(), lambda),
            restart_rng: stream_rng(config.maximizer_seed),
            seen: 0,
            config,
        })
    }

    pub fn config(&self) -> &EmbedConfig {
        &self.config
    }

    pub fn kept(&self) -> &WeightedRowSet {
        &self.kept
    }

    pub fn into_kept(self) -> WeightedRowSet {
        self.kept
    }

    pub fn insert<R: Rng + ?Sized>(&mut self, a: &[i64], rng: &mut R) -> Result<RowDecision> {
        check_row(a, self.config.d, self.config.entry_bound, self.seen)?;
        let index = self.seen;
        let (s_prime, in_span) = self.state.sensitivity(a, &self.kept, &mut self.restart_rng);
        self.seen += 1;
        if s_prime == 0.0 {
            return Ok(RowDecision { index, s_prime, p: 0.0, coin: false, in_span });
        }
        let p = (self.kept.rho * s_prime).min(1.0);
        let coin = rng.random::<f64>() < p;
        if coin {
            self.state.add(a, p);
            self.kept.rows.push(KeptRow {
                row: a.to_vec(),
                p_i: p,
                scale: p.powf(-1.0 / self.config.p),
                s_prime,
                index,
            });
        }
        Ok(RowDecision { index, s_prime, p, coin, in_span })
    }
}

/// Runs a fixed row stream through a fresh embedder.
pub fn stream_embed<R: Rng + ?Sized>(rows: &[Vec<i64>], config: &EmbedConfig, rng: &mut R) -> Result<EmbedTranscript> {
    let mut e = OnlineEmbedder::new(*config)?;
    let decisions = rows.iter().map(|r| e.insert(r, rng)).collect::<Result<Vec<_>>>()?;
    Ok(EmbedTranscript {
        config: *config,
        rows: rows.to_vec(),
        decisions,
        kept: e.into_kept(),
    })
}
