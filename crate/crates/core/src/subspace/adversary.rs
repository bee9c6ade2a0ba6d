use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use super::{EmbedConfig, EmbedTranscript, OnlineEmbedder, RowDecision};
use crate::error::Result;
use crate::seed::{stream_rng, StreamRng};

/// Chooses the next row after seeing every earlier coin.
pub trait RowAdversary {
    fn name(&self) -> String;
    /// `None` ends the stream.
    fn next_row(&mut self, d: usize, history: &[RowDecision]) -> Option<Vec<i64>>;
}

/// Entry distribution of random rows; entries are clipped to `[-B, B]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowDistribution {
    Uniform,
    /// Rounded normal with standard deviation `B / 3`.
    Gaussian,
}

fn random_row(rng: &mut StreamRng, d: usize, bound: i64, dist: RowDistribution) -> Vec<i64> {
    match dist {
        RowDistribution::Uniform => (0..d).map(|_| rng.random_range(-bound..=bound)).collect(),
        RowDistribution::Gaussian => {
            let normal = Normal::new(0.0, bound as f64 / 3.0).expect("finite positive deviation");
            (0..d)
                .map(|_| (rng.sample(normal).round() as i64).clamp(-bound, bound))
                .collect()
        }
    }
}

/// `n` independent random rows.
#[derive(Debug, Clone)]
pub struct RandomRows {
    rng: StreamRng,
    remaining: usize,
    bound: i64,
    dist: RowDistribution,
}

impl RandomRows {
    pub fn new(n: usize, bound: i64, dist: RowDistribution, seed: u64) -> Self {
        Self {
            rng: stream_rng(seed),
            remaining: n,
            bound,
            dist,
        }
    }

    pub fn generate(n: usize, d: usize, bound: i64, dist: RowDistribution, seed: u64) -> Vec<Vec<i64>> {
        let mut adv = Self::new(n, bound, dist, seed);
        std::iter::from_fn(|| adv.next_row(d, &[])).collect()
    }
}

impl RowAdversary for RandomRows {
    fn name(&self) -> String {
        "random".into()
    }

    fn next_row(&mut self, d: usize, _history: &[RowDecision]) -> Option<Vec<i64>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(random_row(&mut self.rng, d, self.bound, self.dist))
    }
}

/// Random rows, except that a dropped row is submitted again on the next round.
#[derive(Debug, Clone)]
pub struct ResubmissionAdversary {
    inner: RandomRows,
    last: Option<Vec<i64>>,
}

impl ResubmissionAdversary {
    pub fn new(n: usize, bound: i64, dist: RowDistribution, seed: u64) -> Self {
        Self {
            inner: RandomRows::new(n, bound, dist, seed),
            last: None,
        }
    }
}

impl RowAdversary for ResubmissionAdversary {
    fn name(&self) -> String {
        "resubmission".into()
    }

    fn next_row(&mut self, d: usize, history: &[RowDecision]) -> Option<Vec<i64>> {
        if self.inner.remaining == 0 {
            return None;
        }
        let row = match (history.last(), self.last.take()) {
            (Some(dec), Some(prev)) if !dec.coin => {
                self.inner.remaining -= 1;
                prev
            }
            _ => self.inner.next_row(d, history)?,
        };
        self.last = Some(row.clone());
        Some(row)
    }
}

/// Feeds an adaptive adversary into a fresh embedder.
pub fn run_row_adversary<A: RowAdversary + ?Sized, R: Rng + ?Sized>(
    adversary: &mut A,
    config: &EmbedConfig,
    rng: &mut R,
) -> Result<EmbedTranscript> {
    let mut e = OnlineEmbedder::new(*config)?;
    let mut rows = Vec::new();
    let mut decisions = Vec::new();
    while let Some(row) = adversary.next_row(config.d, &decisions) {
        decisions.push(e.insert(&row, rng)?);
        rows.push(row);
    }
    Ok(EmbedTranscript {
        config: *config,
        rows,
        decisions,
        kept: e.into_kept(),
    })
}
