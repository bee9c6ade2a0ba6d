//! The sampling game between an adversary and the online sampler.
//!
//! Each round the adversary proposes an item and a sampling probability. The
//! referee accepts the move only if the probability is at least
//! `min{1, a * x_t / sum_{i<=t} x_i}`, computed from the TRUE prefix sum, then
//! the sampler flips its coin and the adversary sees the outcome. The sampler
//! wins if its estimate stays within `(1 +- eps)` of the true sum at every
//! prefix.

mod strategy;
mod trials;

pub use strategy::{
    dominant_adaptive_strategy, AdversaryStrategy, CandidateGenerator, DominantStrategy,
    GeometricStrategy, ObliviousStrategy, OnesStrategy, StrategyKind,
};
pub use trials::{run_trials, write_transcripts_csv, TrialRun, TrialStats};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{default_probability, SamplerConfig, SamplerState, StepRecord};
use crate::seed::stream_rng;

/// Slack allowed by the referee when comparing a probability to the legal minimum.
pub const LEGALITY_SLACK: f64 = 1e-12;

/// How the adversary sets the sampling probability of its item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbChoice {
    /// The sampler's own rule `min{1, a x / (x + estimate)}`.
    Default,
    /// The smallest legal probability, `min{1, a x / true prefix sum}`.
    GameMinimum,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub x: f64,
    pub p: ProbChoice,
}

impl Move {
    pub fn zero() -> Self {
        Move {
            x: 0.0,
            p: ProbChoice::Fixed(1.0),
        }
    }
}

/// Everything an adversary may look at: the public parameters and the
/// algorithm's outputs so far. Sums are derived from the records alone.
#[derive(Debug, Clone, Copy)]
pub struct GameView<'a> {
    pub config: &'a SamplerConfig,
    pub horizon: usize,
    history: &'a [StepRecord],
    true_sum: f64,
    estimate: f64,
    first_item: Option<f64>,
}

impl<'a> GameView<'a> {
    pub fn history(&self) -> &'a [StepRecord] {
        self.history
    }

    /// Index (1-based) of the round about to be played.
    pub fn round(&self) -> usize {
        self.history.len() + 1
    }

    pub fn true_sum(&self) -> f64 {
        self.true_sum
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn first_item(&self) -> Option<f64> {
        self.first_item
    }

    /// Largest item that keeps `sum / first item` within the cap, shrunk by a
    /// relative 1e-9 so float rounding cannot push the sum over it.
    pub fn remaining_budget(&self) -> f64 {
        match self.first_item {
            None => f64::INFINITY,
            Some(x1) => (self.config.delta_cap * x1 * (1.0 - 1e-9) - self.true_sum).max(0.0),
        }
    }
}

/// Smallest legal probability for item `x` when the true prefix sum including it is `prefix`.
pub fn game_min_probability(amp: f64, x: f64, prefix: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (amp * x / prefix).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub record: StepRecord,
    pub true_sum: f64,
    pub estimate: f64,
}

impl Round {
    pub fn relative_error(&self) -> f64 {
        if self.true_sum == 0.0 {
            0.0
        } else {
            (self.estimate - self.true_sum).abs() / self.true_sum
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Lose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub config: SamplerConfig,
    pub strategy: String,
    pub seed: u64,
    pub rounds: Vec<Round>,
    pub outcome: Outcome,
    /// 1-based round of the first estimate outside `(1 +- eps)`.
    pub first_violation_round: Option<usize>,
}

impl GameTranscript {
    pub fn sample_count(&self) -> usize {
        self.rounds.iter().filter(|r| r.record.coin).count()
    }

    pub fn max_relative_error(&self) -> f64 {
        self.rounds
            .iter()
            .map(Round::relative_error)
            .fold(0.0, f64::max)
    }
}

/// Plays `horizon` rounds of the game with a generator seeded from `seed`.
pub fn play_game(
    strategy: &mut dyn AdversaryStrategy,
    config: &SamplerConfig,
    horizon: usize,
    seed: u64,
) -> Result<GameTranscript> {
    play_game_with_rng(strategy, config, horizon, seed, &mut stream_rng(seed))
}

pub fn play_game_with_rng<R: Rng + ?Sized>(
    strategy: &mut dyn AdversaryStrategy,
    config: &SamplerConfig,
    horizon: usize,
    seed: u64,
    rng: &mut R,
) -> Result<GameTranscript> {
    config.validate()?;
    if horizon == 0 {
        return Err(Error::Domain {
            name: "horizon",
            value: 0.0,
            expected: "at least one round",
        });
    }
    let mut state = SamplerState::new();
    let mut records: Vec<StepRecord> = Vec::with_capacity(horizon);
    let mut rounds = Vec::with_capacity(horizon);
    let mut first_violation = None;

    for round in 1..=horizon {
        let mv = {
            let view = GameView {
                config,
                horizon,
                history: &records,
                true_sum: state.true_sum(),
                estimate: state.estimate(),
                first_item: state.first_item(),
            };
            strategy.next_move(&view)
        };
        let p = referee(config, &state, round, mv)?;
        let record = state
            .step(config, mv.x, Some(p), rng)
            .map_err(|e| Error::IllegalMove {
                round,
                reason: e.to_string(),
            })?;
        records.push(record);
        let r = Round {
            record,
            true_sum: state.true_sum(),
            estimate: state.estimate(),
        };
        if first_violation.is_none()
            && (r.estimate - r.true_sum).abs() > config.epsilon * r.true_sum
        {
            first_violation = Some(round);
        }
        rounds.push(r);
    }

    Ok(GameTranscript {
        config: *config,
        strategy: strategy.name(),
        seed,
        rounds,
        outcome: if first_violation.is_some() {
            Outcome::Lose
        } else {
            Outcome::Win
        },
        first_violation_round: first_violation,
    })
}

/// Validates a move against the game rules and resolves its probability.
fn referee(config: &SamplerConfig, state: &SamplerState, round: usize, mv: Move) -> Result<f64> {
    let illegal = |reason: String| Error::IllegalMove { round, reason };
    if !(mv.x >= 0.0 && mv.x.is_finite()) {
        return Err(illegal(format!("item {} is not a non-negative number", mv.x)));
    }
    if mv.x == 0.0 {
        return Ok(1.0);
    }
    let x1 = state.first_item().unwrap_or(mv.x);
    let prefix = state.true_sum() + mv.x;
    if prefix / x1 > config.delta_cap {
        return Err(illegal(format!(
            "sum / first item = {} exceeds cap {}",
            prefix / x1,
            config.delta_cap
        )));
    }
    let required = game_min_probability(config.amp, mv.x, prefix);
    let p = match mv.p {
        ProbChoice::Default => default_probability(config.amp, mv.x, state.estimate()),
        ProbChoice::GameMinimum => required,
        ProbChoice::Fixed(p) => p,
    };
    if !(p > 0.0 && p <= 1.0) {
        return Err(illegal(format!("probability {p} outside (0, 1]")));
    }
    if p < required * (1.0 - LEGALITY_SLACK) {
        return Err(illegal(format!(
            "probability {p} below the legal minimum {required}"
        )));
    }
    Ok(p)
}
