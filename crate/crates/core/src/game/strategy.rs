use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GameView, Move, ProbChoice};
use crate::sampler::SamplerConfig;

/// An adversary in the sampling game.
///
/// The only input is a [`GameView`], which exposes the public parameters and
/// the records the sampler has already emitted. Strategies never see the
/// sampler's generator.
pub trait AdversaryStrategy {
    fn name(&self) -> String;
    fn next_move(&mut self, view: &GameView<'_>) -> Move;
}

/// The all-ones stream, played at the smallest legal probability.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnesStrategy;

impl AdversaryStrategy for OnesStrategy {
    fn name(&self) -> String {
        "ones".into()
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        if view.remaining_budget() < 1.0 {
            return Move::zero();
        }
        Move {
            x: 1.0,
            p: ProbChoice::GameMinimum,
        }
    }
}

/// 1, 2, 4, ... until the cap is reached, then zeros.
#[derive(Debug, Clone, Copy)]
pub struct GeometricStrategy {
    choice: ProbChoice,
    next: f64,
}

impl GeometricStrategy {
    pub fn new(choice: ProbChoice) -> Self {
        Self { choice, next: 1.0 }
    }
}

impl AdversaryStrategy for GeometricStrategy {
    fn name(&self) -> String {
        "geometric".into()
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        if self.next > view.remaining_budget() {
            return Move::zero();
        }
        let x = self.next;
        self.next *= 2.0;
        Move { x, p: self.choice }
    }
}

/// A fixed item sequence (zeros after it runs out).
#[derive(Debug, Clone)]
pub struct ObliviousStrategy {
    items: Vec<f64>,
    choice: ProbChoice,
}

impl ObliviousStrategy {
    pub fn new(items: Vec<f64>, choice: ProbChoice) -> Self {
        Self { items, choice }
    }
}

impl AdversaryStrategy for ObliviousStrategy {
    fn name(&self) -> String {
        "oblivious".into()
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        match self.items.get(view.round() - 1) {
            Some(&x) => Move { x, p: self.choice },
            None => Move::zero(),
        }
    }
}

/// How the dominant strategy proposes its candidate item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateGenerator {
    /// The largest item the cap allows.
    MaxGreedy,
    /// The item whose coin has the largest variance, i.e. probability 1/2.
    RatioGreedy,
    /// While the estimate trails the true sum, a large item kept with
    /// probability 0.9; otherwise a tiny one.
    ErrorChaser,
}

impl CandidateGenerator {
    /// Item `c * estimate` whose online importance `2a c / (1 + c)` equals `target`.
    fn item_for_probability(target: f64, estimate: f64, amp: f64) -> f64 {
        estimate * target / (2.0 * amp - target)
    }

    fn propose(&self, view: &GameView<'_>) -> f64 {
        if view.first_item().is_none() {
            return 1.0;
        }
        let amp = view.config.amp;
        let est = view.estimate();
        let chi = match self {
            CandidateGenerator::MaxGreedy => view.remaining_budget(),
            CandidateGenerator::RatioGreedy => Self::item_for_probability(0.5, est, amp),
            CandidateGenerator::ErrorChaser => {
                if est < view.true_sum() {
                    Self::item_for_probability(0.9, est, amp)
                } else {
                    1e-6 * view.true_sum()
                }
            }
        };
        chi.min(view.remaining_budget())
    }
}

/// The adversary from the reduction of the sampler to the game: it proposes a
/// candidate `chi`, plays it at the sampler's own probability with amplification
/// `2a` whenever that probability is legal, and plays a zero otherwise.
#[derive(Debug, Clone, Copy)]
pub struct DominantStrategy {
    generator: CandidateGenerator,
}

pub fn dominant_adaptive_strategy(_config: &SamplerConfig, generator: CandidateGenerator) -> DominantStrategy {
    DominantStrategy { generator }
}

impl DominantStrategy {
    pub fn generator(&self) -> CandidateGenerator {
        self.generator
    }
}

impl AdversaryStrategy for DominantStrategy {
    fn name(&self) -> String {
        format!("dominant/{}", StrategyKind::from(self.generator))
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        let chi = self.generator.propose(view);
        if !(chi > 0.0) {
            return Move::zero();
        }
        let amp = view.config.amp;
        let online = 2.0 * amp * chi / (chi + view.estimate());
        let legal = amp * chi / (chi + view.true_sum());
        if online >= legal {
            Move {
                x: chi,
                p: ProbChoice::Fixed(online.min(1.0)),
            }
        } else {
            Move::zero()
        }
    }
}

/// Named built-in strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Ones,
    Geometric,
    MaxGreedy,
    RatioGreedy,
    ErrorChaser,
    /// All-ones items, each kept with probability 1.
    AlwaysOne,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Ones,
        StrategyKind::Geometric,
        StrategyKind::MaxGreedy,
        StrategyKind::RatioGreedy,
        StrategyKind::ErrorChaser,
        StrategyKind::AlwaysOne,
    ];

    pub fn build(&self, config: &SamplerConfig) -> Box<dyn AdversaryStrategy> {
        match self {
            StrategyKind::Ones => Box::new(OnesStrategy),
            StrategyKind::Geometric => Box::new(GeometricStrategy::new(ProbChoice::Default)),
            StrategyKind::MaxGreedy => Box::new(dominant_adaptive_strategy(config, CandidateGenerator::MaxGreedy)),
            StrategyKind::RatioGreedy => Box::new(dominant_adaptive_strategy(config, CandidateGenerator::RatioGreedy)),
            StrategyKind::ErrorChaser => Box::new(dominant_adaptive_strategy(config, CandidateGenerator::ErrorChaser)),
            StrategyKind::AlwaysOne => Box::new(AlwaysOneStrategy),
        }
    }
}

impl From<CandidateGenerator> for StrategyKind {
    fn from(g: CandidateGenerator) -> Self {
        match g {
            CandidateGenerator::MaxGreedy => StrategyKind::MaxGreedy,
            CandidateGenerator::RatioGreedy => StrategyKind::RatioGreedy,
            CandidateGenerator::ErrorChaser => StrategyKind::ErrorChaser,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyKind::Ones => "ones",
            StrategyKind::Geometric => "geometric",
            StrategyKind::MaxGreedy => "max-greedy",
            StrategyKind::RatioGreedy => "ratio-greedy",
            StrategyKind::ErrorChaser => "error-chaser",
            StrategyKind::AlwaysOne => "always-one",
        };
        f.write_str(s)
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .iter()
            .copied()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = StrategyKind::ALL.iter().map(|k| k.to_string()).collect();
                format!("unknown strategy `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct AlwaysOneStrategy;

impl AdversaryStrategy for AlwaysOneStrategy {
    fn name(&self) -> String {
        "always-one".into()
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        if view.remaining_budget() < 1.0 {
            return Move::zero();
        }
        Move {
            x: 1.0,
            p: ProbChoice::Fixed(1.0),
        }
    }
}
