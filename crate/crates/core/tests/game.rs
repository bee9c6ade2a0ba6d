use proptest::prelude::*;

use robust_sampling::game::{
    game_min_probability, play_game, run_trials, AdversaryStrategy, GameView, Move, ObliviousStrategy, Outcome,
    ProbChoice, StrategyKind,
};
use robust_sampling::{Error, SamplerConfig};

fn config() -> SamplerConfig {
    SamplerConfig::new(0.3, 0.2, 1e9).unwrap()
}

/// Proposes a fixed probability well under the legal minimum once the sum is large.
struct Cheater;

impl AdversaryStrategy for Cheater {
    fn name(&self) -> String {
        "cheater".into()
    }

    fn next_move(&mut self, view: &GameView<'_>) -> Move {
        let p = if view.round() > 200 { 1e-9 } else { 1.0 };
        Move { x: 1.0, p: ProbChoice::Fixed(p) }
    }
}

#[test]
fn illegal_probability_is_rejected() {
    let err = play_game(&mut Cheater, &config(), 300, 1).unwrap_err();
    assert!(matches!(err, Error::IllegalMove { round: 201, .. }), "{err:?}");
}

#[test]
fn trial_results_do_not_depend_on_thread_count() {
    let c = config();
    let one = run_trials(|_| StrategyKind::MaxGreedy.build(&c), &c, 300, 24, 99, 1).unwrap();
    let four = run_trials(|_| StrategyKind::MaxGreedy.build(&c), &c, 300, 24, 99, 4).unwrap();
    assert_eq!(one.transcripts, four.transcripts);
    assert_eq!(one.stats, four.stats);
}

#[test]
fn zero_trials_is_a_domain_error() {
    let c = config();
    assert!(matches!(
        run_trials(|_| StrategyKind::Ones.build(&c), &c, 10, 0, 1, 1),
        Err(Error::Domain { name: "n_trials", .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transcripts_are_consistent(
        items in proptest::collection::vec(prop_oneof![Just(0.0), 0.5f64..50.0], 1..120),
        seed in any::<u64>(),
        minimum in any::<bool>(),
    ) {
        let c = config();
        // the sampler's own rule is not always legal: it undershoots when the estimate runs high
        let choice = if minimum { ProbChoice::GameMinimum } else { ProbChoice::Fixed(1.0) };
        let mut s = ObliviousStrategy::new(items.clone(), choice);
        let tr = play_game(&mut s, &c, items.len(), seed).unwrap();
        let mut true_sum = 0.0;
        let mut estimate = 0.0;
        for (r, &x) in tr.rounds.iter().zip(&items) {
            prop_assert_eq!(r.record.x, x);
            true_sum += x;
            if r.record.coin {
                estimate += r.record.x_tilde;
            }
            prop_assert!((r.true_sum - true_sum).abs() <= 1e-12 * true_sum);
            prop_assert!((r.estimate - estimate).abs() <= 1e-9 * estimate.max(1.0));
            if x > 0.0 {
                prop_assert!(r.record.p >= game_min_probability(c.amp, x, true_sum) * (1.0 - 1e-12));
            } else {
                prop_assert!(!r.record.coin);
            }
        }
        let lost = tr.first_violation_round.is_some();
        prop_assert_eq!(tr.outcome == Outcome::Lose, lost);
        // replaying the same seed gives the same game
        let mut again = ObliviousStrategy::new(items.clone(), choice);
        prop_assert_eq!(play_game(&mut again, &c, items.len(), seed).unwrap(), tr);
    }
}
