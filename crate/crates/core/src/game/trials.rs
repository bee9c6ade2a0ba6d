use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{play_game, AdversaryStrategy, GameTranscript, Outcome};
use crate::error::{Error, Result};
use crate::sampler::SamplerConfig;
use crate::seed::trial_seed;

/// Summary of many independent games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub win_rate: f64,
    pub n_trials: usize,
    pub max_rel_error: f64,
    pub mean_samples: f64,
    pub max_samples: usize,
    pub config: SamplerConfig,
    #[serde(skip)]
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone)]
pub struct TrialRun {
    pub stats: TrialStats,
    pub transcripts: Vec<GameTranscript>,
}

/// Builds a thread pool with `jobs` workers (0 = rayon's default).
pub(crate) fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))
}

/// Plays `n_trials` games; trial `i` uses seed `trial_seed(master_seed, i)`.
/// Results are ordered by trial index whatever the completion order.
pub fn run_trials<F>(
    strategy_factory: F,
    config: &SamplerConfig,
    horizon: usize,
    n_trials: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<TrialRun>
where
    F: Fn(usize) -> Box<dyn AdversaryStrategy> + Sync,
{
    if n_trials == 0 {
        return Err(Error::Domain {
            name: "n_trials",
            value: 0.0,
            expected: "at least one trial",
        });
    }
    let transcripts: Vec<GameTranscript> = pool(jobs)?.install(|| {
        (0..n_trials)
            .into_par_iter()
            .map(|i| {
                let mut strategy = strategy_factory(i);
                play_game(strategy.as_mut(), config, horizon, trial_seed(master_seed, i as u64))
                    .map_err(|e| Error::Trial {
                        index: i,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let outcomes: Vec<Outcome> = transcripts.iter().map(|t| t.outcome).collect();
    let wins = outcomes.iter().filter(|&&o| o == Outcome::Win).count();
    let samples: Vec<usize> = transcripts.iter().map(GameTranscript::sample_count).collect();
    let stats = TrialStats {
        win_rate: wins as f64 / n_trials as f64,
        n_trials,
        max_rel_error: transcripts
            .iter()
            .map(GameTranscript::max_relative_error)
            .fold(0.0, f64::max),
        mean_samples: samples.iter().sum::<usize>() as f64 / n_trials as f64,
        max_samples: samples.iter().copied().max().unwrap_or(0),
        config: *config,
        outcomes,
    };
    Ok(TrialRun { stats, transcripts })
}

/// Writes one CSV row per round:
/// `trial_id,t,x,p,coin,x_tilde,true_sum,estimate,rel_error`.
pub fn write_transcripts_csv<W: Write>(out: W, transcripts: &[GameTranscript]) -> Result<()> {
    let io = |e: csv::Error| Error::Numerical(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial_id", "t", "x", "p", "coin", "x_tilde", "true_sum", "estimate", "rel_error",
    ])
    .map_err(io)?;
    for (trial, tr) in transcripts.iter().enumerate() {
        for (i, r) in tr.rounds.iter().enumerate() {
            w.write_record(&[
                trial.to_string(),
                (i + 1).to_string(),
                r.record.x.to_string(),
                r.record.p.to_string(),
                u8::from(r.record.coin).to_string(),
                r.record.x_tilde.to_string(),
                r.true_sum.to_string(),
                r.estimate.to_string(),
                r.relative_error().to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Numerical(format!("csv output failed: {e}")))
}
