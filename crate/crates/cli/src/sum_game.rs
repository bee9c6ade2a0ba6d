use anyhow::{bail, Result};
use serde::Serialize;

use robust_sampling::game::{run_trials, write_transcripts_csv, GameTranscript, StrategyKind, TrialStats};
use robust_sampling::SamplerConfig;

use crate::args::{Format, SumGameArgs};
use crate::output::{sink, write_json};
use crate::{Failure, Outcome};

#[derive(Serialize)]
struct StrategyReport {
    strategy: String,
    master_seed: u64,
    stats: TrialStats,
    threshold: f64,
    passed: bool,
}

#[derive(Serialize)]
struct Report {
    family: &'static str,
    config: SamplerConfig,
    horizon: usize,
    trials: usize,
    master_seed: u64,
    runs: Vec<StrategyReport>,
    passed: bool,
}

fn validate(a: &SumGameArgs) -> Result<SamplerConfig> {
    if a.common.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if a.horizon == 0 {
        bail!("--horizon must be at least 1");
    }
    let mut config = SamplerConfig::new(a.eps, a.delta, a.delta_cap)?;
    if let Some(amp) = a.amp {
        config = config.with_amp(amp)?;
    }
    if let Some(t) = a.threshold {
        if !(0.0..=1.0).contains(&t) {
            bail!("--threshold must lie in [0, 1], got {t}");
        }
    }
    if a.common.output.format == Format::Csv && a.strategy.kinds().len() > 1 {
        bail!("--format csv writes per-round transcripts of a single strategy; pick one with --strategy");
    }
    Ok(config)
}

pub fn run(a: &SumGameArgs) -> Result<Outcome, Failure> {
    let config = validate(a)?;
    let threshold = a.threshold.unwrap_or(1.0 - a.delta - 0.025);
    let mut runs = Vec::new();
    let mut transcripts: Vec<GameTranscript> = Vec::new();
    let mut failures = Vec::new();
    // Strategy j of a multi-strategy run uses master seed `seed + j`.
    for (j, kind) in a.strategy.kinds().into_iter().enumerate() {
        let master = a.common.seed.wrapping_add(j as u64);
        let run = run_trials(
            |_| StrategyKind::build(&kind, &config),
            &config,
            a.horizon,
            a.common.trials,
            master,
            a.common.jobs,
        )?;
        let passed = run.stats.win_rate >= threshold;
        if !passed {
            failures.push(format!(
                "sum-game win rate {} of strategy {kind} is below {threshold}",
                run.stats.win_rate
            ));
        }
        runs.push(StrategyReport { strategy: kind.to_string(), master_seed: master, stats: run.stats, threshold, passed });
        transcripts = run.transcripts;
    }
    match a.common.output.format {
        Format::Json => {
            let report = Report {
                family: "sum-game",
                config,
                horizon: a.horizon,
                trials: a.common.trials,
                master_seed: a.common.seed,
                passed: failures.is_empty(),
                runs,
            };
            write_json(&a.common.output, &report)?;
        }
        Format::Csv => write_transcripts_csv(sink(&a.common.output)?, &transcripts)?,
    }
    Ok(Outcome { failures })
}
