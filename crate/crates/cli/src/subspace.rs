use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use robust_sampling::seed::{stream_rng, sub_seed, trial_seed};
use robust_sampling::subspace::{
    parse_row_stream, run_row_adversary, sensitivity_sum_audit, stream_embed, verify_embedding,
    verify_ridge_embedding, EmbedConfig, EmbedTranscript, EmbeddingReport, RandomRows, ResubmissionAdversary,
    RowDistribution, SensitivityAudit, SpanMode, VerifyMode, DEFAULT_NET_LIMIT, SPAN_TOLERANCE,
};

use crate::args::{DistArg, EmbeddingCheck, RowSource, SpanArg, SubspaceArgs};
use crate::output::{emit, read_input};
use crate::{Failure, Outcome};

#[derive(Debug, Serialize, Deserialize)]
pub struct Trial {
    pub trial: usize,
    pub seed: u64,
    pub transcript: EmbedTranscript,
    #[serde(skip_deserializing)]
    pub verification: Option<EmbeddingReport>,
    #[serde(skip_deserializing)]
    pub audit: Option<SensitivityAudit>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub family: String,
    pub config: EmbedConfig,
    pub source: String,
    pub master_seed: u64,
    pub trials: Vec<Trial>,
    #[serde(skip_deserializing)]
    pub pass_rate: Option<f64>,
    #[serde(skip_deserializing)]
    pub audits_passed: usize,
    #[serde(skip_deserializing)]
    pub passed: bool,
}

pub const CSV_HEADER: [&str; 9] = ["trial", "seed", "index", "row", "s_prime", "p", "coin", "in_span", "scale"];

pub fn csv_rows(trials: &[Trial]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for t in trials {
        let p_norm = t.transcript.config.p;
        for (d, row) in t.transcript.decisions.iter().zip(&t.transcript.rows) {
            let vs: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let scale = if d.coin { d.p.powf(-1.0 / p_norm) } else { 0.0 };
            out.push(vec![
                t.trial.to_string(),
                t.seed.to_string(),
                d.index.to_string(),
                vs.join(" "),
                d.s_prime.to_string(),
                d.p.to_string(),
                u8::from(d.coin).to_string(),
                u8::from(d.in_span).to_string(),
                scale.to_string(),
            ]);
        }
    }
    out
}

/// Runs the chosen distortion check on one transcript.
pub fn check(tr: &EmbedTranscript, mode: EmbeddingCheck, eps: f64, net_resolution: f64) -> Result<Option<EmbeddingReport>> {
    Ok(match mode {
        EmbeddingCheck::None => None,
        EmbeddingCheck::Pencil => Some(verify_embedding(&tr.rows, &tr.kept, eps, VerifyMode::Pencil)?),
        EmbeddingCheck::Ridge => Some(verify_ridge_embedding(&tr.rows, &tr.kept, eps)?),
        EmbeddingCheck::Net => {
            let mode = VerifyMode::Net { resolution: net_resolution, limit: DEFAULT_NET_LIMIT };
            Some(verify_embedding(&tr.rows, &tr.kept, eps, mode)?)
        }
    })
}

pub fn summarize(report: &mut Report, min_pass_rate: f64) -> Vec<String> {
    let mut failures = Vec::new();
    let checked: Vec<&EmbeddingReport> = report.trials.iter().filter_map(|t| t.verification.as_ref()).collect();
    report.pass_rate = if checked.is_empty() {
        None
    } else {
        Some(checked.iter().filter(|r| r.passed).count() as f64 / checked.len() as f64)
    };
    if let Some(rate) = report.pass_rate {
        if rate < min_pass_rate {
            failures.push(format!("subspace distortion check passed in {rate} of trials, below {min_pass_rate}"));
        }
    }
    let audits: Vec<&SensitivityAudit> = report.trials.iter().filter_map(|t| t.audit.as_ref()).collect();
    report.audits_passed = audits.iter().filter(|a| a.passed).count();
    if report.audits_passed < audits.len() {
        failures.push(format!(
            "subspace sensitivity audits passed in {} of {} trials",
            report.audits_passed,
            audits.len()
        ));
    }
    report.passed = failures.is_empty();
    failures
}

pub fn run(a: &SubspaceArgs) -> Result<Outcome, Failure> {
    if a.common.trials == 0 {
        return Err(anyhow!("--trials must be at least 1").into());
    }
    let file_rows = match &a.stream {
        Some(path) => Some(parse_row_stream(&read_input(path)?, a.d)?),
        None => None,
    };
    let (d, n_bound, bound) = match &file_rows {
        Some(rows) => {
            let d = a.d.or(rows.first().map(Vec::len)).ok_or_else(|| anyhow!("empty row stream; pass --d"))?;
            let largest = rows.iter().flatten().map(|v| v.abs()).max().unwrap_or(1).max(1);
            (d, a.n.max(rows.len()), a.bound.unwrap_or(largest))
        }
        None => (a.d.ok_or_else(|| anyhow!("--d is required without --stream"))?, a.n, a.bound.unwrap_or(100)),
    };
    let span = match a.span {
        SpanArg::Exact => SpanMode::Exact,
        SpanArg::Tolerance => SpanMode::Tolerance(SPAN_TOLERANCE),
    };
    let config = EmbedConfig::new(d, a.p, a.eps, a.kappa, n_bound, bound)?
        .with_k1(a.k1)?
        .with_span_mode(span);
    config.ridge_lambda()?;
    let mode = a.verify.unwrap_or(if a.p == 2.0 { EmbeddingCheck::Pencil } else { EmbeddingCheck::None });
    let dist = match a.dist {
        DistArg::Uniform => RowDistribution::Uniform,
        DistArg::Gaussian => RowDistribution::Gaussian,
    };
    let source = match (&a.stream, a.adversary) {
        (Some(path), _) => format!("file:{}", path.display()),
        (None, RowSource::Random) => "random".to_string(),
        (None, RowSource::Resubmission) => "resubmission".to_string(),
    };

    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.common.jobs).build()?;
    let trials: Vec<Trial> = pool.install(|| {
        (0..a.common.trials)
            .into_par_iter()
            .map(|i| -> Result<Trial> {
                let seed = trial_seed(a.common.seed, i as u64);
                let mut rng = stream_rng(seed);
                let transcript = match (&file_rows, a.adversary) {
                    (Some(rows), _) => stream_embed(rows, &config, &mut rng)?,
                    (None, RowSource::Random) => {
                        let mut adv = RandomRows::new(a.n, bound, dist, sub_seed(seed, 1));
                        run_row_adversary(&mut adv, &config, &mut rng)?
                    }
                    (None, RowSource::Resubmission) => {
                        let mut adv = ResubmissionAdversary::new(a.n, bound, dist, sub_seed(seed, 1));
                        run_row_adversary(&mut adv, &config, &mut rng)?
                    }
                };
                let verification = check(&transcript, mode, a.eps, a.net_resolution)?;
                let audit = Some(sensitivity_sum_audit(&transcript, a.c_audit));
                Ok(Trial { trial: i, seed, transcript, verification, audit })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut report = Report {
        family: "subspace".into(),
        config,
        source,
        master_seed: a.common.seed,
        trials,
        pass_rate: None,
        audits_passed: 0,
        passed: false,
    };
    let failures = summarize(&mut report, a.min_pass_rate);
    emit(&a.common.output, &report, &CSV_HEADER, || csv_rows(&report.trials))?;
    Ok(Outcome { failures })
}
