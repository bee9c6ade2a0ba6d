//! `verify` and `audit`: recompute reports from a saved JSON run.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use robust_sampling::hypergraph::{size_audit, verify_sparsifier, CutReport, SizeAudit};
use robust_sampling::subspace::{sensitivity_sum_audit, EmbeddingReport, SensitivityAudit};

use crate::args::{AuditTarget, OutputArgs, VerifyTarget};
use crate::output::{emit, read_input};
use crate::{hypergraph, subspace, Failure, Outcome};

#[derive(Serialize)]
struct Checked<R> {
    input: String,
    trial: usize,
    seed: u64,
    report: R,
}

#[derive(Serialize)]
struct CheckReport<R> {
    check: &'static str,
    trials: Vec<Checked<R>>,
    passed: bool,
}

fn load<T: serde::de::DeserializeOwned>(path: &std::path::Path, family: &str) -> Result<T> {
    let text = read_input(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not a JSON report", path.display()))?;
    match value.get("family").and_then(|f| f.as_str()) {
        Some(f) if f == family => {}
        Some(f) => bail!("{} holds a {f} report, expected {family}", path.display()),
        None => bail!("{} has no `family` field; pass a JSON report written by `{family}`", path.display()),
    }
    serde_json::from_value(value).with_context(|| format!("{} is not a valid {family} report", path.display()))
}

fn finish<R: Serialize>(
    output: &OutputArgs,
    check: &'static str,
    input: &std::path::Path,
    rows: Vec<(usize, u64, R, bool)>,
    csv: impl Fn(&R) -> Vec<String>,
    header: &[&str],
) -> Result<Outcome> {
    let failed: Vec<usize> = rows.iter().filter(|r| !r.3).map(|r| r.0).collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(t, s, r, _)| {
            let mut row = vec![t.to_string(), s.to_string()];
            row.extend(csv(r));
            row
        })
        .collect();
    let report = CheckReport {
        check,
        passed: failed.is_empty(),
        trials: rows
            .into_iter()
            .map(|(trial, seed, report, _)| Checked { input: input.display().to_string(), trial, seed, report })
            .collect(),
    };
    let mut full_header = vec!["trial", "seed"];
    full_header.extend_from_slice(header);
    emit(output, &report, &full_header, || csv_rows)?;
    let failures = if failed.is_empty() {
        Vec::new()
    } else {
        vec![format!("{check} failed for trials {failed:?}")]
    };
    Ok(Outcome { failures })
}

fn ratio_fields(low: f64, high: f64, passed: bool) -> Vec<String> {
    vec![low.to_string(), high.to_string(), u8::from(passed).to_string()]
}

pub fn verify(target: &VerifyTarget) -> Result<Outcome, Failure> {
    match target {
        VerifyTarget::Cuts { input, family, k, eps, output } => {
            let run: hypergraph::Report = load(input, "hypergraph")?;
            let family = hypergraph::cut_family(*family, k).ok_or_else(|| anyhow!("--family none checks nothing"))?;
            let eps = eps.unwrap_or(run.epsilon);
            let mut rows = Vec::new();
            for t in &run.trials {
                let h = hypergraph::original(run.n, &t.decisions)?;
                let r: CutReport = verify_sparsifier(&h, &t.sparsifier.to_hypergraph(), eps, &family)?;
                let ok = r.passed;
                rows.push((t.trial, t.seed, r, ok));
            }
            Ok(finish(
                output,
                "cut verification",
                input,
                rows,
                |r| {
                    let mut v = vec![r.partitions_checked.to_string(), r.num_violations.to_string()];
                    v.extend(ratio_fields(r.worst_ratio_low, r.worst_ratio_high, r.passed));
                    v
                },
                &["partitions_checked", "num_violations", "worst_ratio_low", "worst_ratio_high", "passed"],
            )?)
        }
        VerifyTarget::Embedding { input, mode, net_resolution, eps, output } => {
            let run: subspace::Report = load(input, "subspace")?;
            let eps = eps.unwrap_or(run.config.epsilon);
            let mut rows = Vec::new();
            for t in &run.trials {
                let r: EmbeddingReport = subspace::check(&t.transcript, *mode, eps, *net_resolution)?
                    .ok_or_else(|| anyhow!("--mode none checks nothing"))?;
                let ok = r.passed;
                rows.push((t.trial, t.seed, r, ok));
            }
            Ok(finish(
                output,
                "embedding verification",
                input,
                rows,
                |r| {
                    let mut v = vec![r.mode.clone(), r.rank.to_string(), r.directions_tested.to_string()];
                    v.extend(ratio_fields(r.worst_ratio_low, r.worst_ratio_high, r.passed));
                    v
                },
                &["mode", "rank", "directions_tested", "worst_ratio_low", "worst_ratio_high", "passed"],
            )?)
        }
    }
}

pub fn audit(target: &AuditTarget) -> Result<Outcome, Failure> {
    match target {
        AuditTarget::Hypergraph { input, c_size, output } => {
            let run: hypergraph::Report = load(input, "hypergraph")?;
            let rows: Vec<(usize, u64, SizeAudit, bool)> = run
                .trials
                .iter()
                .map(|t| {
                    let a = size_audit(&t.sparsifier, *c_size);
                    let ok = a.passed;
                    (t.trial, t.seed, a, ok)
                })
                .collect();
            Ok(finish(
                output,
                "hypergraph size audit",
                input,
                rows,
                |a| {
                    vec![
                        a.num_kept.to_string(),
                        a.total_weight.to_string(),
                        a.weight_bound.to_string(),
                        a.size_bound.to_string(),
                        u8::from(a.layers_ok).to_string(),
                        u8::from(a.passed).to_string(),
                    ]
                },
                &["num_kept", "total_weight", "weight_bound", "size_bound", "layers_ok", "passed"],
            )?)
        }
        AuditTarget::Subspace { input, c_audit, output } => {
            let run: subspace::Report = load(input, "subspace")?;
            let rows: Vec<(usize, u64, SensitivityAudit, bool)> = run
                .trials
                .iter()
                .map(|t| {
                    let a = sensitivity_sum_audit(&t.transcript, *c_audit);
                    let ok = a.passed;
                    (t.trial, t.seed, a, ok)
                })
                .collect();
            Ok(finish(
                output,
                "subspace sensitivity audit",
                input,
                rows,
                |a| {
                    vec![
                        a.kappa_ol.to_string(),
                        a.sensitivity_sum.to_string(),
                        a.sum_bound.to_string(),
                        a.kept.to_string(),
                        a.kept_bound.to_string(),
                        u8::from(a.passed).to_string(),
                    ]
                },
                &["kappa_ol", "sensitivity_sum", "sum_bound", "kept", "kept_bound", "passed"],
            )?)
        }
    }
}
