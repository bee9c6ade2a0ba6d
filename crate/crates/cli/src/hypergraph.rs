use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use robust_sampling::hypergraph::{
    parse_edge_stream, run_edge_adversary, size_audit, stream_sparsify, verify_sparsifier, CutFamily, CutReport,
    EdgeDecision, Hypergraph, RandomEdges, ReinsertionAdversary, SizeAudit, Sparsifier, N_MAX_EXACT,
};
use robust_sampling::seed::{stream_rng, sub_seed, trial_seed};

use crate::args::{CutFamilyArg, EdgeSource, HypergraphArgs};
use crate::output::{emit, read_input};
use crate::{Failure, Outcome};

#[derive(Debug, Serialize, Deserialize)]
pub struct Trial {
    pub trial: usize,
    pub seed: u64,
    pub decisions: Vec<EdgeDecision>,
    pub sparsifier: Sparsifier,
    #[serde(skip_deserializing)]
    pub verification: Option<CutReport>,
    #[serde(skip_deserializing)]
    pub audit: Option<SizeAudit>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub family: String,
    pub n: usize,
    pub epsilon: f64,
    pub k1: f64,
    pub source: String,
    pub master_seed: u64,
    pub trials: Vec<Trial>,
    #[serde(skip_deserializing)]
    pub violation_rate: Option<f64>,
    #[serde(skip_deserializing)]
    pub audits_passed: usize,
    #[serde(skip_deserializing)]
    pub passed: bool,
}

pub fn cut_family(arg: CutFamilyArg, k: &[usize]) -> Option<CutFamily> {
    match arg {
        CutFamilyArg::None => None,
        CutFamilyArg::TwoCuts => Some(CutFamily::TwoCuts),
        CutFamilyArg::AllCuts => Some(CutFamily::AllCuts),
        CutFamilyArg::KCuts => Some(CutFamily::KCuts(k.to_vec())),
    }
}

/// The full stream of a trial, every edge with weight 1.
pub fn original(n: usize, decisions: &[EdgeDecision]) -> Result<Hypergraph> {
    let mut h = Hypergraph::new(n)?;
    for d in decisions {
        h.add_hyperedge(d.edge, 1.0)?;
    }
    Ok(h)
}

pub fn csv_rows(trials: &[Trial]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for t in trials {
        for d in &t.decisions {
            let vs: Vec<String> = d.edge.vertices().iter().map(|v| v.to_string()).collect();
            let weight = if d.coin { 1.0 / d.p } else { 0.0 };
            rows.push(vec![
                t.trial.to_string(),
                t.seed.to_string(),
                d.index.to_string(),
                vs.join(" "),
                d.strength.to_string(),
                d.p.to_string(),
                u8::from(d.coin).to_string(),
                weight.to_string(),
            ]);
        }
    }
    rows
}

pub const CSV_HEADER: [&str; 8] = ["trial", "seed", "index", "edge", "strength", "p", "coin", "weight"];

/// Summary thresholds over checked trials; returns the failure messages.
pub fn summarize(report: &mut Report, max_violation_rate: f64) -> Vec<String> {
    let mut failures = Vec::new();
    let checked: Vec<&CutReport> = report.trials.iter().filter_map(|t| t.verification.as_ref()).collect();
    report.violation_rate = if checked.is_empty() {
        None
    } else {
        Some(checked.iter().filter(|r| !r.passed).count() as f64 / checked.len() as f64)
    };
    if let Some(rate) = report.violation_rate {
        if rate > max_violation_rate {
            failures.push(format!("hypergraph cut violations in {rate} of trials, above {max_violation_rate}"));
        }
    }
    let audits: Vec<&SizeAudit> = report.trials.iter().filter_map(|t| t.audit.as_ref()).collect();
    report.audits_passed = audits.iter().filter(|a| a.passed).count();
    if report.audits_passed < audits.len() {
        failures.push(format!(
            "hypergraph size audits passed in {} of {} trials",
            report.audits_passed,
            audits.len()
        ));
    }
    report.passed = failures.is_empty();
    failures
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

pub fn run(a: &HypergraphArgs) -> Result<Outcome, Failure> {
    if a.common.trials == 0 {
        return Err(anyhow!("--trials must be at least 1").into());
    }
    let family = cut_family(a.verify, &a.k);
    if family.is_some() && a.n > N_MAX_EXACT {
        return Err(anyhow!("--verify needs --n <= {N_MAX_EXACT} (exhaustive cut enumeration); use --verify none").into());
    }
    let file_edges = match &a.stream {
        Some(path) => Some(parse_edge_stream(&read_input(path)?, a.n)?),
        None => None,
    };
    let source = match (&a.stream, a.adversary) {
        (Some(path), _) => format!("file:{}", path.display()),
        (None, EdgeSource::Random) => "random".to_string(),
        (None, EdgeSource::Reinsertion) => "reinsertion".to_string(),
    };
    // validate the sampler parameters once, before spawning trials
    robust_sampling::hypergraph::StreamingSparsifier::new(a.n, a.eps, a.k1)?;

    let trials: Vec<Trial> = pool(a.common.jobs)?.install(|| {
        (0..a.common.trials)
            .into_par_iter()
            .map(|i| -> Result<Trial> {
                let seed = trial_seed(a.common.seed, i as u64);
                let mut rng = stream_rng(seed);
                let (decisions, sparsifier) = match (&file_edges, a.adversary) {
                    (Some(edges), _) => stream_sparsify(edges, a.n, a.eps, a.k1, &mut rng)?,
                    (None, EdgeSource::Random) => {
                        let edges = RandomEdges::generate(a.n, a.edges, sub_seed(seed, 1));
                        stream_sparsify(&edges, a.n, a.eps, a.k1, &mut rng)?
                    }
                    (None, EdgeSource::Reinsertion) => {
                        let mut adv = ReinsertionAdversary::new(a.edges, sub_seed(seed, 1));
                        run_edge_adversary(&mut adv, a.n, a.eps, a.k1, &mut rng)?
                    }
                };
                let verification = match &family {
                    Some(f) => {
                        let h = original(a.n, &decisions)?;
                        Some(verify_sparsifier(&h, &sparsifier.to_hypergraph(), a.eps, f)?)
                    }
                    None => None,
                };
                let audit = Some(size_audit(&sparsifier, a.c_size));
                Ok(Trial { trial: i, seed, decisions, sparsifier, verification, audit })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut report = Report {
        family: "hypergraph".into(),
        n: a.n,
        epsilon: a.eps,
        k1: a.k1,
        source,
        master_seed: a.common.seed,
        trials,
        violation_rate: None,
        audits_passed: 0,
        passed: false,
    };
    let failures = summarize(&mut report, a.max_violation_rate);
    emit(&a.common.output, &report, &CSV_HEADER, || csv_rows(&report.trials))?;
    Ok(Outcome { failures })
}
