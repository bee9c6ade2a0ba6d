use serde::{Deserialize, Serialize};

use super::partition::{for_each_partition, Partition};
use super::strength::inside_weights;
use super::{check_exact_size, Hypergraph};
use crate::error::{check_open_unit, Error, Result};

/// Relative slack on the `[1 - eps, 1 + eps]` band, absorbing rounding in the cut sums.
const RATIO_SLACK: f64 = 1e-12;

/// At most this many violating partitions are listed in a report.
const MAX_LISTED: usize = 100;

/// Which partitions to check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutFamily {
    /// Every 2-way partition.
    TwoCuts,
    /// Every partition with at least two blocks.
    AllCuts,
    /// Every partition whose block count is listed.
    KCuts(Vec<usize>),
}

impl CutFamily {
    fn contains(&self, k: usize) -> bool {
        k >= 2
            && match self {
                CutFamily::TwoCuts => k == 2,
                CutFamily::AllCuts => true,
                CutFamily::KCuts(ks) => ks.contains(&k),
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub partition: Partition,
    pub ratio: f64,
    pub cut: f64,
    pub sparse_cut: f64,
}

/// Result of comparing every cut in a family.
///
/// Ratios are `cut_sparse / cut_original` over partitions with a nonzero
/// original cut; a partition with zero original cut counts as a violation
/// only if the sparse cut is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub epsilon: f64,
    pub partitions_checked: u64,
    pub worst_ratio_low: f64,
    pub worst_ratio_high: f64,
    pub num_violations: u64,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

/// Checks `(1 - eps) cut_H(P) <= cut_H'(P) <= (1 + eps) cut_H(P)` for every
/// partition `P` in `family`.
pub fn verify_sparsifier(
    h: &Hypergraph,
    sparse: &Hypergraph,
    epsilon: f64,
    family: &CutFamily,
) -> Result<CutReport> {
    check_open_unit("epsilon", epsilon)?;
    let n = h.n();
    check_exact_size(n)?;
    if sparse.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sparse.n(),
        });
    }
    let f = inside_weights(n, &h.mask_weights()?);
    let g = inside_weights(n, &sparse.mask_weights()?);
    let full = (1usize << n) - 1;
    let lo = (1.0 - epsilon) * (1.0 - RATIO_SLACK);
    let hi = (1.0 + epsilon) * (1.0 + RATIO_SLACK);

    let mut report = CutReport {
        epsilon,
        partitions_checked: 0,
        worst_ratio_low: 1.0,
        worst_ratio_high: 1.0,
        num_violations: 0,
        violations: Vec::new(),
        passed: true,
    };
    let mut masks = [0usize; 32];
    for_each_partition(n, |labels, k| {
        if !family.contains(k) {
            return;
        }
        report.partitions_checked += 1;
        masks[..k].fill(0);
        for (v, &l) in labels.iter().enumerate() {
            masks[l as usize] |= 1 << v;
        }
        let cut = f[full] - masks[..k].iter().map(|&b| f[b]).sum::<f64>();
        let sparse_cut = g[full] - masks[..k].iter().map(|&b| g[b]).sum::<f64>();
        // Sums of identical terms can leave rounding residue where the cut is empty.
        let cut = if cut.abs() <= 1e-9 * f[full].max(1.0) { 0.0 } else { cut };
        let sparse_cut = if sparse_cut.abs() <= 1e-9 * g[full].max(1.0) { 0.0 } else { sparse_cut };
        let (ratio, bad) = if cut == 0.0 {
            if sparse_cut == 0.0 {
                return;
            }
            (f64::INFINITY, true)
        } else {
            let r = sparse_cut / cut;
            (r, r < lo || r > hi)
        };
        report.worst_ratio_low = report.worst_ratio_low.min(ratio);
        report.worst_ratio_high = report.worst_ratio_high.max(ratio);
        if bad {
            report.num_violations += 1;
            report.passed = false;
            if report.violations.len() < MAX_LISTED {
                report.violations.push(Violation {
                    partition: Partition::from_rgs(labels),
                    ratio,
                    cut,
                    sparse_cut,
                });
            }
        }
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{bell_number, cut_value};

    fn k3x3() -> Hypergraph {
        let mut edges = Vec::new();
        for _ in 0..3 {
            edges.extend([[0, 1], [1, 2], [0, 2]]);
        }
        Hypergraph::from_edges(3, &edges).unwrap()
    }

    #[test]
    fn identity_has_unit_ratios() {
        let h = Hypergraph::from_edges(5, &[vec![0, 1, 2], vec![2, 3], vec![3, 4], vec![0, 4]]).unwrap();
        let r = verify_sparsifier(&h, &h, 0.1, &CutFamily::AllCuts).unwrap();
        assert!(r.passed);
        assert_eq!((r.worst_ratio_low, r.worst_ratio_high), (1.0, 1.0));
        assert_eq!(r.partitions_checked, bell_number(5) - 1);
        let r2 = verify_sparsifier(&h, &h, 0.1, &CutFamily::TwoCuts).unwrap();
        assert_eq!(r2.partitions_checked, 15);
    }

    #[test]
    fn dropping_an_edge_is_caught() {
        let h = k3x3();
        let mut sparse = Hypergraph::new(3).unwrap();
        for &(e, w) in &h.edges()[1..] {
            sparse.add_hyperedge(e, w).unwrap();
        }
        let r = verify_sparsifier(&h, &sparse, 0.1, &CutFamily::AllCuts).unwrap();
        assert!(!r.passed);
        // {0}|{1,2} loses one of its 6 crossing edges.
        assert!((r.worst_ratio_low - 5.0 / 6.0).abs() < 1e-12);
        for v in &r.violations {
            assert_eq!(v.cut, cut_value(&h, &v.partition).unwrap());
            assert_eq!(v.sparse_cut, cut_value(&sparse, &v.partition).unwrap());
        }
        let loose = verify_sparsifier(&h, &sparse, 0.2, &CutFamily::AllCuts).unwrap();
        assert!(loose.passed);
    }

    #[test]
    fn scaled_copy_sits_on_the_band_edge() {
        let h = k3x3();
        assert!(verify_sparsifier(&h, &h.scaled(1.25), 0.25, &CutFamily::AllCuts).unwrap().passed);
        assert!(!verify_sparsifier(&h, &h.scaled(1.26), 0.25, &CutFamily::AllCuts).unwrap().passed);
    }

    #[test]
    fn zero_cut_with_extra_sparse_weight_is_a_violation() {
        let h = Hypergraph::from_edges(4, &[[0, 1]]).unwrap();
        let sparse = Hypergraph::from_edges(4, &[[0, 1], [2, 3]]).unwrap();
        let r = verify_sparsifier(&h, &sparse, 0.5, &CutFamily::KCuts(vec![2])).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_ratio_high, f64::INFINITY);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let a = Hypergraph::new(3).unwrap();
        let b = Hypergraph::new(4).unwrap();
        assert!(verify_sparsifier(&a, &b, 0.1, &CutFamily::AllCuts).is_err());
    }
}
