use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::span::exact_rank;
use super::{gram_of_rows, to_vector, WeightedRowSet};
use crate::error::{check_open_unit, Error, Result};

/// Largest direction count the net sweep accepts by default.
pub const DEFAULT_NET_LIMIT: u64 = 2_000_000;

const BAND_SLACK: f64 = 1e-12;

/// How distortion is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Exact for `p = 2`: generalized eigenvalues of `(A~^T A~, A^T A)` on the row space of `A`.
    Pencil,
    /// Every direction of a grid on the surface of the cube `[-1, 1]^r` in an
    /// orthonormal basis of the row space, with spacing `resolution`.
    Net { resolution: f64, limit: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub mode: String,
    pub p: f64,
    pub epsilon: f64,
    /// Exact rank of `A`.
    pub rank: usize,
    pub directions_tested: u64,
    pub worst_ratio_low: f64,
    pub worst_ratio_high: f64,
    pub passed: bool,
}

impl EmbeddingReport {
    fn finish(mut self) -> Self {
        let lo = (1.0 - self.epsilon) * (1.0 - BAND_SLACK);
        let hi = (1.0 + self.epsilon) * (1.0 + BAND_SLACK);
        self.passed = self.worst_ratio_low >= lo && self.worst_ratio_high <= hi;
        self
    }
}

/// Row space of `A`: eigenvectors of `A^T A` for its `rank` largest eigenvalues.
fn row_space(rows: &[Vec<i64>], d: usize) -> (DMatrix<f64>, DVector<f64>, usize) {
    let rank = exact_rank(rows, d);
    let eig = SymmetricEigen::new(gram_of_rows(rows, d));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = &order[..rank];
    let q = DMatrix::from_fn(d, rank, |i, j| eig.eigenvectors[(i, top[j])]);
    let values = DVector::from_iterator(rank, top.iter().map(|&i| eig.eigenvalues[i]));
    (q, values, rank)
}

fn check_inputs(rows: &[Vec<i64>], kept: &WeightedRowSet, epsilon: f64) -> Result<()> {
    check_open_unit("epsilon", epsilon)?;
    for r in rows.iter().map(|r| r.len()).chain(kept.rows.iter().map(|k| k.row.len())) {
        if r != kept.d {
            return Err(Error::DimensionMismatch { expected: kept.d, got: r });
        }
    }
    Ok(())
}

/// Eigenvalues of `D^-1/2 Q^T C Q D^-1/2` where `D = diag(values) + shift`.
fn whitened_eigenvalues(q: &DMatrix<f64>, values: &DVector<f64>, c: &DMatrix<f64>, shift: f64) -> DVector<f64> {
    let r = values.len();
    let inv_sqrt = DMatrix::from_diagonal(&values.map(|v| 1.0 / (v + shift).sqrt()));
    let inner = q.tr_mul(c) * q + DMatrix::identity(r, r) * shift;
    let k = &inv_sqrt * inner * &inv_sqrt;
    SymmetricEigen::new((&k + k.transpose()) * 0.5).eigenvalues
}

/// True if `C` has energy outside the column space of `q`.
fn leaks_outside(q: &DMatrix<f64>, c: &DMatrix<f64>) -> bool {
    let d = c.nrows();
    let proj = DMatrix::identity(d, d) - q * q.transpose();
    let outside = (&proj * c * &proj).trace();
    outside > 1e-9 * c.trace().max(1.0)
}

fn pencil_report(rows: &[Vec<i64>], kept: &WeightedRowSet, epsilon: f64, shift: f64, mode: &str) -> EmbeddingReport {
    let (q, values, rank) = row_space(rows, kept.d);
    let c = kept.gram();
    let mut report = EmbeddingReport {
        mode: mode.into(),
        p: kept.p,
        epsilon,
        rank,
        directions_tested: rank as u64,
        worst_ratio_low: 1.0,
        worst_ratio_high: 1.0,
        passed: false,
    };
    if rank > 0 {
        let eig = whitened_eigenvalues(&q, &values, &c, shift);
        report.worst_ratio_low = eig.min().max(0.0);
        report.worst_ratio_high = eig.max();
    }
    if leaks_outside(&q, &c) {
        report.worst_ratio_high = f64::INFINITY;
    }
    report.finish()
}

/// Checks `(1 - eps) |Ax|_p^p <= |A~x|_p^p <= (1 + eps) |Ax|_p^p` on the row space of `A`.
pub fn verify_embedding(
    rows: &[Vec<i64>],
    kept: &WeightedRowSet,
    epsilon: f64,
    mode: VerifyMode,
) -> Result<EmbeddingReport> {
    check_inputs(rows, kept, epsilon)?;
    match mode {
        VerifyMode::Pencil => {
            if kept.p != 2.0 {
                return Err(Error::Domain {
                    name: "p",
                    value: kept.p,
                    expected: "p = 2 for the pencil check (use the net for other p)",
                });
            }
            Ok(pencil_report(rows, kept, epsilon, 0.0, "pencil"))
        }
        VerifyMode::Net { resolution, limit } => net_report(rows, kept, epsilon, resolution, limit),
    }
}

/// The `p = 2` check with the ridge term added to both sides:
/// `(1 - eps)(A^T A + lambda I) <= A~^T A~ + lambda I <= (1 + eps)(A^T A + lambda I)`.
/// On the complement of the row space both sides equal `lambda`, so the
/// ratio there is exactly 1 and only the row space is examined.
pub fn verify_ridge_embedding(rows: &[Vec<i64>], kept: &WeightedRowSet, epsilon: f64) -> Result<EmbeddingReport> {
    check_inputs(rows, kept, epsilon)?;
    if kept.p != 2.0 {
        return Err(Error::Domain { name: "p", value: kept.p, expected: "p = 2 for the ridge check" });
    }
    Ok(pencil_report(rows, kept, epsilon, kept.lambda, "ridge"))
}

fn net_report(
    rows: &[Vec<i64>],
    kept: &WeightedRowSet,
    epsilon: f64,
    resolution: f64,
    limit: u64,
) -> Result<EmbeddingReport> {
    if !(resolution > 0.0 && resolution <= 2.0) {
        return Err(Error::Domain { name: "resolution", value: resolution, expected: "a grid spacing in (0, 2]" });
    }
    let (q, _, rank) = row_space(rows, kept.d);
    let mut report = EmbeddingReport {
        mode: "net".into(),
        p: kept.p,
        epsilon,
        rank,
        directions_tested: 0,
        worst_ratio_low: 1.0,
        worst_ratio_high: 1.0,
        passed: false,
    };
    if rank == 0 {
        return Ok(report.finish());
    }
    let m = (2.0 / resolution).ceil() as u64 + 1;
    let count = (m as f64).powi(rank as i32 - 1) * 2.0 * rank as f64;
    if count > limit as f64 {
        return Err(Error::SizeLimit { size: count.min(usize::MAX as f64) as usize, limit: limit as usize });
    }
    report.worst_ratio_low = f64::INFINITY;
    report.worst_ratio_high = f64::NEG_INFINITY;
    let step = 2.0 / (m - 1).max(1) as f64;
    // Rows projected onto the basis: a.x = (Q^T a).y
    let a_red: Vec<DVector<f64>> = rows.iter().map(|r| q.tr_mul(&to_vector(r))).collect();
    let k_red: Vec<(DVector<f64>, f64)> = kept.rows.iter().map(|k| (q.tr_mul(&to_vector(&k.row)), 1.0 / k.p_i)).collect();
    let p = kept.p;

    let mut y = DVector::zeros(rank);
    let mut idx = vec![0u64; rank.saturating_sub(1)];
    for face in 0..rank {
        for sign in [-1.0, 1.0] {
            idx.fill(0);
            loop {
                let mut it = idx.iter();
                for j in 0..rank {
                    y[j] = if j == face { sign } else { -1.0 + step * *it.next().unwrap() as f64 };
                }
                let truth: f64 = a_red.iter().map(|a| a.dot(&y).abs().powf(p)).sum();
                let est: f64 = k_red.iter().map(|(b, w)| w * b.dot(&y).abs().powf(p)).sum();
                let ratio = est / truth;
                report.directions_tested += 1;
                report.worst_ratio_low = report.worst_ratio_low.min(ratio);
                report.worst_ratio_high = report.worst_ratio_high.max(ratio);
                // mixed-radix increment
                let mut carry = true;
                for v in idx.iter_mut() {
                    *v += 1;
                    if *v < m {
                        carry = false;
                        break;
                    }
                    *v = 0;
                }
                if carry {
                    break;
                }
            }
        }
    }
    if leaks_outside(&q, &kept.gram()) {
        report.worst_ratio_high = f64::INFINITY;
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::KeptRow;
    use crate::seed::stream_rng;
    use rand::Rng;

    fn all_kept(rows: &[Vec<i64>], d: usize, p: f64, weight: f64) -> WeightedRowSet {
        let mut s = WeightedRowSet::new(d, p, 1.0, 1e-6);
        for (i, r) in rows.iter().enumerate() {
            let p_i = 1.0 / weight;
            s.rows.push(KeptRow { row: r.clone(), p_i, scale: p_i.powf(-1.0 / p), s_prime: 1.0, index: i });
        }
        s
    }

    fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<i64>> {
        let mut rng = stream_rng(seed);
        (0..n).map(|_| (0..d).map(|_| rng.random_range(-9..=9)).collect()).collect()
    }

    #[test]
    fn identity_embedding_has_unit_ratios() {
        let rows = random_rows(30, 4, 1);
        let kept = all_kept(&rows, 4, 2.0, 1.0);
        let r = verify_embedding(&rows, &kept, 0.1, VerifyMode::Pencil).unwrap();
        assert!(r.passed);
        assert_eq!(r.rank, 4);
        assert!((r.worst_ratio_low - 1.0).abs() < 1e-9 && (r.worst_ratio_high - 1.0).abs() < 1e-9);
        let net = VerifyMode::Net { resolution: 0.25, limit: DEFAULT_NET_LIMIT };
        for p in [1.0, 2.0, 3.0] {
            let kept = all_kept(&rows, 4, p, 1.0);
            let r = verify_embedding(&rows, &kept, 0.1, net).unwrap();
            assert!(r.passed);
            assert!((r.worst_ratio_low - 1.0).abs() < 1e-12 && (r.worst_ratio_high - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inflated_copy_fails_on_the_high_side() {
        let rows = random_rows(20, 3, 2);
        let eps = 0.2;
        for p in [1.0, 2.0, 3.0] {
            // every row scaled by (1 + 2 eps)^(1/p), i.e. weight 1 + 2 eps
            let kept = all_kept(&rows, 3, p, 1.0 + 2.0 * eps);
            let mode = if p == 2.0 { VerifyMode::Pencil } else { VerifyMode::Net { resolution: 0.5, limit: DEFAULT_NET_LIMIT } };
            let r = verify_embedding(&rows, &kept, eps, mode).unwrap();
            assert!(!r.passed);
            assert!((r.worst_ratio_high - (1.0 + 2.0 * eps)).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_deficient_rows_use_the_row_space() {
        // Third column always zero, first two columns proportional in half the rows.
        let rows: Vec<Vec<i64>> = vec![vec![1, 2, 0], vec![2, 4, 0], vec![1, -1, 0], vec![3, 0, 0]];
        let kept = all_kept(&rows, 3, 2.0, 1.0);
        let r = verify_embedding(&rows, &kept, 0.1, VerifyMode::Pencil).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.passed);
        // A kept row outside the row space is an infinite distortion.
        let mut bad = kept.clone();
        bad.rows.push(KeptRow { row: vec![0, 0, 1], p_i: 1.0, scale: 1.0, s_prime: 1.0, index: 9 });
        let r = verify_embedding(&rows, &bad, 0.1, VerifyMode::Pencil).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_ratio_high, f64::INFINITY);
    }

    #[test]
    fn net_agrees_with_pencil_for_p2() {
        let rows = random_rows(25, 3, 3);
        let mut kept = all_kept(&rows[..12], 3, 2.0, 2.0);
        kept.rows.extend(all_kept(&rows[12..], 3, 2.0, 1.0).rows);
        let pencil = verify_embedding(&rows, &kept, 0.5, VerifyMode::Pencil).unwrap();
        let net = verify_embedding(&rows, &kept, 0.5, VerifyMode::Net { resolution: 0.01, limit: DEFAULT_NET_LIMIT }).unwrap();
        // The net only sees grid directions, so its extremes lie inside the pencil's.
        assert!(net.worst_ratio_low >= pencil.worst_ratio_low - 1e-12);
        assert!(net.worst_ratio_high <= pencil.worst_ratio_high + 1e-12);
        assert!((net.worst_ratio_low - pencil.worst_ratio_low).abs() < 1e-3);
        assert!((net.worst_ratio_high - pencil.worst_ratio_high).abs() < 1e-3);
    }

    #[test]
    fn net_size_limit() {
        let rows = random_rows(10, 6, 4);
        let kept = all_kept(&rows, 6, 3.0, 1.0);
        let r = verify_embedding(&rows, &kept, 0.1, VerifyMode::Net { resolution: 0.001, limit: DEFAULT_NET_LIMIT });
        assert!(matches!(r, Err(Error::SizeLimit { .. })));
        assert!(verify_embedding(&rows, &kept, 0.1, VerifyMode::Pencil).is_err());
    }

    #[test]
    fn ridge_check_is_looser_than_plain() {
        let rows = random_rows(15, 3, 5);
        let mut kept = all_kept(&rows[..10], 3, 2.0, 1.2);
        kept.lambda = 50.0;
        let plain = verify_embedding(&rows, &kept, 0.5, VerifyMode::Pencil).unwrap();
        let ridge = verify_ridge_embedding(&rows, &kept, 0.5).unwrap();
        assert!(ridge.worst_ratio_low >= plain.worst_ratio_low - 1e-12);
        assert!(ridge.worst_ratio_high <= plain.worst_ratio_high + 1e-12);
    }
}
