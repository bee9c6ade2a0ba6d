//! Exact normalized cuts and hyperedge strengths.
//!
//! The value of a k-cut `(V_1..V_k)` of a vertex set `S` in the sub-hypergraph
//! induced by `S` is `f(S) - sum_i f(V_i)`, where `f(X)` is the total weight of
//! edges contained in `X`. `f` is tabulated once per hypergraph by a subset-sum
//! transform, so every cut costs `k` lookups.

use super::partition::{for_each_partition, Partition};
use super::{check_exact_size, Hyperedge, Hypergraph};
use crate::error::{Error, Result};

/// `f(X) = total weight of edges e with e ⊆ X`, for every mask `X` of `0..n`.
pub fn inside_weights(n: usize, mask_weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(mask_weights.len(), 1 << n);
    let mut f = mask_weights.to_vec();
    for v in 0..n {
        let bit = 1 << v;
        for x in 0..f.len() {
            if x & bit != 0 {
                f[x] += f[x ^ bit];
            }
        }
    }
    f
}

/// Minimum over all k-cuts of `V` (every `k` in `2..=n`) of `cut / (k - 1)`,
/// with a minimizing partition. Ties keep the first partition in
/// restricted-growth order.
pub fn min_normalized_cut(h: &Hypergraph) -> Result<(f64, Partition)> {
    let n = h.n();
    check_exact_size(n)?;
    if n < 2 {
        return Err(Error::InvalidPartition("a cut needs at least two vertices".into()));
    }
    let f = inside_weights(n, &h.mask_weights()?);
    let total = f[(1 << n) - 1];
    let mut best = f64::INFINITY;
    let mut witness: Vec<u8> = Vec::new();
    let mut masks = [0u32; 32];
    for_each_partition(n, |labels, k| {
        if k < 2 {
            return;
        }
        masks[..k].fill(0);
        for (v, &l) in labels.iter().enumerate() {
            masks[l as usize] |= 1 << v;
        }
        let inside: f64 = masks[..k].iter().map(|&b| f[b as usize]).sum();
        let value = (total - inside) / (k - 1) as f64;
        if value < best {
            best = value;
            witness = labels.to_vec();
        }
    });
    Ok((best, Partition::from_rgs(&witness)))
}

/// `lambda(H[S])` for every vertex set `S`, plus strength lookups.
///
/// Built by dynamic programming over subsets: `g_k(S)`, the largest total
/// inside weight of a partition of `S` into exactly `k` blocks, satisfies
/// `g_k(S) = max_B f(B) + g_{k-1}(S \ B)` over blocks `B` holding the lowest
/// vertex of `S`. Then `lambda(S) = min_k (f(S) - g_k(S)) / (k - 1)`.
#[derive(Debug, Clone)]
pub struct StrengthTable {
    n: usize,
    lambda: Vec<f64>,
}

impl StrengthTable {
    pub fn new(h: &Hypergraph) -> Result<Self> {
        Self::from_mask_weights(h.n(), &h.mask_weights()?)
    }

    pub fn from_mask_weights(n: usize, mask_weights: &[f64]) -> Result<Self> {
        check_exact_size(n)?;
        if mask_weights.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: mask_weights.len(),
            });
        }
        Ok(Self::from_inside_weights(n, &inside_weights(n, mask_weights)))
    }

    pub(crate) fn from_inside_weights(n: usize, f: &[f64]) -> Self {
        let size = 1usize << n;
        let popcount: Vec<u32> = (0..size).map(|s| (s as u32).count_ones()).collect();
        let mut lambda = vec![f64::INFINITY; size];
        for s in 0..size {
            if popcount[s] < 2 {
                lambda[s] = 0.0;
            }
        }
        let mut g_prev: Vec<f64> = (0..size)
            .map(|s| if s == 0 { f64::NEG_INFINITY } else { f[s] })
            .collect();
        let mut g_cur = vec![f64::NEG_INFINITY; size];
        for k in 2..=n {
            for s in 0..size {
                if (popcount[s] as usize) < k {
                    g_cur[s] = f64::NEG_INFINITY;
                    continue;
                }
                let low = s & s.wrapping_neg();
                let rest = s ^ low;
                let mut best = f64::NEG_INFINITY;
                let mut sub = rest;
                loop {
                    let remainder = rest ^ sub;
                    if popcount[remainder] as usize >= k - 1 {
                        let v = f[low | sub] + g_prev[remainder];
                        if v > best {
                            best = v;
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                g_cur[s] = best;
                let value = (f[s] - best) / (k - 1) as f64;
                if value < lambda[s] {
                    lambda[s] = value;
                }
            }
            std::mem::swap(&mut g_prev, &mut g_cur);
        }
        Self { n, lambda }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Minimum normalized cut of the sub-hypergraph induced by `mask` (0 below two vertices).
    pub fn lambda(&self, mask: u32) -> f64 {
        self.lambda[mask as usize]
    }

    /// `max over W of lambda(H[W ∪ e])`.
    pub fn strength(&self, edge: Hyperedge) -> f64 {
        let e = edge.mask() as usize;
        let free = (self.lambda.len() - 1) & !e;
        let mut best = f64::NEG_INFINITY;
        let mut sub = free;
        loop {
            best = best.max(self.lambda[e | sub]);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        best
    }

    /// The vertex set (at least two vertices) with the largest induced normalized cut.
    pub fn strongest_set(&self) -> (f64, u32) {
        let mut best = (f64::NEG_INFINITY, 0u32);
        for (s, &l) in self.lambda.iter().enumerate() {
            if s.count_ones() >= 2 && l > best.0 {
                best = (l, s as u32);
            }
        }
        best
    }
}

/// Strength of `edge` (any vertex set of size >= 2) in `h`.
pub fn strength(edge: &[usize], h: &Hypergraph) -> Result<f64> {
    let e = Hyperedge::new(edge, h.n())?;
    Ok(StrengthTable::new(h)?.strength(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;
    use rand::Rng;

    fn k3() -> Hypergraph {
        Hypergraph::from_edges(3, &[[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    fn random_hypergraph(n: usize, m: usize, seed: u64) -> Hypergraph {
        let mut rng = stream_rng(seed);
        let mut h = Hypergraph::new(n).unwrap();
        for _ in 0..m {
            let size = rng.random_range(2..=n.min(4));
            let mut vs: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.random_range(i..n);
                vs.swap(i, j);
            }
            h.add_edge(&vs[..size], 1.0).unwrap();
        }
        h
    }

    #[test]
    fn inside_weights_count_contained_edges() {
        let h = Hypergraph::from_edges(3, &[vec![0, 1], vec![0, 1, 2]]).unwrap();
        let f = inside_weights(3, &h.mask_weights().unwrap());
        assert_eq!(f[0b011], 1.0);
        assert_eq!(f[0b111], 2.0);
        assert_eq!(f[0b101], 0.0);
    }

    #[test]
    fn triangle_min_normalized_cut() {
        let (lambda, witness) = min_normalized_cut(&k3()).unwrap();
        assert_eq!(lambda, 1.5);
        assert_eq!(witness.num_blocks(), 3);
    }

    #[test]
    fn single_hyperedge_min_normalized_cut() {
        let h = Hypergraph::from_edges(3, &[[0, 1, 2]]).unwrap();
        let (lambda, witness) = min_normalized_cut(&h).unwrap();
        assert_eq!(lambda, 0.5);
        assert_eq!(witness.labels(), &[0, 1, 2]);
    }

    #[test]
    fn empty_hypergraph_has_zero_cut() {
        let h = Hypergraph::new(4).unwrap();
        assert_eq!(min_normalized_cut(&h).unwrap().0, 0.0);
    }

    #[test]
    fn size_limit() {
        let h = Hypergraph::new(13).unwrap();
        assert!(matches!(min_normalized_cut(&h), Err(Error::SizeLimit { size: 13, limit: 12 })));
        assert!(StrengthTable::new(&h).is_err());
    }

    #[test]
    fn strengths_of_small_examples() {
        for e in [[0, 1], [1, 2], [0, 2]] {
            assert_eq!(strength(&e, &k3()).unwrap(), 1.5);
        }
        let h = Hypergraph::from_edges(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(strength(&[0, 1, 2], &h).unwrap(), 0.5);
        // A lone edge in a larger vertex set has strength 1 / (|e| - 1).
        let h = Hypergraph::from_edges(6, &[[1, 3, 4, 5]]).unwrap();
        assert_eq!(strength(&[1, 3, 4, 5], &h).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn dp_matches_partition_enumeration_on_every_subset() {
        for seed in 0..30 {
            let n = 3 + (seed as usize % 5);
            let h = random_hypergraph(n, 4 + seed as usize, seed);
            let table = StrengthTable::new(&h).unwrap();
            assert_eq!(table.lambda((1 << n) - 1), min_normalized_cut(&h).unwrap().0);
            for s in 0u32..(1 << n) {
                if s.count_ones() < 2 {
                    continue;
                }
                // induced sub-hypergraph relabelled onto 0..|s|
                let verts: Vec<usize> = (0..n).filter(|v| s & (1 << v) != 0).collect();
                let mut sub = Hypergraph::new(verts.len()).unwrap();
                for &(e, w) in h.edges() {
                    if e.mask() & !s == 0 {
                        let vs: Vec<usize> = e
                            .vertices()
                            .iter()
                            .map(|v| verts.iter().position(|u| u == v).unwrap())
                            .collect();
                        sub.add_edge(&vs, w).unwrap();
                    }
                }
                assert_eq!(table.lambda(s), min_normalized_cut(&sub).unwrap().0, "seed {seed} set {s:b}");
            }
        }
    }

    #[test]
    fn strength_ignores_other_components() {
        for seed in 0..20 {
            // component on {0,1,2,3}; extra edges only on {4,5,6}
            let mut h = random_hypergraph(4, 6, seed);
            let other = random_hypergraph(3, 5, seed + 1000);
            let mut big = Hypergraph::new(7).unwrap();
            for &(e, w) in h.edges() {
                big.add_edge(&e.vertices(), w).unwrap();
            }
            for &(e, w) in other.edges() {
                let vs: Vec<usize> = e.vertices().iter().map(|v| v + 4).collect();
                big.add_edge(&vs, w).unwrap();
            }
            h.add_edge(&[0, 1], 1.0).unwrap();
            big.add_edge(&[0, 1], 1.0).unwrap();
            assert_eq!(strength(&[0, 1], &h).unwrap(), strength(&[0, 1], &big).unwrap());
        }
    }
}
