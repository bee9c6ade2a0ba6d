//! Hypergraph cut sparsification in the online model.
//!
//! Vertices are `0..n` and hyperedges are stored as bitmasks, so a hypergraph
//! has at most [`MAX_VERTICES`] vertices. The exact oracles (normalized cuts,
//! strengths, exhaustive cut verification) enumerate vertex subsets and set
//! partitions and are limited to [`N_MAX_EXACT`] vertices.

mod adversary;
mod audit;
mod io;
mod partition;
mod sparsify;
mod strength;
mod verify;

pub use adversary::{run_edge_adversary, EdgeAdversary, RandomEdges, ReinsertionAdversary};
pub use audit::{size_audit, LayerAudit, SizeAudit, DEFAULT_C_SIZE};
pub use io::{format_edge_stream, parse_edge_stream};
pub use partition::{bell_number, for_each_partition, Partition};
pub use sparsify::{
    sparsifier_rho, stream_sparsify, EdgeDecision, ExactStrength, KeptEdge, Sparsifier,
    StrengthOracle, StreamingSparsifier, DEFAULT_K1,
};
pub use strength::{inside_weights, min_normalized_cut, strength, StrengthTable};
pub use verify::{verify_sparsifier, CutFamily, CutReport, Violation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count representable with bitmask hyperedges.
pub const MAX_VERTICES: usize = 32;

/// Largest vertex count accepted by the exhaustive oracles.
pub const N_MAX_EXACT: usize = 12;

pub(crate) fn check_exact_size(n: usize) -> Result<()> {
    if n > N_MAX_EXACT {
        Err(Error::SizeLimit {
            size: n,
            limit: N_MAX_EXACT,
        })
    } else {
        Ok(())
    }
}

/// A hyperedge as a set of at least two distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Hyperedge(u32);

impl Hyperedge {
    /// Builds an edge on `vertices` (all `< n`, distinct, at least two).
    pub fn new(vertices: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &v in vertices {
            if v >= n || v >= MAX_VERTICES {
                return Err(Error::InvalidEdge(format!("vertex {v} out of range for n = {n}")));
            }
            if mask & (1 << v) != 0 {
                return Err(Error::InvalidEdge(format!("vertex {v} repeated in {vertices:?}")));
            }
            mask |= 1 << v;
        }
        if mask.count_ones() < 2 {
            return Err(Error::InvalidEdge(format!(
                "a hyperedge needs at least two vertices, got {vertices:?}"
            )));
        }
        Ok(Hyperedge(mask))
    }

    pub fn from_mask(mask: u32) -> Result<Self> {
        if mask.count_ones() < 2 {
            return Err(Error::InvalidEdge(format!("mask {mask:#b} has fewer than two vertices")));
        }
        Ok(Hyperedge(mask))
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..MAX_VERTICES).filter(|&v| self.0 & (1 << v) != 0).collect()
    }

    /// True if the edge is not contained in a single block.
    pub fn crosses(&self, partition: &Partition) -> bool {
        let labels = partition.labels();
        let mut vs = self.vertices().into_iter();
        let first = vs.next().map(|v| labels[v]);
        vs.any(|v| Some(labels[v]) != first)
    }
}

impl From<Hyperedge> for Vec<usize> {
    fn from(e: Hyperedge) -> Self {
        e.vertices()
    }
}

impl TryFrom<Vec<usize>> for Hyperedge {
    type Error = Error;

    fn try_from(vs: Vec<usize>) -> Result<Self> {
        Hyperedge::new(&vs, MAX_VERTICES)
    }
}

/// A weighted hypergraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<(Hyperedge, f64)>,
}

impl Hypergraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::Domain {
                name: "n",
                value: n as f64,
                expected: "between 1 and 32 vertices",
            });
        }
        Ok(Self { n, edges: Vec::new() })
    }

    /// Unweighted hypergraph from vertex lists.
    pub fn from_edges<E: AsRef<[usize]>>(n: usize, edges: &[E]) -> Result<Self> {
        let mut h = Self::new(n)?;
        for e in edges {
            h.add_edge(e.as_ref(), 1.0)?;
        }
        Ok(h)
    }

    pub fn add_edge(&mut self, vertices: &[usize], weight: f64) -> Result<()> {
        let e = Hyperedge::new(vertices, self.n)?;
        self.add_hyperedge(e, weight)
    }

    pub fn add_hyperedge(&mut self, edge: Hyperedge, weight: f64) -> Result<()> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidEdge(format!("weight {weight} is not finite and non-negative")));
        }
        if self.n < MAX_VERTICES && edge.mask() >> self.n != 0 {
            return Err(Error::InvalidEdge(format!(
                "edge {:?} out of range for n = {}",
                edge.vertices(),
                self.n
            )));
        }
        self.edges.push((edge, weight));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(Hyperedge, f64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|(_, w)| w).sum()
    }

    /// Copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            edges: self.edges.iter().map(|&(e, w)| (e, w * factor)).collect(),
        }
    }

    /// Total weight per vertex mask, indexed by mask (length `2^n`).
    pub fn mask_weights(&self) -> Result<Vec<f64>> {
        check_exact_size(self.n)?;
        let mut w = vec![0.0; 1 << self.n];
        for &(e, wt) in &self.edges {
            w[e.mask() as usize] += wt;
        }
        Ok(w)
    }
}

/// Total weight of the hyperedges that are not inside any single block.
pub fn cut_value(h: &Hypergraph, partition: &Partition) -> Result<f64> {
    if partition.len() != h.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, hypergraph has {}",
            partition.len(),
            h.n()
        )));
    }
    Ok(h.edges()
        .iter()
        .filter(|(e, _)| e.crosses(partition))
        .map(|(_, w)| w)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Hypergraph {
        Hypergraph::from_edges(3, &[[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    #[test]
    fn triangle_cut() {
        let p = Partition::from_blocks(3, &[vec![0], vec![1, 2]]).unwrap();
        assert_eq!(cut_value(&k3(), &p).unwrap(), 2.0);
    }

    #[test]
    fn isolated_vertex_cut_is_zero() {
        let h = Hypergraph::from_edges(4, &[[1, 2, 3]]).unwrap();
        let p = Partition::from_blocks(4, &[vec![0], vec![1, 2, 3]]).unwrap();
        assert_eq!(cut_value(&h, &p).unwrap(), 0.0);
    }

    #[test]
    fn hyperedge_cut_once_by_singletons() {
        let h = Hypergraph::from_edges(3, &[[0, 1, 2]]).unwrap();
        let p = Partition::new(vec![0, 1, 2]).unwrap();
        assert_eq!(cut_value(&h, &p).unwrap(), 1.0);
    }

    #[test]
    fn cut_rejects_wrong_size_partition() {
        let p = Partition::new(vec![0, 1]).unwrap();
        assert!(matches!(cut_value(&k3(), &p), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn edge_validation() {
        assert!(Hyperedge::new(&[0], 3).is_err());
        assert!(Hyperedge::new(&[0, 0], 3).is_err());
        assert!(Hyperedge::new(&[0, 3], 3).is_err());
        assert_eq!(Hyperedge::new(&[2, 0], 3).unwrap().vertices(), vec![0, 2]);
        assert!(Hypergraph::new(0).is_err());
        assert!(Hypergraph::new(33).is_err());
        let mut h = Hypergraph::new(3).unwrap();
        assert!(h.add_edge(&[0, 1], -1.0).is_err());
        assert!(h.add_edge(&[0, 1], f64::NAN).is_err());
    }

    #[test]
    fn edge_serializes_as_vertex_list() {
        let e = Hyperedge::new(&[1, 4, 2], 5).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, "[1,2,4]");
        assert_eq!(serde_json::from_str::<Hyperedge>(&s).unwrap(), e);
        assert!(serde_json::from_str::<Hyperedge>("[3]").is_err());
    }
}
