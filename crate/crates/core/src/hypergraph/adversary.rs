use rand::Rng;

use super::sparsify::{EdgeDecision, StreamingSparsifier};
use super::{Hyperedge, Sparsifier};
use crate::error::Result;
use crate::seed::{stream_rng, StreamRng};

/// Chooses the next edge after seeing every earlier coin.
pub trait EdgeAdversary {
    fn name(&self) -> String;
    /// `None` ends the stream.
    fn next_edge(&mut self, n: usize, history: &[EdgeDecision]) -> Option<Hyperedge>;
}

fn random_edge(rng: &mut StreamRng, n: usize, min_size: usize, max_size: usize) -> Hyperedge {
    let size = rng.random_range(min_size..=max_size.min(n));
    let mut vs: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        vs.swap(i, j);
    }
    Hyperedge::new(&vs[..size], n).expect("distinct in-range vertices")
}

/// `m` independent uniform edges with sizes uniform in `2..=4` (capped at `n`).
#[derive(Debug, Clone)]
pub struct RandomEdges {
    rng: StreamRng,
    remaining: usize,
}

impl RandomEdges {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            rng: stream_rng(seed),
            remaining: m,
        }
    }

    /// The whole stream up front; it never depends on the coins.
    pub fn generate(n: usize, m: usize, seed: u64) -> Vec<Hyperedge> {
        let mut adv = Self::new(m, seed);
        std::iter::from_fn(|| adv.next_edge(n, &[])).collect()
    }
}

impl EdgeAdversary for RandomEdges {
    fn name(&self) -> String {
        "random".into()
    }

    fn next_edge(&mut self, n: usize, _history: &[EdgeDecision]) -> Option<Hyperedge> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(random_edge(&mut self.rng, n, 2, 4))
    }
}

/// Random edges, except that a dropped edge is offered again on the next
/// round, piling weight onto the parts of the graph the sampler thins out.
#[derive(Debug, Clone)]
pub struct ReinsertionAdversary {
    rng: StreamRng,
    remaining: usize,
}

impl ReinsertionAdversary {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            rng: stream_rng(seed),
            remaining: m,
        }
    }
}

impl EdgeAdversary for ReinsertionAdversary {
    fn name(&self) -> String {
        "reinsertion".into()
    }

    fn next_edge(&mut self, n: usize, history: &[EdgeDecision]) -> Option<Hyperedge> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        match history.last() {
            Some(d) if !d.coin => Some(d.edge),
            _ => Some(random_edge(&mut self.rng, n, 2, 4)),
        }
    }
}

/// Feeds an adaptive adversary into a fresh exact-strength sparsifier.
/// Returns every decision, the offered edges in order, and the sparsifier.
pub fn run_edge_adversary<A: EdgeAdversary + ?Sized, R: Rng + ?Sized>(
    adversary: &mut A,
    n: usize,
    epsilon: f64,
    k1: f64,
    rng: &mut R,
) -> Result<(Vec<EdgeDecision>, Sparsifier)> {
    let mut s = StreamingSparsifier::new(n, epsilon, k1)?;
    let mut history = Vec::new();
    while let Some(e) = adversary.next_edge(n, &history) {
        history.push(s.insert(e, rng)?);
    }
    Ok((history, s.into_sparsifier()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_edges_have_sizes_two_to_four() {
        let edges = RandomEdges::generate(8, 500, 1);
        assert_eq!(edges.len(), 500);
        assert!(edges.iter().all(|e| (2..=4).contains(&e.len())));
        assert!(edges.iter().any(|e| e.len() == 4));
        assert_eq!(edges, RandomEdges::generate(8, 500, 1));
        assert!(RandomEdges::generate(2, 20, 0).iter().all(|e| e.len() == 2));
    }

    #[test]
    fn reinsertion_repeats_dropped_edges() {
        let mut adv = ReinsertionAdversary::new(120, 3);
        let (history, s) = run_edge_adversary(&mut adv, 6, 0.5, 0.01, &mut stream_rng(2)).unwrap();
        assert_eq!(history.len(), 120);
        assert_eq!(s.num_seen(), 120);
        let mut repeats = 0;
        for w in history.windows(2) {
            if !w[0].coin {
                assert_eq!(w[1].edge, w[0].edge);
                repeats += 1;
            }
        }
        assert!(repeats > 0);
    }
}
