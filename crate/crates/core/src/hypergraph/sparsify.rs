use rand::Rng;
use serde::{Deserialize, Serialize};

use super::strength::{inside_weights, StrengthTable};
use super::{check_exact_size, Hyperedge, Hypergraph};
use crate::error::{check_open_unit, check_positive, Error, Result};

/// Default constant in the oversampling rate `rho = K1 eps^-2 n ln n`.
pub const DEFAULT_K1: f64 = 8.0;

/// `rho = k1 * eps^-2 * n * ln n`.
pub fn sparsifier_rho(n: usize, epsilon: f64, k1: f64) -> Result<f64> {
    check_open_unit("epsilon", epsilon)?;
    check_positive("K1", k1)?;
    if n < 2 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "at least two vertices",
        });
    }
    let n = n as f64;
    Ok(k1 * n * n.ln() / (epsilon * epsilon))
}

/// Computes the strength of an arriving edge in the current sparsifier plus
/// that edge (with weight 1).
pub trait StrengthOracle {
    fn strength(&mut self, current: &Sparsifier, edge: Hyperedge) -> Result<f64>;
}

/// Exact strengths by subset dynamic programming; needs `n <= N_MAX_EXACT`.
///
/// Keeps a per-mask weight table in sync with the sparsifier it is queried
/// with, so each query costs one table rebuild and no pass over the edges.
#[derive(Debug, Clone, Default)]
pub struct ExactStrength {
    mask_weights: Vec<f64>,
    synced: usize,
}

impl ExactStrength {
    pub fn new() -> Self {
        Self::default()
    }
}

impl StrengthOracle for ExactStrength {
    fn strength(&mut self, current: &Sparsifier, edge: Hyperedge) -> Result<f64> {
        let n = current.n();
        check_exact_size(n)?;
        if self.mask_weights.len() != 1 << n || self.synced > current.kept().len() {
            self.mask_weights = vec![0.0; 1 << n];
            self.synced = 0;
        }
        for k in &current.kept()[self.synced..] {
            self.mask_weights[k.edge.mask() as usize] += k.weight;
        }
        self.synced = current.kept().len();

        let mut f = inside_weights(n, &self.mask_weights);
        let e = edge.mask() as usize;
        for (s, v) in f.iter_mut().enumerate() {
            if s & e == e {
                *v += 1.0;
            }
        }
        Ok(StrengthTable::from_inside_weights(n, &f).strength(edge))
    }
}

/// A stored hyperedge with its insertion-time data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptEdge {
    pub edge: Hyperedge,
    pub weight: f64,
    pub p: f64,
    pub strength: f64,
    /// Position in the input stream (0-based).
    pub index: usize,
}

/// What the sampler announced for one arriving edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDecision {
    pub index: usize,
    pub edge: Hyperedge,
    pub strength: f64,
    pub p: f64,
    pub coin: bool,
}

/// The weighted edge set kept so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sparsifier {
    n: usize,
    epsilon: f64,
    rho: f64,
    seen: usize,
    kept: Vec<KeptEdge>,
}

impl Sparsifier {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of edges offered so far.
    pub fn num_seen(&self) -> usize {
        self.seen
    }

    pub fn kept(&self) -> &[KeptEdge] {
        &self.kept
    }

    pub fn total_weight(&self) -> f64 {
        self.kept.iter().map(|k| k.weight).sum()
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        let mut h = Hypergraph::new(self.n).expect("n validated at construction");
        for k in &self.kept {
            h.add_hyperedge(k.edge, k.weight).expect("kept edges are valid");
        }
        h
    }
}

/// Online cut sparsifier: every arriving edge is kept with probability
/// `min(rho / strength, 1)` and weight `1 / p`, and the coin is returned
/// before the next edge is accepted.
#[derive(Debug, Clone)]
pub struct StreamingSparsifier<O = ExactStrength> {
    sparsifier: Sparsifier,
    oracle: O,
}

impl StreamingSparsifier<ExactStrength> {
    pub fn new(n: usize, epsilon: f64, k1: f64) -> Result<Self> {
        check_exact_size(n)?;
        Self::with_oracle(n, epsilon, k1, ExactStrength::new())
    }
}

impl<O: StrengthOracle> StreamingSparsifier<O> {
    pub fn with_oracle(n: usize, epsilon: f64, k1: f64, oracle: O) -> Result<Self> {
        let rho = sparsifier_rho(n, epsilon, k1)?;
        Hypergraph::new(n)?;
        Ok(Self {
            sparsifier: Sparsifier {
                n,
                epsilon,
                rho,
                seen: 0,
                kept: Vec::new(),
            },
            oracle,
        })
    }

    pub fn sparsifier(&self) -> &Sparsifier {
        &self.sparsifier
    }

    pub fn into_sparsifier(self) -> Sparsifier {
        self.sparsifier
    }

    pub fn insert<R: Rng + ?Sized>(&mut self, edge: Hyperedge, rng: &mut R) -> Result<EdgeDecision> {
        let n = self.sparsifier.n;
        if n < 32 && edge.mask() >> n != 0 {
            return Err(Error::InvalidEdge(format!(
                "edge {:?} out of range for n = {n}",
                edge.vertices()
            )));
        }
        let strength = self.oracle.strength(&self.sparsifier, edge)?;
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::Numerical(format!("strength oracle returned {strength}")));
        }
        let p = (self.sparsifier.rho / strength).min(1.0);
        let coin = rng.random::<f64>() < p;
        let index = self.sparsifier.seen;
        self.sparsifier.seen += 1;
        if coin {
            self.sparsifier.kept.push(KeptEdge {
                edge,
                weight: 1.0 / p,
                p,
                strength,
                index,
            });
        }
        Ok(EdgeDecision {
            index,
            edge,
            strength,
            p,
            coin,
        })
    }
}

/// Runs a fixed edge stream through a fresh exact-strength sparsifier.
pub fn stream_sparsify<R: Rng + ?Sized>(
    edges: &[Hyperedge],
    n: usize,
    epsilon: f64,
    k1: f64,
    rng: &mut R,
) -> Result<(Vec<EdgeDecision>, Sparsifier)> {
    let mut s = StreamingSparsifier::new(n, epsilon, k1)?;
    let decisions = edges
        .iter()
        .map(|&e| s.insert(e, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok((decisions, s.into_sparsifier()))
}
