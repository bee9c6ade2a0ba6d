use serde::{Deserialize, Serialize};

use super::sparsify::Sparsifier;

/// Default constant in the edge-count audit `|E'| <= C rho n ln(kappa* + 1)`.
pub const DEFAULT_C_SIZE: f64 = 1.0;

/// Weight of the kept edges whose insertion strength is at most `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerAudit {
    pub kappa: f64,
    pub weight: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAudit {
    pub n: usize,
    pub num_seen: usize,
    pub num_kept: usize,
    pub rho: f64,
    pub total_weight: f64,
    /// `(1 + eps) n |E| / 2`.
    pub weight_bound: f64,
    pub weight_ok: bool,
    /// `(1 + eps) rho n |E| / 2`.
    pub kappa_star: f64,
    pub size_bound: f64,
    pub size_ok: bool,
    pub layers: Vec<LayerAudit>,
    pub layers_ok: bool,
    pub passed: bool,
}

/// Checks the total weight, the layered weight at every distinct insertion
/// strength, and the edge count of `sparsifier`. Failures are reported in the
/// result rather than raised.
pub fn size_audit(sparsifier: &Sparsifier, c_size: f64) -> SizeAudit {
    let n = sparsifier.n() as f64;
    let eps = sparsifier.epsilon();
    let rho = sparsifier.rho();
    let m = sparsifier.num_seen() as f64;
    let kept = sparsifier.kept();

    let total_weight = sparsifier.total_weight();
    let weight_bound = (1.0 + eps) * n * m / 2.0;
    let kappa_star = (1.0 + eps) * rho * n * m / 2.0;
    let size_bound = c_size * rho * n * (kappa_star + 1.0).ln();

    let mut by_strength: Vec<(f64, f64)> = kept.iter().map(|k| (k.strength, k.weight)).collect();
    by_strength.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut layers: Vec<LayerAudit> = Vec::new();
    let mut weight = 0.0;
    for (i, &(kappa, w)) in by_strength.iter().enumerate() {
        weight += w;
        let last_of_level = by_strength.get(i + 1).is_none_or(|next| next.0 != kappa);
        if last_of_level {
            let bound = n * kappa * (1.0 + 1.0 / rho);
            layers.push(LayerAudit {
                kappa,
                weight,
                bound,
                ok: weight <= bound * (1.0 + 1e-12),
            });
        }
    }

    let weight_ok = total_weight <= weight_bound * (1.0 + 1e-12);
    let size_ok = kept.len() as f64 <= size_bound;
    let layers_ok = layers.iter().all(|l| l.ok);
    SizeAudit {
        n: sparsifier.n(),
        num_seen: sparsifier.num_seen(),
        num_kept: kept.len(),
        rho,
        total_weight,
        weight_bound,
        weight_ok,
        kappa_star,
        size_bound,
        size_ok,
        layers,
        layers_ok,
        passed: weight_ok && size_ok && layers_ok,
    }
}
