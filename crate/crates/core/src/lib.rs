//! Adversarially-robust online importance sampling.
//!
//! - [`sampler`]: the online importance-sampling primitive for sums.
//! - [`game`]: the adversary-vs-sampler game, built-in adversaries and a trial runner.
//! - [`hypergraph`]: streaming hypergraph cut sparsification with exact cut and strength oracles.
//! - [`subspace`]: online row sampling for `l_p` subspace embeddings and its verifiers.

pub mod error;
pub mod game;
pub mod hypergraph;
pub mod sampler;
pub mod seed;
pub mod subspace;

pub use error::{Error, Result};
pub use sampler::{amplification_param, SamplerConfig, SamplerState, StepRecord};
