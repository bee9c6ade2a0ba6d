//! Online importance sampling for sum estimation.
//!
//! Every arriving item `x` is kept with probability
//! `p = min{1, a * x / (x + estimate)}` where `estimate` is the running sum of
//! the reweighted samples taken so far, and a kept item contributes `x / p` to
//! the estimate. Decisions are irrevocable and each one uses fresh randomness
//! from the stream's own generator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, Error, Result};

/// Leading constant of the amplification formula.
pub const DEFAULT_CONST_C: f64 = 3.0;

/// Smallest sampling probability the sampler will use (2^-60).
pub const P_MIN: f64 = 1.0 / (1u64 << 60) as f64;

/// Parameters of one sampled stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Upper bound on `total sum / first item`.
    pub delta_cap: f64,
    /// Amplification parameter `a >= 1`.
    pub amp: f64,
    pub const_c: f64,
}

impl SamplerConfig {
    /// Config with the default constant and the amplification derived from it.
    pub fn new(epsilon: f64, delta: f64, delta_cap: f64) -> Result<Self> {
        Self::with_const(epsilon, delta, delta_cap, DEFAULT_CONST_C)
    }

    pub fn with_const(epsilon: f64, delta: f64, delta_cap: f64, const_c: f64) -> Result<Self> {
        let amp = amplification_param(epsilon, delta, delta_cap, const_c)?;
        Ok(Self {
            epsilon,
            delta,
            delta_cap,
            amp,
            const_c,
        })
    }

    /// Replaces the derived amplification parameter with an explicit one.
    pub fn with_amp(mut self, amp: f64) -> Result<Self> {
        if !(amp >= 1.0 && amp.is_finite()) {
            return Err(Error::Domain {
                name: "amp",
                value: amp,
                expected: "a finite value >= 1",
            });
        }
        self.amp = amp;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_open_unit("epsilon", self.epsilon)?;
        check_open_unit("delta", self.delta)?;
        check_delta_cap(self.delta_cap)?;
        check_positive("const_c", self.const_c)?;
        if !(self.amp >= 1.0 && self.amp.is_finite()) {
            return Err(Error::Domain {
                name: "amp",
                value: self.amp,
                expected: "a finite value >= 1",
            });
        }
        Ok(())
    }
}

fn check_delta_cap(delta_cap: f64) -> Result<()> {
    if delta_cap > 1.0 && !delta_cap.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "delta_cap",
            value: delta_cap,
            expected: "a value > 1",
        })
    }
}

/// `max(1, c * eps^-2 * ln(max(e, ln cap) / (eps * delta)))`.
pub fn amplification_param(epsilon: f64, delta: f64, delta_cap: f64, const_c: f64) -> Result<f64> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    check_delta_cap(delta_cap)?;
    check_positive("const_c", const_c)?;
    let strata = delta_cap.ln().max(std::f64::consts::E);
    let amp = const_c / (epsilon * epsilon) * (strata / (epsilon * delta)).ln();
    Ok(amp.max(1.0))
}

/// The online importance rule `min{1, a * x / (x + estimate)}`; zero items get 1.
pub fn default_probability(amp: f64, x: f64, estimate: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    (amp * x / (x + estimate)).min(1.0)
}

/// Outcome of one sampling decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub x: f64,
    pub p: f64,
    pub coin: bool,
    pub x_tilde: f64,
}

impl StepRecord {
    /// `Var[x_tilde] = x^2 / p - x^2` for this decision.
    pub fn variance(&self) -> f64 {
        self.x * self.x / self.p - self.x * self.x
    }
}

/// Running state of one stream.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerState {
    t: u64,
    true_sum: f64,
    estimate: f64,
    sample_count: u64,
    x1: Option<f64>,
}

impl SamplerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn true_sum(&self) -> f64 {
        self.true_sum
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    /// First nonzero item, once one has arrived.
    pub fn first_item(&self) -> Option<f64> {
        self.x1
    }

    /// `|estimate - true_sum| / true_sum`.
    pub fn relative_error(&self) -> Result<f64> {
        if self.true_sum == 0.0 {
            return Err(Error::ZeroTrueSum);
        }
        Ok((self.estimate - self.true_sum).abs() / self.true_sum)
    }

    /// Processes one item.
    ///
    /// With `p_override` the caller supplies the probability (it must still be
    /// at least the online importance rule for the guarantee to apply; that is
    /// not checked here). Zero items are no-ops that consume no randomness.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        config: &SamplerConfig,
        x: f64,
        p_override: Option<f64>,
        rng: &mut R,
    ) -> Result<StepRecord> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::NegativeItem(x));
        }
        if let Some(p) = p_override {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        if x == 0.0 {
            self.t += 1;
            return Ok(StepRecord {
                x,
                p: 1.0,
                coin: false,
                x_tilde: 0.0,
            });
        }

        let x1 = self.x1.unwrap_or(x);
        let ratio = (self.true_sum + x) / x1;
        if ratio > config.delta_cap {
            return Err(Error::DeltaExceeded {
                ratio,
                cap: config.delta_cap,
            });
        }

        let p = match p_override {
            Some(p) => p,
            None => default_probability(config.amp, x, self.estimate),
        };
        if p < P_MIN {
            return Err(Error::ProbabilityUnderflow {
                required: p,
                floor: P_MIN,
            });
        }

        let coin = rng.random::<f64>() < p;
        let x_tilde = if coin { x / p } else { 0.0 };

        self.t += 1;
        self.x1 = Some(x1);
        self.true_sum += x;
        self.estimate += x_tilde;
        if coin {
            self.sample_count += 1;
        }
        Ok(StepRecord { x, p, coin, x_tilde })
    }
}

/// Runs a fixed stream through a fresh sampler with the default rule.
pub fn sample_stream<R: Rng + ?Sized>(
    config: &SamplerConfig,
    items: &[f64],
    rng: &mut R,
) -> Result<(SamplerState, Vec<StepRecord>)> {
    let mut state = SamplerState::new();
    let mut records = Vec::with_capacity(items.len());
    for &x in items {
        records.push(state.step(config, x, None, rng)?);
    }
    Ok((state, records))
}
