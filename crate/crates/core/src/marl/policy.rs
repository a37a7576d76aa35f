// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Hybrid discrete-continuous actor with its two critics.
//!
//! The server choice is categorical over `E` logits. The local ratio is a
//! Gaussian in logit space squashed by a sigmoid, so `φ = σ(z)` always
//! lands in (0, 1). The Jacobian term `−log(φ(1−φ))` does not depend on the
//! parameters and cancels in PPO ratios, but it is included in the reported
//! log-density.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mlp::{Activation, Mlp};
use crate::env::UserAction;
use crate::error::Result;

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 1.0;
/// Pre-squash samples are clamped here so φ stays strictly inside (0, 1).
pub const PRE_SQUASH_LIMIT: f64 = 20.0;
const LN_2PI: f64 = 1.837_877_066_409_345_5;
/// Initial log-std of the ratio head.
const INITIAL_LOG_STD: f64 = 0.0;

/// Smooth map of the raw network output onto `[LOG_STD_MIN, LOG_STD_MAX]`.
pub fn bounded_log_std(raw: f64) -> f64 {
    LOG_STD_MIN + 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (raw.tanh() + 1.0)
}

pub(crate) fn bounded_log_std_grad(raw: f64) -> f64 {
    let t = raw.tanh();
    0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (1.0 - t * t)
}

fn inverse_bounded_log_std(log_std: f64) -> f64 {
    (2.0 * (log_std - LOG_STD_MIN) / (LOG_STD_MAX - LOG_STD_MIN) - 1.0).atanh()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable `log softmax`.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logits.iter().map(|l| l - lse).collect()
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    log_softmax(logits).into_iter().map(f64::exp).collect()
}

/// Entropy of the categorical with the given log-probabilities.
pub fn categorical_entropy(log_probs: &[f64]) -> f64 {
    -log_probs.iter().map(|&l| l.exp() * l).sum::<f64>()
}

/// `log N(z; mean, exp(log_std))`.
pub fn gaussian_log_density(z: f64, mean: f64, log_std: f64) -> f64 {
    let u = (z - mean) / log_std.exp();
    -0.5 * u * u - log_std - 0.5 * LN_2PI
}

/// Log-density of `φ = σ(z)` at the pre-squash point `z`.
pub fn squashed_log_density(z: f64, mean: f64, log_std: f64) -> f64 {
    // log σ'(z) = log σ(z) + log(1 − σ(z)) = −softplus(−z) − softplus(z)
    gaussian_log_density(z, mean, log_std) + softplus(-z) + softplus(z)
}

/// Density of the squashed Gaussian evaluated at `φ ∈ (0, 1)`.
pub fn ratio_density(phi: f64, mean: f64, log_std: f64) -> f64 {
    let z = (phi / (1.0 - phi)).ln();
    squashed_log_density(z, mean, log_std).exp()
}

pub fn gaussian_entropy(log_std: f64) -> f64 {
    log_std + 0.5 * (1.0 + LN_2PI)
}

/// Per-agent parameters: `(π^a, V^a)` for the server choice and
/// `(π^φ, V^φ)` for the local ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridPolicy {
    pub server_actor: Mlp,
    pub server_critic: Mlp,
    pub ratio_actor: Mlp,
    pub ratio_critic: Mlp,
}

/// One sampled decision with everything the update needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridSample {
    pub server: usize,
    pub local_ratio: f64,
    pub pre_squash: f64,
    pub logp_server: f64,
    pub logp_ratio: f64,
}

impl HybridSample {
    pub fn action(&self) -> UserAction {
        UserAction {
            server: self.server,
            local_ratio: self.local_ratio,
        }
    }
}

fn sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut s = Vec::with_capacity(hidden.len() + 2);
    s.push(input);
    s.extend_from_slice(hidden);
    s.push(output);
    s
}

impl HybridPolicy {
    /// Actor heads start near uniform logits and `φ ≈ 0.5` with unit
    /// log-space spread.
    pub fn new<R: Rng + ?Sized>(obs_len: usize, servers: usize, hidden: &[usize], rng: &mut R) -> Result<Self> {
        let server_actor = Mlp::new(&sizes(obs_len, hidden, servers), Activation::Tanh, 0.01, rng)?;
        let server_critic = Mlp::new(&sizes(obs_len, hidden, 1), Activation::Tanh, 1.0, rng)?;
        let mut ratio_actor = Mlp::new(&sizes(obs_len, hidden, 2), Activation::Tanh, 0.01, rng)?;
        let ratio_critic = Mlp::new(&sizes(obs_len, hidden, 1), Activation::Tanh, 1.0, rng)?;
        let n = ratio_actor.num_params();
        ratio_actor.params_mut()[n - 1] = inverse_bounded_log_std(INITIAL_LOG_STD);
        Ok(Self {
            server_actor,
            server_critic,
            ratio_actor,
            ratio_critic,
        })
    }

    pub fn servers(&self) -> usize {
        self.server_actor.output_len()
    }

    pub fn obs_len(&self) -> usize {
        self.server_actor.input_len()
    }

    pub fn server_probabilities(&self, obs: &[f64]) -> Result<Vec<f64>> {
        Ok(softmax(&self.server_actor.forward(obs)?))
    }

    /// `(mean, log_std)` of the pre-squash Gaussian.
    pub fn ratio_distribution(&self, obs: &[f64]) -> Result<(f64, f64)> {
        let out = self.ratio_actor.forward(obs)?;
        Ok((out[0], bounded_log_std(out[1])))
    }

    pub fn is_finite(&self) -> bool {
        [&self.server_actor, &self.server_critic, &self.ratio_actor, &self.ratio_critic]
            .iter()
            .all(|n| n.params().iter().all(|p| p.is_finite()))
    }

    /// Argmax server and `σ(mean)`.
    pub fn greedy_action(&self, obs: &[f64]) -> Result<UserAction> {
        let logits = self.server_actor.forward(obs)?;
        let mut server = 0;
        for (i, &l) in logits.iter().enumerate() {
            if l > logits[server] {
                server = i;
            }
        }
        let (mean, _) = self.ratio_distribution(obs)?;
        Ok(UserAction {
            server,
            local_ratio: sigmoid(mean.clamp(-PRE_SQUASH_LIMIT, PRE_SQUASH_LIMIT)),
        })
    }
}

pub fn sample_hybrid_action<R: Rng + ?Sized>(policy: &HybridPolicy, obs: &[f64], rng: &mut R) -> Result<HybridSample> {
    let log_probs = log_softmax(&policy.server_actor.forward(obs)?);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut server = log_probs.len() - 1;
    for (i, &lp) in log_probs.iter().enumerate() {
        acc += lp.exp();
        if u < acc {
            server = i;
            break;
        }
    }
    let (mean, log_std) = policy.ratio_distribution(obs)?;
    let noise: f64 = StandardNormal.sample(rng);
    let z = (mean + log_std.exp() * noise).clamp(-PRE_SQUASH_LIMIT, PRE_SQUASH_LIMIT);
    Ok(HybridSample {
        server,
        local_ratio: sigmoid(z),
        pre_squash: z,
        logp_server: log_probs[server],
        logp_ratio: squashed_log_density(z, mean, log_std),
    })
}
