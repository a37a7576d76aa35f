// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Clipped-surrogate updates for one agent.
//!
//! Both heads and both critics are trained from a single joint loss:
//!
//! ```text
//! L = −S_a − S_φ + c_v·(MSE(V^a) + MSE(V^φ)) − c_e·(H_a + H_φ)
//! ```
//!
//! where `S` is the clipped surrogate of each head. `H_φ` is the entropy of
//! the pre-squash Gaussian.

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{clip_global_norm, Adam};
use super::buffer::RolloutBuffer;
use super::gae::{gae, normalize};
use super::policy::{
    bounded_log_std, bounded_log_std_grad, categorical_entropy, gaussian_entropy, log_softmax, squashed_log_density,
    HybridPolicy,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpoConfig {
    pub clip_epsilon: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub normalize_advantages: bool,
    /// Joint gradient-norm cap over the four networks; `None` disables it.
    pub max_grad_norm: Option<f64>,
    pub minibatch_size: usize,
    /// Passes over the batch per update.
    pub passes: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip_epsilon: 0.2,
            value_coef: 0.5,
            entropy_coef: 0.01,
            normalize_advantages: true,
            max_grad_norm: Some(0.5),
            minibatch_size: 128,
            passes: 2,
        }
    }
}

/// Rollout data with advantages and critic targets attached.
#[derive(Debug, Clone)]
pub struct PreparedBatch {
    pub observations: Array2<f64>,
    pub servers: Vec<usize>,
    pub pre_squash: Vec<f64>,
    pub logp_server: Vec<f64>,
    pub logp_ratio: Vec<f64>,
    pub adv_server: Vec<f64>,
    pub adv_ratio: Vec<f64>,
    pub ret_server: Vec<f64>,
    pub ret_ratio: Vec<f64>,
}

fn column(net: &super::mlp::Mlp, obs: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    Ok(net.forward_batch(obs)?.output().column(0).to_vec())
}

impl PreparedBatch {
    /// Evaluates both critics on the stored observations plus `bootstrap`,
    /// the observation following the last step, and runs GAE per critic.
    pub fn from_buffer(
        policy: &HybridPolicy,
        buffer: &RolloutBuffer,
        bootstrap: &[f64],
        gamma: f64,
        lambda: f64,
    ) -> Result<Self> {
        let obs = buffer.observations();
        let mut all = Array2::zeros((obs.nrows() + 1, obs.ncols()));
        all.slice_mut(ndarray::s![..obs.nrows(), ..]).assign(&obs);
        if bootstrap.len() != obs.ncols() {
            return Err(Error::Contract("bootstrap observation has the wrong length".into()));
        }
        all.row_mut(obs.nrows()).assign(&ndarray::ArrayView1::from(bootstrap));
        let va = column(&policy.server_critic, all.view())?;
        let vp = column(&policy.ratio_critic, all.view())?;
        let ga = gae(buffer.rewards(), &va, gamma, lambda)?;
        let gp = gae(buffer.rewards(), &vp, gamma, lambda)?;
        Ok(Self {
            observations: obs.to_owned(),
            servers: buffer.servers.clone(),
            pre_squash: buffer.pre_squash.clone(),
            logp_server: buffer.logp_server.clone(),
            logp_ratio: buffer.logp_ratio.clone(),
            adv_server: ga.advantages,
            adv_ratio: gp.advantages,
            ret_server: ga.returns,
            ret_ratio: gp.returns,
        })
    }

    pub fn len(&self) -> usize {
        self.servers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.servers.is_empty()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self {
            observations: self.observations.select(ndarray::Axis(0), idx),
            servers: idx.iter().map(|&i| self.servers[i]).collect(),
            pre_squash: pick(&self.pre_squash),
            logp_server: pick(&self.logp_server),
            logp_ratio: pick(&self.logp_ratio),
            adv_server: pick(&self.adv_server),
            adv_ratio: pick(&self.adv_ratio),
            ret_server: pick(&self.ret_server),
            ret_ratio: pick(&self.ret_ratio),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossStats {
    /// Joint loss that the gradients descend.
    pub total: f64,
    /// `−(S_a + S_φ)`.
    pub policy_loss: f64,
    /// `MSE(V^a) + MSE(V^φ)`.
    pub value_loss: f64,
    /// Mean `H_a + H_φ`.
    pub entropy: f64,
    /// Fraction of (sample, head) pairs whose ratio left the clip band.
    pub clip_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub server_actor: Vec<f64>,
    pub server_critic: Vec<f64>,
    pub ratio_actor: Vec<f64>,
    pub ratio_critic: Vec<f64>,
}

/// Derivative of `−min(rA, clip(r)A)` with respect to the log-probability.
/// Zero when the clipped branch is the active one.
fn surrogate_grad(ratio: f64, adv: f64, eps: f64) -> (f64, f64, bool) {
    let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
    let unclipped_term = ratio * adv;
    let clipped_term = clipped * adv;
    let loss = -unclipped_term.min(clipped_term);
    let active = unclipped_term <= clipped_term;
    let grad = if active { -adv * ratio } else { 0.0 };
    (loss, grad, (ratio - clipped).abs() > 0.0)
}

pub fn loss_and_gradients(policy: &HybridPolicy, batch: &PreparedBatch, cfg: &PpoConfig) -> Result<(LossStats, Gradients)> {
    let b = batch.len();
    if b == 0 {
        return Err(Error::Contract("empty minibatch".into()));
    }
    let bf = b as f64;
    let mut adv_a = batch.adv_server.clone();
    let mut adv_p = batch.adv_ratio.clone();
    if cfg.normalize_advantages {
        normalize(&mut adv_a);
        normalize(&mut adv_p);
    }
    let obs = batch.observations.view();
    let eps = cfg.clip_epsilon;
    let mut stats = LossStats::default();
    let mut clipped = 0usize;

    // discrete head
    let cache_a = policy.server_actor.forward_batch(obs)?;
    let logits = cache_a.output();
    let mut up_a = Array2::zeros(logits.dim());
    for i in 0..b {
        let lp = log_softmax(&logits.row(i).to_vec());
        let h = categorical_entropy(&lp);
        let a = batch.servers[i];
        let (loss, g, c) = surrogate_grad((lp[a] - batch.logp_server[i]).exp(), adv_a[i], eps);
        stats.policy_loss += loss / bf;
        stats.entropy += h / bf;
        clipped += usize::from(c);
        for (j, &lpj) in lp.iter().enumerate() {
            let p = lpj.exp();
            let onehot = if j == a { 1.0 } else { 0.0 };
            up_a[[i, j]] = g / bf * (onehot - p) + cfg.entropy_coef / bf * p * (lpj + h);
        }
    }

    // continuous head
    let cache_p = policy.ratio_actor.forward_batch(obs)?;
    let out = cache_p.output();
    let mut up_p = Array2::zeros(out.dim());
    for i in 0..b {
        let (mean, raw) = (out[[i, 0]], out[[i, 1]]);
        let log_std = bounded_log_std(raw);
        let z = batch.pre_squash[i];
        let logp = squashed_log_density(z, mean, log_std);
        let (loss, g, c) = surrogate_grad((logp - batch.logp_ratio[i]).exp(), adv_p[i], eps);
        stats.policy_loss += loss / bf;
        stats.entropy += gaussian_entropy(log_std) / bf;
        clipped += usize::from(c);
        let var = (2.0 * log_std).exp();
        let u2 = (z - mean).powi(2) / var;
        up_p[[i, 0]] = g / bf * (z - mean) / var;
        up_p[[i, 1]] = (g / bf * (u2 - 1.0) - cfg.entropy_coef / bf) * bounded_log_std_grad(raw);
    }

    // critics
    let critic = |net: &super::mlp::Mlp, targets: &[f64]| -> Result<(f64, Vec<f64>)> {
        let cache = net.forward_batch(obs)?;
        let v = cache.output();
        let mut up = Array2::zeros(v.dim());
        let mut mse = 0.0;
        for i in 0..b {
            let d = v[[i, 0]] - targets[i];
            mse += d * d / bf;
            up[[i, 0]] = cfg.value_coef * 2.0 * d / bf;
        }
        Ok((mse, net.backward(&cache, up.view())?))
    };
    let (mse_a, g_va) = critic(&policy.server_critic, &batch.ret_server)?;
    let (mse_p, g_vp) = critic(&policy.ratio_critic, &batch.ret_ratio)?;

    stats.value_loss = mse_a + mse_p;
    stats.total = stats.policy_loss + cfg.value_coef * stats.value_loss - cfg.entropy_coef * stats.entropy;
    stats.clip_fraction = clipped as f64 / (2.0 * bf);
    if !stats.total.is_finite() {
        return Err(Error::Training {
            epoch: 0,
            detail: format!(
                "non-finite loss (policy {}, value {}, entropy {})",
                stats.policy_loss, stats.value_loss, stats.entropy
            ),
        });
    }
    let grads = Gradients {
        server_actor: policy.server_actor.backward(&cache_a, up_a.view())?,
        server_critic: g_va,
        ratio_actor: policy.ratio_actor.backward(&cache_p, up_p.view())?,
        ratio_critic: g_vp,
    };
    Ok((stats, grads))
}

/// One Adam state per network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentOptimizer {
    pub server_actor: Adam,
    pub server_critic: Adam,
    pub ratio_actor: Adam,
    pub ratio_critic: Adam,
}

impl AgentOptimizer {
    pub fn new(policy: &HybridPolicy, learning_rate: f64) -> Self {
        Self {
            server_actor: Adam::new(policy.server_actor.num_params(), learning_rate),
            server_critic: Adam::new(policy.server_critic.num_params(), learning_rate),
            ratio_actor: Adam::new(policy.ratio_actor.num_params(), learning_rate),
            ratio_critic: Adam::new(policy.ratio_critic.num_params(), learning_rate),
        }
    }

    pub fn apply(&mut self, policy: &mut HybridPolicy, mut grads: Gradients, max_grad_norm: Option<f64>) {
        if let Some(cap) = max_grad_norm {
            clip_global_norm(
                &mut [
                    &mut grads.server_actor,
                    &mut grads.server_critic,
                    &mut grads.ratio_actor,
                    &mut grads.ratio_critic,
                ],
                cap,
            );
        }
        self.server_actor.step(policy.server_actor.params_mut(), &grads.server_actor);
        self.server_critic.step(policy.server_critic.params_mut(), &grads.server_critic);
        self.ratio_actor.step(policy.ratio_actor.params_mut(), &grads.ratio_actor);
        self.ratio_critic.step(policy.ratio_critic.params_mut(), &grads.ratio_critic);
    }
}

/// `cfg.passes` shuffled passes of minibatch updates. Returns the mean of
/// the minibatch statistics.
pub fn ppo_update<R: Rng + ?Sized>(
    policy: &mut HybridPolicy,
    optimizer: &mut AgentOptimizer,
    batch: &PreparedBatch,
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<LossStats> {
    if batch.is_empty() || cfg.minibatch_size == 0 {
        return Err(Error::Contract("ppo_update needs a non-empty batch and minibatch size".into()));
    }
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let mut acc = LossStats::default();
    let mut count = 0.0;
    for _ in 0..cfg.passes {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch_size) {
            let mb = batch.select(chunk);
            let (stats, grads) = loss_and_gradients(policy, &mb, cfg)?;
            optimizer.apply(policy, grads, cfg.max_grad_norm);
            acc.total += stats.total;
            acc.policy_loss += stats.policy_loss;
            acc.value_loss += stats.value_loss;
            acc.entropy += stats.entropy;
            acc.clip_fraction += stats.clip_fraction;
            count += 1.0;
        }
    }
    if !policy.is_finite() {
        return Err(Error::Training {
            epoch: 0,
            detail: "non-finite parameters after update".into(),
        });
    }
    Ok(LossStats {
        total: acc.total / count,
        policy_loss: acc.policy_loss / count,
        value_loss: acc.value_loss / count,
        entropy: acc.entropy / count,
        clip_fraction: acc.clip_fraction / count,
    })
}
