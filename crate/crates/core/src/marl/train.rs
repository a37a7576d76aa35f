// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent multi-agent PPO on the shared environment.
//!
//! Every user owns one [`HybridPolicy`] and learns from the shared reward
//! alone: no parameter sharing and no centralized critic.

use serde::{Deserialize, Serialize};

use super::buffer::{RolloutBuffer, Transition};
use super::checkpoint::Checkpoint;
use super::policy::{sample_hybrid_action, HybridPolicy};
use super::ppo::{ppo_update, AgentOptimizer, LossStats, PpoConfig, PreparedBatch};
use crate::env::{observation_len, EnvConfig, MeqcEnv, Observation, UserAction};
use crate::error::{Error, Result};
use crate::rng::{stream, Tag};
use crate::solvers::Policy;
use crate::workload::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    /// Passes over each epoch's rollout.
    pub updates_per_epoch: usize,
    pub batch_size: usize,
    /// γ_discount.
    pub discount: f64,
    pub learning_rate: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub normalize_advantages: bool,
    pub max_grad_norm: Option<f64>,
    pub hidden_sizes: Vec<usize>,
    /// Multiplier on rewards. When unset it is fixed after the first
    /// rollout to the inverse of that rollout's mean cost.
    pub reward_scale: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            steps_per_epoch: 2000,
            updates_per_epoch: 2,
            batch_size: 128,
            discount: 0.95,
            learning_rate: 1e-3,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            value_coef: 0.5,
            normalize_advantages: true,
            max_grad_norm: Some(0.5),
            hidden_sizes: vec![256, 256],
            reward_scale: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.epochs == 0 || self.steps_per_epoch == 0 || self.updates_per_epoch == 0 || self.batch_size == 0 {
            return bad("epochs, steps_per_epoch, updates_per_epoch and batch_size must be positive");
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return bad("discount must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gae_lambda must lie in [0, 1]");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(self.clip_epsilon > 0.0) {
            return bad("clip_epsilon must be positive");
        }
        if self.entropy_coef < 0.0 || self.value_coef < 0.0 {
            return bad("loss coefficients must be non-negative");
        }
        if self.hidden_sizes.contains(&0) {
            return bad("hidden layer sizes must be positive");
        }
        if matches!(self.max_grad_norm, Some(n) if !(n > 0.0)) {
            return bad("max_grad_norm must be positive when set");
        }
        if matches!(self.reward_scale, Some(s) if !(s > 0.0 && s.is_finite())) {
            return bad("reward_scale must be positive and finite when set");
        }
        Ok(())
    }

    pub fn ppo(&self) -> PpoConfig {
        PpoConfig {
            clip_epsilon: self.clip_epsilon,
            value_coef: self.value_coef,
            entropy_coef: self.entropy_coef,
            normalize_advantages: self.normalize_advantages,
            max_grad_norm: self.max_grad_norm,
            minibatch_size: self.batch_size,
            passes: self.updates_per_epoch,
        }
    }
}

/// One learning-curve row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean system cost over the epoch's sampled steps.
    pub mean_cost: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub seed: u64,
    pub agents: Vec<HybridPolicy>,
    pub curve: Vec<EpochStats>,
    pub reward_scale: f64,
    /// Set when training stopped early on a numerical failure; `agents`
    /// then hold the last finite parameters.
    pub halted: Option<String>,
}

impl TrainOutcome {
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(self.seed, self.curve.len(), self.reward_scale, self.agents.clone())
    }

    pub fn policy(&self) -> LearnedPolicy {
        LearnedPolicy::new(self.agents.clone())
    }
}

pub fn train(scenario: &Scenario, cfg: &TrainConfig, seed: u64) -> Result<TrainOutcome> {
    train_with(scenario, EnvConfig::default(), cfg, seed)
}

pub fn train_with(scenario: &Scenario, env_config: EnvConfig, cfg: &TrainConfig, seed: u64) -> Result<TrainOutcome> {
    cfg.validate()?;
    let mut env = MeqcEnv::new(scenario.clone(), env_config)?;
    let (users, servers) = (env.users(), env.servers());
    let obs_len = observation_len(servers);

    let mut agents = (0..users)
        .map(|u| HybridPolicy::new(obs_len, servers, &cfg.hidden_sizes, &mut stream(seed, u as u64, Tag::AgentInit)))
        .collect::<Result<Vec<_>>>()?;
    let mut optimizers: Vec<_> = agents.iter().map(|a| AgentOptimizer::new(a, cfg.learning_rate)).collect();
    let mut sample_rngs: Vec<_> = (0..users).map(|u| stream(seed, u as u64, Tag::AgentSample)).collect();
    let mut shuffle_rngs: Vec<_> = (0..users).map(|u| stream(seed, u as u64, Tag::Shuffle)).collect();
    let mut buffers: Vec<_> = (0..users).map(|_| RolloutBuffer::new(cfg.steps_per_epoch, obs_len)).collect();
    let ppo = cfg.ppo();

    let mut scale = cfg.reward_scale;
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut halted = None;

    for epoch in 0..cfg.epochs {
        let snapshot = agents.clone();
        buffers.iter_mut().for_each(RolloutBuffer::clear);
        let mut obs = env.reset()?;
        let mut cost_sum = 0.0;
        for _ in 0..cfg.steps_per_epoch {
            let samples = agents
                .iter()
                .zip(&obs)
                .zip(sample_rngs.iter_mut())
                .map(|((a, o), rng)| sample_hybrid_action(a, o.as_slice(), rng))
                .collect::<Result<Vec<_>>>()?;
            let actions: Vec<UserAction> = samples.iter().map(|s| s.action()).collect();
            let result = env.step(&actions)?;
            cost_sum += result.cost;
            for ((buf, s), o) in buffers.iter_mut().zip(&samples).zip(&obs) {
                buf.push(Transition {
                    observation: o.as_slice(),
                    server: s.server,
                    pre_squash: s.pre_squash,
                    logp_server: s.logp_server,
                    logp_ratio: s.logp_ratio,
                    reward: result.reward,
                })?;
            }
            obs = result.observations;
        }
        let mean_cost = cost_sum / cfg.steps_per_epoch as f64;
        let s = *scale.get_or_insert_with(|| if mean_cost > 0.0 { 1.0 / mean_cost } else { 1.0 });
        if !mean_cost.is_finite() {
            halted = Some(format!("epoch {epoch}: non-finite rollout cost"));
            agents = snapshot;
            break;
        }

        match update_all(&mut agents, &mut optimizers, &mut buffers, &mut shuffle_rngs, &obs, s, cfg, &ppo) {
            Ok(stats) => curve.push(EpochStats {
                epoch,
                mean_cost,
                policy_loss: stats.policy_loss,
                value_loss: stats.value_loss,
                entropy: stats.entropy,
            }),
            Err(Error::Training { detail, .. }) => {
                halted = Some(Error::Training { epoch, detail }.to_string());
                agents = snapshot;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(TrainOutcome {
        seed,
        agents,
        curve,
        reward_scale: scale.unwrap_or(1.0),
        halted,
    })
}

/// Runs every agent's update and averages the loss statistics over agents.
#[allow(clippy::too_many_arguments)]
fn update_all(
    agents: &mut [HybridPolicy],
    optimizers: &mut [AgentOptimizer],
    buffers: &mut [RolloutBuffer],
    rngs: &mut [crate::rng::StreamRng],
    bootstrap: &[Observation],
    scale: f64,
    cfg: &TrainConfig,
    ppo: &PpoConfig,
) -> Result<LossStats> {
    let mut acc = LossStats::default();
    let n = agents.len() as f64;
    for u in 0..agents.len() {
        buffers[u].scale_rewards(scale);
        let batch = PreparedBatch::from_buffer(
            &agents[u],
            &buffers[u],
            bootstrap[u].as_slice(),
            cfg.discount,
            cfg.gae_lambda,
        )?;
        let stats = ppo_update(&mut agents[u], &mut optimizers[u], &batch, ppo, &mut rngs[u])?;
        acc.total += stats.total / n;
        acc.policy_loss += stats.policy_loss / n;
        acc.value_loss += stats.value_loss / n;
        acc.entropy += stats.entropy / n;
        acc.clip_fraction += stats.clip_fraction / n;
    }
    Ok(acc)
}

/// Deterministic execution of trained agents: argmax server, `φ = σ(mean)`.
#[derive(Debug, Clone)]
pub struct LearnedPolicy {
    agents: Vec<HybridPolicy>,
}

impl LearnedPolicy {
    pub fn new(agents: Vec<HybridPolicy>) -> Self {
        Self { agents }
    }

    pub fn agents(&self) -> &[HybridPolicy] {
        &self.agents
    }
}

impl Policy for LearnedPolicy {
    fn act(&mut self, env: &MeqcEnv, observations: &[Observation]) -> Result<Vec<UserAction>> {
        if self.agents.len() != env.users() || observations.len() != env.users() {
            return Err(Error::Contract(format!(
                "{} agents for {} users",
                self.agents.len(),
                env.users()
            )));
        }
        self.agents
            .iter()
            .zip(observations)
            .map(|(a, o)| a.greedy_action(o.as_slice()))
            .collect()
    }
}
