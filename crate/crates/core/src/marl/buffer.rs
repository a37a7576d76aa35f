// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-agent on-policy rollout storage.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// One agent's decision at one step, as stored for the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<'a> {
    pub observation: &'a [f64],
    pub server: usize,
    /// Pre-squash Gaussian sample; `φ = sigmoid(pre_squash)`.
    pub pre_squash: f64,
    pub logp_server: f64,
    pub logp_ratio: f64,
    pub reward: f64,
}

#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    capacity: usize,
    obs_len: usize,
    observations: Vec<f64>,
    pub(crate) servers: Vec<usize>,
    pub(crate) pre_squash: Vec<f64>,
    pub(crate) logp_server: Vec<f64>,
    pub(crate) logp_ratio: Vec<f64>,
    pub(crate) rewards: Vec<f64>,
}

impl RolloutBuffer {
    pub fn new(capacity: usize, obs_len: usize) -> Self {
        Self {
            capacity,
            obs_len,
            observations: Vec::with_capacity(capacity * obs_len),
            servers: Vec::with_capacity(capacity),
            pre_squash: Vec::with_capacity(capacity),
            logp_server: Vec::with_capacity(capacity),
            logp_ratio: Vec::with_capacity(capacity),
            rewards: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, t: Transition<'_>) -> Result<()> {
        if self.is_full() {
            return Err(Error::Contract(format!("rollout buffer full at {} transitions", self.capacity)));
        }
        if t.observation.len() != self.obs_len {
            return Err(Error::Contract(format!(
                "observation length {} does not match buffer width {}",
                t.observation.len(),
                self.obs_len
            )));
        }
        self.observations.extend_from_slice(t.observation);
        self.servers.push(t.server);
        self.pre_squash.push(t.pre_squash);
        self.logp_server.push(t.logp_server);
        self.logp_ratio.push(t.logp_ratio);
        self.rewards.push(t.reward);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.servers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.servers.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity
    }

    pub fn clear(&mut self) {
        self.observations.clear();
        self.servers.clear();
        self.pre_squash.clear();
        self.logp_server.clear();
        self.logp_ratio.clear();
        self.rewards.clear();
    }

    /// Stored observations as a `len × obs_len` matrix.
    pub fn observations(&self) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((self.len(), self.obs_len), &self.observations).expect("aligned by push")
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    /// Multiplies every stored reward by `scale`.
    pub fn scale_rewards(&mut self, scale: f64) {
        self.rewards.iter_mut().for_each(|r| *r *= scale);
    }
}
