// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Generalized advantage estimation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Advantages {
    pub advantages: Vec<f64>,
    /// λ-returns, `advantages + values[..T]`; the critic regression target.
    pub returns: Vec<f64>,
}

/// `values` carries one extra entry, the bootstrap value of the state after
/// the last reward.
pub fn gae(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> Result<Advantages> {
    if values.len() != rewards.len() + 1 {
        return Err(Error::Contract(format!(
            "gae needs {} values (rewards + bootstrap), got {}",
            rewards.len() + 1,
            values.len()
        )));
    }
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let delta = rewards[t] + gamma * values[t + 1] - values[t];
        running = delta + gamma * lambda * running;
        advantages[t] = running;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok(Advantages { advantages, returns })
}

/// Shifts to zero mean and unit standard deviation. Constant input maps to
/// zeros.
pub fn normalize(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for v in values.iter_mut() {
        *v = (*v - mean) / (std + 1e-8);
    }
}
