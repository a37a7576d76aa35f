// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Versioned JSON dump of every agent's networks.
//!
//! Each network carries its layer sizes next to its flat parameter vector,
//! so a checkpoint is self-describing.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::policy::HybridPolicy;
use super::train::LearnedPolicy;
use crate::error::{Error, Result};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub seed: u64,
    /// Completed epochs.
    pub epochs: usize,
    pub reward_scale: f64,
    pub agents: Vec<HybridPolicy>,
}

impl Checkpoint {
    pub fn new(seed: u64, epochs: usize, reward_scale: f64, agents: Vec<HybridPolicy>) -> Self {
        Self {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            seed,
            epochs,
            reward_scale,
            agents,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Self = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if ck.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::Serialization(format!(
                "checkpoint schema {} is not supported (expected {CHECKPOINT_SCHEMA_VERSION})",
                ck.schema_version
            )));
        }
        if ck.agents.iter().any(|a| !a.is_finite()) {
            return Err(Error::Serialization("checkpoint holds non-finite parameters".into()));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::bench::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn policy(&self) -> LearnedPolicy {
        LearnedPolicy::new(self.agents.clone())
    }
}
