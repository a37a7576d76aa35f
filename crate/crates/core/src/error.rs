// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported concatenation level {0} (expected 1, 2 or 3)")]
    UnsupportedLevel(u32),

    #[error("unknown server id {id} (scenario has {count} servers)")]
    UnknownServer { id: usize, count: usize },

    #[error("cannot offload to server {server}: uplink rate is zero")]
    InfeasibleLink { server: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("instance too large for exhaustive search: {combinations} combinations exceed budget {budget}")]
    InstanceTooLarge { combinations: f64, budget: u64 },

    #[error("training diverged at epoch {epoch}: {detail}")]
    Training { epoch: usize, detail: String },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
