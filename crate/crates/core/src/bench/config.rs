// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration.
//!
//! Every key is optional; an empty document gives the paper's setting of
//! ten users and ten servers with the default generation ranges and
//! device. Quantities are SI (Hz, W, s, bytes).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::marl::TrainConfig;
use crate::solvers::PolicyKind;
use crate::workload::{line_of, DeviceConfig, GenerationRanges};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Local,
    Random,
    RandomCloud,
    Greedy,
    Oracle,
    /// Exhaustive search with the QPUs switched off.
    ClassicalOracle,
    /// Multi-agent PPO, trained per run with the `[train]` settings.
    Marl,
}

impl PolicyChoice {
    pub const ALL: [PolicyChoice; 7] = [
        PolicyChoice::Local,
        PolicyChoice::Random,
        PolicyChoice::RandomCloud,
        PolicyChoice::Greedy,
        PolicyChoice::Oracle,
        PolicyChoice::ClassicalOracle,
        PolicyChoice::Marl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyChoice::ClassicalOracle => "classical_oracle",
            PolicyChoice::Marl => "marl",
            other => other.baseline().expect("baseline").name(),
        }
    }

    pub fn baseline(&self) -> Option<PolicyKind> {
        Some(match self {
            PolicyChoice::Local => PolicyKind::Local,
            PolicyChoice::Random => PolicyKind::Random,
            PolicyChoice::RandomCloud => PolicyKind::RandomCloud,
            PolicyChoice::Greedy => PolicyKind::Greedy,
            PolicyChoice::Oracle => PolicyKind::Oracle,
            PolicyChoice::ClassicalOracle | PolicyChoice::Marl => return None,
        })
    }
}

impl fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyChoice::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown policy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Edge CPU frequency of every user's subscription, Hz.
    EdgeCpu,
    /// Physical qubits at every server.
    PhysicalQubits,
    /// Qubit decoherence time, s.
    DecoherenceTime,
    /// Latency weight λ_D; the energy weight becomes 1 − λ_D.
    Weights,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::EdgeCpu => "edge_cpu",
            SweepParam::PhysicalQubits => "physical_qubits",
            SweepParam::DecoherenceTime => "decoherence_time",
            SweepParam::Weights => "weights",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub policies: Vec<PolicyChoice>,
    /// Episodes per evaluation; only the random baselines and task redraws
    /// make more than one useful.
    pub episodes: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            policies: vec![
                PolicyChoice::Local,
                PolicyChoice::Random,
                PolicyChoice::RandomCloud,
                PolicyChoice::Greedy,
            ],
            episodes: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Scenario seeds; defaults to the top-level seed.
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl SweepConfig {
    /// (value, seed) pairs, value-major.
    pub fn runs(&self, default_seed: u64) -> Vec<(f64, u64)> {
        let seeds = if self.seeds.is_empty() { vec![default_seed] } else { self.seeds.clone() };
        self.values
            .iter()
            .flat_map(|&v| seeds.iter().map(move |&s| (v, s)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub users: usize,
    pub servers: usize,
    /// Load this scenario file instead of generating one.
    pub scenario: Option<PathBuf>,
    /// Output file or directory, depending on the verb.
    pub output: Option<PathBuf>,
    pub ranges: GenerationRanges,
    pub device: DeviceConfig,
    pub env: EnvConfig,
    pub eval: EvalConfig,
    pub train: TrainConfig,
    pub sweep: Option<SweepConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            users: 10,
            servers: 10,
            scenario: None,
            output: None,
            ranges: GenerationRanges::default(),
            device: DeviceConfig::default(),
            env: EnvConfig::default(),
            eval: EvalConfig::default(),
            train: TrainConfig::default(),
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.users == 0 || self.servers == 0 {
            return bad("users and servers must be positive".into());
        }
        self.ranges.validate()?;
        self.device.cryostat.validate()?;
        self.device.qubit.validate()?;
        if !(self.device.error_threshold > 0.0) {
            return bad("error_threshold must be > 0".into());
        }
        if !(self.device.chip_coefficient >= 0.0) {
            return bad("chip_coefficient must be >= 0".into());
        }
        if self.eval.episodes == 0 {
            return bad("episodes must be positive".into());
        }
        if self.eval.policies.is_empty() {
            return bad("policies must not be empty".into());
        }
        self.train.validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return bad("sweep values must not be empty".into());
            }
            for &v in &sweep.values {
                let ok = match sweep.param {
                    SweepParam::EdgeCpu | SweepParam::DecoherenceTime => v > 0.0 && v.is_finite(),
                    SweepParam::PhysicalQubits => v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64,
                    SweepParam::Weights => (0.0..=1.0).contains(&v),
                };
                if !ok {
                    return bad(format!("values: {v} is out of range for {}", sweep.param));
                }
            }
        }
        Ok(())
    }
}

/// First key name in `message` that appears as `key =` in `text`.
fn line_of_key(text: &str, message: &str) -> Option<usize> {
    let key = message.split(|c: char| !(c.is_alphanumeric() || c == '_')).next()?;
    if key.is_empty() {
        return None;
    }
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

/// Parses and validates a TOML experiment document. Every failure is a
/// [`Error::Config`], with a line number whenever one can be located.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    cfg.validate().map_err(|e| {
        let message = match e {
            Error::InvalidConfig(m) => m,
            other => other.to_string(),
        };
        Error::Config {
            line: line_of_key(text, &message),
            message,
        }
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!((cfg.users, cfg.servers), (10, 10));
        assert_eq!(cfg.train.epochs, 500);
        assert_eq!(cfg.train.steps_per_epoch, 2000);
        assert_eq!(cfg.train.batch_size, 128);
        assert_eq!(cfg.train.updates_per_epoch, 2);
        assert_eq!(cfg.train.discount, 0.95);
        assert_eq!(cfg.train.learning_rate, 1e-3);
        assert_eq!(cfg.ranges.bandwidth, 20e6);
        assert_eq!(cfg.ranges.edge_cpu, vec![10e9, 15e9, 20e9]);
        assert_eq!(cfg.device.error_threshold, 2e-4);
    }

    #[test]
    fn device_sections_override_field_by_field() {
        let cfg = parse_config("[device.qubit]\ndecoherence_time = 2e-4\n[device.cryostat]\nstages = 4\n").unwrap();
        let base = ExperimentConfig::default().device;
        assert_eq!(cfg.device.qubit.decoherence_time, 2e-4);
        assert_eq!(cfg.device.qubit.frequency, base.qubit.frequency);
        assert_eq!(cfg.device.cryostat.stages, 4);
        assert_eq!(cfg.device.cryostat.t_qubit, base.cryostat.t_qubit);
    }

    #[test]
    fn edge_cpu_sweep_has_three_runs() {
        let cfg = parse_config(
            "seed = 4\n[sweep]\nparam = \"edge_cpu\"\nvalues = [10e9, 15e9, 20e9]\n",
        )
        .unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.param, SweepParam::EdgeCpu);
        assert_eq!(sweep.runs(cfg.seed), vec![(10e9, 4), (15e9, 4), (20e9, 4)]);
    }

    #[test]
    fn negative_bandwidth_names_the_key() {
        let err = parse_config("users = 2\n\n[ranges]\nbandwidth = -5.0\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert!(message.contains("bandwidth"), "{message}");
                assert_eq!(line, Some(4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err = parse_config("seed = 1\n[train]\nepochz = 3\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert!(message.contains("epochz"), "{message}");
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_sweep_values_are_rejected() {
        assert!(parse_config("[sweep]\nparam = \"weights\"\nvalues = [1.5]\n").is_err());
        assert!(parse_config("[sweep]\nparam = \"edge_cpu\"\nvalues = []\n").is_err());
        assert!(parse_config("[sweep]\nparam = \"voltage\"\nvalues = [1.0]\n").is_err());
    }

    #[test]
    fn policies_parse_by_name() {
        let cfg = parse_config("[eval]\npolicies = [\"oracle\", \"classical_oracle\", \"marl\"]\n").unwrap();
        assert_eq!(
            cfg.eval.policies,
            vec![PolicyChoice::Oracle, PolicyChoice::ClassicalOracle, PolicyChoice::Marl]
        );
        for p in PolicyChoice::ALL {
            assert_eq!(p.name().parse::<PolicyChoice>().unwrap(), p);
        }
    }
}
