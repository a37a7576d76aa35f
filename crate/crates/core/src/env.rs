// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Multi-agent offloading environment.
//!
//! Each user is an agent that sees its own local, edge and wireless
//! conditions and picks a server plus the share of its task to keep local.
//! The environment arbitrates QPU access (one quantum task per server) and
//! pays every agent the same reward, the negated system cost.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cost::{CostBreakdown, CostModel};
use crate::error::{Error, Result};
use crate::workload::{draw_user_task, GenerationRanges, Scenario};

/// One agent's raw decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserAction {
    pub server: usize,
    /// Share of the task processed locally, φ ∈ [0, 1].
    pub local_ratio: f64,
}

/// Decisions of all users plus the resolved QPU indicators.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAction {
    pub servers: Vec<usize>,
    pub local_ratios: Vec<f64>,
    pub indicators: Vec<bool>,
}

impl JointAction {
    pub fn new(actions: &[UserAction], indicators: Vec<bool>) -> Self {
        Self {
            servers: actions.iter().map(|a| a.server).collect(),
            local_ratios: actions.iter().map(|a| a.local_ratio).collect(),
            indicators,
        }
    }

    pub fn raw(&self) -> Vec<UserAction> {
        self.servers
            .iter()
            .zip(&self.local_ratios)
            .map(|(&server, &local_ratio)| UserAction { server, local_ratio })
            .collect()
    }

    /// Checks one server per user, φ in range, and at most one QPU grant
    /// per server.
    pub fn check_structure(&self, servers: usize) -> Result<()> {
        let mut granted = vec![false; servers];
        for (u, ((&e, &phi), &q)) in self
            .servers
            .iter()
            .zip(&self.local_ratios)
            .zip(&self.indicators)
            .enumerate()
        {
            if e >= servers {
                return Err(Error::UnknownServer { id: e, count: servers });
            }
            if !(0.0..=1.0).contains(&phi) {
                return Err(Error::Contract(format!("user {u} local ratio {phi} outside [0, 1]")));
            }
            if q {
                if granted[e] {
                    return Err(Error::Contract(format!("server {e} has two QPU grants")));
                }
                granted[e] = true;
            }
        }
        Ok(())
    }
}

/// Normalized per-user observation: local block `[f_L, s, n, Q, D]`, edge
/// block `[f_E, Q_E, k_1..k_E]` and wireless block `[p, g_1..g_E]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation(pub Vec<f64>);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn observation_len(servers: usize) -> usize {
    5 + 2 + servers + 1 + servers
}

pub fn observe(scenario: &Scenario, user: usize) -> Observation {
    let scale = &scenario.normalization;
    let entry = &scenario.users[user];
    let p = &entry.profile;
    let norm = |v: f64, s: f64| if s > 0.0 { (v / s).clamp(0.0, 1.0) } else { 0.0 };
    let capacity = scenario
        .servers
        .iter()
        .map(|s| s.logical_capacity())
        .max()
        .unwrap_or(0) as f64;

    let mut obs = Vec::with_capacity(observation_len(scenario.servers.len()));
    obs.extend([
        norm(p.local_cpu, scale.local_cpu),
        norm(entry.task.data_size, scale.data_size),
        norm(entry.task.cycles_per_byte, scale.cycles_per_byte),
        norm(entry.quantum.logical_qubits as f64, scale.logical_qubits),
        norm(entry.quantum.logical_depth as f64, scale.logical_depth),
        norm(p.edge_cpu, scale.edge_cpu),
        norm(capacity, scale.logical_capacity),
    ]);
    obs.extend(
        scenario
            .servers
            .iter()
            .map(|s| norm(f64::from(s.concatenation_level), scale.concatenation_level)),
    );
    obs.push(norm(p.tx_power, scale.tx_power));
    obs.extend(p.channel_gains.iter().map(|&g| norm(g, scale.channel_gain)));
    Observation(obs)
}

/// How a server picks among several users that could use its QPU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arbitration {
    /// The user whose cost drops the most wins; ties go to the lower index.
    #[default]
    LargestSaving,
    /// The lowest-indexed user that would benefit wins.
    FirstIndex,
}

/// Grants each server's QPU to at most one of the users that chose it, is
/// eligible, and is strictly cheaper on the QPU than on the edge CPU.
pub fn resolve_quantum_allocation(
    model: &CostModel,
    actions: &[UserAction],
    arbitration: Arbitration,
) -> Result<Vec<bool>> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; model.servers()];
    for (u, a) in actions.iter().enumerate() {
        if !model.eligible(u, a.server) {
            continue;
        }
        let saving = model.quantum_saving(u, a.server, a.local_ratio)?;
        if !(saving > 0.0) {
            continue;
        }
        let slot = &mut best[a.server];
        let replace = match (arbitration, *slot) {
            (_, None) => true,
            (Arbitration::LargestSaving, Some((_, s))) => saving > s,
            (Arbitration::FirstIndex, Some(_)) => false,
        };
        if replace {
            *slot = Some((u, saving));
        }
    }
    let mut indicators = vec![false; actions.len()];
    for (u, _) in best.into_iter().flatten() {
        indicators[u] = true;
    }
    Ok(indicators)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Draw fresh tasks on every reset and after every step.
    pub redraw_tasks: bool,
    pub arbitration: Arbitration,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub observations: Vec<Observation>,
    /// Shared reward, −C.
    pub reward: f64,
    pub cost: f64,
    pub action: JointAction,
    pub costs: Vec<CostBreakdown>,
    /// Success probability of each user's task at its chosen server.
    pub success: Vec<f64>,
}

/// Single-owner environment over one scenario.
#[derive(Debug, Clone)]
pub struct MeqcEnv {
    base: Scenario,
    model: CostModel,
    config: EnvConfig,
    ranges: GenerationRanges,
    slot: u64,
}

impl MeqcEnv {
    pub fn new(scenario: Scenario, config: EnvConfig) -> Result<Self> {
        Self::with_ranges(scenario, config, GenerationRanges::default())
    }

    /// `ranges` are used to redraw tasks when redraw is enabled.
    pub fn with_ranges(scenario: Scenario, config: EnvConfig, ranges: GenerationRanges) -> Result<Self> {
        let model = CostModel::new(&scenario)?;
        Ok(Self {
            base: scenario,
            model,
            config,
            ranges,
            slot: 0,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.model.scenario()
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    pub fn users(&self) -> usize {
        self.model.users()
    }

    pub fn servers(&self) -> usize {
        self.model.servers()
    }

    pub fn observations(&self) -> Vec<Observation> {
        (0..self.users()).map(|u| observe(self.scenario(), u)).collect()
    }

    pub fn reset(&mut self) -> Result<Vec<Observation>> {
        if self.config.redraw_tasks {
            self.advance_slot()?;
        } else if self.slot != 0 {
            self.model = CostModel::new(&self.base)?;
            self.slot = 0;
        }
        Ok(self.observations())
    }

    fn advance_slot(&mut self) -> Result<()> {
        self.slot += 1;
        let mut next = self.base.clone();
        for (u, entry) in next.users.iter_mut().enumerate() {
            let (params, task, quantum) = draw_user_task(&self.ranges, self.base.seed, u, self.slot);
            entry.ray_tracing = params;
            entry.task = task;
            entry.quantum = quantum;
        }
        self.model = CostModel::new(&next)?;
        Ok(())
    }

    pub fn step(&mut self, actions: &[UserAction]) -> Result<StepResult> {
        if actions.len() != self.users() {
            return Err(Error::Contract(format!(
                "expected {} actions, got {}",
                self.users(),
                actions.len()
            )));
        }
        let clamped: Vec<UserAction> = actions
            .iter()
            .map(|a| {
                if a.local_ratio.is_nan() {
                    return Err(Error::Contract("local ratio is NaN".into()));
                }
                if a.server >= self.servers() {
                    return Err(Error::UnknownServer {
                        id: a.server,
                        count: self.servers(),
                    });
                }
                Ok(UserAction {
                    server: a.server,
                    local_ratio: a.local_ratio.clamp(0.0, 1.0),
                })
            })
            .collect::<Result<_>>()?;
        let indicators = resolve_quantum_allocation(&self.model, &clamped, self.config.arbitration)?;
        let action = JointAction::new(&clamped, indicators);
        let (cost, costs) = self.model.total_cost(&action)?;
        let success = clamped
            .iter()
            .enumerate()
            .map(|(u, a)| self.model.success_probability(u, a.server))
            .collect();
        if self.config.redraw_tasks {
            self.advance_slot()?;
        }
        Ok(StepResult {
            observations: self.observations(),
            reward: -cost,
            cost,
            action,
            costs,
            success,
        })
    }
}

/// Per-step debugging records written as CSV.
#[derive(Debug, Default)]
pub struct TrajectoryLog {
    rows: Vec<(usize, usize, Observation, UserAction, bool, f64)>,
}

impl TrajectoryLog {
    pub fn record(&mut self, step: usize, observations: &[Observation], result: &StepResult) {
        for (u, obs) in observations.iter().enumerate() {
            self.rows.push((
                step,
                u,
                obs.clone(),
                UserAction {
                    server: result.action.servers[u],
                    local_ratio: result.action.local_ratios[u],
                },
                result.action.indicators[u],
                result.reward,
            ));
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Columns: `step,user,server,local_ratio,indicator,reward,obs_0..`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let width = self.rows.first().map_or(0, |r| r.2 .0.len());
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header: Vec<String> = ["step", "user", "server", "local_ratio", "indicator", "reward"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((0..width).map(|i| format!("obs_{i}")));
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(&header).map_err(ser)?;
        for (step, user, obs, a, q, r) in &self.rows {
            let mut rec = vec![
                step.to_string(),
                user.to_string(),
                a.server.to_string(),
                format!("{:.11e}", a.local_ratio),
                u8::from(*q).to_string(),
                format!("{r:.11e}"),
            ];
            rec.extend(obs.0.iter().map(|v| format!("{v:.11e}")));
            w.write_record(&rec).map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
        Ok(())
    }
}
