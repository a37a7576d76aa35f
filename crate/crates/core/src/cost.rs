// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-user latency and energy for the three execution paths (local CPU,
//! edge CPU, edge QPU) and the system-wide weighted cost.
//!
//! Task sizes are in bytes and uplink rates in bits/s, so transmission
//! converts with a factor of 8.

use serde::{Deserialize, Serialize};

use crate::device::{logical_resources, success_probability, DeviceModel, GatePowerProfile, LogicalResources, QubitTech};
use crate::env::JointAction;
use crate::error::{Error, Result};
use crate::workload::Scenario;

/// Minimum success probability for a single run of a quantum algorithm.
pub const SUCCESS_THRESHOLD: f64 = 2.0 / 3.0;

const BITS_PER_BYTE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserProfile {
    /// Local CPU capacity, cycles/s.
    pub local_cpu: f64,
    /// Transmit power, W.
    pub tx_power: f64,
    pub weight_latency: f64,
    pub weight_energy: f64,
    /// Channel gain towards each server (unitless SNR multiplier).
    pub channel_gains: Vec<f64>,
    /// Subscribed edge CPU capacity, cycles/s.
    pub edge_cpu: f64,
}

impl UserProfile {
    pub fn validate(&self, servers: usize) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("local_cpu", self.local_cpu)?;
        positive("tx_power", self.tx_power)?;
        positive("edge_cpu", self.edge_cpu)?;
        for (name, w) in [
            ("weight_latency", self.weight_latency),
            ("weight_energy", self.weight_energy),
        ] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {w}")));
            }
        }
        if self.channel_gains.len() != servers {
            return Err(Error::InvalidConfig(format!(
                "user has {} channel gains for {servers} servers",
                self.channel_gains.len()
            )));
        }
        for &g in &self.channel_gains {
            positive("channel gain", g)?;
        }
        Ok(())
    }
}

/// A classical computational task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub data_size: f64,
    pub cycles_per_byte: f64,
}

impl TaskSpec {
    /// Total CPU cycles for the whole task.
    pub fn cycles(&self) -> f64 {
        self.data_size * self.cycles_per_byte
    }
}

/// The same task compiled to a logical quantum circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumTaskSpec {
    pub data_size: f64,
    pub logical_qubits: u64,
    pub logical_depth: u64,
}

impl QuantumTaskSpec {
    /// Number of locations where a logical error can occur.
    pub fn error_locations(&self) -> u64 {
        self.logical_qubits * self.logical_depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerProfile {
    /// Receiver noise power σ², W.
    pub noise_power: f64,
    pub bandwidth: f64,
    pub concatenation_level: u32,
    pub physical_qubits: u64,
}

impl ServerProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_power must be > 0, got {}",
                self.noise_power
            )));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be > 0, got {}",
                self.bandwidth
            )));
        }
        logical_resources(self.concatenation_level)?;
        Ok(())
    }

    /// Logical qubits the server can host at its concatenation level.
    pub fn logical_capacity(&self) -> u64 {
        self.physical_qubits / 91u64.pow(self.concatenation_level)
    }
}

/// Latency (s) and energy (J) components plus the weighted scalar cost.
/// Components of paths that are not taken are zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub local_latency: f64,
    pub transmit_latency: f64,
    pub edge_latency: f64,
    pub quantum_latency: f64,
    pub local_energy: f64,
    pub transmit_energy: f64,
    pub edge_energy: f64,
    pub quantum_energy: f64,
    pub cost: f64,
}

impl CostBreakdown {
    pub fn latency(&self) -> f64 {
        self.local_latency + self.transmit_latency + self.edge_latency + self.quantum_latency
    }

    pub fn energy(&self) -> f64 {
        self.local_energy + self.transmit_energy + self.edge_energy + self.quantum_energy
    }

    pub fn combine(&self, other: &CostBreakdown) -> CostBreakdown {
        CostBreakdown {
            local_latency: self.local_latency + other.local_latency,
            transmit_latency: self.transmit_latency + other.transmit_latency,
            edge_latency: self.edge_latency + other.edge_latency,
            quantum_latency: self.quantum_latency + other.quantum_latency,
            local_energy: self.local_energy + other.local_energy,
            transmit_energy: self.transmit_energy + other.transmit_energy,
            edge_energy: self.edge_energy + other.edge_energy,
            quantum_energy: self.quantum_energy + other.quantum_energy,
            cost: self.cost + other.cost,
        }
    }
}

/// Uplink time and energy for the offloaded share of a task.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Transmission {
    pub latency: f64,
    pub energy: f64,
}

/// Shannon uplink rate in bits/s from `user` to server `target`.
pub fn uplink_rate(user: &UserProfile, servers: &[ServerProfile], target: usize) -> Result<f64> {
    let server = servers.get(target).ok_or(Error::UnknownServer {
        id: target,
        count: servers.len(),
    })?;
    let gain = *user.channel_gains.get(target).ok_or(Error::UnknownServer {
        id: target,
        count: user.channel_gains.len(),
    })?;
    let snr = user.tx_power * gain / server.noise_power;
    Ok(server.bandwidth * snr.ln_1p() / std::f64::consts::LN_2)
}

pub fn local_cost(user: &UserProfile, task: &TaskSpec, local_ratio: f64, chip_coefficient: f64) -> CostBreakdown {
    let cycles = local_ratio * task.cycles();
    let latency = cycles / user.local_cpu;
    let energy = chip_coefficient * cycles;
    CostBreakdown {
        local_latency: latency,
        local_energy: energy,
        cost: user.weight_latency * latency + user.weight_energy * energy,
        ..CostBreakdown::default()
    }
}

/// Uplink of the offloaded share `(1 − φ)·s` to server `target`.
pub fn transmission_cost(
    user: &UserProfile,
    servers: &[ServerProfile],
    target: usize,
    task: &TaskSpec,
    local_ratio: f64,
) -> Result<Transmission> {
    let rate = uplink_rate(user, servers, target)?;
    transmit_at_rate(user, task, local_ratio, rate).ok_or(Error::InfeasibleLink { server: target })
}

/// `None` when there is something to send but the link carries nothing.
pub fn transmit_at_rate(user: &UserProfile, task: &TaskSpec, local_ratio: f64, rate: f64) -> Option<Transmission> {
    let offloaded = (1.0 - local_ratio) * task.data_size;
    if offloaded == 0.0 {
        return Some(Transmission::default());
    }
    if !(rate > 0.0) {
        return None;
    }
    let latency = offloaded * BITS_PER_BYTE / rate;
    Some(Transmission {
        latency,
        energy: user.tx_power * latency,
    })
}

/// Transmission to `target` plus processing on the subscribed edge CPU.
pub fn edge_classical_cost(
    user: &UserProfile,
    task: &TaskSpec,
    local_ratio: f64,
    chip_coefficient: f64,
    uplink: Transmission,
) -> CostBreakdown {
    let cycles = (1.0 - local_ratio) * task.cycles();
    let latency = cycles / user.edge_cpu;
    let energy = chip_coefficient * cycles;
    CostBreakdown {
        transmit_latency: uplink.latency,
        transmit_energy: uplink.energy,
        edge_latency: latency,
        edge_energy: energy,
        cost: user.weight_latency * (uplink.latency + latency)
            + user.weight_energy * (uplink.energy + energy),
        ..CostBreakdown::default()
    }
}

/// Time spent per (byte · logical qubit) by the error-corrected processor.
pub fn quantum_step_time(resources: &LogicalResources, tech: &QubitTech) -> f64 {
    tech.tau_1qb * resources.n_1qb + tech.tau_2qb * resources.n_2qb + tech.tau_meas * resources.n_meas
}

/// Energy spent per (byte · logical qubit) by the error-corrected processor.
pub fn quantum_step_energy(resources: &LogicalResources, powers: &GatePowerProfile) -> f64 {
    powers.e_1qb * resources.n_1qb
        + powers.e_2qb * resources.n_2qb
        + powers.e_meas * resources.n_meas
        + powers.e_qubit * resources.physical_per_logical as f64
}

/// Transmission plus execution on the edge QPU.
pub fn edge_quantum_cost(
    user: &UserProfile,
    qtask: &QuantumTaskSpec,
    local_ratio: f64,
    resources: &LogicalResources,
    powers: &GatePowerProfile,
    tech: &QubitTech,
    uplink: Transmission,
) -> CostBreakdown {
    let volume = (1.0 - local_ratio) * qtask.data_size * qtask.logical_qubits as f64;
    let latency = volume * quantum_step_time(resources, tech);
    let energy = volume * quantum_step_energy(resources, powers);
    CostBreakdown {
        transmit_latency: uplink.latency,
        transmit_energy: uplink.energy,
        quantum_latency: latency,
        quantum_energy: energy,
        cost: user.weight_latency * (uplink.latency + latency)
            + user.weight_energy * (uplink.energy + energy),
        ..CostBreakdown::default()
    }
}

/// Whether a compiled task fits the server's logical capacity and succeeds
/// with probability at least 2/3.
pub fn quantum_feasible(qtask: &QuantumTaskSpec, server: &ServerProfile, success: f64) -> bool {
    qtask.logical_qubits <= server.logical_capacity() && success >= SUCCESS_THRESHOLD
}

/// Precomputed per-(user, server) quantities for a scenario, used by the
/// environment and the solvers to evaluate many actions cheaply.
#[derive(Debug, Clone)]
pub struct CostModel {
    scenario: Scenario,
    device: DeviceModel,
    resources: Vec<LogicalResources>,
    rates: Vec<Vec<f64>>,
    success: Vec<Vec<f64>>,
    eligible: Vec<Vec<bool>>,
}

impl CostModel {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let device = DeviceModel::new(&scenario.device.cryostat, &scenario.device.qubit)?;
        let resources = scenario
            .servers
            .iter()
            .map(|s| logical_resources(s.concatenation_level))
            .collect::<Result<Vec<_>>>()?;
        let mut rates = Vec::with_capacity(scenario.users.len());
        let mut success = Vec::with_capacity(scenario.users.len());
        let mut eligible = Vec::with_capacity(scenario.users.len());
        for user in &scenario.users {
            let mut r = Vec::with_capacity(scenario.servers.len());
            let mut m = Vec::with_capacity(scenario.servers.len());
            let mut ok = Vec::with_capacity(scenario.servers.len());
            for (e, server) in scenario.servers.iter().enumerate() {
                r.push(uplink_rate(&user.profile, &scenario.servers, e)?);
                let p = success_probability(
                    user.quantum.logical_qubits,
                    user.quantum.logical_depth,
                    server.concatenation_level,
                    device.error_rate,
                    scenario.device.error_threshold,
                )?;
                m.push(p);
                ok.push(quantum_feasible(&user.quantum, server, p));
            }
            rates.push(r);
            success.push(m);
            eligible.push(ok);
        }
        Ok(Self {
            scenario: scenario.clone(),
            device,
            resources,
            rates,
            success,
            eligible,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn device(&self) -> &DeviceModel {
        &self.device
    }

    pub fn users(&self) -> usize {
        self.scenario.users.len()
    }

    pub fn servers(&self) -> usize {
        self.scenario.servers.len()
    }

    pub fn rate(&self, user: usize, server: usize) -> f64 {
        self.rates[user][server]
    }

    pub fn success_probability(&self, user: usize, server: usize) -> f64 {
        self.success[user][server]
    }

    /// Whether `user` may run on the QPU of `server`, ignoring contention.
    pub fn eligible(&self, user: usize, server: usize) -> bool {
        self.eligible[user][server]
    }

    fn check_ids(&self, user: usize, server: usize) -> Result<()> {
        if user >= self.users() {
            return Err(Error::Contract(format!(
                "user {user} out of range ({} users)",
                self.users()
            )));
        }
        if server >= self.servers() {
            return Err(Error::UnknownServer {
                id: server,
                count: self.servers(),
            });
        }
        Ok(())
    }

    /// Full cost of one user: the local share plus the offloaded share on
    /// either the edge CPU or, when `quantum` is set, the edge QPU.
    pub fn user_cost(&self, user: usize, server: usize, local_ratio: f64, quantum: bool) -> Result<CostBreakdown> {
        self.check_ids(user, server)?;
        if !(0.0..=1.0).contains(&local_ratio) {
            return Err(Error::Contract(format!(
                "local ratio must lie in [0, 1], got {local_ratio}"
            )));
        }
        let entry = &self.scenario.users[user];
        let chip = self.scenario.device.chip_coefficient;
        let local = local_cost(&entry.profile, &entry.task, local_ratio, chip);
        let uplink = transmit_at_rate(&entry.profile, &entry.task, local_ratio, self.rate(user, server))
            .ok_or(Error::InfeasibleLink { server })?;
        let offload = if quantum {
            edge_quantum_cost(
                &entry.profile,
                &entry.quantum,
                local_ratio,
                &self.resources[server],
                &self.device.powers,
                &self.device.tech,
                uplink,
            )
        } else {
            edge_classical_cost(&entry.profile, &entry.task, local_ratio, chip, uplink)
        };
        Ok(local.combine(&offload))
    }

    /// c^E − c^Q for the offloaded share: positive when the QPU is cheaper.
    pub fn quantum_saving(&self, user: usize, server: usize, local_ratio: f64) -> Result<f64> {
        let classical = self.user_cost(user, server, local_ratio, false)?;
        let quantum = self.user_cost(user, server, local_ratio, true)?;
        Ok(classical.cost - quantum.cost)
    }

    /// System cost of a joint action whose indicators are already resolved.
    pub fn total_cost(&self, action: &JointAction) -> Result<(f64, Vec<CostBreakdown>)> {
        let users = self.users();
        if action.servers.len() != users
            || action.local_ratios.len() != users
            || action.indicators.len() != users
        {
            return Err(Error::Contract(format!(
                "joint action sized for {}/{}/{} users, scenario has {users}",
                action.servers.len(),
                action.local_ratios.len(),
                action.indicators.len()
            )));
        }
        let mut granted = vec![None; self.servers()];
        for u in 0..users {
            if !action.indicators[u] {
                continue;
            }
            let e = action.servers[u];
            self.check_ids(u, e)?;
            if !self.eligible(u, e) {
                return Err(Error::Contract(format!(
                    "user {u} granted the QPU of server {e} but is not eligible"
                )));
            }
            if let Some(other) = granted[e].replace(u) {
                return Err(Error::Contract(format!(
                    "server {e} grants its QPU to both user {other} and user {u}"
                )));
            }
        }
        let mut total = 0.0;
        let mut breakdowns = Vec::with_capacity(users);
        for u in 0..users {
            let b = self.user_cost(u, action.servers[u], action.local_ratios[u], action.indicators[u])?;
            total += b.cost;
            breakdowns.push(b);
        }
        Ok((total, breakdowns))
    }
}

/// System cost of `action` on `scenario`.
pub fn total_cost(scenario: &Scenario, action: &JointAction) -> Result<(f64, Vec<CostBreakdown>)> {
    CostModel::new(scenario)?.total_cost(action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn user() -> UserProfile {
        UserProfile {
            local_cpu: 2e9,
            tx_power: 1e-4,
            weight_latency: 0.5,
            weight_energy: 0.5,
            channel_gains: vec![6.0],
            edge_cpu: 15e9,
        }
    }

    fn server() -> ServerProfile {
        ServerProfile {
            noise_power: 1e-6,
            bandwidth: 20e6,
            concatenation_level: 1,
            physical_qubits: 2000,
        }
    }

    fn task() -> TaskSpec {
        TaskSpec {
            data_size: 160e6,
            cycles_per_byte: 24.0,
        }
    }

    #[test]
    fn uplink_rate_examples() {
        let mut u = user();
        let s = vec![server()];
        u.tx_power = 1e-6;
        u.channel_gains = vec![1.0];
        assert_relative_eq!(uplink_rate(&u, &s, 0).unwrap(), 2e7, max_relative = 1e-15);

        let r = uplink_rate(&user(), &s, 0).unwrap();
        // 20e6·log2(601)
        assert_relative_eq!(r, 184_624_423.614_223_7, max_relative = 1e-12);

        u.channel_gains = vec![1e-300];
        assert!(uplink_rate(&u, &s, 0).unwrap() < 1e-280);
        assert!(matches!(
            uplink_rate(&user(), &s, 3),
            Err(Error::UnknownServer { id: 3, count: 1 })
        ));
    }

    #[test]
    fn local_cost_examples() {
        let c = local_cost(&user(), &task(), 1.0, 1e-11);
        assert_relative_eq!(c.local_latency, 1.92, max_relative = 1e-14);
        assert_relative_eq!(c.local_energy, 0.0384, max_relative = 1e-14);
        assert_relative_eq!(c.cost, 0.9792, max_relative = 1e-14);
        assert_eq!(local_cost(&user(), &task(), 0.0, 1e-11), CostBreakdown::default());
        let half = local_cost(&user(), &task(), 0.25, 1e-11);
        let full = local_cost(&user(), &task(), 0.5, 1e-11);
        assert_relative_eq!(full.cost, 2.0 * half.cost, max_relative = 1e-15);
        assert_relative_eq!(full.local_latency, 2.0 * half.local_latency, max_relative = 1e-15);
        assert_relative_eq!(full.local_energy, 2.0 * half.local_energy, max_relative = 1e-15);
    }

    #[test]
    fn transmission_examples() {
        let u = user();
        let s = vec![server()];
        assert_eq!(transmission_cost(&u, &s, 0, &task(), 1.0).unwrap(), Transmission::default());
        let r = 1.85e8;
        let t = transmit_at_rate(&u, &task(), 0.0, r).unwrap();
        assert_relative_eq!(t.latency, 1.28e9 / r, max_relative = 1e-15);
        assert!((t.latency - 6.92).abs() < 5e-3);
        assert!((t.energy - 6.92e-4).abs() < 5e-7);
        let via_rate = transmission_cost(&u, &s, 0, &task(), 0.3).unwrap();
        assert_eq!(via_rate.energy, u.tx_power * via_rate.latency);
        assert!(transmit_at_rate(&u, &task(), 0.5, 0.0).is_none());
        let deaf = ServerProfile { noise_power: f64::INFINITY, ..server() };
        assert!(matches!(
            transmission_cost(&u, &[deaf], 0, &task(), 0.5),
            Err(Error::InfeasibleLink { server: 0 })
        ));
    }

    #[test]
    fn edge_classical_examples() {
        let u = user();
        let c = edge_classical_cost(&u, &task(), 0.0, 1e-11, Transmission::default());
        assert_relative_eq!(c.edge_latency, 0.256, max_relative = 1e-14);
        let none = edge_classical_cost(&u, &task(), 1.0, 1e-11, Transmission::default());
        assert_eq!(none.cost, 0.0);
        let faster = UserProfile { edge_cpu: 40e9, ..u.clone() };
        let c2 = edge_classical_cost(&faster, &task(), 0.0, 1e-11, Transmission::default());
        assert_eq!(c.edge_energy, c2.edge_energy);
        assert!(c2.edge_latency < c.edge_latency);
    }

    #[test]
    fn quantum_step_time_level_one() {
        let r = logical_resources(1).unwrap();
        let t = quantum_step_time(&r, &QubitTech::default());
        let expected = 25e-9 * 9.686_486_486_486_486 + 100e-9 * 22.140_540_540_540_54 + 100e-9 * 9.686_486_486_486_486;
        assert_relative_eq!(t, expected, max_relative = 1e-14);
        assert!((t - 3.425e-6).abs() < 1e-9);
    }

    #[test]
    fn edge_quantum_scales_with_offloaded_share() {
        let r = logical_resources(1).unwrap();
        let dev = DeviceModel::new(&Default::default(), &Default::default()).unwrap();
        let q = QuantumTaskSpec {
            data_size: 160e6,
            logical_qubits: 20,
            logical_depth: 813,
        };
        let at = |phi| edge_quantum_cost(&user(), &q, phi, &r, &dev.powers, &dev.tech, Transmission::default());
        assert_eq!(at(1.0).cost, 0.0);
        let half = at(0.5);
        let full = at(0.0);
        assert_relative_eq!(full.quantum_latency, 2.0 * half.quantum_latency, max_relative = 1e-15);
        assert_relative_eq!(full.quantum_energy, 2.0 * half.quantum_energy, max_relative = 1e-15);
        assert_relative_eq!(
            full.quantum_latency,
            160e6 * 20.0 * quantum_step_time(&r, &dev.tech),
            max_relative = 1e-15
        );
    }

    #[test]
    fn feasibility_rules() {
        let q = |n| QuantumTaskSpec {
            data_size: 1.0,
            logical_qubits: n,
            logical_depth: 813,
        };
        // 2275 physical qubits at level 1 → 25 logical
        let roomy = ServerProfile { physical_qubits: 2275, ..server() };
        assert!(quantum_feasible(&q(20), &roomy, 0.978));
        let tight = ServerProfile { physical_qubits: 910, ..server() };
        assert!(!quantum_feasible(&q(26), &tight, 0.978));
        assert!(!quantum_feasible(&q(20), &roomy, 0.5));
        assert!(quantum_feasible(&q(20), &roomy, 2.0 / 3.0));
    }

    #[test]
    fn breakdown_sums() {
        let a = local_cost(&user(), &task(), 0.3, 1e-11);
        let b = edge_classical_cost(&user(), &task(), 0.3, 1e-11, Transmission { latency: 1.0, energy: 1e-4 });
        let c = a.combine(&b);
        assert_relative_eq!(c.cost, 0.5 * c.latency() + 0.5 * c.energy(), max_relative = 1e-14);
    }
}
