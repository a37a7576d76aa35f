// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Ray-tracing workloads, their quantum compilation footprint, and seeded
//! generation of whole scenarios.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{QuantumTaskSpec, ServerProfile, TaskSpec, UserProfile};
use crate::device::{CryostatConfig, QubitTech};
use crate::error::{Error, Result};
use crate::rng::{stream, stream2, Tag};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Parameters of one ray-tracing rendering task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayTracingParams {
    /// The scene holds 2^pb primitives.
    pub primitive_exponent: u32,
    /// Bits per coordinate axis.
    pub coord_bits: u32,
    pub frames: u32,
    /// Pixels per frame.
    pub resolution: u32,
    pub rays_per_primitive: u32,
}

impl RayTracingParams {
    pub fn new(primitive_exponent: u32) -> Self {
        Self {
            primitive_exponent,
            coord_bits: 6,
            frames: 1024,
            resolution: 128 * 128,
            rays_per_primitive: 3,
        }
    }
}

/// Width and depth of the Grover-based intersection search for `params`.
///
/// Width is `pb + 2·cb + 5` qubits; depth is `3·pb + ⌊π/4 · √(2^width)⌋`.
pub fn compile_quantum(params: &RayTracingParams, task: &TaskSpec) -> QuantumTaskSpec {
    let width = u64::from(params.primitive_exponent) + 2 * u64::from(params.coord_bits) + 5;
    let search_space = (width as f64).exp2();
    let iterations = (FRAC_PI_4 * search_space.sqrt()).floor() as u64;
    QuantumTaskSpec {
        data_size: task.data_size,
        logical_qubits: width,
        logical_depth: 3 * u64::from(params.primitive_exponent) + iterations,
    }
}

/// Ranges every generated scenario field is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationRanges {
    pub channel_gain: [f64; 2],
    /// Transmit power range, W.
    pub tx_power: [f64; 2],
    pub bandwidth: f64,
    pub noise_power: f64,
    pub local_cpu: Vec<f64>,
    pub edge_cpu: Vec<f64>,
    pub physical_qubits: [u64; 2],
    pub concatenation_levels: Vec<u32>,
    /// Task data size range, bytes.
    pub data_size: [f64; 2],
    pub primitive_exponents: [u32; 2],
    pub coord_bits: u32,
    pub frames: [u32; 2],
    pub resolution: u32,
    pub rays_per_primitive: u32,
    pub weight_latency: f64,
    pub weight_energy: f64,
}

impl Default for GenerationRanges {
    fn default() -> Self {
        Self {
            channel_gain: [4.0, 8.0],
            tx_power: [0.01e-3, 0.2e-3],
            bandwidth: 20e6,
            noise_power: 1e-6,
            local_cpu: vec![1e9, 2e9, 3e9],
            edge_cpu: vec![10e9, 15e9, 20e9],
            physical_qubits: [1000, 5000],
            concatenation_levels: vec![1, 2, 3],
            data_size: [160e6, 1600e6],
            primitive_exponents: [3, 9],
            coord_bits: 6,
            frames: [1024, 10240],
            resolution: 128 * 128,
            rays_per_primitive: 3,
            weight_latency: 0.5,
            weight_energy: 0.5,
        }
    }
}

impl GenerationRanges {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let interval = |name: &str, r: [f64; 2], strict: bool| -> Result<()> {
            let low_ok = if strict { r[0] > 0.0 } else { r[0] >= 0.0 };
            if low_ok && r[0] <= r[1] && r[1].is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} range {r:?} is invalid")))
            }
        };
        interval("channel_gain", self.channel_gain, true)?;
        interval("tx_power", self.tx_power, true)?;
        interval("data_size", self.data_size, true)?;
        if !(self.bandwidth > 0.0) {
            return bad(format!("bandwidth must be > 0, got {}", self.bandwidth));
        }
        if !(self.noise_power > 0.0) {
            return bad(format!("noise_power must be > 0, got {}", self.noise_power));
        }
        for (name, set) in [("local_cpu", &self.local_cpu), ("edge_cpu", &self.edge_cpu)] {
            if set.is_empty() || set.iter().any(|&f| !(f > 0.0)) {
                return bad(format!("{name} must be a non-empty list of positive capacities"));
            }
        }
        if self.physical_qubits[0] > self.physical_qubits[1] {
            return bad(format!("physical_qubits range {:?} is invalid", self.physical_qubits));
        }
        if self.concatenation_levels.is_empty()
            || self.concatenation_levels.iter().any(|k| !(1..=3).contains(k))
        {
            return bad("concatenation_levels must be a non-empty subset of {1, 2, 3}".into());
        }
        let [lo, hi] = self.primitive_exponents;
        if lo > hi || hi > 30 {
            return bad(format!("primitive_exponents range {:?} is invalid", self.primitive_exponents));
        }
        if self.coord_bits == 0 {
            return bad("coord_bits must be >= 1".into());
        }
        if self.frames[0] == 0 || self.frames[0] > self.frames[1] {
            return bad(format!("frames range {:?} is invalid", self.frames));
        }
        for (name, w) in [("weight_latency", self.weight_latency), ("weight_energy", self.weight_energy)] {
            if !(0.0..=1.0).contains(&w) {
                return bad(format!("{name} must lie in [0, 1], got {w}"));
            }
        }
        Ok(())
    }
}

/// Draws one task. Returns the ray-tracing parameters alongside the
/// classical task since the cycle count is tied to the primitive exponent.
pub fn gen_task<R: Rng + ?Sized>(ranges: &GenerationRanges, rng: &mut R) -> (RayTracingParams, TaskSpec) {
    let [lo, hi] = ranges.primitive_exponents;
    let pb = rng.random_range(lo..=hi);
    let frames = rng.random_range(ranges.frames[0]..=ranges.frames[1]);
    let data_size = rng.random_range(ranges.data_size[0]..=ranges.data_size[1]);
    let params = RayTracingParams {
        primitive_exponent: pb,
        coord_bits: ranges.coord_bits,
        frames,
        resolution: ranges.resolution,
        rays_per_primitive: ranges.rays_per_primitive,
    };
    let task = TaskSpec {
        data_size,
        cycles_per_byte: f64::from(ranges.rays_per_primitive) * f64::from(1u32 << pb),
    };
    (params, task)
}

/// Physical constants and thresholds shared by all servers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    pub cryostat: CryostatConfig,
    pub qubit: QubitTech,
    /// Fault-tolerance threshold ε_thr.
    pub error_threshold: f64,
    /// CPU energy per cycle, J.
    pub chip_coefficient: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            cryostat: CryostatConfig::default(),
            qubit: QubitTech::default(),
            error_threshold: 2e-4,
            chip_coefficient: 1e-11,
        }
    }
}

/// Divisors mapping raw observation fields into [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservationScales {
    pub local_cpu: f64,
    pub data_size: f64,
    pub cycles_per_byte: f64,
    pub logical_qubits: f64,
    pub logical_depth: f64,
    pub edge_cpu: f64,
    pub logical_capacity: f64,
    pub concatenation_level: f64,
    pub tx_power: f64,
    pub channel_gain: f64,
}

impl Default for ObservationScales {
    fn default() -> Self {
        Self::from_ranges(&GenerationRanges::default())
    }
}

impl ObservationScales {
    /// Range maxima of the generator.
    pub fn from_ranges(r: &GenerationRanges) -> Self {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let pb = r.primitive_exponents[1];
        let top = compile_quantum(
            &RayTracingParams {
                primitive_exponent: pb,
                coord_bits: r.coord_bits,
                ..RayTracingParams::new(pb)
            },
            &TaskSpec {
                data_size: 0.0,
                cycles_per_byte: 0.0,
            },
        );
        let min_level = r.concatenation_levels.iter().copied().min().unwrap_or(1);
        Self {
            local_cpu: max(&r.local_cpu),
            data_size: r.data_size[1],
            cycles_per_byte: f64::from(r.rays_per_primitive) * f64::from(1u32 << pb),
            logical_qubits: top.logical_qubits as f64,
            logical_depth: top.logical_depth as f64,
            edge_cpu: max(&r.edge_cpu),
            logical_capacity: ((r.physical_qubits[1] / 91u64.pow(min_level)) as f64).max(1.0),
            concatenation_level: r.concatenation_levels.iter().copied().max().unwrap_or(3) as f64,
            tx_power: r.tx_power[1],
            channel_gain: r.channel_gain[1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub profile: UserProfile,
    pub ray_tracing: RayTracingParams,
    pub task: TaskSpec,
    pub quantum: QuantumTaskSpec,
}

/// A complete offloading instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub seed: u64,
    pub device: DeviceConfig,
    pub normalization: ObservationScales,
    pub users: Vec<UserEntry>,
    pub servers: Vec<ServerProfile>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported scenario schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.users.is_empty() || self.servers.is_empty() {
            return Err(Error::InvalidConfig("scenario needs at least one user and one server".into()));
        }
        self.device.cryostat.validate()?;
        self.device.qubit.validate()?;
        if !(self.device.error_threshold > 0.0) {
            return Err(Error::InvalidConfig("error_threshold must be > 0".into()));
        }
        if !(self.device.chip_coefficient >= 0.0) {
            return Err(Error::InvalidConfig("chip_coefficient must be >= 0".into()));
        }
        for s in &self.servers {
            s.validate()?;
        }
        for u in &self.users {
            u.profile.validate(self.servers.len())?;
            if !(u.task.data_size > 0.0 && u.task.cycles_per_byte > 0.0) {
                return Err(Error::InvalidConfig("task data size and cycles must be > 0".into()));
            }
            if u.quantum.logical_qubits == 0 || u.quantum.logical_depth == 0 {
                return Err(Error::InvalidConfig("quantum task needs qubits and depth".into()));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        crate::bench::write_atomic(path, self.to_toml()?.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Generates a scenario with default ranges and device.
pub fn gen_scenario(users: usize, servers: usize, seed: u64) -> Result<Scenario> {
    gen_scenario_with(&GenerationRanges::default(), &DeviceConfig::default(), users, servers, seed)
}

/// Draws one user's task from its own stream; `slot` 0 is the initial task
/// and later slots are per-episode redraws.
pub fn draw_user_task(ranges: &GenerationRanges, seed: u64, user: usize, slot: u64) -> (RayTracingParams, TaskSpec, QuantumTaskSpec) {
    let mut rng = if slot == 0 {
        stream(seed, user as u64, Tag::Task)
    } else {
        stream2(seed, user as u64, slot, Tag::Redraw)
    };
    let (params, task) = gen_task(ranges, &mut rng);
    let quantum = compile_quantum(&params, &task);
    (params, task, quantum)
}

pub fn gen_scenario_with(
    ranges: &GenerationRanges,
    device: &DeviceConfig,
    users: usize,
    servers: usize,
    seed: u64,
) -> Result<Scenario> {
    if users == 0 || servers == 0 {
        return Err(Error::InvalidConfig("need at least one user and one server".into()));
    }
    ranges.validate()?;

    let server_list: Vec<ServerProfile> = (0..servers)
        .map(|e| {
            let e = e as u64;
            let physical_qubits = stream(seed, e, Tag::PhysicalQubits)
                .random_range(ranges.physical_qubits[0]..=ranges.physical_qubits[1]);
            let level = *ranges
                .concatenation_levels
                .choose(&mut stream(seed, e, Tag::Level))
                .expect("validated non-empty");
            ServerProfile {
                noise_power: ranges.noise_power,
                bandwidth: ranges.bandwidth,
                concatenation_level: level,
                physical_qubits,
            }
        })
        .collect();

    let user_list: Vec<UserEntry> = (0..users)
        .map(|u| {
            let id = u as u64;
            let local_cpu = *ranges.local_cpu.choose(&mut stream(seed, id, Tag::LocalCpu)).expect("validated");
            let edge_cpu = *ranges.edge_cpu.choose(&mut stream(seed, id, Tag::EdgeCpu)).expect("validated");
            let tx_power = stream(seed, id, Tag::TxPower).random_range(ranges.tx_power[0]..=ranges.tx_power[1]);
            let channel_gains = (0..servers as u64)
                .map(|e| {
                    stream2(seed, id, e, Tag::ChannelGain)
                        .random_range(ranges.channel_gain[0]..=ranges.channel_gain[1])
                })
                .collect();
            let (ray_tracing, task, quantum) = draw_user_task(ranges, seed, u, 0);
            UserEntry {
                profile: UserProfile {
                    local_cpu,
                    tx_power,
                    weight_latency: ranges.weight_latency,
                    weight_energy: ranges.weight_energy,
                    channel_gains,
                    edge_cpu,
                },
                ray_tracing,
                task,
                quantum,
            }
        })
        .collect();

    let scenario = Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION,
        seed,
        device: device.clone(),
        normalization: ObservationScales::from_ranges(ranges),
        users: user_list,
        servers: server_list,
    };
    scenario.validate()?;
    Ok(scenario)
}
