// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum device physics: cryostat staging, thermal-photon error rate,
//! per-gate and per-qubit power, concatenated-code resource scaling and the
//! linearized circuit success probability.
//!
//! Everything here is a pure function of plain configuration values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Concatenation levels the resource model supports.
pub const SUPPORTED_LEVELS: [u32; 3] = [1, 2, 3];

/// Dilution-refrigerator layout and heat loads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CryostatConfig {
    /// Total attenuation of the drive line, dB.
    pub attenuation_db: f64,
    /// Number of cooling stages K (so K − 1 attenuators).
    pub stages: usize,
    /// Qubit (coldest stage) temperature, K.
    pub t_qubit: f64,
    /// Signal generation temperature, K.
    pub t_gen: f64,
    /// Heat from signal generation and readout at `t_gen`, W.
    pub heat_gen: f64,
    /// Heat from HEMT amplifiers at `t_hemt`, W.
    pub heat_hemt: f64,
    pub t_hemt: f64,
    /// Heat from parametric amplifiers at `t_para`, W.
    pub heat_para: f64,
    pub t_para: f64,
}

impl Default for CryostatConfig {
    fn default() -> Self {
        Self {
            attenuation_db: 40.0,
            stages: 5,
            t_qubit: 0.1,
            t_gen: 300.0,
            heat_gen: 10e-6,
            heat_hemt: 50e-6,
            t_hemt: 70.0,
            heat_para: 10e-9,
            t_para: 4.0,
        }
    }
}

impl CryostatConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stages < 2 {
            return Err(Error::InvalidConfig(format!(
                "cryostat needs at least 2 stages, got {}",
                self.stages
            )));
        }
        if !(self.t_qubit > 0.0 && self.t_qubit < self.t_gen && self.t_gen.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "require 0 < t_qubit < t_gen, got t_qubit={} t_gen={}",
                self.t_qubit, self.t_gen
            )));
        }
        if !(self.t_hemt > 0.0 && self.t_para > 0.0) {
            return Err(Error::InvalidConfig(
                "amplifier temperatures must be positive".into(),
            ));
        }
        for (name, heat) in [
            ("heat_gen", self.heat_gen),
            ("heat_hemt", self.heat_hemt),
            ("heat_para", self.heat_para),
        ] {
            if !(heat >= 0.0 && heat.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be >= 0, got {heat}")));
            }
        }
        if !(self.attenuation_db >= 0.0 && self.attenuation_db.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "attenuation_db must be >= 0, got {}",
                self.attenuation_db
            )));
        }
        Ok(())
    }

    /// Total attenuation as a linear power ratio.
    pub fn total_attenuation(&self) -> f64 {
        10f64.powf(self.attenuation_db / 10.0)
    }
}

/// Qubit technology timings and coherence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitTech {
    /// Qubit transition frequency, Hz (ordinary, not angular).
    pub frequency: f64,
    /// Decoherence time 1/γ, s.
    pub decoherence_time: f64,
    pub tau_1qb: f64,
    pub tau_2qb: f64,
    pub tau_meas: f64,
    /// Duration of one error-correction time step, s.
    pub tau_step: f64,
}

impl Default for QubitTech {
    fn default() -> Self {
        Self {
            frequency: 6e9,
            decoherence_time: 1e-3,
            tau_1qb: 25e-9,
            tau_2qb: 100e-9,
            tau_meas: 100e-9,
            tau_step: 100e-9,
        }
    }
}

impl QubitTech {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("frequency", self.frequency),
            ("decoherence_time", self.decoherence_time),
            ("tau_1qb", self.tau_1qb),
            ("tau_2qb", self.tau_2qb),
            ("tau_meas", self.tau_meas),
            ("tau_step", self.tau_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Spontaneous emission rate γ = 1 / decoherence time.
    pub fn decay_rate(&self) -> f64 {
        1.0 / self.decoherence_time
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.frequency
    }
}

/// Temperatures and attenuation seen at each cooling stage.
///
/// Stage 0 is the qubit stage. `cumulative[i]` is the attenuation between
/// stage `i` and the qubits, `A^(i/(K-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageProfile {
    pub temperatures: Vec<f64>,
    /// One entry per attenuator (K − 1 entries), all equal.
    pub attenuators: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl StageProfile {
    pub fn stages(&self) -> usize {
        self.temperatures.len()
    }
}

/// Equal attenuation per stage, temperatures spaced geometrically between
/// the qubit and generation temperatures.
pub fn cryostat_stages(cfg: &CryostatConfig) -> Result<StageProfile> {
    cfg.validate()?;
    let k = cfg.stages;
    let span = (k - 1) as f64;
    let total = cfg.total_attenuation();
    let ratio = cfg.t_gen / cfg.t_qubit;

    let mut temperatures: Vec<f64> = (0..k)
        .map(|i| cfg.t_qubit * ratio.powf(i as f64 / span))
        .collect();
    let mut cumulative: Vec<f64> = (0..k)
        .map(|i| 10f64.powf(cfg.attenuation_db / 10.0 * i as f64 / span))
        .collect();
    // pin the endpoints so they are exact rather than pow round-offs
    temperatures[0] = cfg.t_qubit;
    temperatures[k - 1] = cfg.t_gen;
    cumulative[0] = 1.0;
    cumulative[k - 1] = total;

    let per_stage = 10f64.powf(cfg.attenuation_db / 10.0 / span);
    Ok(StageProfile {
        temperatures,
        attenuators: vec![per_stage; k - 1],
        cumulative,
    })
}

/// Mean thermal photon number at frequency `frequency` (Hz) and temperature
/// `temperature` (K), using ω = 2πf.
pub fn bose_einstein(temperature: f64, frequency: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be > 0 K, got {temperature}"
        )));
    }
    if !(frequency > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be > 0 Hz, got {frequency}"
        )));
    }
    let x = HBAR * 2.0 * PI * frequency / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Error probability of one physical qubit per time step, driven by thermal
/// photons leaking down the attenuated drive line.
pub fn physical_error_rate(cfg: &CryostatConfig, tech: &QubitTech) -> Result<f64> {
    tech.validate()?;
    let stages = cryostat_stages(cfg)?;
    physical_error_rate_with(&stages, tech)
}

pub(crate) fn physical_error_rate_with(stages: &StageProfile, tech: &QubitTech) -> Result<f64> {
    let occupation = stages
        .temperatures
        .iter()
        .map(|&t| bose_einstein(t, tech.frequency))
        .collect::<Result<Vec<_>>>()?;
    let leak: f64 = (1..stages.stages())
        .map(|i| (occupation[i] - occupation[i - 1]) / stages.cumulative[i])
        .sum();
    let eps = tech.decay_rate() * tech.tau_step / 2.0 * (0.5 + occupation[0] + leak);
    Ok(eps.clamp(0.0, 1.0))
}

/// Physical resources per logical qubit for a concatenated code at level `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalResources {
    pub level: u32,
    /// Physical qubits per logical qubit, 91^k.
    pub physical_per_logical: u64,
    /// Average parallel physical 1qb gates per time step.
    pub n_1qb: f64,
    pub n_2qb: f64,
    pub n_meas: f64,
}

pub fn logical_resources(level: u32) -> Result<LogicalResources> {
    if !SUPPORTED_LEVELS.contains(&level) {
        return Err(Error::UnsupportedLevel(level));
    }
    let scale = 64u64.pow(level) as f64;
    Ok(LogicalResources {
        level,
        physical_per_logical: 91u64.pow(level),
        n_1qb: 28.0 * scale / 185.0,
        n_2qb: 64.0 * scale / 185.0,
        n_meas: 28.0 * scale / 185.0,
    })
}

/// Powers (W) and per-step energies (J) of the physical operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatePowerProfile {
    pub p_pi: f64,
    pub p_1qb: f64,
    pub p_2qb: f64,
    pub p_meas: f64,
    pub p_qubit: f64,
    pub e_1qb: f64,
    pub e_2qb: f64,
    pub e_meas: f64,
    pub e_qubit: f64,
}

pub fn gate_power_profile(
    cfg: &CryostatConfig,
    tech: &QubitTech,
    stages: &StageProfile,
) -> Result<GatePowerProfile> {
    cfg.validate()?;
    tech.validate()?;
    let p_pi = HBAR * tech.angular_frequency() * PI * PI
        / (4.0 * tech.decay_rate() * tech.tau_1qb * tech.tau_1qb);

    // Carnot cost of dissipating the drive power at each stage; the qubit
    // stage takes the unattenuated fraction (Ã_0 = 0).
    let mut previous = 0.0;
    let mut carnot_sum = 0.0;
    for (&t, &a) in stages.temperatures.iter().zip(&stages.cumulative) {
        carnot_sum += (cfg.t_gen - t) / t * (a - previous);
        previous = a;
    }
    let p_2qb = p_pi * carnot_sum;
    let p_1qb = tech.tau_1qb / tech.tau_step * p_2qb;
    let p_meas = tech.tau_meas / tech.tau_step * p_2qb;

    let t_ext = cfg.t_gen;
    let p_qubit = t_ext / cfg.t_gen * cfg.heat_gen
        + t_ext / cfg.t_hemt * cfg.heat_hemt
        + t_ext / cfg.t_para * cfg.heat_para;

    let step = tech.tau_step;
    Ok(GatePowerProfile {
        p_pi,
        p_1qb,
        p_2qb,
        p_meas,
        p_qubit,
        e_1qb: p_1qb * step,
        e_2qb: p_2qb * step,
        e_meas: p_meas * step,
        e_qubit: p_qubit * step,
    })
}

/// Linearized probability that a logical circuit with `logical_qubits ×
/// logical_depth` error locations completes without a logical error.
pub fn success_probability(
    logical_qubits: u64,
    logical_depth: u64,
    level: u32,
    error_rate: f64,
    threshold: f64,
) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!(
            "error-correction threshold must be > 0, got {threshold}"
        )));
    }
    if !(0.0..=1.0).contains(&error_rate) {
        return Err(Error::Domain(format!(
            "physical error rate must lie in [0, 1], got {error_rate}"
        )));
    }
    let locations = logical_qubits as f64 * logical_depth as f64;
    let suppression = (error_rate / threshold).powi(1 << level);
    Ok((1.0 - locations * threshold * suppression).clamp(0.0, 1.0))
}

/// Everything the cost model needs from the quantum hardware, derived once
/// from the device configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    pub cryostat: CryostatConfig,
    pub tech: QubitTech,
    pub stages: StageProfile,
    pub error_rate: f64,
    pub powers: GatePowerProfile,
}

impl DeviceModel {
    pub fn new(cryostat: &CryostatConfig, tech: &QubitTech) -> Result<Self> {
        tech.validate()?;
        let stages = cryostat_stages(cryostat)?;
        let error_rate = physical_error_rate_with(&stages, tech)?;
        let powers = gate_power_profile(cryostat, tech, &stages)?;
        Ok(Self {
            cryostat: cryostat.clone(),
            tech: tech.clone(),
            stages,
            error_rate,
            powers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn defaults() -> (CryostatConfig, QubitTech) {
        (CryostatConfig::default(), QubitTech::default())
    }

    #[test]
    fn stage_temperatures_are_geometric() {
        let stages = cryostat_stages(&CryostatConfig::default()).unwrap();
        let expected = [0.1, 0.740_082_804_4, 5.477_225_575, 40.536_004_64, 300.0];
        for (t, e) in stages.temperatures.iter().zip(expected) {
            assert_relative_eq!(*t, e, max_relative = 1e-9);
        }
        for w in stages.temperatures.windows(2) {
            assert_relative_eq!(w[1] / w[0], 3000f64.powf(0.25), max_relative = 1e-12);
        }
    }

    #[test]
    fn cumulative_attenuation_at_40db() {
        let stages = cryostat_stages(&CryostatConfig::default()).unwrap();
        assert_eq!(stages.attenuators.len(), 4);
        for a in &stages.attenuators {
            assert_relative_eq!(*a, 10.0, max_relative = 1e-12);
        }
        let expected = [1.0, 10.0, 100.0, 1000.0, 10000.0];
        for (a, e) in stages.cumulative.iter().zip(expected) {
            assert_relative_eq!(*a, e, max_relative = 1e-12);
        }
        assert_eq!(*stages.cumulative.last().unwrap(), 10f64.powf(4.0));
    }

    #[test]
    fn zero_db_two_stages_is_identity() {
        let cfg = CryostatConfig {
            attenuation_db: 0.0,
            stages: 2,
            ..CryostatConfig::default()
        };
        let stages = cryostat_stages(&cfg).unwrap();
        assert_eq!(stages.attenuators, vec![1.0]);
        assert_eq!(stages.temperatures, vec![0.1, 300.0]);
    }

    #[test]
    fn single_stage_is_rejected() {
        let cfg = CryostatConfig {
            stages: 1,
            ..CryostatConfig::default()
        };
        assert!(matches!(cryostat_stages(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn bose_einstein_reference_values() {
        // 40-digit reference evaluations of 1/(exp(ħ·2πf/k_B·T) − 1)
        assert_relative_eq!(
            bose_einstein(0.1, 6e9).unwrap(),
            0.059_501_905_291_477_134_6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bose_einstein(300.0, 6e9).unwrap(),
            1041.331_036_792_111_7,
            max_relative = 1e-12
        );
        assert!(bose_einstein(1e-6, 6e9).unwrap() < 1e-300);
        assert!(matches!(bose_einstein(0.0, 6e9), Err(Error::Domain(_))));
        assert!(matches!(bose_einstein(-1.0, 6e9), Err(Error::Domain(_))));
    }

    #[test]
    fn error_rate_at_defaults() {
        let (cfg, tech) = defaults();
        let eps = physical_error_rate(&cfg, &tech).unwrap();
        assert_relative_eq!(eps, 5.699_416_081_095_74e-5, max_relative = 1e-10);
    }

    #[test]
    fn error_rate_floor_at_infinite_attenuation() {
        let (mut cfg, tech) = defaults();
        cfg.attenuation_db = 400.0;
        let eps = physical_error_rate(&cfg, &tech).unwrap();
        let floor = tech.decay_rate() * tech.tau_step / 2.0
            * (0.5 + bose_einstein(0.1, 6e9).unwrap());
        // 400 dB leaves a residual of a few parts in 1e10
        assert_relative_eq!(eps, floor, max_relative = 1e-9);
        assert_relative_eq!(floor, 2.797_509_526_457_386e-5, max_relative = 1e-12);
    }

    #[test]
    fn error_rate_doubles_when_coherence_halves() {
        let (cfg, mut tech) = defaults();
        let base = physical_error_rate(&cfg, &tech).unwrap();
        tech.decoherence_time /= 2.0;
        let halved = physical_error_rate(&cfg, &tech).unwrap();
        assert_relative_eq!(halved, 2.0 * base, max_relative = 1e-12);
    }

    #[test]
    fn logical_resources_table() {
        let r1 = logical_resources(1).unwrap();
        assert_eq!(r1.physical_per_logical, 91);
        assert_relative_eq!(r1.n_1qb, 9.686_486_486_486_486, max_relative = 1e-14);
        assert_relative_eq!(r1.n_2qb, 22.140_540_540_540_54, max_relative = 1e-14);
        assert_eq!(r1.n_1qb, r1.n_meas);
        let r2 = logical_resources(2).unwrap();
        assert_eq!(r2.physical_per_logical, 8281);
        assert_relative_eq!(r2.n_1qb, 619.935_135_135_135_1, max_relative = 1e-14);
        assert_eq!(logical_resources(3).unwrap().physical_per_logical, 753_571);
        assert!(matches!(logical_resources(0), Err(Error::UnsupportedLevel(0))));
        assert!(matches!(logical_resources(4), Err(Error::UnsupportedLevel(4))));
    }

    #[test]
    fn gate_powers_at_defaults() {
        let (cfg, tech) = defaults();
        let stages = cryostat_stages(&cfg).unwrap();
        let p = gate_power_profile(&cfg, &tech, &stages).unwrap();
        assert_relative_eq!(p.p_pi, 1.569_520_585_783_128e-11, max_relative = 1e-10);
        assert_relative_eq!(p.p_2qb, 2.705_616_284_470_237e-7, max_relative = 1e-10);
        assert_relative_eq!(p.p_1qb, 0.25 * p.p_2qb, max_relative = 1e-14);
        assert_eq!(p.p_meas, p.p_2qb);
        assert_relative_eq!(p.p_qubit, 2.250_357_142_857_143e-4, max_relative = 1e-12);
        assert_relative_eq!(p.e_qubit, p.p_qubit * 100e-9, max_relative = 1e-15);
    }

    #[test]
    fn one_qubit_power_equals_two_qubit_when_times_match() {
        let (cfg, mut tech) = defaults();
        tech.tau_1qb = tech.tau_step;
        let stages = cryostat_stages(&cfg).unwrap();
        let p = gate_power_profile(&cfg, &tech, &stages).unwrap();
        assert_eq!(p.p_1qb, p.p_2qb);
    }

    #[test]
    fn p_pi_linear_in_coherence_and_inverse_square_in_gate_time() {
        let (cfg, tech) = defaults();
        let stages = cryostat_stages(&cfg).unwrap();
        let base = gate_power_profile(&cfg, &tech, &stages).unwrap().p_pi;
        let longer = QubitTech {
            decoherence_time: 3.0 * tech.decoherence_time,
            ..tech.clone()
        };
        let slower = QubitTech {
            tau_1qb: 2.0 * tech.tau_1qb,
            ..tech.clone()
        };
        let p_long = gate_power_profile(&cfg, &longer, &stages).unwrap().p_pi;
        let p_slow = gate_power_profile(&cfg, &slower, &stages).unwrap().p_pi;
        assert_relative_eq!(p_long, 3.0 * base, max_relative = 1e-12);
        assert_relative_eq!(p_slow, base / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn success_probability_examples() {
        let eps = 5.7e-5;
        let m2 = success_probability(20, 813, 2, eps, 2e-4).unwrap();
        let m1 = success_probability(20, 813, 1, eps, 2e-4).unwrap();
        // 1 − 16260·2e-4·(0.285)^(2^k)
        assert_relative_eq!(m2, 1.0 - 16260.0 * 2e-4 * 0.285f64.powi(4), max_relative = 1e-14);
        assert_relative_eq!(m1, 1.0 - 16260.0 * 2e-4 * 0.285f64.powi(2), max_relative = 1e-14);
        assert!((m2 - 0.97855).abs() < 5e-5);
        assert!((m1 - 0.73586).abs() < 5e-5);
        assert_eq!(success_probability(20, 813, 1, 0.0, 2e-4).unwrap(), 1.0);
        assert_eq!(success_probability(26, 6460, 1, 1e-3, 2e-4).unwrap(), 0.0);
        assert!(matches!(
            success_probability(20, 813, 1, eps, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn device_model_bundles_defaults() {
        let (cfg, tech) = defaults();
        let dev = DeviceModel::new(&cfg, &tech).unwrap();
        assert_eq!(dev.stages.stages(), 5);
        assert!(dev.error_rate < 2e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn error_rate_decreases_with_attenuation(db in 1.0f64..80.0, step in 0.5f64..10.0) {
                let tech = QubitTech::default();
                let lo = CryostatConfig { attenuation_db: db, ..CryostatConfig::default() };
                let hi = CryostatConfig { attenuation_db: db + step, ..CryostatConfig::default() };
                prop_assert!(physical_error_rate(&hi, &tech).unwrap() < physical_error_rate(&lo, &tech).unwrap());
            }

            #[test]
            fn success_improves_with_level_below_threshold(
                q in 1u64..40, d in 1u64..10_000, eps in 1e-7f64..1.99e-4, k in 1u32..3
            ) {
                let lo = success_probability(q, d, k, eps, 2e-4).unwrap();
                let hi = success_probability(q, d, k + 1, eps, 2e-4).unwrap();
                prop_assert!((0.0..=1.0).contains(&lo));
                prop_assert!(hi >= lo);
            }

            #[test]
            fn powers_are_nonnegative(db in 0.0f64..60.0, stages in 2usize..8, coherence in 1e-5f64..1e-1) {
                let cfg = CryostatConfig { attenuation_db: db, stages, ..CryostatConfig::default() };
                let tech = QubitTech { decoherence_time: coherence, ..QubitTech::default() };
                let dev = DeviceModel::new(&cfg, &tech).unwrap();
                let p = dev.powers;
                for v in [p.p_pi, p.p_1qb, p.p_2qb, p.p_meas, p.p_qubit, p.e_1qb, p.e_2qb, p.e_meas, p.e_qubit] {
                    prop_assert!(v >= 0.0 && v.is_finite());
                }
                prop_assert!((0.0..=1.0).contains(&dev.error_rate));
            }
        }
    }
}
