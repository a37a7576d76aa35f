// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Evaluation, training and sweep runs driven by an [`ExperimentConfig`].

use rayon::prelude::*;

use super::config::{ExperimentConfig, PolicyChoice, SweepParam};
use super::csv::{EvalRow, SweepRow};
use crate::env::{MeqcEnv, TrajectoryLog};
use crate::error::{Error, Result};
use crate::marl::{train_with, TrainOutcome};
use crate::solvers::{classical_oracle, evaluate, evaluate_resolved, BaselinePolicy, EvalStats, Policy};
use crate::workload::{gen_scenario_with, Scenario};

/// The configured scenario file, or a fresh one generated from `seed`.
pub fn build_scenario(cfg: &ExperimentConfig, seed: u64) -> Result<Scenario> {
    match &cfg.scenario {
        Some(path) => Scenario::load(path),
        None => gen_scenario_with(&cfg.ranges, &cfg.device, cfg.users, cfg.servers, seed),
    }
}

/// Overrides one swept quantity everywhere it appears in `scenario`.
pub fn apply_sweep_value(scenario: &mut Scenario, param: SweepParam, value: f64) {
    match param {
        SweepParam::EdgeCpu => scenario.users.iter_mut().for_each(|u| u.profile.edge_cpu = value),
        SweepParam::PhysicalQubits => scenario
            .servers
            .iter_mut()
            .for_each(|s| s.physical_qubits = value as u64),
        SweepParam::DecoherenceTime => scenario.device.qubit.decoherence_time = value,
        SweepParam::Weights => scenario.users.iter_mut().for_each(|u| {
            u.profile.weight_latency = value;
            u.profile.weight_energy = 1.0 - value;
        }),
    }
}

fn evaluate_choice(choice: PolicyChoice, scenario: &Scenario, cfg: &ExperimentConfig, seed: u64) -> Result<EvalStats> {
    let mut env = MeqcEnv::with_ranges(scenario.clone(), cfg.env.clone(), cfg.ranges.clone())?;
    let episodes = cfg.eval.episodes;
    match choice {
        PolicyChoice::ClassicalOracle => evaluate_resolved(&mut env, episodes, classical_oracle),
        PolicyChoice::Marl => {
            let outcome = train_with(scenario, cfg.env.clone(), &cfg.train, seed)?;
            evaluate(&mut outcome.policy(), &mut env, episodes)
        }
        baseline => {
            let kind = baseline.baseline().expect("non-baseline choices handled above");
            evaluate(&mut BaselinePolicy::new(kind, seed), &mut env, episodes)
        }
    }
}

/// Every configured policy on the scenario built from `cfg.seed`.
pub fn run_eval(cfg: &ExperimentConfig) -> Result<Vec<EvalRow>> {
    cfg.validate()?;
    let scenario = build_scenario(cfg, cfg.seed)?;
    cfg.eval
        .policies
        .iter()
        .map(|&p| {
            let s = evaluate_choice(p, &scenario, cfg, cfg.seed)?;
            Ok(EvalRow {
                seed: cfg.seed,
                policy: p.name().into(),
                episodes: s.episodes,
                mean_cost: s.mean_cost,
                std_cost: s.std_cost,
                latency_cost: s.latency_cost,
                energy_cost: s.energy_cost,
                qpu_grant_rate: s.qpu_grant_rate,
                mean_success_prob: s.mean_success_prob,
            })
        })
        .collect()
}

/// All (value × policy × seed) rows, sorted by value, policy name and
/// seed. Runs execute in parallel; the output does not depend on
/// scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("sweep: missing [sweep] section".into()))?;
    let runs = sweep.runs(cfg.seed);
    let per_run: Vec<Result<Vec<SweepRow>>> = runs
        .par_iter()
        .map(|&(value, seed)| {
            let mut scenario = build_scenario(cfg, seed)?;
            apply_sweep_value(&mut scenario, sweep.param, value);
            scenario.validate()?;
            cfg.eval
                .policies
                .iter()
                .map(|&p| {
                    let s = evaluate_choice(p, &scenario, cfg, seed)?;
                    Ok(SweepRow {
                        seed,
                        policy: p.name().into(),
                        param: sweep.param.name().into(),
                        value,
                        mean_cost: s.mean_cost,
                        latency_cost: s.latency_cost,
                        energy_cost: s.energy_cost,
                        qpu_grant_rate: s.qpu_grant_rate,
                        mean_success_prob: s.mean_success_prob,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_run {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.policy.cmp(&b.policy))
            .then_with(|| a.seed.cmp(&b.seed))
    });
    Ok(rows)
}

/// Result of the `train` verb.
#[derive(Debug)]
pub struct TrainRun {
    pub outcome: TrainOutcome,
    /// Greedy rollout of the trained agents over `eval.episodes` steps.
    pub trajectory: TrajectoryLog,
    pub stats: EvalStats,
}

pub fn run_train(cfg: &ExperimentConfig) -> Result<TrainRun> {
    cfg.validate()?;
    let scenario = build_scenario(cfg, cfg.seed)?;
    let outcome = train_with(&scenario, cfg.env.clone(), &cfg.train, cfg.seed)?;
    let mut env = MeqcEnv::with_ranges(scenario, cfg.env.clone(), cfg.ranges.clone())?;
    let mut policy = outcome.policy();
    let mut trajectory = TrajectoryLog::default();
    let mut obs = env.reset()?;
    for step in 0..cfg.eval.episodes {
        let actions = policy.act(&env, &obs)?;
        let result = env.step(&actions)?;
        trajectory.record(step, &obs, &result);
        obs = result.observations;
    }
    let stats = evaluate(&mut policy, &mut env, cfg.eval.episodes)?;
    Ok(TrainRun {
        outcome,
        trajectory,
        stats,
    })
}
