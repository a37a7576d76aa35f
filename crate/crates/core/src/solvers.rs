// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Non-learning offloading policies and the exhaustive oracle.
//!
//! For a fixed server choice and QPU indicator each user's cost is affine in
//! its local ratio φ, so the minimum over φ ∈ [0, 1] sits at an endpoint.
//! The greedy solver and the oracle only consider φ ∈ {0, 1}.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::env::{resolve_quantum_allocation, Arbitration, JointAction, MeqcEnv, Observation, UserAction};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng, Tag};
use crate::workload::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Everything runs locally (φ = 1).
    Local,
    /// Uniform server and uniform φ.
    Random,
    /// Uniform server, everything offloaded (φ = 0).
    RandomCloud,
    /// Sequential per-user cost minimization, heaviest workload first.
    Greedy,
    /// Exhaustive search over servers, QPU grants and φ ∈ {0, 1}.
    Oracle,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Local,
        PolicyKind::Random,
        PolicyKind::RandomCloud,
        PolicyKind::Greedy,
        PolicyKind::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Local => "local",
            PolicyKind::Random => "random",
            PolicyKind::RandomCloud => "random_cloud",
            PolicyKind::Greedy => "greedy",
            PolicyKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown policy '{s}'")))
    }
}

fn resolved(model: &CostModel, actions: Vec<UserAction>) -> Result<JointAction> {
    let indicators = resolve_quantum_allocation(model, &actions, Arbitration::LargestSaving)?;
    Ok(JointAction::new(&actions, indicators))
}

/// Raw actions of the three naive baselines.
fn naive_actions<R: Rng + ?Sized>(kind: PolicyKind, users: usize, servers: usize, rng: &mut R) -> Vec<UserAction> {
    (0..users)
        .map(|_| match kind {
            PolicyKind::Local => UserAction { server: 0, local_ratio: 1.0 },
            PolicyKind::Random => UserAction {
                server: rng.random_range(0..servers),
                local_ratio: rng.random::<f64>(),
            },
            PolicyKind::RandomCloud => UserAction {
                server: rng.random_range(0..servers),
                local_ratio: 0.0,
            },
            PolicyKind::Greedy | PolicyKind::Oracle => unreachable!("not a naive baseline"),
        })
        .collect()
}

pub fn solve_baseline<R: Rng + ?Sized>(kind: PolicyKind, scenario: &Scenario, rng: &mut R) -> Result<JointAction> {
    let model = CostModel::new(scenario)?;
    solve_on(kind, &model, rng)
}

fn solve_on<R: Rng + ?Sized>(kind: PolicyKind, model: &CostModel, rng: &mut R) -> Result<JointAction> {
    match kind {
        PolicyKind::Greedy => greedy(model),
        PolicyKind::Oracle => exhaustive(model, &ExhaustiveOptions::default()).map(|(a, _)| a),
        naive => resolved(model, naive_actions(naive, model.users(), model.servers(), rng)),
    }
}

pub fn solve_greedy(scenario: &Scenario) -> Result<JointAction> {
    greedy(&CostModel::new(scenario)?)
}

fn greedy(model: &CostModel) -> Result<JointAction> {
    let scenario = model.scenario();
    let users = model.users();
    let mut order: Vec<usize> = (0..users).collect();
    // heaviest workload first; the sort is stable so ties keep index order
    order.sort_by(|&a, &b| {
        scenario.users[b]
            .task
            .cycles()
            .total_cmp(&scenario.users[a].task.cycles())
    });

    let mut slot_taken = vec![false; model.servers()];
    let mut actions = vec![UserAction { server: 0, local_ratio: 1.0 }; users];
    let mut indicators = vec![false; users];
    for u in order {
        let mut best = (model.user_cost(u, 0, 1.0, false)?.cost, 0, 1.0, false);
        for e in 0..model.servers() {
            let classical = model.user_cost(u, e, 0.0, false)?.cost;
            if classical < best.0 {
                best = (classical, e, 0.0, false);
            }
            if !slot_taken[e] && model.eligible(u, e) {
                let quantum = model.user_cost(u, e, 0.0, true)?.cost;
                if quantum < classical && quantum < best.0 {
                    best = (quantum, e, 0.0, true);
                }
            }
        }
        let (_, server, local_ratio, quantum) = best;
        actions[u] = UserAction { server, local_ratio };
        indicators[u] = quantum;
        if quantum {
            slot_taken[server] = true;
        }
    }
    Ok(JointAction::new(&actions, indicators))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveOptions {
    /// Upper bound on `E^U · 2^U`.
    pub budget: u64,
    /// When false the QPU is never granted (all-classical oracle).
    pub allow_quantum: bool,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        Self {
            budget: 10_000_000,
            allow_quantum: true,
        }
    }
}

/// Global minimum of the system cost together with a minimizing action.
pub fn solve_exhaustive(scenario: &Scenario) -> Result<(JointAction, f64)> {
    solve_exhaustive_with(scenario, &ExhaustiveOptions::default())
}

pub fn solve_exhaustive_with(scenario: &Scenario, options: &ExhaustiveOptions) -> Result<(JointAction, f64)> {
    exhaustive(&CostModel::new(scenario)?, options)
}

/// Advances `digits` (each in `0..radix[i]`) like an odometer; false once
/// every combination has been visited.
fn next_combination(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

pub(crate) fn exhaustive(model: &CostModel, options: &ExhaustiveOptions) -> Result<(JointAction, f64)> {
    let users = model.users();
    let servers = model.servers();
    let combinations = (servers as f64).powi(users as i32) * 2f64.powi(users as i32);
    if combinations > options.budget as f64 {
        return Err(Error::InstanceTooLarge {
            combinations,
            budget: options.budget,
        });
    }

    // per-user cost tables at the φ endpoints
    let local_only: Vec<f64> = (0..users)
        .map(|u| model.user_cost(u, 0, 1.0, false).map(|c| c.cost))
        .collect::<Result<_>>()?;
    let mut classical = vec![vec![0.0; servers]; users];
    let mut quantum = vec![vec![None; servers]; users];
    for u in 0..users {
        for e in 0..servers {
            classical[u][e] = model.user_cost(u, e, 0.0, false)?.cost;
            if options.allow_quantum && model.eligible(u, e) {
                quantum[u][e] = Some(model.user_cost(u, e, 0.0, true)?.cost);
            }
        }
    }

    let mut best: Option<(f64, Vec<usize>, Vec<f64>, Vec<bool>)> = None;
    let mut assignment = vec![0usize; users];
    loop {
        // grant candidates per server under this assignment
        let candidates: Vec<Vec<usize>> = (0..servers)
            .map(|e| {
                (0..users)
                    .filter(|&u| assignment[u] == e && quantum[u][e].is_some())
                    .collect()
            })
            .collect();
        // choice[e] = 0 means no grant, i > 0 grants candidates[e][i - 1]
        let mut choice = vec![0usize; servers];
        loop {
            let mut granted = vec![false; users];
            for e in 0..servers {
                if choice[e] > 0 {
                    granted[candidates[e][choice[e] - 1]] = true;
                }
            }
            let mut total = 0.0;
            let mut ratios = vec![1.0; users];
            let mut indicators = vec![false; users];
            for u in 0..users {
                let offload = if granted[u] {
                    quantum[u][assignment[u]].expect("granted users are eligible")
                } else {
                    classical[u][assignment[u]]
                };
                if offload < local_only[u] {
                    total += offload;
                    ratios[u] = 0.0;
                    indicators[u] = granted[u];
                } else {
                    total += local_only[u];
                }
            }
            if best.as_ref().is_none_or(|b| total < b.0) {
                best = Some((total, assignment.clone(), ratios, indicators));
            }
            if !next_combination(&mut choice, |e| candidates[e].len() + 1) {
                break;
            }
        }
        if !next_combination(&mut assignment, |_| servers) {
            break;
        }
    }

    let (_, servers_chosen, local_ratios, indicators) = best.expect("at least one assignment");
    let action = JointAction {
        servers: servers_chosen,
        local_ratios,
        indicators,
    };
    let (cost, _) = model.total_cost(&action)?;
    Ok((action, cost))
}

/// Anything that maps the current observations to raw actions.
pub trait Policy {
    fn act(&mut self, env: &MeqcEnv, observations: &[Observation]) -> Result<Vec<UserAction>>;
}

/// A [`PolicyKind`] with its own random stream.
pub struct BaselinePolicy {
    kind: PolicyKind,
    rng: StreamRng,
}

impl BaselinePolicy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Self {
            kind,
            rng: stream(seed, kind as u64, Tag::Policy),
        }
    }

    pub fn with_rng(kind: PolicyKind, rng: StreamRng) -> Self {
        Self { kind, rng }
    }
}

impl Policy for BaselinePolicy {
    fn act(&mut self, env: &MeqcEnv, _observations: &[Observation]) -> Result<Vec<UserAction>> {
        Ok(solve_on(self.kind, env.model(), &mut self.rng)?.raw())
    }
}

/// Sample statistics of a policy over several episodes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalStats {
    pub episodes: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    /// Mean of Σ λ_D·latency over users.
    pub latency_cost: f64,
    /// Mean of Σ λ_E·energy over users.
    pub energy_cost: f64,
    /// Fraction of users granted a QPU.
    pub qpu_grant_rate: f64,
    /// Mean success probability at each user's chosen server.
    pub mean_success_prob: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Default)]
struct StatsAccumulator {
    costs: Vec<f64>,
    latency: f64,
    energy: f64,
    grants: f64,
    success: f64,
}

impl StatsAccumulator {
    fn add(&mut self, scenario: &Scenario, cost: f64, costs: &[crate::cost::CostBreakdown], action: &JointAction, success: &[f64]) {
        let users = scenario.users.len() as f64;
        self.costs.push(cost);
        for (b, u) in costs.iter().zip(&scenario.users) {
            self.latency += u.profile.weight_latency * b.latency();
            self.energy += u.profile.weight_energy * b.energy();
        }
        self.grants += action.indicators.iter().filter(|&&q| q).count() as f64 / users;
        self.success += success.iter().sum::<f64>() / users;
    }

    fn finish(self) -> EvalStats {
        let (mean_cost, std_cost) = mean_std(&self.costs);
        let n = self.costs.len() as f64;
        EvalStats {
            episodes: self.costs.len(),
            mean_cost,
            std_cost,
            latency_cost: self.latency / n,
            energy_cost: self.energy / n,
            qpu_grant_rate: self.grants / n,
            mean_success_prob: self.success / n,
        }
    }
}

/// Runs `policy` for `episodes` single-step episodes.
pub fn evaluate(policy: &mut dyn Policy, env: &mut MeqcEnv, episodes: usize) -> Result<EvalStats> {
    if episodes == 0 {
        return Err(Error::Contract("evaluate needs at least one episode".into()));
    }
    let mut acc = StatsAccumulator::default();
    for _ in 0..episodes {
        let obs = env.reset()?;
        let actions = policy.act(env, &obs)?;
        let scenario = env.scenario().clone();
        let result = env.step(&actions)?;
        acc.add(&scenario, result.cost, &result.costs, &result.action, &result.success);
    }
    Ok(acc.finish())
}

/// Like [`evaluate`], but `solve` returns fully resolved joint actions
/// that are costed as given, bypassing the environment's QPU arbitration.
pub fn evaluate_resolved(
    env: &mut MeqcEnv,
    episodes: usize,
    mut solve: impl FnMut(&CostModel) -> Result<JointAction>,
) -> Result<EvalStats> {
    if episodes == 0 {
        return Err(Error::Contract("evaluate needs at least one episode".into()));
    }
    let mut acc = StatsAccumulator::default();
    for _ in 0..episodes {
        env.reset()?;
        let model = env.model();
        let action = solve(model)?;
        let (cost, costs) = model.total_cost(&action)?;
        let success: Vec<f64> = action
            .servers
            .iter()
            .enumerate()
            .map(|(u, &e)| model.success_probability(u, e))
            .collect();
        acc.add(model.scenario(), cost, &costs, &action, &success);
    }
    Ok(acc.finish())
}

/// Exhaustive search with the QPUs disabled, as a resolver for
/// [`evaluate_resolved`].
pub fn classical_oracle(model: &CostModel) -> Result<JointAction> {
    exhaustive(
        model,
        &ExhaustiveOptions {
            allow_quantum: false,
            ..ExhaustiveOptions::default()
        },
    )
    .map(|(a, _)| a)
}
