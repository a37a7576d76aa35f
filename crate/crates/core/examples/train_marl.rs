//! Trains one PPO agent per user on a small scenario and compares the
//! greedy execution of the learned policy against the baselines and the
//! exhaustive oracle.
//!
//! cargo run --release --example train_marl -- [seed] [epochs]

use std::time::Instant;

use meqc::env::{EnvConfig, MeqcEnv};
use meqc::marl::{train, TrainConfig};
use meqc::solvers::{evaluate, solve_exhaustive, BaselinePolicy, PolicyKind};
use meqc::workload::gen_scenario;

fn main() -> meqc::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let epochs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let scenario = gen_scenario(3, 3, seed)?;
    let (_, oracle) = solve_exhaustive(&scenario)?;
    let mut env = MeqcEnv::new(scenario.clone(), EnvConfig::default())?;
    let local = evaluate(&mut BaselinePolicy::new(PolicyKind::Local, seed), &mut env, 1)?.mean_cost;
    let random = evaluate(&mut BaselinePolicy::new(PolicyKind::Random, seed), &mut env, 100)?.mean_cost;

    let cfg = TrainConfig {
        epochs,
        steps_per_epoch: 500,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let outcome = train(&scenario, &cfg, seed)?;
    let learned = evaluate(&mut outcome.policy(), &mut env, 1)?.mean_cost;

    for row in outcome.curve.iter().step_by((epochs / 10).max(1)) {
        println!(
            "epoch {:>4}  cost {:.4e}  entropy {:.3}",
            row.epoch, row.mean_cost, row.entropy
        );
    }
    println!("trained in {:.1?}", start.elapsed());
    println!("oracle  {oracle:.6e}");
    println!("local   {local:.6e}");
    println!("random  {random:.6e}");
    println!("learned {learned:.6e}  ({:+.2}% vs oracle)", 100.0 * (learned / oracle - 1.0));
    Ok(())
}
