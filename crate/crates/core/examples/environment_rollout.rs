//! Steps the environment with random actions and writes the trajectory CSV.

use meqc::env::{EnvConfig, MeqcEnv, TrajectoryLog, UserAction};
use meqc::rng::{stream, Tag};
use meqc::workload::gen_scenario;
use rand::Rng;

fn main() -> meqc::Result<()> {
    let scenario = gen_scenario(3, 2, 5)?;
    let mut env = MeqcEnv::new(
        scenario,
        EnvConfig {
            redraw_tasks: true,
            ..EnvConfig::default()
        },
    )?;
    let mut rng = stream(5, 0, Tag::Policy);
    let mut log = TrajectoryLog::default();
    let mut obs = env.reset()?;
    println!("observation length {}", obs[0].0.len());
    for step in 0..5 {
        let actions: Vec<UserAction> = (0..env.users())
            .map(|_| UserAction {
                server: rng.random_range(0..env.servers()),
                local_ratio: rng.random(),
            })
            .collect();
        let result = env.step(&actions)?;
        println!(
            "step {step}: cost {:.4e}, QPU grants {:?}",
            result.cost, result.action.indicators
        );
        log.record(step, &obs, &result);
        obs = result.observations;
    }
    let mut out = Vec::new();
    log.write_csv(&mut out)?;
    std::fs::write("trajectory.csv", &out).expect("write trajectory.csv");
    println!("wrote trajectory.csv ({} rows)", log.len());
    Ok(())
}
