//! Every baseline against the exhaustive oracle on a batch of small
//! instances.

use meqc::cost::total_cost;
use meqc::rng::{stream, Tag};
use meqc::solvers::{solve_baseline, solve_exhaustive, solve_exhaustive_with, ExhaustiveOptions, PolicyKind};
use meqc::workload::gen_scenario;

fn main() -> meqc::Result<()> {
    let instances = 20;
    let mut sums = [0.0; PolicyKind::ALL.len()];
    let mut classical = 0.0;
    for seed in 0..instances {
        let scenario = gen_scenario(3, 3, seed)?;
        let (_, oracle) = solve_exhaustive(&scenario)?;
        let (_, no_qpu) = solve_exhaustive_with(
            &scenario,
            &ExhaustiveOptions {
                allow_quantum: false,
                ..ExhaustiveOptions::default()
            },
        )?;
        classical += no_qpu / oracle;
        for (i, kind) in PolicyKind::ALL.into_iter().enumerate() {
            let action = solve_baseline(kind, &scenario, &mut stream(seed, 0, Tag::Policy))?;
            let (cost, _) = total_cost(&scenario, &action)?;
            sums[i] += cost / oracle;
        }
    }
    println!("mean cost relative to the oracle over {instances} instances (U=3, E=3)");
    for (kind, s) in PolicyKind::ALL.iter().zip(sums) {
        println!("  {:<14} {:.4}", kind.name(), s / instances as f64);
    }
    println!("  {:<14} {:.4}", "no QPU", classical / instances as f64);
    Ok(())
}
