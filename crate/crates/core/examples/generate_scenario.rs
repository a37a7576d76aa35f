//! Generates a scenario, writes it as TOML and reads it back.
//!
//! cargo run --example generate_scenario -- [users] [servers] [seed] [path]

use meqc::workload::{gen_scenario, Scenario};

fn main() -> meqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (users, servers, seed) = (arg(0, 4) as usize, arg(1, 3) as usize, arg(2, 42));
    let path = args.get(3).cloned().unwrap_or_else(|| "scenario.toml".into());

    let scenario = gen_scenario(users, servers, seed)?;
    scenario.save(&path)?;
    let back = Scenario::load(&path)?;
    assert_eq!(back, scenario);

    for (u, entry) in scenario.users.iter().enumerate() {
        println!(
            "user {u}: f_L {:.1e} Hz, f_E {:.1e} Hz, {:.3e} bytes, primitives 2^{}, circuit {}x{}",
            entry.profile.local_cpu,
            entry.profile.edge_cpu,
            entry.task.data_size,
            entry.ray_tracing.primitive_exponent,
            entry.quantum.logical_qubits,
            entry.quantum.logical_depth
        );
    }
    for (e, s) in scenario.servers.iter().enumerate() {
        println!("server {e}: level {}, {} physical qubits", s.concatenation_level, s.physical_qubits);
    }
    println!("wrote {path}");
    Ok(())
}
