//! Latency and energy of one user's task under each execution option.

use meqc::cost::CostModel;
use meqc::workload::gen_scenario;

fn main() -> meqc::Result<()> {
    let scenario = gen_scenario(1, 2, 7)?;
    let model = CostModel::new(&scenario)?;
    let user = &scenario.users[0];
    println!(
        "task: {:.3e} bytes, {:.3e} cycles/byte, quantum circuit {} qubits x {} depth",
        user.task.data_size, user.task.cycles_per_byte, user.quantum.logical_qubits, user.quantum.logical_depth
    );

    let local = model.user_cost(0, 0, 1.0, false)?;
    println!("\nall local: cost {:.4e} (latency {:.4e} s, energy {:.4e} J)", local.cost, local.latency(), local.energy());
    for e in 0..model.servers() {
        let s = &scenario.servers[e];
        println!(
            "\nserver {e}: level {}, {} physical qubits, uplink {:.3e} bit/s, success {:.4}, QPU eligible {}",
            s.concatenation_level,
            s.physical_qubits,
            model.rate(0, e),
            model.success_probability(0, e),
            model.eligible(0, e)
        );
        let cpu = model.user_cost(0, e, 0.0, false)?;
        println!("  edge CPU: cost {:.4e} (tx {:.3e} s, edge {:.3e} s)", cpu.cost, cpu.transmit_latency, cpu.edge_latency);
        let qpu = model.user_cost(0, e, 0.0, true)?;
        println!("  edge QPU: cost {:.4e} (quantum {:.3e} s, {:.3e} J)", qpu.cost, qpu.quantum_latency, qpu.quantum_energy);
        let half = model.user_cost(0, e, 0.5, false)?;
        println!("  half local, half edge CPU: cost {:.4e}", half.cost);
    }
    Ok(())
}
