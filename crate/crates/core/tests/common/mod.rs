//! Helpers shared by the integration tests.
#![allow(dead_code)]

use meqc::workload::{gen_scenario, Scenario};

/// A generated scenario rewritten so the QPU beats the edge CPU: small,
/// compute-heavy tasks compiled to a 20×813 circuit, level-1 servers with
/// `physical_qubits` each.
pub fn quantum_friendly(users: usize, servers: usize, seed: u64, physical_qubits: u64) -> Scenario {
    let mut s = gen_scenario(users, servers, seed).expect("valid sizes");
    for (i, u) in s.users.iter_mut().enumerate() {
        u.task.data_size = 1e6;
        u.task.cycles_per_byte = 1e6 * (1.0 + i as f64);
        u.quantum.data_size = 1e6;
        u.quantum.logical_qubits = 20;
        u.quantum.logical_depth = 813;
    }
    for srv in &mut s.servers {
        srv.concatenation_level = 1;
        srv.physical_qubits = physical_qubits;
    }
    s
}

/// Sizes used for the 100-instance batches: U cycles 1..=4, E cycles 1..=3.
pub fn instance_shape(i: u64) -> (usize, usize) {
    (1 + (i % 4) as usize, 1 + ((i / 4) % 3) as usize)
}
