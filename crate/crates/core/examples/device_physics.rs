//! Cryostat, error-rate and gate-power numbers for the default device, and
//! how they move with attenuation and concatenation level.

use meqc::device::{
    bose_einstein, logical_resources, physical_error_rate, success_probability, CryostatConfig, DeviceModel, QubitTech,
};

fn main() -> meqc::Result<()> {
    let cryostat = CryostatConfig::default();
    let tech = QubitTech::default();
    let device = DeviceModel::new(&cryostat, &tech)?;

    println!("stage temperatures (K): {:?}", device.stages.temperatures);
    println!("cumulative attenuation: {:?}", device.stages.cumulative);
    println!(
        "n(0.1 K) = {:.6e}, n(300 K) = {:.6e}",
        bose_einstein(0.1, tech.frequency)?,
        bose_einstein(300.0, tech.frequency)?
    );
    println!("physical error rate: {:.6e}", device.error_rate);
    let p = &device.powers;
    println!(
        "P_pi {:.4e} W, P_1qb {:.4e} W, P_2qb {:.4e} W, P_meas {:.4e} W, P_Q {:.4e} W",
        p.p_pi, p.p_1qb, p.p_2qb, p.p_meas, p.p_qubit
    );

    println!("\nattenuation sweep");
    for db in [20.0, 30.0, 40.0, 50.0, 60.0] {
        let cfg = CryostatConfig {
            attenuation_db: db,
            ..cryostat.clone()
        };
        println!("  {db:>4} dB  eps = {:.6e}", physical_error_rate(&cfg, &tech)?);
    }

    println!("\nconcatenation levels for a 20-qubit, depth-813 circuit");
    for k in 1..=3 {
        let r = logical_resources(k)?;
        let m = success_probability(20, 813, k, device.error_rate, 2e-4)?;
        println!(
            "  k={k}: {:>6} physical/logical, {:.3} 2qb gates/step, success {:.5}",
            r.physical_per_logical, r.n_2qb, m
        );
    }
    Ok(())
}
