//! Compares the network's analytic gradients with central finite
//! differences.

use meqc::marl::{gradients, Activation, Mlp};
use meqc::rng::{stream, Tag};
use rand::Rng;

fn main() -> meqc::Result<()> {
    let mut rng = stream(0, 0, Tag::AgentInit);
    let mut worst: f64 = 0.0;
    let checks = 1000;
    for i in 0..checks {
        let net = Mlp::new(&[4, 6, 5, 3], Activation::Tanh, 1.0, &mut rng)?;
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let up: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = gradients(&net, &x, &up)?;
        let k = rng.random_range(0..net.num_params());
        let h = 1e-6;
        let f = |n: &Mlp| -> f64 { n.forward(&x).unwrap().iter().zip(&up).map(|(a, b)| a * b).sum() };
        let mut plus = net.clone();
        plus.params_mut()[k] += h;
        let mut minus = net.clone();
        minus.params_mut()[k] -= h;
        let fd = (f(&plus) - f(&minus)) / (2.0 * h);
        let rel = (fd - g[k]).abs() / fd.abs().max(g[k].abs()).max(1e-8);
        worst = worst.max(rel);
        if i < 5 {
            println!("param {k:>3}: analytic {:+.10e}  finite difference {fd:+.10e}", g[k]);
        }
    }
    println!("worst relative error over {checks} checks: {worst:.3e}");
    Ok(())
}
