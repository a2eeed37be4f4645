//! The uniform mesh is the best information set: perturbing any node away
//! from it strictly increases the worst-case recovery error.
//!
//! Run with: `cargo run --example optimal_nodes`

use optrec::classes::ClassSpec;
use optrec::ideal::SolverOptions;
use optrec::recovery::{node_optimality_gap, uniform_nodes};

fn main() {
    let spec = ClassSpec::rm1(2, 1.0).expect("valid spec");
    let opts = SolverOptions::default();
    let n = 2;
    let star = uniform_nodes(n);

    let at_star = node_optimality_gap(&spec, &star, &opts).expect("solves");
    println!(
        "uniform mesh u* (n = {n}): sup error = {:.9}",
        at_star.sup_uniform
    );
    println!(
        "gap at u* itself: {:+.3e} (uniform-equivalent: {})",
        at_star.gap, at_star.uniform_equivalent
    );
    println!();
    println!("perturbing the second node of u* by δ:");
    println!("      δ        sup error       gap");
    for delta in [0.05, 0.1, 0.2, 0.3, 0.5, 0.7] {
        let mut u = star.clone();
        u[1] += delta;
        let g = node_optimality_gap(&spec, &u, &opts).expect("solves");
        println!("  {delta:>6.2}   {:>12.9}   {:+.6e}", g.sup_nodes, g.gap);
    }
    println!();
    println!("a rotation of u* is optimal-equivalent:");
    let shifted: Vec<f64> = star.iter().map(|u| u + 0.9).collect();
    let g = node_optimality_gap(&spec, &shifted, &opts).expect("solves");
    println!(
        "  u* + 0.9 → gap {:+.3e} (uniform-equivalent: {})",
        g.gap, g.uniform_equivalent
    );
}
