//! Weight functions of the optimal pointwise recovery method: how much each
//! sample contributes as the evaluation point τ sweeps the period.
//!
//! Run with: `cargo run --example interpolation_weights`

use optrec::classes::ClassSpec;
use optrec::ideal::{solve, SolverOptions};
use optrec::interp::{method_weights, SplineSpace};
use optrec::piecewise::PERIOD;

fn main() {
    let spec = ClassSpec::rm1(2, 1.0).expect("valid spec");
    let nodes = [0.0, std::f64::consts::PI];
    let out = solve(&nodes, &spec, &SolverOptions::default()).expect("solver converges");
    let space = SplineSpace::from_ideal(&out.spline).expect("space builds");

    println!("optimal method weights for u = (0, π), clamped class (M = 1):");
    println!("     τ        w_1       w_2      Σw");
    for g in 0..16 {
        let tau = PERIOD * g as f64 / 16.0;
        let w = method_weights(&space, &nodes, tau).expect("weights solve");
        println!(
            "  {tau:>6.3}   {:>7.4}   {:>7.4}   {:>7.4}",
            w[0],
            w[1],
            w[0] + w[1]
        );
    }
    println!();
    println!("at a node the weights collapse to a unit vector; between nodes they");
    println!("interpolate through the clamped spline space (not linearly).");
}
