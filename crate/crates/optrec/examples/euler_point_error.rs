//! Best pointwise recovery error for the classic Euler case.
//!
//! With two sample nodes at 0 and π and a generous bound on `x′`, the
//! extremal function is the order-2 Euler perfect spline `t(π−t)/2`, so the
//! best possible recovery error at τ = π/2 is π²/8 and the optimal method
//! averages the two samples.
//!
//! Run with: `cargo run --example euler_point_error`

use optrec::classes::ClassSpec;
use optrec::ideal::SolverOptions;
use optrec::recovery::RecoveryEngine;
use std::f64::consts::PI;

fn main() {
    let spec = ClassSpec::rm1(2, 10.0).expect("valid spec");
    let nodes = [0.0, PI];
    let engine = RecoveryEngine::new(&spec, &nodes, &SolverOptions::default())
        .expect("solver converges on the Euler case");

    let tau = PI / 2.0;
    let error = engine.best_error_point(tau);
    let weights = engine.weights(tau).expect("weights solve");

    println!("class:    ‖x′‖ ≤ 10, ‖x″‖ ≤ 1 (2π-periodic)");
    println!("nodes:    u = (0, π)");
    println!("τ:        π/2");
    println!("E(τ)      = {error:.12}");
    println!("π²/8      = {:.12}", PI * PI / 8.0);
    println!("weights   = {weights:?}");
    println!();

    // the optimal method applied to actual samples
    let x = |t: f64| 0.4 * (t.sin() + 0.3 * (2.0 * t).cos());
    let values: Vec<f64> = nodes.iter().map(|&u| x(u)).collect();
    let recovered = engine.recover_point(&values, tau).expect("recovery");
    println!("sample function x(t) = 0.4 sin t + 0.12 cos 2t");
    println!("x(τ)      = {:.12}", x(tau));
    println!("recovered = {recovered:.12}");
    println!(
        "|error|   = {:.3e}  (bound {error:.6})",
        (x(tau) - recovered).abs()
    );
}
