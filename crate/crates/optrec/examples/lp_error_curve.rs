//! Best recovery error as a function of the norm exponent p.
//!
//! Run with: `cargo run --example lp_error_curve`

use optrec::classes::ClassSpec;
use optrec::ideal::SolverOptions;
use optrec::recovery::{uniform_nodes, RecoveryEngine};
use std::f64::consts::PI;

fn main() {
    let spec = ClassSpec::rm1(2, 10.0).expect("valid spec");
    let nodes = uniform_nodes(1);
    let engine =
        RecoveryEngine::new(&spec, &nodes, &SolverOptions::default()).expect("solver converges");

    println!("E(X, u*, ‖·‖_p) for the Euler case (n = 1):");
    println!("      p        E");
    for p in [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, f64::INFINITY] {
        let e = engine.best_error_norm(p);
        if p.is_infinite() {
            println!("    inf   {e:.10}");
        } else {
            println!("  {p:>5.1}   {e:.10}");
        }
    }
    println!();
    println!("closed forms: E(‖·‖₁) = π³/6 = {:.10}", PI.powi(3) / 6.0);
    println!("              E(‖·‖_∞) = π²/8 = {:.10}", PI * PI / 8.0);
}
