//! Construct an ideal spline with prescribed zeros and inspect its knot
//! structure and validation report.
//!
//! Run with: `cargo run --example ideal_spline`

use optrec::classes::ClassSpec;
use optrec::ideal::{solve, validate_ideal_spline, SolverOptions};

fn main() {
    // ‖x′‖ ≤ 1, ‖x‴‖ ≤ 1: the second derivative follows the bump pattern
    let spec = ClassSpec::rm2(3, 1.0).expect("valid spec");
    let nodes = [0.5, 2.0, 3.7, 5.2];
    let out = solve(&nodes, &spec, &SolverOptions::default()).expect("solver converges");
    let spline = &out.spline;

    println!("prescribed zeros: {:?}", spline.zeros);
    println!(
        "solved in {} restart(s), {} iterations, residual ‖η‖_∞ = {:.3e}",
        out.restarts_used, out.trace_len, spline.residual
    );
    println!();
    println!("  k     knot t_k     α_k        ε_k   plateau level");
    for k in 0..spline.knots.len() {
        println!(
            "  {k}   {:>9.6}   {:>8.6}   {:+.0}    {:+.3}",
            spline.knots[k],
            spline.alphas[k],
            spline.signs[k],
            spline.signs[k] * spec.m,
        );
    }
    println!();
    println!("sup-norm:         {:.9}", spline.body.sup_norm(0).0);
    println!(
        "‖φ″‖ (clamped):   {:.9}  (bound M = {})",
        spline.body.sup_norm(1).0,
        spec.m
    );
    println!(
        "‖φ‴‖ (top):       {:.9}  (bound 1)",
        spline.body.sup_norm(3).0
    );
    println!();
    println!("validation:");
    for clause in &validate_ideal_spline(spline).clauses {
        println!(
            "  [{}] {}: {}",
            if clause.passed { "ok" } else { "VIOLATED" },
            clause.name,
            clause.detail
        );
    }
}
