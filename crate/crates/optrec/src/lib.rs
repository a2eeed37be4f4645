//! Optimal recovery of smooth periodic functions from finitely many samples.
//!
//! Given a class of 2π-periodic functions bounded in several higher
//! derivatives and an even set of sample nodes `u_1 < … < u_{2n}`, this crate
//! computes
//!
//! * the *ideal spline* `φ(X, u; ·)` of the class `X` that vanishes exactly at
//!   the nodes ([`ideal`]),
//! * the induced 2n-dimensional interpolation spline space and the optimal
//!   linear recovery method ([`interp`]),
//! * best-possible pointwise and `L_p` recovery errors, optimal method
//!   weights, and node-optimality diagnostics ([`recovery`]).
//!
//! Three classes are supported, each with the top derivative bounded by 1:
//! `‖x^(r−1)‖ ≤ M` ([`classes::ClassVariant::Rm1`]), `‖x^(r−2)‖ ≤ M`
//! ([`classes::ClassVariant::Rm2`]), and both `‖x^(r−2)‖ ≤ M`,
//! `‖x^(r−1)‖ ≤ N` ([`classes::ClassVariant::Rm1m2`]).
//!
//! The crate is primarily a library; see the `examples/` directory for one
//! runnable program per capability. A thin `optrec` binary exposes the same
//! operations as subcommands (see [`cli`]).

pub mod classes;
pub mod cli;
pub mod ideal;
pub mod interp;
pub mod piecewise;
mod poly;
pub mod recovery;

pub use classes::{ClassSpec, ClassVariant};
pub use ideal::{IdealSpline, SolverOptions, SphereVector};
pub use interp::{SplinePattern, SplineSpace};
pub use piecewise::{PiecewisePolynomial, PERIOD};
pub use recovery::RecoveryReport;
