//! Best-possible recovery errors, the optimal method, and node-optimality
//! diagnostics.
//!
//! The best pointwise recovery error from samples at `u` equals `|φ(X,u;τ)|`
//! and the best `L_p` recovery error equals `‖φ(X,u;·)‖_p`, both attained by
//! interpolation in the derived spline space; the uniform mesh is the best
//! information set in the uniform metric. This module wires those facts into
//! an engine (solve once, query many times), plus Monte-Carlo harnesses that
//! probe the claims empirically against baseline methods.

use crate::classes::{sample_member, ClassSpec};
use crate::ideal::{find_ideal_spline, IdealError, IdealSpline, SolverOptions};
use crate::interp::{interpolate, method_weights, InterpError, SplineSpace};
use crate::piecewise::{PiecewisePolynomial, PERIOD};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum RecoveryError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Deterministic per-sample seed derivation (splitmix-style), so Monte-Carlo
/// results do not depend on evaluation order.
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    let mut z = seed ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The 2n-point uniform mesh `(0, π/n, 2π/n, …)`.
pub fn uniform_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    (0..2 * n)
        .map(|k| k as f64 * std::f64::consts::PI / n as f64)
        .collect()
}

/// Solve once, query errors/methods many times.
pub struct RecoveryEngine {
    pub spec: ClassSpec,
    pub nodes: Vec<f64>,
    pub phi: IdealSpline,
    pub space: SplineSpace,
}

impl RecoveryEngine {
    pub fn new(
        spec: &ClassSpec,
        nodes: &[f64],
        opts: &SolverOptions,
    ) -> Result<Self, RecoveryError> {
        let phi = find_ideal_spline(nodes, spec, opts)?;
        let space = SplineSpace::from_ideal(&phi)?;
        Ok(RecoveryEngine {
            spec: *spec,
            nodes: nodes.to_vec(),
            phi,
            space,
        })
    }

    /// Best possible pointwise recovery error at `tau`.
    pub fn best_error_point(&self, tau: f64) -> f64 {
        self.phi.body.evaluate(tau, 0).abs()
    }

    /// Best possible recovery error in `L_p`.
    pub fn best_error_norm(&self, p: f64) -> f64 {
        self.phi.body.lp_norm(p)
    }

    /// Weights of the optimal pointwise method at `tau`.
    pub fn weights(&self, tau: f64) -> Result<Vec<f64>, RecoveryError> {
        Ok(method_weights(&self.space, &self.nodes, tau)?)
    }

    /// The optimal global method: interpolate the sampled values in the
    /// derived spline space.
    pub fn recover_function(&self, values: &[f64]) -> Result<PiecewisePolynomial, RecoveryError> {
        Ok(interpolate(&self.space, &self.nodes, values)?.spline)
    }

    /// The optimal pointwise method: the interpolant evaluated at `tau`.
    pub fn recover_point(&self, values: &[f64], tau: f64) -> Result<f64, RecoveryError> {
        Ok(self.recover_function(values)?.evaluate(tau, 0))
    }
}

pub fn best_error_point(
    spec: &ClassSpec,
    nodes: &[f64],
    tau: f64,
    opts: &SolverOptions,
) -> Result<f64, RecoveryError> {
    Ok(RecoveryEngine::new(spec, nodes, opts)?.best_error_point(tau))
}

pub fn best_error_norm(
    spec: &ClassSpec,
    nodes: &[f64],
    p: f64,
    opts: &SolverOptions,
) -> Result<f64, RecoveryError> {
    Ok(RecoveryEngine::new(spec, nodes, opts)?.best_error_norm(p))
}

pub fn recover_point(
    spec: &ClassSpec,
    nodes: &[f64],
    values: &[f64],
    tau: f64,
    opts: &SolverOptions,
) -> Result<f64, RecoveryError> {
    RecoveryEngine::new(spec, nodes, opts)?.recover_point(values, tau)
}

pub fn recover_function(
    spec: &ClassSpec,
    nodes: &[f64],
    values: &[f64],
    opts: &SolverOptions,
) -> Result<PiecewisePolynomial, RecoveryError> {
    RecoveryEngine::new(spec, nodes, opts)?.recover_function(values)
}

/// Outcome of the node-optimality comparison against the uniform mesh.
#[derive(Debug, Clone, Serialize)]
pub struct NodeGap {
    /// `‖φ(X,u)‖_∞ − ‖φ(X,u*)‖_∞` after rotating `u` so `u_1 = 0`.
    pub gap: f64,
    pub sup_nodes: f64,
    pub sup_uniform: f64,
    /// Whether `u` is a rotation of the uniform mesh (gap ≈ 0 expected; such
    /// node sets are optimal-equivalent).
    pub uniform_equivalent: bool,
}

/// Compare the worst-case error of `u` against the uniform mesh. Translation
/// invariance of the classes justifies rotating `u` so its first node is 0
/// before the comparison.
pub fn node_optimality_gap(
    spec: &ClassSpec,
    nodes: &[f64],
    opts: &SolverOptions,
) -> Result<NodeGap, RecoveryError> {
    crate::ideal::validate_nodes(nodes)?;
    let n = nodes.len() / 2;
    let rotated: Vec<f64> = nodes.iter().map(|u| u - nodes[0]).collect();
    let star = uniform_nodes(n);
    let gap_to_uniform = rotated
        .iter()
        .zip(star.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let phi_u = find_ideal_spline(&rotated, spec, opts)?;
    let phi_star = find_ideal_spline(&star, spec, opts)?;
    let sup_nodes = phi_u.body.sup_norm(0).0;
    let sup_uniform = phi_star.body.sup_norm(0).0;
    Ok(NodeGap {
        gap: sup_nodes - sup_uniform,
        sup_nodes,
        sup_uniform,
        uniform_equivalent: gap_to_uniform <= 1e-9,
    })
}

/// Recovery methods for the empirical harness. `Optimal` is the spline
/// method; the others are comparison baselines whose worst-case errors are
/// estimated, never claimed exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Optimal,
    Zero,
    PiecewiseLinear,
    Trigonometric,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" => Some(Method::Optimal),
            "zero" => Some(Method::Zero),
            "piecewise-linear" | "linear" => Some(Method::PiecewiseLinear),
            "trigonometric" | "trig" => Some(Method::Trigonometric),
            _ => None,
        }
    }
}

/// Error metric for the harness: pointwise at `tau` or global in `L_p`.
#[derive(Debug, Clone, Copy)]
pub enum ErrorMetric {
    Point(f64),
    Norm(f64),
}

/// Periodic piecewise-linear interpolant through `(u_k, v_k)`.
fn piecewise_linear(nodes: &[f64], values: &[f64]) -> PiecewisePolynomial {
    let k = nodes.len();
    let segments: Vec<(f64, Poly)> = (0..k)
        .map(|i| {
            let len = if i + 1 < k {
                nodes[i + 1] - nodes[i]
            } else {
                nodes[0] + PERIOD - nodes[i]
            };
            let v0 = values[i];
            let v1 = values[(i + 1) % k];
            (len, Poly::linear(v0, (v1 - v0) / len))
        })
        .collect();
    PiecewisePolynomial::from_unrolled(nodes[0], &segments)
        .expect("node gaps are validated upstream")
}

/// Trigonometric interpolation through the 2n samples using the basis
/// `{1, cos t, sin t, …, cos((n−1)t), sin((n−1)t), cos(nt)}`.
struct TrigInterpolant {
    coefs: Vec<f64>,
}

impl TrigInterpolant {
    fn fit(nodes: &[f64], values: &[f64]) -> Option<Self> {
        let dim = nodes.len();
        let a = DMatrix::from_fn(dim, dim, |row, col| trig_basis(col, nodes[row]));
        let coefs = a.lu().solve(&DVector::from_column_slice(values))?;
        if coefs.iter().any(|c| !c.is_finite()) {
            return None;
        }
        Some(TrigInterpolant {
            coefs: coefs.iter().cloned().collect(),
        })
    }

    fn eval(&self, t: f64) -> f64 {
        self.coefs
            .iter()
            .enumerate()
            .map(|(j, c)| c * trig_basis(j, t))
            .sum()
    }
}

fn trig_basis(j: usize, t: f64) -> f64 {
    if j == 0 {
        1.0
    } else {
        let k = j.div_ceil(2) as f64;
        if j % 2 == 1 {
            (k * t).cos()
        } else {
            (k * t).sin()
        }
    }
}

const ERROR_GRID: usize = 2048;

fn grid_error(x: &PiecewisePolynomial, approx: impl Fn(f64) -> f64, metric: ErrorMetric) -> f64 {
    match metric {
        ErrorMetric::Point(tau) => (x.evaluate(tau, 0) - approx(tau)).abs(),
        ErrorMetric::Norm(p) => {
            let h = PERIOD / ERROR_GRID as f64;
            let diffs = (0..ERROR_GRID).map(|g| {
                let t = g as f64 * h;
                (x.evaluate(t, 0) - approx(t)).abs()
            });
            if p.is_infinite() {
                diffs.fold(0.0, f64::max)
            } else {
                (diffs.map(|d| d.powf(p) * h).sum::<f64>()).powf(1.0 / p)
            }
        }
    }
}

fn exact_error(x: &PiecewisePolynomial, approx: &PiecewisePolynomial, metric: ErrorMetric) -> f64 {
    match metric {
        ErrorMetric::Point(tau) => (x.evaluate(tau, 0) - approx.evaluate(tau, 0)).abs(),
        ErrorMetric::Norm(p) => x.sub(approx).lp_norm(p),
    }
}

/// Monte-Carlo lower estimate of the worst-case error of a method over the
/// class: the max error over `samples` random members. Deterministic in
/// `(seed, samples)`; per-sample seeds are derived by counter.
pub fn empirical_worst_error(
    method: Method,
    spec: &ClassSpec,
    nodes: &[f64],
    metric: ErrorMetric,
    samples: u32,
    seed: u64,
    opts: &SolverOptions,
) -> Result<f64, RecoveryError> {
    if samples == 0 {
        return Err(RecoveryError::BadInput("samples must be ≥ 1".into()));
    }
    let engine = match method {
        Method::Optimal => Some(RecoveryEngine::new(spec, nodes, opts)?),
        _ => {
            crate::ideal::validate_nodes(nodes)?;
            None
        }
    };
    let mut worst = 0.0f64;
    for i in 0..samples {
        let member = sample_member(spec, derive_seed(seed, i as u64), 1 + (i % 4));
        let x = &member.body;
        let values: Vec<f64> = nodes.iter().map(|&u| x.evaluate(u, 0)).collect();
        let err = match method {
            Method::Optimal => {
                let s = engine.as_ref().unwrap().recover_function(&values)?;
                exact_error(x, &s, metric)
            }
            Method::Zero => exact_error(x, &PiecewisePolynomial::zero(), metric),
            Method::PiecewiseLinear => {
                let s = piecewise_linear(nodes, &values);
                exact_error(x, &s, metric)
            }
            Method::Trigonometric => {
                let trig = TrigInterpolant::fit(nodes, &values).ok_or_else(|| {
                    RecoveryError::BadInput(
                        "trigonometric interpolation singular for these nodes".into(),
                    )
                })?;
                grid_error(x, |t| trig.eval(t), metric)
            }
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Worst violation of the extremal inequality `|x − s(x)| ≤ |φ|` over
/// sampled class members on a uniform evaluation grid: the max of
/// `|x(t) − s(t)| − |φ(t)|`, which must stay at or below zero up to
/// tolerance. Deterministic in `seed`.
pub fn extremal_inequality_excess(
    spec: &ClassSpec,
    nodes: &[f64],
    samples: u32,
    grid: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<f64, RecoveryError> {
    let engine = RecoveryEngine::new(spec, nodes, opts)?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..samples {
        let member = sample_member(spec, derive_seed(seed, i as u64), 1 + (i % 4));
        let values: Vec<f64> = nodes.iter().map(|&u| member.body.evaluate(u, 0)).collect();
        let s = engine.recover_function(&values)?;
        let diff = member.body.sub(&s);
        for g in 0..grid {
            let t = PERIOD * g as f64 / grid as f64;
            let excess = diff.evaluate(t, 0).abs() - engine.phi.body.evaluate(t, 0).abs();
            worst = worst.max(excess);
        }
    }
    Ok(worst)
}

/// Externally consumed summary: best errors, weights, node-optimality gap and
/// empirical method comparisons for one problem instance.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub spec: ClassSpec,
    pub nodes: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub point_errors: Vec<PointErrorEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub norm_errors: Vec<NormErrorEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_gap: Option<NodeGap>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub empirical: Vec<EmpiricalEntry>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointErrorEntry {
    pub tau: f64,
    pub error: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormErrorEntry {
    /// `"inf"` or the numeric exponent.
    pub p: String,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalEntry {
    pub method: Method,
    pub metric: String,
    pub samples: u32,
    pub worst_error: f64,
    /// The proved bound for the optimal method under the same metric.
    pub bound: f64,
}

impl RecoveryReport {
    pub fn compute(
        engine: &RecoveryEngine,
        taus: &[f64],
        ps: &[f64],
        with_gap: bool,
        opts: &SolverOptions,
    ) -> Result<Self, RecoveryError> {
        let mut point_errors = Vec::new();
        for &tau in taus {
            point_errors.push(PointErrorEntry {
                tau,
                error: engine.best_error_point(tau),
                weights: engine.weights(tau)?,
            });
        }
        let norm_errors = ps
            .iter()
            .map(|&p| NormErrorEntry {
                p: if p.is_infinite() {
                    "inf".into()
                } else {
                    format!("{p}")
                },
                error: engine.best_error_norm(p),
            })
            .collect();
        let node_gap = if with_gap {
            Some(node_optimality_gap(&engine.spec, &engine.nodes, opts)?)
        } else {
            None
        };
        Ok(RecoveryReport {
            spec: engine.spec,
            nodes: engine.nodes.clone(),
            point_errors,
            norm_errors,
            node_gap,
            empirical: Vec::new(),
            residual: engine.phi.residual,
        })
    }
}
