//! The 2n-dimensional interpolation spline space induced by an ideal spline.
//!
//! The space consists of periodic functions whose top derivative is piecewise
//! constant with the same support pattern as the generating ideal spline's
//! derivative: free constants on the active intervals, forced zero elsewhere,
//! plus the knot conditions of the defining pattern (a clamp
//! `s^(q−1)(t_k) = 0` where the generating spline saturates its bound, an
//! identification of adjacent constants where it does not). A basis is
//! extracted from the null space of the constraint system; interpolation and
//! optimal-method weights are dense 2n×2n solves on top of it.

use crate::classes::ClassVariant;
use crate::ideal::IdealSpline;
use crate::piecewise::{PiecewisePolynomial, PERIOD};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum InterpError {
    #[error("pattern dimension mismatch: expected {expected}, built {got}")]
    PatternDimensionMismatch { expected: usize, got: usize },
    #[error("interpolation system singular; nodes are incompatible with the pattern")]
    Singular,
    #[error("need exactly {expected} nodes/values, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("nodes must be strictly increasing in [0, 2π)")]
    BadNodes,
    #[error("degenerate support interval of length {0:.3e} in pattern")]
    DegenerateSupport(f64),
    #[error("assembled basis violates the structural constraints by {0:.3e}")]
    BasisInconsistent(f64),
}

/// How the free constants of the top derivative sit inside each knot
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternKind {
    /// One constant on `(t_k, t_k + α_k)`.
    SingleConstant,
    /// Constants on the two halves `(t_k, t_k + α_k/2)`, `(t_k + α_k/2, t_k + α_k)`.
    PairedHalves,
    /// Constants on the edges `(t_k, t_k + β_k/2)`, `(t_k + α_k − β_k/2, t_k + α_k)`.
    PairedEdges,
}

/// Support/clamp structure extracted from an ideal spline; order is one less
/// than the generating class order.
#[derive(Debug, Clone, Serialize)]
pub struct SplinePattern {
    pub order: u32,
    pub kind: PatternKind,
    pub knots: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Whether the generating spline saturates its clamped-derivative bound
    /// at each knot; selects the knot condition for the paired kinds.
    pub clamps: Vec<bool>,
}

impl SplinePattern {
    pub fn two_n(&self) -> usize {
        self.knots.len()
    }
}

/// Extract the support and clamp pattern of the derivative of an ideal
/// spline. The derivative is itself an ideal spline of the derived class,
/// with the same knots, active lengths and bump widths; the clamp test reads
/// the generating spline's clamped derivative at each knot.
pub fn pattern_from_ideal(phi: &IdealSpline) -> SplinePattern {
    let r = phi.spec.r as usize;
    let kind = match phi.spec.variant {
        ClassVariant::Rm1 => PatternKind::SingleConstant,
        ClassVariant::Rm2 => PatternKind::PairedHalves,
        ClassVariant::Rm1m2 => PatternKind::PairedEdges,
    };
    let clamp_order = match phi.spec.variant {
        ClassVariant::Rm1 => r - 1,
        _ => r - 2,
    };
    let threshold = phi.spec.m * (1.0 - 1e-7);
    let clamps = phi
        .knots
        .iter()
        .map(|&t| phi.body.evaluate(t, clamp_order).abs() >= threshold)
        .collect();
    // Snap active lengths that reach the next knot onto the gap exactly, so
    // the support intervals tile without slivers of overlap (knots and
    // lengths can disagree at solver-residual scale).
    let knots = phi.knots.clone();
    let mut alphas = phi.alphas.clone();
    let mut betas = phi.betas.clone().unwrap_or_else(|| phi.alphas.clone());
    for k in 0..knots.len() {
        let next = if k + 1 < knots.len() {
            knots[k + 1]
        } else {
            knots[0] + PERIOD
        };
        let gap = next - knots[k];
        if alphas[k] > gap - 1e-7 {
            alphas[k] = gap;
        }
        betas[k] = betas[k].min(alphas[k]);
    }
    SplinePattern {
        order: phi.spec.r - 1,
        kind,
        knots,
        alphas,
        betas,
        clamps,
    }
}

/// A concrete basis of the 2n-dimensional spline space together with the
/// pattern that produced it. Immutable; interpolations on a shared space are
/// concurrency-safe.
#[derive(Debug, Clone)]
pub struct SplineSpace {
    pub pattern: SplinePattern,
    /// Raw unknowns before constraints: support constants plus integration
    /// constants.
    pub raw_dim: usize,
    pub basis: Vec<PiecewisePolynomial>,
}

impl SplineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn from_ideal(phi: &IdealSpline) -> Result<Self, InterpError> {
        build_space(&pattern_from_ideal(phi))
    }
}

/// Support interval of one raw constant, possibly wrapping past 2π.
#[derive(Debug, Clone, Copy)]
struct Support {
    start: f64,
    len: f64,
    knot: usize,
    /// 0 = first constant of the knot, 1 = second
    slot: usize,
}

fn supports_of(pattern: &SplinePattern) -> Result<Vec<Support>, InterpError> {
    let mut out = Vec::new();
    for k in 0..pattern.two_n() {
        let t = pattern.knots[k];
        let alpha = pattern.alphas[k];
        let beta = pattern.betas[k];
        match pattern.kind {
            PatternKind::SingleConstant => out.push(Support {
                start: t,
                len: alpha,
                knot: k,
                slot: 0,
            }),
            PatternKind::PairedHalves => {
                out.push(Support {
                    start: t,
                    len: alpha / 2.0,
                    knot: k,
                    slot: 0,
                });
                out.push(Support {
                    start: t + alpha / 2.0,
                    len: alpha / 2.0,
                    knot: k,
                    slot: 1,
                });
            }
            PatternKind::PairedEdges => {
                out.push(Support {
                    start: t,
                    len: beta / 2.0,
                    knot: k,
                    slot: 0,
                });
                out.push(Support {
                    start: t + alpha - beta / 2.0,
                    len: beta / 2.0,
                    knot: k,
                    slot: 1,
                });
            }
        }
    }
    if let Some(s) = out.iter().find(|s| s.len <= 1e-10) {
        return Err(InterpError::DegenerateSupport(s.len));
    }
    Ok(out)
}

/// Indicator of `[a, a+len)` (mod 2π) as a piecewise polynomial on the given
/// global breakpoint set.
fn indicator_on(breaks: &[f64], a: f64, len: f64) -> PiecewisePolynomial {
    let a0 = a.rem_euclid(PERIOD);
    let b0 = a0 + len;
    let inside = |t: f64| -> bool {
        if b0 <= PERIOD + 1e-13 {
            t >= a0 - 1e-13 && t < b0 - 1e-13
        } else {
            t >= a0 - 1e-13 || t < b0 - PERIOD - 1e-13
        }
    };
    let pieces = breaks
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Poly::constant(if inside(mid) { 1.0 } else { 0.0 })
        })
        .collect();
    PiecewisePolynomial::new(breaks.to_vec(), pieces).expect("global breakpoints are valid")
}

/// Assemble the 2n-dimensional space from a pattern by null-space extraction
/// from the structural constraint system.
pub fn build_space(pattern: &SplinePattern) -> Result<SplineSpace, InterpError> {
    let two_n = pattern.two_n();
    let q = pattern.order as usize;
    let supports = supports_of(pattern)?;
    let raw_dim = supports.len() + q;

    // common breakpoint set for all influence functions
    let mut breaks: Vec<f64> = vec![0.0, PERIOD];
    for s in &supports {
        for point in [s.start, s.start + s.len] {
            let p = point.rem_euclid(PERIOD);
            if p > 1e-12 && p < PERIOD - 1e-12 {
                breaks.push(p);
            }
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    // influence of each raw unknown on the spline: q-fold antiderivatives of
    // the support indicators, then monomials t^l/l! for the integration
    // constants
    let mut influence: Vec<PiecewisePolynomial> = Vec::with_capacity(raw_dim);
    for s in &supports {
        let mut f = indicator_on(&breaks, s.start, s.len);
        for _ in 0..q {
            f = f.antiderivative(0.0);
        }
        influence.push(f);
    }
    for l in 0..q {
        let mut coeffs = vec![0.0; l + 1];
        let mut fact = 1.0;
        for i in 1..=l {
            fact *= i as f64;
        }
        coeffs[l] = 1.0 / fact;
        let mono = PiecewisePolynomial::new(vec![0.0, PERIOD], vec![Poly::new(coeffs)])
            .expect("monomial piece is valid")
            .refine(&breaks);
        influence.push(mono);
    }

    // constraint rows: periodicity of derivatives 0..q−1, then the knot
    // conditions for the paired kinds
    let knot_rows = match pattern.kind {
        PatternKind::SingleConstant => 0,
        _ => two_n,
    };
    let n_rows = q + knot_rows;
    let mut c = DMatrix::zeros(n_rows, raw_dim);
    for m in 0..q {
        for (j, f) in influence.iter().enumerate() {
            c[(m, j)] = f.eval_left(PERIOD, m) - f.evaluate(0.0, m);
        }
    }
    if knot_rows > 0 {
        let mut slot_index = vec![[usize::MAX; 2]; two_n];
        for (j, s) in supports.iter().enumerate() {
            slot_index[s.knot][s.slot] = j;
        }
        for k in 0..two_n {
            let row = q + k;
            if pattern.clamps[k] {
                for (j, f) in influence.iter().enumerate() {
                    c[(row, j)] = f.evaluate(pattern.knots[k], q - 1);
                }
            } else {
                // continuity of the top derivative across the zero interval
                // preceding knot k
                let prev = (k + two_n - 1) % two_n;
                c[(row, slot_index[prev][1])] = 1.0;
                c[(row, slot_index[k][0])] = -1.0;
            }
        }
    }

    // null space via an SVD of the square-padded system
    let mut padded = DMatrix::zeros(raw_dim.max(n_rows), raw_dim);
    padded.view_mut((0, 0), (n_rows, raw_dim)).copy_from(&c);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("v requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank_tol = sigma_max.max(1.0) * 1e-10;
    let null_rows: Vec<usize> = (0..raw_dim)
        .filter(|&i| {
            svd.singular_values
                .get(i)
                .map(|&s| s <= rank_tol)
                .unwrap_or(true)
        })
        .collect();
    if null_rows.len() != two_n {
        return Err(InterpError::PatternDimensionMismatch {
            expected: two_n,
            got: null_rows.len(),
        });
    }

    let mut basis = Vec::with_capacity(two_n);
    let mut worst_violation = 0.0f64;
    for &row in &null_rows {
        let mut f = PiecewisePolynomial::zero().refine(&breaks);
        for (j, g) in influence.iter().enumerate() {
            let coef = v_t[(row, j)];
            if coef != 0.0 {
                f = f.add(&g.scale(coef));
            }
        }
        for m in 0..q {
            worst_violation =
                worst_violation.max((f.eval_left(PERIOD, m) - f.evaluate(0.0, m)).abs());
        }
        if knot_rows > 0 {
            for k in 0..two_n {
                if pattern.clamps[k] {
                    worst_violation =
                        worst_violation.max(f.evaluate(pattern.knots[k], q - 1).abs());
                }
            }
        }
        basis.push(f);
    }
    if worst_violation > 1e-8 {
        return Err(InterpError::BasisInconsistent(worst_violation));
    }

    Ok(SplineSpace {
        pattern: pattern.clone(),
        raw_dim,
        basis,
    })
}

/// An interpolant together with the collocation condition estimate.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub spline: PiecewisePolynomial,
    pub condition: f64,
}

fn check_nodes(space: &SplineSpace, nodes: &[f64]) -> Result<(), InterpError> {
    if nodes.len() != space.dim() {
        return Err(InterpError::CountMismatch {
            expected: space.dim(),
            got: nodes.len(),
        });
    }
    let sorted = nodes.windows(2).all(|w| w[1] - w[0] > 1e-9);
    if !sorted || nodes.iter().any(|t| !(0.0..PERIOD).contains(t)) {
        return Err(InterpError::BadNodes);
    }
    Ok(())
}

fn collocation_matrix(space: &SplineSpace, nodes: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(nodes.len(), space.dim(), |j, i| {
        space.basis[i].evaluate(nodes[j], 0)
    })
}

/// The unique element of the space matching the given values at the nodes.
pub fn interpolate(
    space: &SplineSpace,
    nodes: &[f64],
    values: &[f64],
) -> Result<Interpolant, InterpError> {
    check_nodes(space, nodes)?;
    if values.len() != nodes.len() {
        return Err(InterpError::CountMismatch {
            expected: nodes.len(),
            got: values.len(),
        });
    }
    let a = collocation_matrix(space, nodes);
    let condition = {
        let svd = a.clone().svd(false, false);
        let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let min = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    };
    let rhs = DVector::from_column_slice(values);
    let coefs = a.lu().solve(&rhs).ok_or(InterpError::Singular)?;
    if coefs.iter().any(|c| !c.is_finite()) {
        return Err(InterpError::Singular);
    }
    let mut s = PiecewisePolynomial::zero();
    for (i, f) in space.basis.iter().enumerate() {
        if coefs[i] != 0.0 {
            s = s.add(&f.scale(coefs[i]));
        }
    }
    Ok(Interpolant {
        spline: s,
        condition,
    })
}

/// Worst top-derivative norm over random elements of the space scaled to
/// stay below the generating spline's derivative at the interpolation nodes.
/// The derivative `φ'` is the ideal spline of the derived class and the
/// prescribed zeros of `φ` interlace its own zeros, so any such element must
/// satisfy `‖s^(q)‖_∞ ≤ 1`.
pub fn scaled_top_norm_bound(
    space: &SplineSpace,
    phi: &IdealSpline,
    trials: u32,
    seed: u64,
) -> f64 {
    use rand::{Rng, SeedableRng};
    let q = space.pattern.order as usize;
    let phi_prime = phi.body.derivative();
    let targets: Vec<f64> = phi
        .zeros
        .iter()
        .map(|&u| phi_prime.evaluate(u, 0).abs())
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut s = PiecewisePolynomial::zero();
        for f in &space.basis {
            s = s.add(&f.scale(rng.random_range(-1.0..1.0)));
        }
        let kappa = phi
            .zeros
            .iter()
            .zip(targets.iter())
            .map(|(&u, &target)| target / s.evaluate(u, 0).abs().max(1e-300))
            .fold(f64::INFINITY, f64::min);
        if !kappa.is_finite() || kappa <= 0.0 {
            continue;
        }
        worst = worst.max(s.scale(kappa * (1.0 - 1e-13)).sup_norm(q).0);
    }
    worst
}

/// Weights of the optimal linear method at `tau`: the recovery of data `v`
/// is `Σ w_k v_k`, the value at `tau` of the interpolant of `v`.
pub fn method_weights(
    space: &SplineSpace,
    nodes: &[f64],
    tau: f64,
) -> Result<Vec<f64>, InterpError> {
    check_nodes(space, nodes)?;
    let a = collocation_matrix(space, nodes);
    let rhs = DVector::from_fn(space.dim(), |i, _| space.basis[i].evaluate(tau, 0));
    let w = a
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or(InterpError::Singular)?;
    Ok(w.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{sample_member, ClassSpec};
    use crate::ideal::{solve, SolverOptions};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn euler_space() -> (crate::ideal::IdealSpline, SplineSpace) {
        let spec = ClassSpec::rm1(2, 10.0).unwrap();
        let out = solve(&[0.0, PI], &spec, &SolverOptions::default()).unwrap();
        let space = SplineSpace::from_ideal(&out.spline).unwrap();
        (out.spline, space)
    }

    #[test]
    fn euler_pattern_has_no_clamps_and_dimension_two() {
        let (phi, space) = euler_space();
        let pattern = pattern_from_ideal(&phi);
        assert_eq!(pattern.kind, PatternKind::SingleConstant);
        assert!(pattern.clamps.iter().all(|&c| !c));
        assert_eq!(space.dim(), 2);
    }

    #[test]
    fn truncated_pattern_flags_plateau_knots() {
        let spec = ClassSpec::rm1(2, 1.0).unwrap();
        let out = solve(&[0.0, PI], &spec, &SolverOptions::default()).unwrap();
        let pattern = pattern_from_ideal(&out.spline);
        assert!(
            pattern.clamps.iter().all(|&c| c),
            "clamps: {:?}",
            pattern.clamps
        );
        let space = build_space(&pattern).unwrap();
        assert_eq!(space.dim(), 2);
    }

    #[test]
    fn pattern_intervals_tile_the_period() {
        let (phi, _) = euler_space();
        let pattern = pattern_from_ideal(&phi);
        let mut total = 0.0;
        for k in 0..pattern.two_n() {
            let next = if k + 1 < pattern.two_n() {
                pattern.knots[k + 1]
            } else {
                pattern.knots[0] + PERIOD
            };
            total += next - pattern.knots[k];
        }
        assert_abs_diff_eq!(total, PERIOD, epsilon = 1e-12);
    }

    #[test]
    fn homogeneous_interpolation_is_zero() {
        let (phi, space) = euler_space();
        let s = interpolate(&space, &phi.zeros, &[0.0, 0.0]).unwrap();
        assert!(s.spline.sup_norm(0).0 <= 1e-10);
        assert!(s.condition.is_finite());
    }

    #[test]
    fn interpolating_phi_values_gives_zero() {
        let (phi, space) = euler_space();
        let values: Vec<f64> = phi.zeros.iter().map(|&u| phi.body.evaluate(u, 0)).collect();
        let s = interpolate(&space, &phi.zeros, &values).unwrap();
        assert!(s.spline.sup_norm(0).0 <= 1e-8);
    }

    #[test]
    fn interpolation_matches_samples_at_nodes() {
        let spec = ClassSpec::rm2(3, 1.0).unwrap();
        let nodes = [0.5, 2.0, 3.7, 5.2];
        let out = solve(&nodes, &spec, &SolverOptions::default()).unwrap();
        let space = SplineSpace::from_ideal(&out.spline).unwrap();
        assert_eq!(space.dim(), 4);
        for seed in 0..5 {
            let x = sample_member(&spec, seed, 2);
            let values: Vec<f64> = nodes.iter().map(|&u| x.body.evaluate(u, 0)).collect();
            let s = interpolate(&space, &nodes, &values).unwrap();
            for (u, v) in nodes.iter().zip(values.iter()) {
                assert_abs_diff_eq!(s.spline.evaluate(*u, 0), *v, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn basis_is_periodic_to_order_minus_one() {
        let spec = ClassSpec::rm2(3, 1.0).unwrap();
        let nodes = [0.5, 2.0, 3.7, 5.2];
        let out = solve(&nodes, &spec, &SolverOptions::default()).unwrap();
        let space = SplineSpace::from_ideal(&out.spline).unwrap();
        let q = space.pattern.order as usize;
        for f in &space.basis {
            for m in 0..q {
                let a = f.evaluate(0.0, m);
                let b = f.eval_left(PERIOD, m);
                assert!(
                    (a - b).abs() <= 1e-10 * (1.0 + a.abs()),
                    "order {m}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn weights_reproduce_data_at_nodes() {
        let (phi, space) = euler_space();
        let w = method_weights(&space, &phi.zeros, phi.zeros[1]).unwrap();
        assert_abs_diff_eq!(w[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn euler_midpoint_weights_are_half_half() {
        let (phi, space) = euler_space();
        let w = method_weights(&space, &phi.zeros, PI / 2.0).unwrap();
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn recovery_is_linear() {
        let (phi, space) = euler_space();
        let tau = 1.234;
        let w = method_weights(&space, &phi.zeros, tau).unwrap();
        let v1 = [0.7, -0.2];
        let v2 = [-0.1, 0.9];
        let alpha = 1.7;
        let combined: Vec<f64> = v1
            .iter()
            .zip(v2.iter())
            .map(|(a, b)| alpha * a + b)
            .collect();
        let apply = |v: &[f64]| -> f64 { w.iter().zip(v.iter()).map(|(w, v)| w * v).sum() };
        assert_abs_diff_eq!(
            apply(&combined),
            alpha * apply(&v1) + apply(&v2),
            epsilon = 1e-10
        );
    }

    #[test]
    fn clipped_pattern_supports_tile_without_overlap() {
        // active N-clip with a knot at the wraparound: knots and active
        // lengths disagree at residual scale, the snapped pattern must tile
        let spec = ClassSpec::rm1m2(3, 10.0, 1.0).unwrap();
        let out = solve(&[0.0, PI], &spec, &SolverOptions::default()).unwrap();
        let pattern = pattern_from_ideal(&out.spline);
        assert_eq!(pattern.kind, PatternKind::PairedEdges);
        assert!(pattern
            .betas
            .iter()
            .zip(pattern.alphas.iter())
            .all(|(b, a)| b < a));
        let space = build_space(&pattern).unwrap();
        assert_eq!(space.dim(), 2);
        // the scaled-spline derivative bound must not see spurious spikes
        let bound = scaled_top_norm_bound(&space, &out.spline, 40, 1);
        assert!(bound <= 1.0 + 1e-8, "scaled top norm {bound}");
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let (_, space) = euler_space();
        assert!(matches!(
            interpolate(&space, &[0.0], &[1.0]),
            Err(InterpError::CountMismatch { .. })
        ));
        assert!(matches!(
            interpolate(&space, &[0.0, 1.0], &[1.0]),
            Err(InterpError::CountMismatch { .. })
        ));
    }
}
