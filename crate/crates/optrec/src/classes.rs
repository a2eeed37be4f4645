//! Function classes bounded in several higher derivatives: membership
//! testing, random member sampling, and the derived pattern used by the
//! interpolation spline space.

use crate::piecewise::{PiecewisePolynomial, PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum ClassError {
    #[error("variant {variant:?} requires order r ≥ {min}, got {got}")]
    OrderTooSmall {
        variant: ClassVariant,
        min: u32,
        got: u32,
    },
    #[error("bound M must be positive, got {0}")]
    NonPositiveM(f64),
    #[error("bound N must be positive, got {0}")]
    NonPositiveN(f64),
    #[error("variant Rm1m2 requires the bound N")]
    MissingN,
    #[error("bound N is only meaningful for the Rm1m2 variant")]
    UnexpectedN,
    #[error("non-periodic input: derivatives 0..={0} must agree at 0 and 2π")]
    NonPeriodicInput(u32),
    #[error("input is not smooth enough: the class needs continuous derivatives up to order {required}, found continuity class {found}")]
    NotSmoothEnough { required: u32, found: i32 },
}

/// Which pair (or triple) of derivative orders the class constrains.
/// The top derivative `x^(r)` is always bounded by 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassVariant {
    /// `‖x^(r−1)‖_∞ ≤ M`, `‖x^(r)‖_∞ ≤ 1`
    Rm1,
    /// `‖x^(r−2)‖_∞ ≤ M`, `‖x^(r)‖_∞ ≤ 1`
    Rm2,
    /// `‖x^(r−2)‖_∞ ≤ M`, `‖x^(r−1)‖_∞ ≤ N`, `‖x^(r)‖_∞ ≤ 1`
    Rm1m2,
}

impl ClassVariant {
    pub fn min_order(self) -> u32 {
        match self {
            ClassVariant::Rm1 => 2,
            ClassVariant::Rm2 | ClassVariant::Rm1m2 => 3,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rm1" => Some(ClassVariant::Rm1),
            "rm2" => Some(ClassVariant::Rm2),
            "rm1m2" => Some(ClassVariant::Rm1m2),
            _ => None,
        }
    }
}

/// The governing parameters of a recovery problem: which class, its order
/// and its derivative bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub variant: ClassVariant,
    pub r: u32,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none", default)]
    pub n: Option<f64>,
}

impl ClassSpec {
    pub fn new(variant: ClassVariant, r: u32, m: f64, n: Option<f64>) -> Result<Self, ClassError> {
        if r < variant.min_order() {
            return Err(ClassError::OrderTooSmall {
                variant,
                min: variant.min_order(),
                got: r,
            });
        }
        if m.is_nan() || m <= 0.0 {
            return Err(ClassError::NonPositiveM(m));
        }
        match (variant, n) {
            (ClassVariant::Rm1m2, None) => return Err(ClassError::MissingN),
            (ClassVariant::Rm1m2, Some(n)) if n.is_nan() || n <= 0.0 => {
                return Err(ClassError::NonPositiveN(n))
            }
            (ClassVariant::Rm1 | ClassVariant::Rm2, Some(_)) => {
                return Err(ClassError::UnexpectedN)
            }
            _ => {}
        }
        Ok(ClassSpec { variant, r, m, n })
    }

    pub fn rm1(r: u32, m: f64) -> Result<Self, ClassError> {
        Self::new(ClassVariant::Rm1, r, m, None)
    }

    pub fn rm2(r: u32, m: f64) -> Result<Self, ClassError> {
        Self::new(ClassVariant::Rm2, r, m, None)
    }

    pub fn rm1m2(r: u32, m: f64, n: f64) -> Result<Self, ClassError> {
        Self::new(ClassVariant::Rm1m2, r, m, Some(n))
    }

    /// The constrained derivative orders with their bounds, ending with the
    /// top derivative bounded by 1.
    pub fn constrained_orders(&self) -> Vec<(u32, f64)> {
        match self.variant {
            ClassVariant::Rm1 => vec![(self.r - 1, self.m), (self.r, 1.0)],
            ClassVariant::Rm2 => vec![(self.r - 2, self.m), (self.r, 1.0)],
            ClassVariant::Rm1m2 => vec![
                (self.r - 2, self.m),
                (self.r - 1, self.n.expect("validated")),
                (self.r, 1.0),
            ],
        }
    }
}

/// A function known to lie inside its class; `margin` records how strictly
/// (`seminorm(body) ≤ margin ≤ 1`).
#[derive(Debug, Clone)]
pub struct ClassMember {
    pub body: PiecewisePolynomial,
    pub spec: ClassSpec,
    pub margin: f64,
}

/// Max over the constrained derivative orders of `‖x^(k)‖_∞ / bound_k`;
/// membership in the class is equivalent to a value ≤ 1.
pub fn seminorm(body: &PiecewisePolynomial, spec: &ClassSpec) -> Result<f64, ClassError> {
    let required = spec.r.saturating_sub(1);
    if !body.is_periodic_to(required as usize, 1e-7) {
        return Err(ClassError::NonPeriodicInput(required));
    }
    if body.continuity_class() < required as i32 {
        return Err(ClassError::NotSmoothEnough {
            required,
            found: body.continuity_class(),
        });
    }
    Ok(spec
        .constrained_orders()
        .into_iter()
        .map(|(k, bound)| body.sup_norm(k as usize).0 / bound)
        .fold(0.0, f64::max))
}

/// Grid-based seminorm estimate for arbitrary periodic callables. Derivatives
/// come from iterated central differences on a 4096-point grid with one
/// Richardson extrapolation step, so the result is approximate (useful for
/// spot checks, not certification).
pub fn seminorm_sampled(f: &dyn Fn(f64) -> f64, spec: &ClassSpec) -> f64 {
    const GRID: usize = 4096;
    let h = PERIOD / GRID as f64;
    let samples: Vec<f64> = (0..GRID).map(|i| f(i as f64 * h)).collect();

    let diff = |v: &[f64], stride: usize| -> Vec<f64> {
        let n = v.len();
        let step = 2.0 * h * stride as f64;
        (0..n)
            .map(|i| (v[(i + stride) % n] - v[(i + n - stride) % n]) / step)
            .collect()
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut result: f64 = 0.0;
    for (k, bound) in spec.constrained_orders() {
        let mut fine = samples.clone();
        let mut coarse = samples.clone();
        for _ in 0..k {
            fine = diff(&fine, 1);
            coarse = diff(&coarse, 2);
        }
        // Richardson: central differences have O(h^2) error.
        let extrapolated: Vec<f64> = fine
            .iter()
            .zip(coarse.iter())
            .map(|(a, b)| (4.0 * a - b) / 3.0)
            .collect();
        result = result.max(sup(&extrapolated) / bound);
    }
    result
}

/// Build a class member from a prescribed piecewise-constant top derivative:
/// remove its mean, antidifferentiate `r` times (removing means at each
/// intermediate level so every antiderivative is periodic), then rescale so
/// the seminorm is exactly `margin`.
pub fn member_from_top_derivative(
    interior_breaks: &[f64],
    values: &[f64],
    spec: &ClassSpec,
    margin: f64,
) -> ClassMember {
    assert_eq!(interior_breaks.len() + 1, values.len());
    let mut breakpoints = Vec::with_capacity(values.len() + 1);
    breakpoints.push(0.0);
    breakpoints.extend_from_slice(interior_breaks);
    breakpoints.push(PERIOD);
    let pieces = values
        .iter()
        .map(|&v| crate::poly::Poly::constant(v))
        .collect();
    let top = PiecewisePolynomial::new(breakpoints, pieces)
        .expect("sampler breakpoints are sorted in (0, 2π)");

    let mut x = top;
    for _ in 0..spec.r {
        x = x.subtract_mean().antiderivative(0.0);
    }
    let rho = seminorm(&x, spec).expect("constructed member is smooth and periodic");
    let body = if rho > 0.0 { x.scale(margin / rho) } else { x };
    ClassMember {
        body,
        spec: *spec,
        margin,
    }
}

/// Deterministic random member of the class with seminorm exactly 0.95.
/// `roughness` is the number of sign-change segments of the candidate top
/// derivative (the draw uses `2·roughness` pieces with alternating signs).
pub fn sample_member(spec: &ClassSpec, seed: u64, roughness: u32) -> ClassMember {
    assert!(roughness >= 1, "roughness must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = 2 * roughness as usize;

    let mut breaks = vec![0.0; pieces - 1];
    'outer: for _ in 0..200 {
        for b in breaks.iter_mut() {
            *b = rng.random_range(0.0..PERIOD);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let min_gap = std::iter::once(breaks[0])
            .chain(breaks.windows(2).map(|w| w[1] - w[0]))
            .chain(std::iter::once(PERIOD - breaks.last().unwrap()))
            .fold(f64::INFINITY, f64::min);
        if min_gap > 0.05 {
            break 'outer;
        }
    }

    let start_sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let values: Vec<f64> = (0..pieces)
        .map(|i| start_sign * if i % 2 == 0 { 1.0 } else { -1.0 } * rng.random_range(0.3..1.0))
        .collect();

    member_from_top_derivative(&breaks, &values, spec, 0.95)
}

/// Pattern descriptor for the derivative class `X' = {x' : x ∈ X}`: the same
/// variant with the order lowered by one and every constrained derivative
/// index shifted down accordingly. The interpolation space takes its concrete
/// knot pattern from the derivative of the ideal spline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedSpec {
    pub variant: ClassVariant,
    pub order: u32,
    pub m: f64,
    pub n: Option<f64>,
}

pub fn derived_pattern_spec(spec: &ClassSpec) -> DerivedSpec {
    DerivedSpec {
        variant: spec.variant,
        order: spec.r - 1,
        m: spec.m,
        n: spec.n,
    }
}
