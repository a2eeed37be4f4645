//! Exact calculus for 2π-periodic piecewise polynomials.
//!
//! `PiecewisePolynomial` is the workhorse representation for every function
//! this crate manipulates: the integration chains, ideal splines and
//! interpolation splines are all exact piecewise polynomials on `[0, 2π)`.
//! Coefficients are stored in powers of `t - left_breakpoint` so short pieces
//! far from the origin stay well conditioned.

use crate::poly::Poly;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The fixed period of every function in this crate.
pub const PERIOD: f64 = std::f64::consts::TAU;

/// Absolute tolerance when deciding whether adjacent pieces join smoothly.
pub const JOIN_TOL: f64 = 1e-9;

/// Knots closer than this are merged on construction; solver output can
/// legitimately produce near-zero segments.
pub const COALESCE_TOL: f64 = 1e-12;

#[derive(Error, Debug)]
pub enum PiecewiseError {
    #[error("breakpoints must start at 0 and end at 2π, got [{0}, {1}]")]
    BadDomain(f64, f64),
    #[error("breakpoints must be strictly increasing")]
    NotIncreasing,
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCountMismatch {
        expected: usize,
        breakpoints: usize,
        got: usize,
    },
    #[error("non-finite breakpoint or coefficient")]
    NonFinite,
    #[error("segments do not tile the period (gap of {0:.3e} at t = {1:.6})")]
    BadTiling(f64, f64),
}

/// Exact periodic piecewise polynomial on `[0, 2π)`.
///
/// Immutable after construction; every operation returns a new value, so
/// sharing across threads is safe.
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    /// Strictly increasing, `breakpoints[0] == 0`, `breakpoints.last() == 2π`.
    breakpoints: Vec<f64>,
    /// `pieces[i]` lives on `[breakpoints[i], breakpoints[i+1]]` in local
    /// coordinates `s = t - breakpoints[i]`.
    pieces: Vec<Poly>,
    /// Highest derivative order that is continuous across all breakpoints and
    /// the 0 ↔ 2π wraparound; −1 means discontinuous, `i32::MAX` means the
    /// pieces agree to all representable orders.
    continuity_class: i32,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<Self, PiecewiseError> {
        if breakpoints.iter().any(|b| !b.is_finite())
            || pieces
                .iter()
                .any(|p| p.coeffs.iter().any(|c| !c.is_finite()))
        {
            return Err(PiecewiseError::NonFinite);
        }
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(PiecewiseError::PieceCountMismatch {
                expected: breakpoints.len().saturating_sub(1),
                breakpoints: breakpoints.len(),
                got: pieces.len(),
            });
        }
        let first = breakpoints[0];
        let last = *breakpoints.last().unwrap();
        if first.abs() > 1e-9 || (last - PERIOD).abs() > 1e-9 {
            return Err(PiecewiseError::BadDomain(first, last));
        }
        let mut breakpoints = breakpoints;
        breakpoints[0] = 0.0;
        *breakpoints.last_mut().unwrap() = PERIOD;
        if breakpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(PiecewiseError::NotIncreasing);
        }

        let (breakpoints, pieces) = coalesce(breakpoints, pieces);
        if breakpoints.len() < 2 {
            return Ok(Self::zero());
        }
        let continuity_class = continuity_of(&breakpoints, &pieces);
        Ok(PiecewisePolynomial {
            breakpoints,
            pieces,
            continuity_class,
        })
    }

    pub fn constant(c: f64) -> Self {
        PiecewisePolynomial {
            breakpoints: vec![0.0, PERIOD],
            pieces: vec![Poly::constant(c)],
            continuity_class: i32::MAX,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Assemble from consecutive segments `(length, poly)` laid out from the
    /// unrolled coordinate `start`; the segments must tile one full period.
    /// Each poly is local to its own segment start. Useful for constructions
    /// that are naturally phased: the result is wrapped into `[0, 2π)`.
    pub fn from_unrolled(start: f64, segments: &[(f64, Poly)]) -> Result<Self, PiecewiseError> {
        let total: f64 = segments.iter().map(|(len, _)| len).sum();
        if (total - PERIOD).abs() > 1e-9 {
            return Err(PiecewiseError::BadTiling(total - PERIOD, start));
        }
        let mut placed: Vec<(f64, f64, Poly)> = Vec::with_capacity(segments.len() + 1);
        let mut g = start;
        for (len, poly) in segments {
            let (len, poly) = (*len, poly);
            if len > 1e-15 {
                let s0 = g.rem_euclid(PERIOD);
                if s0 + len <= PERIOD + 1e-12 {
                    placed.push((s0, (s0 + len).min(PERIOD), poly.clone()));
                } else {
                    placed.push((s0, PERIOD, poly.clone()));
                    placed.push((0.0, s0 + len - PERIOD, poly.shift_origin(PERIOD - s0)));
                }
            }
            g += len;
        }
        placed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut breakpoints = Vec::with_capacity(placed.len() + 1);
        let mut pieces = Vec::with_capacity(placed.len());
        let mut cursor = 0.0;
        for (a, b, poly) in placed {
            if (a - cursor).abs() > 1e-9 {
                return Err(PiecewiseError::BadTiling(a - cursor, a));
            }
            breakpoints.push(cursor);
            pieces.push(poly);
            cursor = b;
        }
        breakpoints.push(PERIOD);
        Self::new(breakpoints, pieces)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece(&self, i: usize) -> &Poly {
        &self.pieces[i]
    }

    pub fn continuity_class(&self) -> i32 {
        self.continuity_class
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    fn piece_index(&self, t: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// Value of the `d`-th derivative at `t` (any real, reduced mod 2π).
    /// At breakpoints the right-limit convention applies; derivative orders
    /// above the piece degree give 0.
    pub fn evaluate(&self, t: f64, d: usize) -> f64 {
        let t = t.rem_euclid(PERIOD);
        let i = self.piece_index(t);
        self.pieces[i]
            .nth_derivative(d)
            .eval(t - self.breakpoints[i])
    }

    /// Left-limit of the `d`-th derivative at `t ∈ (0, 2π]`; `t ≤ 0` is
    /// interpreted as the wraparound point 2π.
    pub fn eval_left(&self, t: f64, d: usize) -> f64 {
        let mut t = t.rem_euclid(PERIOD);
        if t <= 0.0 {
            t = PERIOD;
        }
        let i = self
            .breakpoints
            .partition_point(|&b| b < t)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        self.pieces[i]
            .nth_derivative(d)
            .eval(t - self.breakpoints[i])
    }

    pub fn derivative(&self) -> Self {
        let pieces = self.pieces.iter().map(|p| p.derivative()).collect();
        Self::new(self.breakpoints.clone(), pieces).expect("derivative preserves structure")
    }

    pub fn nth_derivative(&self, d: usize) -> Self {
        let pieces = self.pieces.iter().map(|p| p.nth_derivative(d)).collect();
        Self::new(self.breakpoints.clone(), pieces).expect("derivative preserves structure")
    }

    /// Exact antiderivative `F` with `F(base) = 0`. `F` is periodic as a
    /// function only if `mean(self) = 0`; this is not enforced here.
    pub fn antiderivative(&self, base: f64) -> Self {
        let base = base.rem_euclid(PERIOD);
        let mut acc = 0.0;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let h = self.breakpoints[i + 1] - self.breakpoints[i];
            let mut anti = p.antiderivative();
            if anti.coeffs.is_empty() {
                anti.coeffs.push(0.0);
            }
            anti.coeffs[0] += acc;
            acc = anti.eval(h);
            pieces.push(anti);
        }
        // Shift so the antiderivative vanishes at the base point.
        let i = {
            let j = self.breakpoints.partition_point(|&b| b <= base);
            j.saturating_sub(1).min(pieces.len() - 1)
        };
        let offset = pieces[i].eval(base - self.breakpoints[i]);
        for p in &mut pieces {
            if p.coeffs.is_empty() {
                p.coeffs.push(0.0);
            }
            p.coeffs[0] -= offset;
        }
        Self::new(self.breakpoints.clone(), pieces).expect("antiderivative preserves structure")
    }

    /// Exact integral over one period.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| p.integral(self.breakpoints[i + 1] - self.breakpoints[i]))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / PERIOD
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.add(&Poly::constant(c)))
            .collect();
        Self::new(self.breakpoints.clone(), pieces).expect("constant shift preserves structure")
    }

    /// Remove the mean so the result integrates exactly to zero.
    pub fn subtract_mean(&self) -> Self {
        self.add_constant(-self.mean())
    }

    pub fn scale(&self, k: f64) -> Self {
        let pieces = self.pieces.iter().map(|p| p.scale(k)).collect();
        Self::new(self.breakpoints.clone(), pieces).expect("scaling preserves structure")
    }

    /// Insert extra breakpoints (values taken mod 2π) without changing the
    /// function.
    pub fn refine(&self, points: &[f64]) -> Self {
        let mut cuts: Vec<f64> = points
            .iter()
            .map(|t| t.rem_euclid(PERIOD))
            .filter(|&t| t > 0.0 && t < PERIOD)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len() + cuts.len());
        let mut pieces = Vec::with_capacity(self.pieces.len() + cuts.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            breakpoints.push(a);
            pieces.push(p.clone());
            for &c in cuts
                .iter()
                .filter(|&&c| c > a + COALESCE_TOL && c < b - COALESCE_TOL)
            {
                breakpoints.push(c);
                pieces.push(p.shift_origin(c - a));
            }
        }
        breakpoints.push(PERIOD);
        Self::new(breakpoints, pieces).expect("refinement preserves structure")
    }

    fn binary_op(&self, other: &Self, sign: f64) -> Self {
        // union partition, then locate each operand's piece by midpoint; this
        // stays consistent even when the two breakpoint sets nearly coincide
        let mut union: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        union.sort_by(|a, b| a.partial_cmp(b).unwrap());
        union.dedup_by(|a, b| (*a - *b).abs() < COALESCE_TOL);
        *union.last_mut().unwrap() = PERIOD;
        let localized = |f: &Self, a: f64, mid: f64| -> Poly {
            let i = f.piece_index(mid);
            f.pieces[i].shift_origin(a - f.breakpoints[i])
        };
        let pieces = union
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                localized(self, w[0], mid).add(&localized(other, w[0], mid).scale(sign))
            })
            .collect();
        Self::new(union, pieces).expect("binary op preserves structure")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary_op(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary_op(other, -1.0)
    }

    /// Exact max of `|f^(d)|` over the period together with its argmax,
    /// located through per-piece critical points and breakpoints.
    pub fn sup_norm(&self, d: usize) -> (f64, f64) {
        let mut best = (0.0f64, 0.0f64);
        for (i, p) in self.pieces.iter().enumerate() {
            let h = self.breakpoints[i + 1] - self.breakpoints[i];
            let q = p.nth_derivative(d);
            let mut consider = |s: f64| {
                let v = q.eval(s).abs();
                if v > best.0 {
                    best = (v, self.breakpoints[i] + s);
                }
            };
            consider(0.0);
            consider(h);
            for s in q.derivative().roots_in(h, 1e-12) {
                consider(s);
            }
        }
        best
    }

    /// `L_p` norm over the period. `p = ∞` delegates to [`sup_norm`]; `p = 1`
    /// splits each piece at its sign changes and integrates exactly; other
    /// exponents use per-piece Gauss–Legendre with subdivision until
    /// successive refinements agree to 1e−12 relative.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "L_p norm requires p ≥ 1, got {p}");
        if p.is_infinite() {
            return self.sup_norm(0).0;
        }
        if p == 1.0 {
            let mut total = 0.0;
            for (i, q) in self.pieces.iter().enumerate() {
                let h = self.breakpoints[i + 1] - self.breakpoints[i];
                let mut splits = vec![0.0];
                splits.extend(q.roots_in(h, 1e-12));
                splits.push(h);
                splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let anti = q.antiderivative();
                for w in splits.windows(2) {
                    total += (anti.eval(w[1]) - anti.eval(w[0])).abs();
                }
            }
            return total;
        }
        let mut total = 0.0;
        for (i, q) in self.pieces.iter().enumerate() {
            let h = self.breakpoints[i + 1] - self.breakpoints[i];
            let f = |s: f64| q.eval(s).abs().powf(p);
            total += adaptive_gauss(&f, 0.0, h, 0);
        }
        total.powf(1.0 / p)
    }

    /// `t,value` CSV rows sampled at `resolution` equispaced points.
    pub fn sample_csv(&self, resolution: usize) -> String {
        let mut text = String::from("t,value\n");
        for g in 0..resolution.max(1) {
            let t = PERIOD * g as f64 / resolution.max(1) as f64;
            text.push_str(&format!("{t},{}\n", self.evaluate(t, 0)));
        }
        text
    }

    /// Whether derivatives `0..=order` all agree across the 0 ↔ 2π wraparound
    /// within `tol`.
    pub fn is_periodic_to(&self, order: usize, tol: f64) -> bool {
        (0..=order).all(|d| {
            let a = self.evaluate(0.0, d);
            let b = self.eval_left(PERIOD, d);
            (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
        })
    }
}

fn coalesce(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> (Vec<f64>, Vec<Poly>) {
    let mut bp = Vec::with_capacity(breakpoints.len());
    let mut ps = Vec::with_capacity(pieces.len());
    bp.push(0.0);
    for (i, piece) in pieces.iter().enumerate() {
        let right = breakpoints[i + 1];
        let left = *bp.last().unwrap();
        if right - left < COALESCE_TOL {
            continue; // zero-length piece dropped, knot merged
        }
        // The kept piece may start slightly left of its declared origin.
        let shift = left - breakpoints[i];
        ps.push(if shift.abs() > 0.0 {
            piece.shift_origin(shift)
        } else {
            piece.clone()
        });
        bp.push(right);
    }
    if bp.len() >= 2 {
        *bp.last_mut().unwrap() = PERIOD;
    }
    (bp, ps)
}

fn continuity_of(breakpoints: &[f64], pieces: &[Poly]) -> i32 {
    let max_deg = pieces.iter().map(|p| p.degree()).max().unwrap_or(0);
    let mut class = i32::MAX;
    let n = pieces.len();
    for j in 0..n {
        // join between piece j (at its right end) and piece j+1 (at its left
        // end); j = n−1 is the wraparound join.
        let left = &pieces[j];
        let h = breakpoints[j + 1] - breakpoints[j];
        let right = &pieces[(j + 1) % n];
        let mut matched: i32 = -1;
        for d in 0..=max_deg {
            let a = left.nth_derivative(d).eval(h);
            let b = right.nth_derivative(d).eval(0.0);
            if (a - b).abs() <= JOIN_TOL + 1e-12 * a.abs().max(b.abs()) {
                matched = d as i32;
            } else {
                break;
            }
        }
        let this = if matched == max_deg as i32 {
            i32::MAX
        } else {
            matched
        };
        class = class.min(this);
    }
    class
}

/// Positive nodes and weights of the 16-point Gauss–Legendre rule on
/// `[-1, 1]`, computed once by Newton iteration on the Legendre recurrence.
fn gauss16_rule() -> &'static [(f64, f64); 8] {
    use std::sync::OnceLock;
    static RULE: OnceLock<[(f64, f64); 8]> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = [(0.0, 0.0); 8];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            for _ in 0..100 {
                // three-term recurrence for P_N and its derivative
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
            *slot = (x.abs(), 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn gauss16(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in gauss16_rule() {
        acc += w * (f(mid + half * x) + f(mid - half * x));
    }
    acc * half
}

fn adaptive_gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
    let whole = gauss16(f, a, b);
    let mid = 0.5 * (a + b);
    let split = gauss16(f, a, mid) + gauss16(f, mid, b);
    if (split - whole).abs() <= 1e-12 * split.abs().max(1e-300) || depth >= 28 {
        split
    } else {
        adaptive_gauss(f, a, mid, depth + 1) + adaptive_gauss(f, mid, b, depth + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct PiecewiseJson {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl Serialize for PiecewisePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PiecewiseJson {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.coeffs.clone()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewisePolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PiecewiseJson::deserialize(deserializer)?;
        PiecewisePolynomial::new(
            raw.breakpoints,
            raw.pieces.into_iter().map(Poly::new).collect(),
        )
        .map_err(D::Error::custom)
    }
}
