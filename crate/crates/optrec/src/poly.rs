//! Dense univariate polynomials in a shifted local basis.
//!
//! A `Poly` stores coefficients of `p(s) = c0 + c1*s + c2*s^2 + ...` where
//! `s = t - a` is the offset from the left endpoint of the piece it lives on.
//! Keeping pieces in local coordinates controls conditioning: pieces can be
//! short and sit far from the origin.

/// Polynomial in local coordinates, `coeffs[i]` multiplying `s^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `c0 + c1*s`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly::new(vec![c0, c1])
    }

    /// `c0 + c1*s + c2*s^2`
    pub fn quadratic(c0: f64, c1: f64, c2: f64) -> Self {
        Poly::new(vec![c0, c1, c2])
    }

    fn trim(&mut self) {
        while let Some(&c) = self.coeffs.last() {
            if c == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation at local coordinate `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Poly::new(coeffs)
    }

    pub fn nth_derivative(&self, d: usize) -> Poly {
        let mut p = self.clone();
        for _ in 0..d {
            if p.is_zero() {
                break;
            }
            p = p.derivative();
        }
        p
    }

    /// Antiderivative with zero constant term: `P(0) = 0`.
    pub fn antiderivative(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / (i + 1) as f64);
        }
        Poly::new(coeffs)
    }

    /// Exact integral over local `[0, h]`.
    pub fn integral(&self, h: f64) -> f64 {
        self.antiderivative().eval(h)
    }

    /// Re-expand around a new origin shifted by `delta`: returns `q` with
    /// `q(s) = p(s + delta)`.
    pub fn shift_origin(&self, delta: f64) -> Poly {
        if delta == 0.0 || self.is_zero() {
            return self.clone();
        }
        // Synthetic (Taylor) shift by repeated Horner steps; exact up to rounding.
        let n = self.coeffs.len();
        let mut c = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let (next, cur) = (c[j + 1], c[j]);
                c[j] = cur + delta * next;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly::new(coeffs)
    }

    /// All real roots in the closed local interval `[0, h]`, sorted and
    /// deduplicated. Found by recursive critical-point bracketing: the roots
    /// of `p'` split `[0, h]` into monotone runs, each of which holds at most
    /// one crossing located by bisection with a Newton polish.
    pub fn roots_in(&self, h: f64, tol: f64) -> Vec<f64> {
        if self.is_zero() || h <= 0.0 {
            return vec![];
        }
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return vec![];
        }
        match self.degree() {
            0 => vec![],
            1 => {
                let root = -self.coeffs[0] / self.coeffs[1];
                if (-tol..=h + tol).contains(&root) {
                    vec![root.clamp(0.0, h)]
                } else {
                    vec![]
                }
            }
            _ => {
                let mut nodes = vec![0.0];
                nodes.extend(self.derivative().roots_in(h, tol));
                nodes.push(h);
                nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut roots = Vec::new();
                for w in nodes.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if b - a < 1e-15 {
                        continue;
                    }
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    let cutoff = tol * scale;
                    if fa.abs() <= cutoff {
                        push_root(&mut roots, a, tol);
                    }
                    if fb.abs() <= cutoff {
                        push_root(&mut roots, b, tol);
                    }
                    if fa * fb < 0.0 {
                        push_root(&mut roots, self.bisect(a, b), tol);
                    }
                }
                roots
            }
        }
    }

    fn bisect(&self, mut a: f64, mut b: f64) -> f64 {
        let mut fa = self.eval(a);
        let deriv = self.derivative();
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            // Newton step from the midpoint when it stays inside the bracket.
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            let dm = deriv.eval(mid);
            if dm != 0.0 {
                let newton = mid - fm / dm;
                if newton > a && newton < b {
                    let fnw = self.eval(newton);
                    if fnw == 0.0 {
                        return newton;
                    }
                    if fa * fnw < 0.0 {
                        b = newton;
                    } else {
                        a = newton;
                        fa = fnw;
                    }
                    continue;
                }
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        0.5 * (a + b)
    }
}

fn push_root(roots: &mut Vec<f64>, r: f64, tol: f64) {
    if roots.iter().all(|&x| (x - r).abs() > tol) {
        roots.push(r);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
}
