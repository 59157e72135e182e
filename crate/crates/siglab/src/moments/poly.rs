//! Exact bivariate polynomials over the rationals, split along the diagonal.
//!
//! The Stratonovich moment recursion stays inside the ring of functions
//! `f(l, t)` that are polynomial with rational coefficients on each of the
//! regions `{l <= t}` and `{l > t}` and agree on the diagonal. Every
//! operation the recursion needs — scaling, addition, integration of either
//! argument from 0, and integration of the diagonal restriction — preserves
//! this representation, so all arithmetic is exact and floating point only
//! enters at final evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite `f64`.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Dense-keyed bivariate polynomial `sum c_{ab} l^a t^b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    coeffs: BTreeMap<(u32, u32), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.coeffs.insert((0, 0), c);
        }
        p
    }

    pub fn monomial(c: Rat, l_pow: u32, t_pow: u32) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.coeffs.insert((l_pow, t_pow), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            let entry = out.coeffs.entry(*k).or_insert_with(Rat::zero);
            *entry += v;
            if entry.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::default();
        for (k, v) in &self.coeffs {
            out.coeffs.insert(*k, v * c);
        }
        out
    }

    /// Antiderivative in the second argument: `int_0^t P(l, s) ds`.
    pub fn integrate_t(&self) -> Self {
        let mut out = Self::default();
        for (&(a, b), v) in &self.coeffs {
            out.coeffs
                .insert((a, b + 1), v / rat_int((b + 1) as i64));
        }
        out
    }

    /// Antiderivative in the first argument: `int_0^l P(s, t) ds`.
    pub fn integrate_l(&self) -> Self {
        let mut out = Self::default();
        for (&(a, b), v) in &self.coeffs {
            out.coeffs
                .insert((a + 1, b), v / rat_int((a + 1) as i64));
        }
        out
    }

    /// Diagonal restriction `P(s, s)` as a univariate polynomial in `s`
    /// (coefficients indexed by total degree).
    pub fn diagonal(&self) -> BTreeMap<u32, Rat> {
        let mut out: BTreeMap<u32, Rat> = BTreeMap::new();
        for (&(a, b), v) in &self.coeffs {
            let entry = out.entry(a + b).or_insert_with(Rat::zero);
            *entry += v;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Substitutes `t = l`, returning a polynomial in `l` alone.
    pub fn collapse_t_to_l(&self) -> Self {
        let mut out = Self::default();
        for (deg, v) in self.diagonal() {
            let entry = out.coeffs.entry((deg, 0)).or_insert_with(Rat::zero);
            *entry += v;
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    /// Substitutes `l = t`, returning a polynomial in `t` alone.
    pub fn collapse_l_to_t(&self) -> Self {
        let mut out = Self::default();
        for (deg, v) in self.diagonal() {
            let entry = out.coeffs.entry((0, deg)).or_insert_with(Rat::zero);
            *entry += v;
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    pub fn eval(&self, l: &Rat, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(a, b), v) in &self.coeffs {
            acc += v * pow_rat(l, a) * pow_rat(t, b);
        }
        acc
    }

    pub fn eval_f64(&self, l: f64, t: f64) -> f64 {
        self.eval(&rat_from_f64(l), &rat_from_f64(t))
            .to_f64()
            .expect("rational fits in f64")
    }
}

fn pow_rat(x: &Rat, n: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// Polynomial on each side of the diagonal; `le` is valid on `{l <= t}` and
/// `gt` on `{l > t}`, and the two agree on `l = t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseBiPoly {
    pub le: BiPoly,
    pub gt: BiPoly,
}

impl PiecewiseBiPoly {
    pub fn zero() -> Self {
        Self {
            le: BiPoly::zero(),
            gt: BiPoly::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            le: BiPoly::constant(Rat::one()),
            gt: BiPoly::constant(Rat::one()),
        }
    }

    /// The same polynomial on both regions.
    pub fn uniform(p: BiPoly) -> Self {
        Self {
            le: p.clone(),
            gt: p,
        }
    }

    /// `c (l min t)^k`.
    pub fn min_power(c: Rat, k: u32) -> Self {
        Self {
            le: BiPoly::monomial(c.clone(), k, 0),
            gt: BiPoly::monomial(c, 0, k),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            le: self.le.add(&other.le),
            gt: self.gt.add(&other.gt),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self {
            le: self.le.scale(c),
            gt: self.gt.scale(c),
        }
    }

    /// `h(l, t) = int_0^t f(l, s) ds`, integrating across the breakpoint at
    /// `s = l` when `t > l`.
    pub fn integrate_second(&self) -> Self {
        // s < l uses the gt piece of f, s >= l the le piece.
        let big_a = self.gt.integrate_t(); // int_0^t f_gt(l, s) ds
        let big_b = self.le.integrate_t(); // antiderivative of the le piece
        let gt = big_a.clone();
        let le = big_a
            .collapse_t_to_l()
            .add(&big_b)
            .add(&big_b.collapse_t_to_l().scale(&-Rat::one()));
        Self { le, gt }
    }

    /// `h(l, t) = int_0^l f(s, t) ds`, integrating across the breakpoint at
    /// `s = t` when `l > t`.
    pub fn integrate_first(&self) -> Self {
        // s <= t uses the le piece of f, s > t the gt piece.
        let big_c = self.le.integrate_l();
        let big_d = self.gt.integrate_l();
        let le = big_c.clone();
        let gt = big_c
            .collapse_l_to_t()
            .add(&big_d)
            .add(&big_d.collapse_l_to_t().scale(&-Rat::one()));
        Self { le, gt }
    }

    /// `h(l, t) = int_0^{l min t} f(s, s) ds`; requires the two pieces to
    /// agree on the diagonal.
    pub fn integrate_diagonal(&self) -> Self {
        debug_assert!(self.diagonal_agrees());
        let diag = self.le.diagonal();
        let mut le = BiPoly::zero();
        let mut gt = BiPoly::zero();
        for (deg, v) in diag {
            let c = v / rat_int((deg + 1) as i64);
            le = le.add(&BiPoly::monomial(c.clone(), deg + 1, 0));
            gt = gt.add(&BiPoly::monomial(c, 0, deg + 1));
        }
        Self { le, gt }
    }

    /// Exact diagonal agreement of the two pieces.
    pub fn diagonal_agrees(&self) -> bool {
        self.le.diagonal() == self.gt.diagonal()
    }

    pub fn eval(&self, l: &Rat, t: &Rat) -> Rat {
        if l <= t {
            self.le.eval(l, t)
        } else {
            self.gt.eval(l, t)
        }
    }

    pub fn eval_f64(&self, l: f64, t: f64) -> f64 {
        self.eval(&rat_from_f64(l), &rat_from_f64(t))
            .to_f64()
            .expect("rational fits in f64")
    }

    /// Rational value on the diagonal at `x`.
    pub fn eval_diag(&self, x: &Rat) -> Rat {
        self.le.eval(x, x)
    }

    /// Human-readable rendering used by reports: one term per monomial.
    pub fn render(&self) -> String {
        fn render_piece(p: &BiPoly) -> String {
            if p.is_zero() {
                return "0".to_string();
            }
            p.coeffs
                .iter()
                .map(|(&(a, b), c)| {
                    let mut s = format!("{}", c);
                    if c.is_positive() && !s.starts_with('+') {
                        s.insert(0, '+');
                    }
                    if a > 0 {
                        s.push_str(&format!("*l^{}", a));
                    }
                    if b > 0 {
                        s.push_str(&format!("*t^{}", b));
                    }
                    s
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        format!(
            "{{l<=t: {}; l>t: {}}}",
            render_piece(&self.le),
            render_piece(&self.gt)
        )
    }
}
