use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic in chart coordinate order (the first coordinate is largest).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over ℚ in `nvars` variables.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(Rat::one(), nvars)
    }

    pub fn constant(c: Rat, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Self::constant(Rat::from_integer(BigInt::from(c)), nvars)
    }

    /// The coordinate function `x_i`.
    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::term(Monomial(e), Rat::one())
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let nvars = m.0.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    /// True when every term has the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[v] -= 1;
            out.add_term(nm, c * Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = rat_to_f64(c);
                for (x, &e) in point.iter().zip(&m.0) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes `values[i]` for `x_i` in any commutative ring.
    pub fn compose<R: PolyRing>(&self, values: &[R], ctx: &R::Ctx) -> R {
        assert_eq!(values.len(), self.nvars, "substitution arity mismatch");
        let mut cache: Vec<Vec<R>> = values.iter().map(|v| vec![R::one(ctx), v.clone()]).collect();
        let mut acc = R::zero(ctx);
        for (m, c) in &self.terms {
            let mut t = R::from_rat(c.clone(), ctx);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap().ring_mul(&values[i]);
                    powers.push(next);
                }
                t = t.ring_mul(&powers[e as usize]);
            }
            acc = acc.ring_add(&t);
        }
        acc
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&rm) {
                return None;
            }
            let qm = lm.quotient_of(&rm);
            let qc = &rc / &lc;
            rem = &rem - &divisor.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients as a univariate polynomial in `x_v`; entry `k` multiplies `x_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(self.nvars); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut nm = m.clone();
            nm.0[v] = 0;
            out[k].add_term(nm, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: usize, nvars: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                let mut nm = m.clone();
                nm.0[v] += k as u32;
                out.add_term(nm, a.clone());
            }
        }
        out
    }

    /// Scales so the leading (graded-lex) coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients with positive leading coefficient sign preserved.
    pub fn rational_content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rat::one();
        }
        Rat::new(num, den)
    }

    /// Integer-coefficient primitive representative with positive leading coefficient.
    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.rational_content();
        if self.leading_coefficient().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Reinterprets the polynomial with variables remapped: variable `i`
    /// becomes variable `map[i]` of an `nvars`-variable ring.
    pub fn remap(&self, map: &[usize], nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Minimal ring interface used for polynomial composition.
pub trait PolyRing: Clone {
    type Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rat(c: Rat, ctx: &Self::Ctx) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
}

impl PolyRing for Poly {
    type Ctx = usize;
    fn zero(ctx: &usize) -> Self {
        Poly::zero(*ctx)
    }
    fn one(ctx: &usize) -> Self {
        Poly::one(*ctx)
    }
    fn from_rat(c: Rat, ctx: &usize) -> Self {
        Poly::constant(c, *ctx)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl PolyRing for f64 {
    type Ctx = ();
    fn zero(_: &()) -> Self {
        0.0
    }
    fn one(_: &()) -> Self {
        1.0
    }
    fn from_rat(c: Rat, _: &()) -> Self {
        rat_to_f64(&c)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $f(self, rhs: $t) -> $t {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $f(self, rhs: &'a $t) -> $t {
                (&self).$f(rhs)
            }
        }
    };
}
pub(crate) use owned_binop;

owned_binop!(Add, add, Poly);
owned_binop!(Sub, sub, Poly);
owned_binop!(Mul, mul, Poly);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i, 3)
    }

    #[test]
    fn graded_lex_leading_term() {
        // x*y^2 (degree 3) beats x^2 (degree 2); x^2 beats x*y beats y^2
        let p = &(&x(0) * &x(0)) + &(&x(0) * &(&x(1) * &x(1)));
        assert_eq!(p.leading().unwrap().0.exps(), &[1, 2, 0]);
        let q = &(&(&x(1) * &x(1)) + &(&x(0) * &x(1))) + &(&x(0) * &x(0));
        let order: Vec<_> = q.terms().map(|(m, _)| m.exps().to_vec()).collect();
        assert_eq!(order, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0]]);
    }

    #[test]
    fn exact_division() {
        let a = &x(0) - &Poly::one(3);
        let b = &x(0) + &x(1);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!((&prod + &Poly::one(3)).div_exact(&a), None);
    }

    #[test]
    fn derivative_and_eval() {
        let p = &(&x(0) * &x(0)) + &(&x(1) * &x(2)).scale(&Rat::from_integer(3.into()));
        assert_eq!(p.derivative(0), x(0).scale(&Rat::from_integer(2.into())));
        let pt = [Rat::from_integer(2.into()), Rat::from_integer(1.into()), Rat::new(1.into(), 3.into())];
        assert_eq!(p.eval(&pt), Rat::from_integer(5.into()));
    }

    #[test]
    fn univariate_view_round_trips() {
        let p = &(&(&x(0) * &x(0)) * &x(1)) + &(&x(2) - &x(0));
        let cs = p.coeffs_in(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(Poly::from_coeffs_in(0, 3, &cs), p);
    }
}
