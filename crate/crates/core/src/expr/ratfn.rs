use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::owned_binop;
use super::{gcd, ExprError, Poly, PolyRing, Rat};

/// Reduced quotient of polynomials. The denominator is nonzero, coprime to
/// the numerator and has graded-lex leading coefficient 1; zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZeroPolynomial);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return RatFn { num, den: Poly::one(n) };
        }
        if let Some(c) = den.constant_value() {
            return RatFn { num: num.scale(&c.recip()), den: Poly::one(n) };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Self::normalize(num, den)
    }

    /// Scales a coprime pair so the denominator is monic.
    fn normalize(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RatFn { num, den }
        } else {
            let inv = lc.recip();
            RatFn { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RatFn { num: p, den: Poly::one(n) }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Poly::one(nvars))
    }

    pub fn constant(c: Rat, nvars: usize) -> Self {
        Self::from_poly(Poly::constant(c, nvars))
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        Self::from_poly(Poly::var(i, nvars))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        if c.is_zero() {
            return RatFn::zero(self.nvars());
        }
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFn {
        self * &RatFn::from_poly(p.clone())
    }

    pub fn recip(&self) -> Result<RatFn, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZeroPolynomial);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &RatFn) -> Result<RatFn, ExprError> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: u32) -> RatFn {
        RatFn { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn derivative(&self, v: usize) -> RatFn {
        if self.is_polynomial() {
            return RatFn::from_poly(self.num.derivative(v));
        }
        let top = &(&self.num.derivative(v) * &self.den) - &(&self.num * &self.den.derivative(v));
        Self::reduce(top, self.den.pow(2))
    }

    /// Value at a rational point; `None` where the denominator vanishes.
    pub fn eval(&self, point: &[Rat]) -> Option<Rat> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    /// Composition with rational functions; errors when the composed
    /// denominator is identically zero.
    pub fn compose(&self, values: &[RatFn]) -> Result<RatFn, ExprError> {
        let nv = values.first().map(RatFn::nvars).unwrap_or(0);
        let num = self.num.compose(values, &nv);
        let den = self.den.compose(values, &nv);
        if den.is_zero() {
            return Err(ExprError::ZeroDenominatorAfterSubstitution);
        }
        num.checked_div(&den)
    }

    /// Rewrites in a ring with variables remapped (see [`Poly::remap`]).
    pub fn remap(&self, map: &[usize], nvars: usize) -> RatFn {
        RatFn::reduce(self.num.remap(map, nvars), self.den.remap(map, nvars))
    }

    /// Printable form using the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        RatFnDisplay { f: self, names }
    }
}

impl PolyRing for RatFn {
    type Ctx = usize;
    fn zero(ctx: &usize) -> Self {
        RatFn::zero(*ctx)
    }
    fn one(ctx: &usize) -> Self {
        RatFn::one(*ctx)
    }
    fn from_rat(c: Rat, ctx: &usize) -> Self {
        RatFn::constant(c, *ctx)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl<'a> Add<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFn::from_poly(&self.num + &rhs.num);
            }
            return RatFn::reduce(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return RatFn::reduce(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return RatFn::reduce(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        RatFn::reduce(num, &a * &rhs.den)
    }
}

impl<'a> Sub<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero(self.nvars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel so the product is already reduced
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFn::normalize(&n1 * &n2, &d1 * &d2)
    }
}

impl<'a> Div<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    /// Panics on division by zero; use [`RatFn::checked_div`] for a `Result`.
    fn div(self, rhs: &RatFn) -> RatFn {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

owned_binop!(Add, add, RatFn);
owned_binop!(Sub, sub, RatFn);
owned_binop!(Mul, mul, RatFn);
owned_binop!(Div, div, RatFn);

struct RatFnDisplay<'a> {
    f: &'a RatFn,
    names: &'a [String],
}

impl fmt::Display for RatFnDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RatFn { num, den } = self.f;
        if den.is_one() {
            return write_poly(f, num, self.names);
        }
        if num.nterms() > 1 {
            write!(f, "(")?;
            write_poly(f, num, self.names)?;
            write!(f, ")")?;
        } else {
            write_poly(f, num, self.names)?;
        }
        write!(f, "/")?;
        let single_power = den.nterms() == 1
            && den.leading().is_some_and(|(m, c)| c.is_one() && m.exps().iter().filter(|&&e| e > 0).count() == 1);
        if single_power {
            write_poly(f, den, self.names)
        } else {
            write!(f, "(")?;
            write_poly(f, den, self.names)?;
            write!(f, ")")
        }
    }
}

impl Poly {
    /// Printable form using the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { p: self, names }
    }
}

struct PolyDisplay<'a> {
    p: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.p, self.names)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, names: &[String]) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        match (i, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.is_one() {
            factors.push(abs.to_string());
        }
        for (k, &e) in m.exps().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names[k].clone()),
                _ => factors.push(format!("{}^{}", names[k], e)),
            }
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn v(i: usize) -> RatFn {
        RatFn::var(i, 2)
    }

    #[test]
    fn quotient_rule() {
        // d(x/y)/dy = -x/y^2
        let q = &v(0) / &v(1);
        let d = q.derivative(1);
        let expected = -(&v(0) / &v(1).pow(2));
        assert_eq!(d, expected);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(d.display(&names).to_string(), "-x/y^2");
    }

    #[test]
    fn denominators_are_monic_and_reduced() {
        let two = RatFn::constant(rat(2), 2);
        let f = &(&v(0) * &two) / &(&(&v(0) * &two) * &v(1));
        assert_eq!(f, RatFn::one(2) / v(1));
        let g = &v(0) / &(&v(1) * &RatFn::constant(rat(-3), 2));
        assert!(g.denom().leading_coefficient().is_one());
        assert_eq!(g.numer(), &Poly::var(0, 2).scale(&Rat::new((-1).into(), 3.into())));
    }

    #[test]
    fn sum_cancels_to_polynomial() {
        let a = &v(0) / &(&v(0) - &v(1));
        let b = &v(1) / &(&v(1) - &v(0));
        assert_eq!(&a + &b, RatFn::one(2));
    }
}
