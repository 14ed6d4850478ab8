//! Trigonometric polynomials in group angles with polynomial coefficients,
//! kept in the multi-angle Fourier basis.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;

use super::poly::owned_binop;
use super::{rat, ratio, ExprError, Poly, PolyRing, Rat};

/// One Fourier basis factor for a single angle. `Sin(0)` never occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Harmonic {
    Cos(u32),
    Sin(u32),
}

impl Harmonic {
    const ONE: Harmonic = Harmonic::Cos(0);

    fn sin_signed(k: i64) -> Option<(Harmonic, Rat)> {
        match k.signum() {
            0 => None,
            1 => Some((Harmonic::Sin(k as u32), rat(1))),
            _ => Some((Harmonic::Sin((-k) as u32), rat(-1))),
        }
    }

    fn product(self, other: Harmonic) -> Vec<(Harmonic, Rat)> {
        use Harmonic::*;
        if self == Self::ONE {
            return vec![(other, rat(1))];
        }
        if other == Self::ONE {
            return vec![(self, rat(1))];
        }
        let half = ratio(1, 2);
        match (self, other) {
            (Cos(p), Cos(q)) => vec![(Cos(p + q), half.clone()), (Cos(p.abs_diff(q)), half)],
            (Sin(p), Sin(q)) => vec![(Cos(p.abs_diff(q)), half.clone()), (Cos(p + q), -half)],
            (Sin(p), Cos(q)) | (Cos(q), Sin(p)) => {
                let mut out = vec![(Sin(p + q), half.clone())];
                if let Some((h, s)) = Harmonic::sin_signed(p as i64 - q as i64) {
                    out.push((h, s * half));
                }
                out
            }
        }
    }

    pub fn eval_f64(self, theta: f64) -> f64 {
        match self {
            Harmonic::Cos(k) => (k as f64 * theta).cos(),
            Harmonic::Sin(k) => (k as f64 * theta).sin(),
        }
    }
}

/// Integration range of one angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleDomain {
    /// `[0, 2π)`
    FullCircle,
    /// `[0, π]`
    HalfCircle,
}

impl AngleDomain {
    /// ∫ h over the domain as `c · π^e`.
    fn integrate(self, h: Harmonic) -> (Rat, u32) {
        match (self, h) {
            (AngleDomain::FullCircle, Harmonic::Cos(0)) => (rat(2), 1),
            (AngleDomain::FullCircle, _) => (Rat::zero(), 0),
            (AngleDomain::HalfCircle, Harmonic::Cos(0)) => (rat(1), 1),
            (AngleDomain::HalfCircle, Harmonic::Cos(_)) => (Rat::zero(), 0),
            (AngleDomain::HalfCircle, Harmonic::Sin(k)) if k % 2 == 1 => (ratio(2, k as i64), 0),
            (AngleDomain::HalfCircle, Harmonic::Sin(_)) => (Rat::zero(), 0),
        }
    }
}

/// Finite sum of Fourier monomials with coefficients in `ℚ[x]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    angles: Arc<[String]>,
    nvars: usize,
    terms: BTreeMap<Vec<Harmonic>, Poly>,
}

impl TrigPoly {
    pub fn zero(angles: Arc<[String]>, nvars: usize) -> Self {
        TrigPoly { angles, nvars, terms: BTreeMap::new() }
    }

    pub fn from_poly(p: Poly, angles: Arc<[String]>) -> Self {
        let nvars = p.nvars();
        let mut t = Self::zero(angles, nvars);
        let key = vec![Harmonic::ONE; t.angles.len()];
        t.add_term(key, p);
        t
    }

    pub fn constant(c: Rat, angles: Arc<[String]>, nvars: usize) -> Self {
        Self::from_poly(Poly::constant(c, nvars), angles)
    }

    pub fn harmonic(angle: usize, h: Harmonic, angles: Arc<[String]>, nvars: usize) -> Self {
        let mut key = vec![Harmonic::ONE; angles.len()];
        assert!(angle < key.len(), "angle index out of range");
        let mut t = Self::zero(angles, nvars);
        if h == Harmonic::Sin(0) {
            return t;
        }
        key[angle] = h;
        t.add_term(key, Poly::one(nvars));
        t
    }

    pub fn cos(angle: usize, angles: Arc<[String]>, nvars: usize) -> Self {
        Self::harmonic(angle, Harmonic::Cos(1), angles, nvars)
    }

    pub fn sin(angle: usize, angles: Arc<[String]>, nvars: usize) -> Self {
        Self::harmonic(angle, Harmonic::Sin(1), angles, nvars)
    }

    pub fn angles(&self) -> &Arc<[String]> {
        &self.angles
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Harmonic], &Poly)> {
        self.terms.iter().map(|(k, p)| (k.as_slice(), p))
    }

    /// The coefficient polynomial when no angle occurs.
    pub fn angle_free(&self) -> Option<Poly> {
        match self.terms.len() {
            0 => Some(Poly::zero(self.nvars)),
            1 => {
                let (k, p) = self.terms.iter().next().expect("one term");
                k.iter().all(|&h| h == Harmonic::ONE).then(|| p.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, key: Vec<Harmonic>, p: Poly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(p);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &p;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &TrigPoly) {
        assert_eq!(self.angles, other.angles, "angle variables differ");
        assert_eq!(self.nvars, other.nvars, "coefficient ring mismatch");
    }

    pub fn scale_poly(&self, p: &Poly) -> TrigPoly {
        let mut out = TrigPoly::zero(self.angles.clone(), self.nvars);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * p);
        }
        out
    }

    pub fn derivative_angle(&self, angle: usize) -> TrigPoly {
        let mut out = TrigPoly::zero(self.angles.clone(), self.nvars);
        for (k, c) in &self.terms {
            let (h, s) = match k[angle] {
                Harmonic::Cos(0) => continue,
                Harmonic::Cos(n) => (Harmonic::Sin(n), -rat(n as i64)),
                Harmonic::Sin(n) => (Harmonic::Cos(n), rat(n as i64)),
            };
            let mut nk = k.clone();
            nk[angle] = h;
            out.add_term(nk, c.scale(&s));
        }
        out
    }

    pub fn derivative_var(&self, v: usize) -> TrigPoly {
        let mut out = TrigPoly::zero(self.angles.clone(), self.nvars);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.derivative(v));
        }
        out
    }

    /// Value with all angles set to zero.
    pub fn at_zero_angles(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (k, c) in &self.terms {
            if k.iter().all(|h| matches!(h, Harmonic::Cos(_))) {
                out = &out + c;
            }
        }
        out
    }

    pub fn eval_f64(&self, point: &[f64], angles: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let w: f64 = k.iter().zip(angles).map(|(h, &t)| h.eval_f64(t)).product();
                w * c.eval_f64(point)
            })
            .sum()
    }
}

impl PolyRing for TrigPoly {
    type Ctx = (Arc<[String]>, usize);
    fn zero(ctx: &Self::Ctx) -> Self {
        TrigPoly::zero(ctx.0.clone(), ctx.1)
    }
    fn one(ctx: &Self::Ctx) -> Self {
        TrigPoly::constant(rat(1), ctx.0.clone(), ctx.1)
    }
    fn from_rat(c: Rat, ctx: &Self::Ctx) -> Self {
        TrigPoly::constant(c, ctx.0.clone(), ctx.1)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
}

fn key_product(a: &[Harmonic], b: &[Harmonic]) -> Vec<(Vec<Harmonic>, Rat)> {
    let mut acc: Vec<(Vec<Harmonic>, Rat)> = vec![(Vec::with_capacity(a.len()), rat(1))];
    for (&ha, &hb) in a.iter().zip(b) {
        let parts = ha.product(hb);
        let mut next = Vec::with_capacity(acc.len() * parts.len());
        for (k, c) in &acc {
            for (h, s) in &parts {
                let mut nk = k.clone();
                nk.push(*h);
                next.push((nk, c * s));
            }
        }
        acc = next;
    }
    acc
}

impl<'a> Add<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        self.check_compatible(rhs);
        let mut out = TrigPoly::zero(self.angles.clone(), self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let prod = ca * cb;
                for (k, s) in key_product(ka, kb) {
                    out.add_term(k, prod.scale(&s));
                }
            }
        }
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly {
            angles: self.angles.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

owned_binop!(Add, add, TrigPoly);
owned_binop!(Sub, sub, TrigPoly);
owned_binop!(Mul, mul, TrigPoly);

/// Normalized measure on the angle torus:
/// `scale · density(θ) · π^(-inv_pi_power) dθ` over the product of `domains`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleMeasure {
    density: TrigPoly,
    scale: Rat,
    inv_pi_power: u32,
    domains: Vec<AngleDomain>,
}

impl AngleMeasure {
    /// Builds the measure, requiring total mass 1. The density must have
    /// constant (zero-variable) coefficients.
    pub fn new(density: TrigPoly, scale: Rat, inv_pi_power: u32, domains: Vec<AngleDomain>) -> Result<Self, ExprError> {
        assert_eq!(density.nvars, 0, "density coefficients must be constants");
        assert_eq!(density.angles.len(), domains.len(), "one domain per angle");
        let m = AngleMeasure { density, scale, inv_pi_power, domains };
        let one = TrigPoly::constant(rat(1), m.density.angles.clone(), 0);
        match integrate_raw(&one, &m) {
            Ok(mass) if mass.is_one() => Ok(m),
            Ok(mass) => Err(ExprError::NonNormalizedWeight(mass.display(&[]).to_string())),
            Err(ExprError::IrrationalIntegral(e)) => Err(ExprError::NonNormalizedWeight(format!("a multiple of pi^{e}"))),
            Err(e) => Err(e),
        }
    }

    /// Normalized Lebesgue measure on `[0,2π)^k`.
    pub fn uniform(angles: Arc<[String]>) -> Self {
        let k = angles.len();
        let density = TrigPoly::constant(rat(1), angles, 0);
        let scale = Rat::new(1.into(), num_bigint::BigInt::from(2).pow(k as u32));
        Self::new(density, scale, k as u32, vec![AngleDomain::FullCircle; k]).expect("uniform measure is normalized")
    }

    /// Haar measure of SO(3) in z-x-z Euler angles `(α, β, γ)`: `sin β / (8π²)`.
    pub fn so3_euler(angles: Arc<[String]>) -> Self {
        assert_eq!(angles.len(), 3, "Euler angles");
        let density = TrigPoly::sin(1, angles, 0);
        let domains = vec![AngleDomain::FullCircle, AngleDomain::HalfCircle, AngleDomain::FullCircle];
        Self::new(density, ratio(1, 8), 2, domains).expect("Haar measure is normalized")
    }

    pub fn angles(&self) -> &Arc<[String]> {
        &self.density.angles
    }

    pub fn domains(&self) -> &[AngleDomain] {
        &self.domains
    }

    pub fn density(&self) -> &TrigPoly {
        &self.density
    }

    /// Density value at the given angles including all constant factors.
    pub fn weight_f64(&self, angles: &[f64]) -> f64 {
        let s = super::rat_to_f64(&self.scale);
        s * self.density.eval_f64(&[], angles) / std::f64::consts::PI.powi(self.inv_pi_power as i32)
    }
}

fn integrate_raw(f: &TrigPoly, m: &AngleMeasure) -> Result<Poly, ExprError> {
    assert_eq!(f.angles, m.density.angles, "angle variables differ");
    let mut by_power: BTreeMap<i64, Poly> = BTreeMap::new();
    for (kf, cf) in &f.terms {
        for (kd, cd) in &m.density.terms {
            let cd = cd.constant_value().expect("constant density");
            for (k, s) in key_product(kf, kd) {
                let mut value = &s * &cd * &m.scale;
                let mut power = -(m.inv_pi_power as i64);
                for (h, dom) in k.iter().zip(&m.domains) {
                    let (c, e) = dom.integrate(*h);
                    value *= c;
                    power += e as i64;
                    if value.is_zero() {
                        break;
                    }
                }
                if value.is_zero() {
                    continue;
                }
                let entry = by_power.entry(power).or_insert_with(|| Poly::zero(f.nvars));
                *entry = &*entry + &cf.scale(&value);
            }
        }
    }
    let mut result = Poly::zero(f.nvars);
    for (power, p) in by_power {
        if p.is_zero() {
            continue;
        }
        if power != 0 {
            return Err(ExprError::IrrationalIntegral(power));
        }
        result = p;
    }
    Ok(result)
}

/// Exact value of `∫ f dμ` over the angle torus.
pub fn trig_integrate(f: &TrigPoly, measure: &AngleMeasure) -> Result<Poly, ExprError> {
    integrate_raw(f, measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Arc<[String]> {
        Arc::from(vec!["t".to_string()])
    }

    #[test]
    fn fourier_orthogonality() {
        let m = AngleMeasure::uniform(theta());
        let c = TrigPoly::cos(0, theta(), 0);
        let s = TrigPoly::sin(0, theta(), 0);
        assert_eq!(trig_integrate(&(&c * &c), &m).unwrap(), Poly::constant(ratio(1, 2), 0));
        assert!(trig_integrate(&(&c * &s), &m).unwrap().is_zero());
    }

    #[test]
    fn rotated_square_averages_to_half_norm() {
        // (x cos t - y sin t)^2 averages to (x^2 + y^2)/2
        let a = theta();
        let x = TrigPoly::from_poly(Poly::var(0, 2), a.clone());
        let y = TrigPoly::from_poly(Poly::var(1, 2), a.clone());
        let u = &(&x * &TrigPoly::cos(0, a.clone(), 2)) - &(&y * &TrigPoly::sin(0, a.clone(), 2));
        let avg = trig_integrate(&(&u * &u), &AngleMeasure::uniform(a)).unwrap();
        let expected = (&Poly::var(0, 2).pow(2) + &Poly::var(1, 2).pow(2)).scale(&ratio(1, 2));
        assert_eq!(avg, expected);
    }

    #[test]
    fn pythagorean_identity_normalizes() {
        let a = theta();
        let c = TrigPoly::cos(0, a.clone(), 1);
        let s = TrigPoly::sin(0, a.clone(), 1);
        let one = &(&c * &c) + &(&s * &s);
        assert_eq!(one.angle_free(), Some(Poly::one(1)));
        assert_eq!(c.derivative_angle(0), -&s);
    }

    #[test]
    fn weights_must_be_normalized() {
        let a = theta();
        let density = TrigPoly::constant(rat(1), a.clone(), 0);
        assert!(matches!(
            AngleMeasure::new(density.clone(), rat(1), 1, vec![AngleDomain::FullCircle]),
            Err(ExprError::NonNormalizedWeight(_))
        ));
        assert!(matches!(
            AngleMeasure::new(density, rat(1), 0, vec![AngleDomain::FullCircle]),
            Err(ExprError::NonNormalizedWeight(_))
        ));
        let e: Arc<[String]> = Arc::from(vec!["a".to_string(), "b".to_string(), "c".to_string()]);
        let m = AngleMeasure::so3_euler(e.clone());
        let cb = TrigPoly::cos(1, e.clone(), 0);
        // E[cos^2 beta] = 1/3 under Haar
        assert_eq!(trig_integrate(&(&cb * &cb), &m).unwrap(), Poly::constant(ratio(1, 3), 0));
    }

    #[test]
    fn half_circle_sine_integrals() {
        assert_eq!(AngleDomain::HalfCircle.integrate(Harmonic::Sin(3)), (ratio(2, 3), 0));
        assert_eq!(AngleDomain::HalfCircle.integrate(Harmonic::Sin(2)).0, Rat::zero());
        assert_eq!(AngleDomain::HalfCircle.integrate(Harmonic::Cos(0)), (rat(1), 1));
    }
}
