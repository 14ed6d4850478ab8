//! Multivariate gcd over ℚ by recursive primitive pseudo-remainder sequences.

use num_traits::One;

use super::{Monomial, Poly};

/// Greatest common divisor, normalized to leading coefficient 1 (the zero
/// polynomial only when both inputs are zero).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    assert_eq!(a.nvars(), b.nvars(), "polynomial ring mismatch");
    gcd_inner(a, b).monic()
}

/// Least common multiple with leading coefficient 1.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero(a.nvars());
    }
    let g = gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a.nterms() == 1 {
        return monomial_gcd(a, b);
    }
    if b.nterms() == 1 {
        return monomial_gcd(b, a);
    }
    if a == b {
        return a.clone();
    }
    let Some(v) = (0..n).find(|&v| a.involves(v) || b.involves(v)) else {
        return Poly::one(n);
    };
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_inner(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree_in(v) == 0 {
            // q is primitive in v with no v: a nonzero constant
            p = Poly::one(n);
            break;
        }
        let r = pseudo_remainder(&p, &q, v);
        p = q;
        q = if r.is_zero() { r } else { primitive_in(&r, v) };
    }
    let g = if p.degree_in(v) == 0 { Poly::one(n) } else { p.primitive_integer() };
    (&c * &g).primitive_integer()
}

fn monomial_gcd(m: &Poly, p: &Poly) -> Poly {
    let (mono, _) = m.leading().expect("nonzero");
    let mut exps = mono.exps().to_vec();
    for (t, _) in p.terms() {
        for (e, &f) in exps.iter_mut().zip(t.exps()) {
            *e = (*e).min(f);
        }
    }
    Poly::term(Monomial::new(exps), One::one())
}

/// gcd of the coefficients of `p` viewed as a polynomial in `x_v`.
fn content_in(p: &Poly, v: usize) -> Poly {
    let mut coeffs: Vec<Poly> = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(Poly::nterms);
    let mut g = Poly::zero(p.nvars());
    for c in &coeffs {
        g = gcd_inner(&g, c);
        if g.is_constant() {
            return Poly::one(p.nvars());
        }
    }
    g.primitive_integer()
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").primitive_integer()
}

/// Pseudo-remainder of `a` by `b` in `x_v`, up to factors free of `x_v`.
fn pseudo_remainder(a: &Poly, b: &Poly, v: usize) -> Poly {
    let n = a.nvars();
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc.last().expect("nonzero").clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).pop().expect("nonzero");
        let mut shift = vec![0; n];
        shift[v] = dr - db;
        let shifted = b.mul_monomial(&Monomial::new(shift), &One::one());
        r = &(&lb * &r) - &(&lr * &shifted);
        if !r.is_zero() {
            r = r.primitive_integer();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn v(i: usize) -> Poly {
        Poly::var(i, 3)
    }

    #[test]
    fn common_factor_is_recovered() {
        let f = &(&v(0) * &v(1)) - &Poly::one(3);
        let g = &(&v(0) + &v(2)).pow(2) + &v(1);
        let h = &v(2) - &v(1).scale(&rat(3));
        let a = &f * &g;
        let b = &f * &h;
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn coprime_inputs() {
        let a = &v(0).pow(2) + &v(1).pow(2);
        let b = &v(0) - &v(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_inputs() {
        let a = &(&v(0).pow(3) * &v(1)) + &(&v(0).pow(2) * &v(2));
        let b = &v(0).pow(2) * &v(1).pow(4);
        assert_eq!(gcd(&a, &b), v(0).pow(2));
    }

    #[test]
    fn multivariate_square_factor() {
        let s = &(&v(0).pow(2) + &v(1).pow(2)) - &v(2).pow(2);
        let a = &s.pow(2) * &(&v(0) + &Poly::one(3));
        let b = &s * &(&v(1) - &Poly::one(3));
        assert_eq!(gcd(&a, &b), s.monic());
        assert_eq!(lcm(&s, &s.pow(2)), s.pow(2).monic());
    }
}
