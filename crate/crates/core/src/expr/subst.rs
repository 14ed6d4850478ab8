use std::collections::BTreeMap;

use super::{gcd, trig_integrate, AngleMeasure, Chart, ExprError, Poly, RatFn, TrigPoly};

/// Value bound to a coordinate during substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Rat(RatFn),
    Trig(TrigPoly),
}

/// Trigonometric numerator over an angle-free polynomial denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigFraction {
    pub num: TrigPoly,
    pub den: Poly,
}

impl TrigFraction {
    fn reduced(num: TrigPoly, den: Poly) -> Self {
        let mut g = den.clone();
        for (_, c) in num.terms() {
            if g.is_constant() {
                break;
            }
            g = gcd(&g, c);
        }
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            let divided = num.terms().fold(TrigPoly::zero(num.angles().clone(), num.nvars()), |acc, (k, c)| {
                let q = c.div_exact(&g).expect("gcd divides");
                let mut term = TrigPoly::from_poly(q, num.angles().clone());
                for (i, h) in k.iter().enumerate() {
                    term = &term * &TrigPoly::harmonic(i, *h, num.angles().clone(), num.nvars());
                }
                &acc + &term
            });
            (divided, den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading_coefficient();
        let inv = lc.recip();
        TrigFraction { num: num.scale_poly(&Poly::constant(inv.clone(), den.nvars())), den: den.scale(&inv) }
    }

    /// Exact integral against a normalized angle measure.
    pub fn integrate(&self, measure: &AngleMeasure) -> Result<RatFn, ExprError> {
        let top = trig_integrate(&self.num, measure)?;
        RatFn::new(top, self.den.clone())
    }

    pub fn eval_f64(&self, point: &[f64], angles: &[f64]) -> f64 {
        self.num.eval_f64(point, angles) / self.den.eval_f64(point)
    }
}

/// Result of [`substitute`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Substituted {
    Rat(RatFn),
    Trig(TrigFraction),
}

impl RatFn {
    /// Composition with trigonometric polynomials. The composed denominator
    /// must not depend on the angles.
    pub fn compose_trig(&self, values: &[TrigPoly]) -> Result<TrigFraction, ExprError> {
        let first = values.first().ok_or_else(|| ExprError::ChartMismatch("no bindings".into()))?;
        let ctx = (first.angles().clone(), first.nvars());
        let num = self.numer().compose(values, &ctx);
        let den = self.denom().compose(values, &ctx);
        if den.is_zero() {
            return Err(ExprError::ZeroDenominatorAfterSubstitution);
        }
        let den = den.angle_free().ok_or(ExprError::AngleDependentDenominator)?;
        Ok(TrigFraction::reduced(num, den))
    }
}

/// Substitutes a value for every coordinate of `chart` in `f`.
pub fn substitute(f: &RatFn, chart: &Chart, bindings: &BTreeMap<String, Binding>) -> Result<Substituted, ExprError> {
    if f.nvars() != chart.dim() {
        return Err(ExprError::ChartMismatch(format!(
            "function has {} variables, chart {} has {}",
            f.nvars(),
            chart.name(),
            chart.dim()
        )));
    }
    for name in bindings.keys() {
        chart.require_index(name)?;
    }
    let mut values = Vec::with_capacity(chart.dim());
    for c in chart.coords() {
        let b = bindings.get(c).ok_or_else(|| ExprError::ChartMismatch(format!("coordinate {c} is not bound")))?;
        values.push(b);
    }
    let trig_ctx = values.iter().find_map(|b| match b {
        Binding::Trig(t) => Some((t.angles().clone(), t.nvars())),
        Binding::Rat(_) => None,
    });
    match trig_ctx {
        None => {
            let rats: Vec<RatFn> = values
                .iter()
                .map(|b| match b {
                    Binding::Rat(r) => r.clone(),
                    Binding::Trig(_) => unreachable!(),
                })
                .collect();
            let nv = rats.first().map(RatFn::nvars).unwrap_or(0);
            if rats.iter().any(|r| r.nvars() != nv) {
                return Err(ExprError::ChartMismatch("bindings live on different charts".into()));
            }
            f.compose(&rats).map(Substituted::Rat)
        }
        Some((angles, nv)) => {
            let mut trig = Vec::with_capacity(values.len());
            for b in values {
                let t = match b {
                    Binding::Trig(t) => t.clone(),
                    Binding::Rat(r) => match r.as_poly() {
                        Some(p) => TrigPoly::from_poly(p.clone(), angles.clone()),
                        None => return Err(ExprError::ChartMismatch("rational binding mixed with angle bindings".into())),
                    },
                };
                if t.angles() != &angles || t.nvars() != nv {
                    return Err(ExprError::ChartMismatch("bindings live on different charts".into()));
                }
                trig.push(t);
            }
            f.compose_trig(&trig).map(Substituted::Trig)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn rotation_preserves_norm() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let f = parse_expr("x^2 + y^2", &c).unwrap();
        let a: Arc<[String]> = Arc::from(vec!["t".to_string()]);
        let x = TrigPoly::from_poly(Poly::var(0, 2), a.clone());
        let y = TrigPoly::from_poly(Poly::var(1, 2), a.clone());
        let (co, si) = (TrigPoly::cos(0, a.clone(), 2), TrigPoly::sin(0, a.clone(), 2));
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), Binding::Trig(&(&x * &co) - &(&y * &si)));
        b.insert("y".to_string(), Binding::Trig(&(&x * &si) + &(&y * &co)));
        let Substituted::Trig(out) = substitute(&f, &c, &b).unwrap() else { panic!("expected trig") };
        assert_eq!(out.num.angle_free(), Some(f.numer().clone()));
        assert!(out.den.is_one());
    }

    #[test]
    fn stratum_embedding() {
        let quot = Chart::new("Q", &["f1", "f2", "delta", "sigma", "z1", "z2"]).unwrap();
        let psi = Chart::new("psi1", &["f1", "delta", "sigma", "z1", "z2"]).unwrap();
        let f2 = parse_expr("f2", &quot).unwrap();
        let mut b = BTreeMap::new();
        for (k, e) in
            [("f1", "f1"), ("f2", "(delta^2 + sigma^2)/f1"), ("delta", "delta"), ("sigma", "sigma"), ("z1", "z1"), ("z2", "z2")]
        {
            b.insert(k.to_string(), Binding::Rat(parse_expr(e, &psi).unwrap()));
        }
        let out = substitute(&f2, &quot, &b).unwrap();
        assert_eq!(out, Substituted::Rat(parse_expr("(sigma^2 + delta^2)/f1", &psi).unwrap()));
    }

    #[test]
    fn identity_and_errors() {
        let c = Chart::new("R3", &["x", "y", "z"]).unwrap();
        let z = parse_expr("z", &c).unwrap();
        let mut b: BTreeMap<String, Binding> =
            c.coords().iter().map(|n| (n.clone(), Binding::Rat(parse_expr(n, &c).unwrap()))).collect();
        assert_eq!(substitute(&z, &c, &b).unwrap(), Substituted::Rat(z.clone()));
        let inv = parse_expr("1/(x - y)", &c).unwrap();
        b.insert("y".into(), Binding::Rat(parse_expr("x", &c).unwrap()));
        assert_eq!(substitute(&inv, &c, &b), Err(ExprError::ZeroDenominatorAfterSubstitution));
        b.remove("z");
        assert!(matches!(substitute(&z, &c, &b), Err(ExprError::ChartMismatch(_))));
        b.insert("w".into(), Binding::Rat(z.clone()));
        assert!(matches!(substitute(&z, &c, &b), Err(ExprError::UnknownCoordinate { .. })));
    }
}
