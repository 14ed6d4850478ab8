//! Vector fields, one-forms and sections of `TM ⊕ T*M` with the pairing,
//! Lie derivatives and the Courant brackets.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_expr, Chart, ExprError, Rat, RatFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), CalculusError> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(CalculusError::ChartMismatch(a.to_string(), b.to_string()))
    }
}

fn check_len(chart: &Chart, comps: &[RatFn]) -> Result<(), CalculusError> {
    if comps.len() != chart.dim() {
        return Err(CalculusError::ComponentCount { expected: chart.dim(), got: comps.len() });
    }
    if let Some(c) = comps.iter().find(|c| c.nvars() != chart.dim()) {
        return Err(CalculusError::Expr(ExprError::ChartMismatch(format!(
            "component in {} variables on chart {chart}",
            c.nvars()
        ))));
    }
    Ok(())
}

fn parse_all(chart: &Chart, exprs: &[&str]) -> Result<Vec<RatFn>, CalculusError> {
    exprs.iter().map(|e| parse_expr(e, chart).map_err(CalculusError::from)).collect()
}

fn eval_all(comps: &[RatFn], point: &[Rat]) -> Option<Vec<Rat>> {
    comps.iter().map(|c| c.eval(point)).collect()
}

/// A vector field `Σ Xⁱ ∂ᵢ` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<RatFn>,
}

impl VectorField {
    pub fn new(chart: Arc<Chart>, comps: Vec<RatFn>) -> Result<Self, CalculusError> {
        check_len(&chart, &comps)?;
        Ok(VectorField { chart, comps })
    }

    pub fn parse(chart: &Arc<Chart>, exprs: &[&str]) -> Result<Self, CalculusError> {
        Self::new(chart.clone(), parse_all(chart, exprs)?)
    }

    pub fn zero(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        VectorField { chart, comps: vec![RatFn::zero(n); n] }
    }

    /// The coordinate field `∂ᵢ`.
    pub fn coordinate(chart: Arc<Chart>, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.comps[i] = RatFn::one(v.chart.dim());
        v
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[RatFn] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<RatFn> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFn::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &RatFn) -> RatFn {
        let n = self.chart.dim();
        self.comps.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(RatFn::zero(n), |acc, (i, c)| {
            let d = f.derivative(i);
            if d.is_zero() {
                acc
            } else {
                &acc + &(c * &d)
            }
        })
    }

    pub fn scale(&self, f: &RatFn) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn scale_rat(&self, c: &Rat) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn eval(&self, point: &[Rat]) -> Option<Vec<Rat>> {
        eval_all(&self.comps, point)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval_f64(point)).collect()
    }
}

/// A one-form `Σ αᵢ dxᵢ` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneForm {
    chart: Arc<Chart>,
    comps: Vec<RatFn>,
}

impl OneForm {
    pub fn new(chart: Arc<Chart>, comps: Vec<RatFn>) -> Result<Self, CalculusError> {
        check_len(&chart, &comps)?;
        Ok(OneForm { chart, comps })
    }

    pub fn parse(chart: &Arc<Chart>, exprs: &[&str]) -> Result<Self, CalculusError> {
        Self::new(chart.clone(), parse_all(chart, exprs)?)
    }

    pub fn zero(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        OneForm { chart, comps: vec![RatFn::zero(n); n] }
    }

    /// The coordinate differential `dxᵢ`.
    pub fn coordinate(chart: Arc<Chart>, i: usize) -> Self {
        let mut a = Self::zero(chart);
        a.comps[i] = RatFn::one(a.chart.dim());
        a
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[RatFn] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<RatFn> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFn::is_zero)
    }

    /// Contraction `α(X)`.
    pub fn contract(&self, x: &VectorField) -> Result<RatFn, CalculusError> {
        same_chart(&self.chart, &x.chart)?;
        Ok(dot(&self.comps, &x.comps, self.chart.dim()))
    }

    pub fn scale(&self, f: &RatFn) -> OneForm {
        OneForm { chart: self.chart.clone(), comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn scale_rat(&self, c: &Rat) -> OneForm {
        OneForm { chart: self.chart.clone(), comps: self.comps.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn eval(&self, point: &[Rat]) -> Option<Vec<Rat>> {
        eval_all(&self.comps, point)
    }
}

fn dot(a: &[RatFn], b: &[RatFn], n: usize) -> RatFn {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).fold(RatFn::zero(n), |acc, (x, y)| &acc + &(x * y))
}

/// An antisymmetric two-form; only entries `i < j` are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoForm {
    chart: Arc<Chart>,
    upper: Vec<RatFn>,
}

impl TwoForm {
    pub fn zero(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        TwoForm { upper: vec![RatFn::zero(n); n * n.saturating_sub(1) / 2], chart }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let n = self.chart.dim();
        debug_assert!(i < j);
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Coefficient `w_ij` of `dxᵢ ∧ dxⱼ` (antisymmetric in `i, j`).
    pub fn get(&self, i: usize, j: usize) -> RatFn {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => RatFn::zero(self.chart.dim()),
            Less => self.upper[self.slot(i, j)].clone(),
            Greater => -&self.upper[self.slot(j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFn) {
        assert!(i != j, "diagonal of a two-form is zero");
        if i < j {
            let s = self.slot(i, j);
            self.upper[s] = v;
        } else {
            let s = self.slot(j, i);
            self.upper[s] = -v;
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(RatFn::is_zero)
    }
}

/// A section `(X, α)` of the Pontryagin bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    pub x: VectorField,
    pub alpha: OneForm,
}

impl Section {
    pub fn new(x: VectorField, alpha: OneForm) -> Result<Self, CalculusError> {
        same_chart(&x.chart, &alpha.chart)?;
        Ok(Section { x, alpha })
    }

    pub fn parse(chart: &Arc<Chart>, x: &[&str], alpha: &[&str]) -> Result<Self, CalculusError> {
        Self::new(VectorField::parse(chart, x)?, OneForm::parse(chart, alpha)?)
    }

    pub fn tangent(x: VectorField) -> Self {
        let alpha = OneForm::zero(x.chart.clone());
        Section { x, alpha }
    }

    pub fn cotangent(alpha: OneForm) -> Self {
        let x = VectorField::zero(alpha.chart.clone());
        Section { x, alpha }
    }

    pub fn zero(chart: Arc<Chart>) -> Self {
        Section { x: VectorField::zero(chart.clone()), alpha: OneForm::zero(chart) }
    }

    /// Builds a section from its `2n` stacked components.
    pub fn from_vector(chart: Arc<Chart>, v: Vec<RatFn>) -> Result<Self, CalculusError> {
        let n = chart.dim();
        if v.len() != 2 * n {
            return Err(CalculusError::ComponentCount { expected: 2 * n, got: v.len() });
        }
        let mut v = v;
        let alpha = v.split_off(n);
        Section::new(VectorField::new(chart.clone(), v)?, OneForm::new(chart, alpha)?)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.x.chart
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.alpha.is_zero()
    }

    /// Stacked components `(X¹…Xⁿ, α₁…αₙ)`.
    pub fn to_vector(&self) -> Vec<RatFn> {
        self.x.comps.iter().chain(&self.alpha.comps).cloned().collect()
    }

    pub fn eval(&self, point: &[Rat]) -> Option<Vec<Rat>> {
        let mut v = self.x.eval(point)?;
        v.extend(self.alpha.eval(point)?);
        Some(v)
    }

    pub fn scale(&self, f: &RatFn) -> Section {
        Section { x: self.x.scale(f), alpha: self.alpha.scale(f) }
    }

    pub fn scale_rat(&self, c: &Rat) -> Section {
        Section { x: self.x.scale_rat(c), alpha: self.alpha.scale_rat(c) }
    }
}

macro_rules! linear_ops {
    ($t:ident) => {
        impl<'a> Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                same_chart(&self.chart, &rhs.chart).expect("chart mismatch in sum");
                $t { chart: self.chart.clone(), comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect() }
            }
        }
        impl<'a> Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                same_chart(&self.chart, &rhs.chart).expect("chart mismatch in difference");
                $t { chart: self.chart.clone(), comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect() }
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                $t { chart: self.chart.clone(), comps: self.comps.iter().map(|a| -a).collect() }
            }
        }
    };
}

linear_ops!(VectorField);
linear_ops!(OneForm);

impl<'a> Add<&'a Section> for &'a Section {
    type Output = Section;
    fn add(self, rhs: &Section) -> Section {
        Section { x: &self.x + &rhs.x, alpha: &self.alpha + &rhs.alpha }
    }
}

impl<'a> Sub<&'a Section> for &'a Section {
    type Output = Section;
    fn sub(self, rhs: &Section) -> Section {
        Section { x: &self.x - &rhs.x, alpha: &self.alpha - &rhs.alpha }
    }
}

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        Section { x: -&self.x, alpha: -&self.alpha }
    }
}

/// `⟨(u, α), (v, β)⟩ = β(u) + α(v)`.
pub fn pairing(s1: &Section, s2: &Section) -> Result<RatFn, CalculusError> {
    same_chart(s1.chart(), s2.chart())?;
    Ok(&s2.alpha.contract(&s1.x)? + &s1.alpha.contract(&s2.x)?)
}

/// `[X, Y]ʲ = X(Yʲ) − Y(Xʲ)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, CalculusError> {
    same_chart(&x.chart, &y.chart)?;
    let comps = x.comps.iter().zip(&y.comps).map(|(xj, yj)| &x.apply(yj) - &y.apply(xj)).collect();
    Ok(VectorField { chart: x.chart.clone(), comps })
}

/// `df = Σ ∂ᵢf dxᵢ`.
pub fn exterior_derivative_fn(f: &RatFn, chart: &Arc<Chart>) -> OneForm {
    OneForm { chart: chart.clone(), comps: (0..chart.dim()).map(|i| f.derivative(i)).collect() }
}

/// `(dα)ᵢⱼ = ∂ᵢαⱼ − ∂ⱼαᵢ`.
pub fn exterior_derivative_form(a: &OneForm) -> TwoForm {
    let n = a.chart.dim();
    let mut w = TwoForm::zero(a.chart.clone());
    for i in 0..n {
        for j in i + 1..n {
            w.set(i, j, &a.comps[j].derivative(i) - &a.comps[i].derivative(j));
        }
    }
    w
}

/// `(i_Y w)ⱼ = Σᵢ Yⁱ wᵢⱼ`.
pub fn interior_product(y: &VectorField, w: &TwoForm) -> Result<OneForm, CalculusError> {
    same_chart(&y.chart, &w.chart)?;
    let n = y.chart.dim();
    let comps = (0..n)
        .map(|j| {
            (0..n).filter(|&i| i != j && !y.comps[i].is_zero()).fold(RatFn::zero(n), |acc, i| {
                let wij = w.get(i, j);
                if wij.is_zero() {
                    acc
                } else {
                    &acc + &(&y.comps[i] * &wij)
                }
            })
        })
        .collect();
    Ok(OneForm { chart: y.chart.clone(), comps })
}

/// `L_X β = i_X dβ + d(β(X))`.
pub fn lie_derivative_oneform(x: &VectorField, a: &OneForm) -> Result<OneForm, CalculusError> {
    let contracted = interior_product(x, &exterior_derivative_form(a))?;
    let exact = exterior_derivative_fn(&a.contract(x)?, &x.chart);
    Ok(&contracted + &exact)
}

/// Lie derivative of a section along a vector field, componentwise.
pub fn lie_derivative_section(x: &VectorField, s: &Section) -> Result<Section, CalculusError> {
    Ok(Section { x: lie_bracket(x, &s.x)?, alpha: lie_derivative_oneform(x, &s.alpha)? })
}

/// `[(X, α), (Y, β)] = ([X, Y], L_X β − i_Y dα)`.
pub fn courant_bracket(s1: &Section, s2: &Section) -> Result<Section, CalculusError> {
    same_chart(s1.chart(), s2.chart())?;
    let x = lie_bracket(&s1.x, &s2.x)?;
    let lx = lie_derivative_oneform(&s1.x, &s2.alpha)?;
    let iy = interior_product(&s2.x, &exterior_derivative_form(&s1.alpha))?;
    Ok(Section { x, alpha: &lx - &iy })
}

/// Skew-symmetric bracket `([X, Y], L_X β − L_Y α + ½ d(α(Y) − β(X)))`.
pub fn skew_bracket(s1: &Section, s2: &Section) -> Result<Section, CalculusError> {
    same_chart(s1.chart(), s2.chart())?;
    let x = lie_bracket(&s1.x, &s2.x)?;
    let lx = lie_derivative_oneform(&s1.x, &s2.alpha)?;
    let ly = lie_derivative_oneform(&s2.x, &s1.alpha)?;
    let half = crate::expr::ratio(1, 2);
    let diff = &s1.alpha.contract(&s2.x)? - &s2.alpha.contract(&s1.x)?;
    let exact = exterior_derivative_fn(&diff.scale(&half), s1.chart());
    Ok(Section { x, alpha: &(&lx - &ly) + &exact })
}

fn write_coeff(f: &mut fmt::Formatter<'_>, first: bool, c: &RatFn, names: &[String], unit: &str) -> fmt::Result {
    let text = c.display(names).to_string();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) if !rest.contains(" + ") && !rest.contains(" - ") => (true, rest.to_string()),
        _ => (false, text),
    };
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
        (true, false) => {}
    }
    if body == "1" {
        write!(f, "{unit}")
    } else if body.contains(" + ") || body.contains(" - ") {
        write!(f, "({body})*{unit}")
    } else {
        write!(f, "{body}*{unit}")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.coords();
        let mut first = true;
        for (i, c) in self.comps.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            write_coeff(f, first, c, names, &format!("∂{}", names[i]))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.coords();
        let mut first = true;
        for (i, c) in self.comps.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            write_coeff(f, first, c, names, &format!("d{}", names[i]))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    fn r2() -> Arc<Chart> {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    fn r3() -> Arc<Chart> {
        Chart::new("R3", &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let c = r2();
        let a = Section::parse(&c, &["1", "0"], &["0", "1"]).unwrap();
        let b = Section::parse(&c, &["0", "1"], &["-1", "0"]).unwrap();
        assert!(pairing(&a, &b).unwrap().is_zero());
        assert!(pairing(&a, &a).unwrap().is_zero());
        let s = Section::parse(&c, &["x", "0"], &["1", "0"]).unwrap();
        let t = Section::parse(&c, &["1", "0"], &["0", "0"]).unwrap();
        assert!(pairing(&s, &t).unwrap().is_one());
    }

    #[test]
    fn bracket_examples() {
        let c = r2();
        let xdy = VectorField::parse(&c, &["0", "x"]).unwrap();
        let ydx = VectorField::parse(&c, &["y", "0"]).unwrap();
        assert_eq!(lie_bracket(&xdy, &ydx).unwrap(), VectorField::parse(&c, &["x", "-y"]).unwrap());
        let e = VectorField::parse(&c, &["x", "0"]).unwrap();
        assert!(lie_bracket(&e, &e).unwrap().is_zero());
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = r2();
        let f = parse_expr("x^2 + y^2", &c).unwrap();
        assert_eq!(exterior_derivative_fn(&f, &c), OneForm::parse(&c, &["2*x", "2*y"]).unwrap());
        let xdy = OneForm::parse(&c, &["0", "x"]).unwrap();
        assert!(exterior_derivative_form(&xdy).get(0, 1).is_one());
        let g = parse_expr("x^3*y", &c).unwrap();
        assert!(exterior_derivative_form(&exterior_derivative_fn(&g, &c)).is_zero());
    }

    #[test]
    fn interior_product_examples() {
        let c = r3();
        let mut w = TwoForm::zero(c.clone());
        w.set(0, 1, RatFn::one(3));
        let dx = VectorField::coordinate(c.clone(), 0);
        assert_eq!(interior_product(&dx, &w).unwrap(), OneForm::coordinate(c.clone(), 1));
        assert!(interior_product(&VectorField::coordinate(c.clone(), 2), &w).unwrap().is_zero());
        let xdx = VectorField::parse(&c, &["x", "0", "0"]).unwrap();
        assert_eq!(interior_product(&xdx, &w).unwrap(), OneForm::parse(&c, &["0", "x", "0"]).unwrap());
    }

    #[test]
    fn lie_derivative_examples() {
        let c = r2();
        let dy = OneForm::coordinate(c.clone(), 1);
        assert!(lie_derivative_oneform(&VectorField::coordinate(c.clone(), 0), &dy).unwrap().is_zero());
        let rot = VectorField::parse(&c, &["y", "-x"]).unwrap();
        let radial = OneForm::parse(&c, &["x", "y"]).unwrap();
        assert!(lie_derivative_oneform(&rot, &radial).unwrap().is_zero());
        let x = VectorField::parse(&c, &["0", "x"]).unwrap();
        let f = parse_expr("x*y", &c).unwrap();
        let lhs = lie_derivative_oneform(&x, &exterior_derivative_fn(&f, &c)).unwrap();
        assert_eq!(lhs, OneForm::parse(&c, &["2*x", "0"]).unwrap());
    }

    #[test]
    fn courant_and_skew_examples() {
        let c = r2();
        let dx0 = Section::parse(&c, &["1", "0"], &["0", "0"]).unwrap();
        let dy0 = Section::parse(&c, &["0", "1"], &["0", "0"]).unwrap();
        let z_dy = Section::parse(&c, &["0", "0"], &["0", "1"]).unwrap();
        assert!(courant_bracket(&dx0, &dy0).unwrap().is_zero());
        assert!(courant_bracket(&dx0, &z_dy).unwrap().is_zero());
        let a = Section::parse(&c, &["1", "0"], &["0", "1"]).unwrap();
        let b = Section::parse(&c, &["0", "1"], &["-1", "0"]).unwrap();
        assert!(skew_bracket(&a, &a).unwrap().is_zero());
        assert_eq!(skew_bracket(&a, &b).unwrap(), courant_bracket(&a, &b).unwrap());
        let s1 = Section::parse(&c, &["x", "0"], &["1", "0"]).unwrap();
        let s2 = Section::parse(&c, &["1", "0"], &["1", "0"]).unwrap();
        let diff = &skew_bracket(&s1, &s2).unwrap() - &courant_bracket(&s1, &s2).unwrap();
        assert_eq!(diff, Section::cotangent(OneForm::coordinate(c.clone(), 0).scale_rat(&crate::expr::ratio(-1, 2))));
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = Section::zero(r2());
        let b = Section::zero(Chart::new("Q", &["u", "v"]).unwrap());
        assert!(matches!(pairing(&a, &b), Err(CalculusError::ChartMismatch(..))));
        assert!(matches!(
            VectorField::new(r2(), vec![RatFn::zero(2)]),
            Err(CalculusError::ComponentCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn display_uses_coordinate_names() {
        let c = r3();
        let v = VectorField::parse(&c, &["2*x", "0", "z"]).unwrap();
        assert_eq!(v.to_string(), "2*x*∂x + z*∂z");
        let a = OneForm::parse(&c, &["-1/2", "x + y", "0"]).unwrap();
        assert_eq!(a.to_string(), "-1/2*dx + (x + y)*dy");
        assert_eq!(Section::zero(c).to_string(), "(0, 0)");
    }
}
