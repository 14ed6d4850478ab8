//! Linear actions of compact connected groups (tori and SO(3)) on a chart:
//! fundamental fields, invariance, exact Haar averaging and the invariant
//! codistribution.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::{
    exterior_derivative_fn, lie_bracket, lie_derivative_oneform, CalculusError, OneForm, Section, VectorField,
};
use crate::distributions::{eval_at, membership_generic, DistError, Distribution, Membership};
use crate::expr::{lcm, AngleMeasure, Chart, ExprError, Poly, Rat, RatFn, TrigPoly};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("generator mismatch: {0}")]
    GeneratorMismatch(String),
    #[error("element {index} is not invariant: residual {residual}")]
    NotInvariant { index: usize, residual: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Distribution(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Circle,
    Torus(usize),
    So3,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Circle => f.write_str("circle"),
            GroupKind::Torus(k) => write!(f, "torus({k})"),
            GroupKind::So3 => f.write_str("so3"),
        }
    }
}

type Matrix = Vec<Vec<Rat>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).fold(Rat::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect()).collect()
}

/// Matrix `A` with `ξ = A x`, if the field is linear with rational coefficients.
fn linear_matrix(field: &VectorField) -> Option<Matrix> {
    let n = field.chart().dim();
    let mut a = vec![vec![Rat::zero(); n]; n];
    for (i, c) in field.components().iter().enumerate() {
        let p = c.as_poly()?;
        for (m, coeff) in p.terms() {
            if m.degree() != 1 {
                return None;
            }
            let j = m.exps().iter().position(|&e| e == 1)?;
            a[i][j] = coeff.clone();
        }
    }
    Some(a)
}

fn flatten(m: &Matrix) -> Vec<Rat> {
    m.iter().flatten().cloned().collect()
}

/// Entries of `exp(θA)` for `A³ = −A`: `I + sin θ·A + (1 − cos θ)·A²`.
fn circle_exponential(a: &Matrix, angle: usize, angles: &Arc<[String]>, nvars: usize) -> Vec<Vec<TrigPoly>> {
    let n = a.len();
    let a2 = mat_mul(a, a);
    let c = |r: &Rat| TrigPoly::constant(r.clone(), angles.clone(), nvars);
    let s = TrigPoly::sin(angle, angles.clone(), nvars);
    let one_minus_cos = &c(&Rat::one()) - &TrigPoly::cos(angle, angles.clone(), nvars);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { Rat::one() } else { Rat::zero() };
                    &(&c(&delta) + &(&s * &c(&a[i][j]))) + &(&one_minus_cos * &c(&a2[i][j]))
                })
                .collect()
        })
        .collect()
}

fn trig_mat_mul(a: &[Vec<TrigPoly>], b: &[Vec<TrigPoly>]) -> Vec<Vec<TrigPoly>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let zero = TrigPoly::zero(a[i][j].angles().clone(), a[i][j].nvars());
                    (0..n).fold(zero, |acc, k| &acc + &(&a[i][k] * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

/// A linear orthogonal action `x ↦ M(θ) x` of a compact connected group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction {
    chart: Arc<Chart>,
    kind: GroupKind,
    liegen: Vec<VectorField>,
    matrix: Vec<Vec<TrigPoly>>,
    action_map: Vec<TrigPoly>,
    haar: AngleMeasure,
}

impl GroupAction {
    /// Action of `k` commuting circle factors, one per generator. Each
    /// generator must be `A x` with `A` antisymmetric and `A³ = −A`.
    pub fn torus(chart: Arc<Chart>, generators: Vec<VectorField>) -> Result<Self, ActionError> {
        let n = chart.dim();
        let k = generators.len();
        let angles: Arc<[String]> = match k {
            1 => Arc::from(vec!["theta".to_string()]),
            _ => (1..=k).map(|i| format!("theta{i}")).collect::<Vec<_>>().into(),
        };
        let mut matrices = Vec::with_capacity(k);
        for (idx, g) in generators.iter().enumerate() {
            check_chart(&chart, g)?;
            let a = linear_matrix(g).ok_or_else(|| ActionError::GeneratorMismatch(format!("generator {idx} is not linear")))?;
            let antisymmetric = (0..n).all(|i| (0..n).all(|j| a[i][j] == -a[j][i].clone()));
            let cube = mat_mul(&a, &mat_mul(&a, &a));
            let neg: Matrix = a.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
            if !antisymmetric || cube != neg || a.iter().flatten().all(Zero::is_zero) {
                return Err(ActionError::GeneratorMismatch(format!("generator {idx} does not generate a circle")));
            }
            matrices.push(a);
        }
        for i in 0..k {
            for j in 0..i {
                if mat_mul(&matrices[i], &matrices[j]) != mat_mul(&matrices[j], &matrices[i]) {
                    return Err(ActionError::GeneratorMismatch(format!("generators {j} and {i} do not commute")));
                }
            }
        }
        let mut m = to_trig(&identity(n), &angles, n);
        for (idx, a) in matrices.iter().enumerate() {
            m = trig_mat_mul(&m, &circle_exponential(a, idx, &angles, n));
        }
        let kind = if k == 1 { GroupKind::Circle } else { GroupKind::Torus(k) };
        let haar = AngleMeasure::uniform(angles);
        let action = Self::assemble(chart, kind, generators, m, haar);
        action.validate_derivatives()?;
        Ok(action)
    }

    /// Diagonal SO(3) action on consecutive coordinate triples, parametrized
    /// by z-x-z Euler angles. `generators` must span the same Lie algebra.
    pub fn so3(chart: Arc<Chart>, generators: Vec<VectorField>) -> Result<Self, ActionError> {
        let n = chart.dim();
        if n == 0 || !n.is_multiple_of(3) {
            return Err(ActionError::GeneratorMismatch(format!("SO(3) needs coordinate triples, chart has {n} coordinates")));
        }
        if generators.len() != 3 {
            return Err(ActionError::GeneratorMismatch(format!("SO(3) needs 3 generators, got {}", generators.len())));
        }
        for g in &generators {
            check_chart(&chart, g)?;
        }
        let angles: Arc<[String]> = Arc::from(vec!["alpha".to_string(), "beta".to_string(), "gamma".to_string()]);
        let rz = |angle| euler_factor(angle, (0, 1), &angles, n);
        let rx = |angle| euler_factor(angle, (1, 2), &angles, n);
        let m = trig_mat_mul(&trig_mat_mul(&rz(0), &rx(1)), &rz(2));
        let haar = AngleMeasure::so3_euler(angles);
        let action = Self::assemble(chart, GroupKind::So3, generators, m, haar);
        action.validate_lie_algebra()?;
        Ok(action)
    }

    /// Action with no group directions.
    pub fn trivial(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        let angles: Arc<[String]> = Arc::from(Vec::<String>::new());
        let m = to_trig(&identity(n), &angles, n);
        Self::assemble(chart, GroupKind::Torus(0), Vec::new(), m, AngleMeasure::uniform(angles))
    }

    fn assemble(
        chart: Arc<Chart>,
        kind: GroupKind,
        liegen: Vec<VectorField>,
        matrix: Vec<Vec<TrigPoly>>,
        haar: AngleMeasure,
    ) -> Self {
        let n = chart.dim();
        let angles = haar.angles().clone();
        let action_map = (0..n)
            .map(|i| (0..n).fold(TrigPoly::zero(angles.clone(), n), |acc, j| &acc + &matrix[i][j].scale_poly(&Poly::var(j, n))))
            .collect();
        GroupAction { chart, kind, liegen, matrix, action_map, haar }
    }

    /// Angle derivatives of the action map at the identity, as fields.
    pub fn angle_derivatives(&self) -> Vec<VectorField> {
        (0..self.haar.angles().len())
            .map(|k| {
                let comps = self.action_map.iter().map(|t| RatFn::from_poly(t.derivative_angle(k).at_zero_angles())).collect();
                VectorField::new(self.chart.clone(), comps).expect("one component per coordinate")
            })
            .collect()
    }

    fn validate_identity(&self) -> Result<(), ActionError> {
        let n = self.chart.dim();
        for (i, t) in self.action_map.iter().enumerate() {
            if t.at_zero_angles() != Poly::var(i, n) {
                return Err(ActionError::GeneratorMismatch(format!(
                    "action map is not the identity at zero angles in component {i}"
                )));
            }
        }
        Ok(())
    }

    fn validate_derivatives(&self) -> Result<(), ActionError> {
        self.validate_identity()?;
        for (k, d) in self.angle_derivatives().iter().enumerate() {
            if *d != self.liegen[k] {
                return Err(ActionError::GeneratorMismatch(format!(
                    "generator {k} is {}, angle derivative is {d}",
                    self.liegen[k]
                )));
            }
        }
        Ok(())
    }

    fn validate_lie_algebra(&self) -> Result<(), ActionError> {
        self.validate_identity()?;
        let mut closure: Vec<VectorField> = self.angle_derivatives();
        loop {
            let mut added = false;
            let snapshot = closure.clone();
            for i in 0..snapshot.len() {
                for j in 0..i {
                    let b = lie_bracket(&snapshot[i], &snapshot[j])?;
                    let mut rows: Vec<Vec<Rat>> = closure.iter().map(|f| flatten(&linear_matrix(f).expect("linear"))).collect();
                    let before = linalg::rank_q(&rows);
                    rows.push(flatten(&linear_matrix(&b).expect("linear")));
                    if linalg::rank_q(&rows) > before {
                        closure.push(b);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut declared = Vec::with_capacity(self.liegen.len());
        for (idx, g) in self.liegen.iter().enumerate() {
            let a = linear_matrix(g).ok_or_else(|| ActionError::GeneratorMismatch(format!("generator {idx} is not linear")))?;
            declared.push(flatten(&a));
        }
        let expected: Vec<Vec<Rat>> = closure.iter().map(|f| flatten(&linear_matrix(f).expect("linear"))).collect();
        let r_declared = linalg::rank_q(&declared);
        let r_expected = linalg::rank_q(&expected);
        let r_joint = linalg::rank_q(&[declared.clone(), expected].concat());
        if r_declared != declared.len() || r_declared != r_expected || r_joint != r_expected {
            return Err(ActionError::GeneratorMismatch(
                "generators do not span the Lie algebra of the Euler parametrization".into(),
            ));
        }
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn angles(&self) -> &Arc<[String]> {
        self.haar.angles()
    }

    /// `M(θ)` with entries as trigonometric polynomials.
    pub fn matrix(&self) -> &[Vec<TrigPoly>] {
        &self.matrix
    }

    /// Components of `M(θ) x`.
    pub fn action_map(&self) -> &[TrigPoly] {
        &self.action_map
    }

    pub fn haar(&self) -> &AngleMeasure {
        &self.haar
    }

    /// Numeric `M(θ)`.
    pub fn matrix_f64(&self, angles: &[f64]) -> Vec<Vec<f64>> {
        self.matrix.iter().map(|row| row.iter().map(|e| e.eval_f64(&[], angles)).collect()).collect()
    }
}

fn check_chart(chart: &Arc<Chart>, g: &VectorField) -> Result<(), ActionError> {
    if g.chart() != chart {
        return Err(CalculusError::ChartMismatch(g.chart().to_string(), chart.to_string()).into());
    }
    Ok(())
}

fn to_trig(m: &Matrix, angles: &Arc<[String]>, nvars: usize) -> Vec<Vec<TrigPoly>> {
    m.iter().map(|r| r.iter().map(|x| TrigPoly::constant(x.clone(), angles.clone(), nvars)).collect()).collect()
}

/// Block-diagonal rotation by `angle` in the plane `(p, q)` of every triple.
fn euler_factor(angle: usize, (p, q): (usize, usize), angles: &Arc<[String]>, n: usize) -> Vec<Vec<TrigPoly>> {
    let mut m = to_trig(&identity(n), angles, n);
    let c = TrigPoly::cos(angle, angles.clone(), n);
    let s = TrigPoly::sin(angle, angles.clone(), n);
    for base in (0..n).step_by(3) {
        let (i, j) = (base + p, base + q);
        m[i][i] = c.clone();
        m[j][j] = c.clone();
        m[i][j] = -&s;
        m[j][i] = s.clone();
    }
    m
}

pub fn fundamental_fields(a: &GroupAction) -> &[VectorField] {
    &a.liegen
}

pub fn vertical_distribution(a: &GroupAction) -> Distribution {
    Distribution::tangent(a.chart.clone(), a.liegen.clone()).expect("generators share the action chart")
}

/// Objects the group acts on: functions, vector fields and one-forms.
pub trait GroupObject: Clone + fmt::Debug {
    /// Lie derivative along a fundamental field.
    fn lie_derivative(&self, xi: &VectorField) -> Result<Self, ActionError>;
    fn is_zero(&self) -> bool;
    /// Exact Haar average of `Φ_θ^* self`.
    fn haar_average(&self, a: &GroupAction) -> Result<Self, ActionError>;
}

/// Average over the group of `Σ_j M_ji(θ) c_j(M(θ) x)` for each component `i`.
fn average_components(comps: &[RatFn], a: &GroupAction) -> Result<Vec<RatFn>, ActionError> {
    let n = comps.len();
    let pulled = comps.iter().map(|c| c.compose_trig(&a.action_map)).collect::<Result<Vec<_>, _>>()?;
    let den = pulled.iter().fold(Poly::one(n), |acc, f| lcm(&acc, &f.den));
    let lifted: Vec<TrigPoly> =
        pulled.iter().map(|f| f.num.scale_poly(&den.div_exact(&f.den).expect("lcm is a multiple"))).collect();
    (0..n)
        .map(|i| {
            let zero = TrigPoly::zero(a.angles().clone(), n);
            let top = (0..n).fold(zero, |acc, j| &acc + &(&a.matrix[j][i] * &lifted[j]));
            let integral = crate::expr::trig_integrate(&top, &a.haar)?;
            Ok(RatFn::new(integral, den.clone())?)
        })
        .collect()
}

impl GroupObject for RatFn {
    fn lie_derivative(&self, xi: &VectorField) -> Result<Self, ActionError> {
        Ok(xi.apply(self))
    }

    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }

    fn haar_average(&self, a: &GroupAction) -> Result<Self, ActionError> {
        Ok(self.compose_trig(&a.action_map)?.integrate(&a.haar)?)
    }
}

impl GroupObject for VectorField {
    fn lie_derivative(&self, xi: &VectorField) -> Result<Self, ActionError> {
        Ok(lie_bracket(xi, self)?)
    }

    fn is_zero(&self) -> bool {
        VectorField::is_zero(self)
    }

    fn haar_average(&self, a: &GroupAction) -> Result<Self, ActionError> {
        check_chart(&a.chart, self)?;
        Ok(VectorField::new(a.chart.clone(), average_components(self.components(), a)?)?)
    }
}

impl GroupObject for OneForm {
    fn lie_derivative(&self, xi: &VectorField) -> Result<Self, ActionError> {
        Ok(lie_derivative_oneform(xi, self)?)
    }

    fn is_zero(&self) -> bool {
        OneForm::is_zero(self)
    }

    fn haar_average(&self, a: &GroupAction) -> Result<Self, ActionError> {
        if self.chart() != &a.chart {
            return Err(CalculusError::ChartMismatch(self.chart().to_string(), a.chart.to_string()).into());
        }
        Ok(OneForm::new(a.chart.clone(), average_components(self.components(), a)?)?)
    }
}

/// Lie derivatives along each fundamental field that fail to vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariance<T> {
    pub residuals: Vec<(usize, T)>,
}

impl<T> Invariance<T> {
    pub fn holds(&self) -> bool {
        self.residuals.is_empty()
    }
}

pub fn is_invariant<T: GroupObject>(obj: &T, a: &GroupAction) -> Result<Invariance<T>, ActionError> {
    let mut residuals = Vec::new();
    for (i, xi) in a.liegen.iter().enumerate() {
        let r = obj.lie_derivative(xi)?;
        if !r.is_zero() {
            residuals.push((i, r));
        }
    }
    Ok(Invariance { residuals })
}

pub fn average<T: GroupObject>(obj: &T, a: &GroupAction) -> Result<T, ActionError> {
    obj.haar_average(a)
}

/// Outcome of the test `[X, ξ] ∈ Γ(𝒱)` for every fundamental field `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescendingCertificate {
    /// Generic membership of `[X, ξ_i]` in `𝒱`, per generator.
    pub generic: Vec<(usize, Membership)>,
    /// `(generator, sample)` pairs where the bracket leaves `𝒱(m)`.
    pub failing_samples: Vec<(usize, Vec<Rat>)>,
}

impl DescendingCertificate {
    pub fn holds(&self) -> bool {
        self.generic.iter().all(|(_, m)| m.is_member()) && self.failing_samples.is_empty()
    }
}

pub fn is_descending(x: &VectorField, a: &GroupAction, samples: &[Vec<Rat>]) -> Result<DescendingCertificate, ActionError> {
    let v = vertical_distribution(a);
    let mut generic = Vec::new();
    let mut failing_samples = Vec::new();
    for (i, xi) in a.liegen.iter().enumerate() {
        let b = lie_bracket(x, xi)?;
        let m = membership_generic(&Section::tangent(b.clone()), &v)?;
        generic.push((i, m));
        for p in samples {
            let value = b.eval(p).ok_or_else(|| DistError::DenominatorVanishes { generator: i, point: format!("{p:?}") })?;
            if !eval_at(&v, p)?.contains(&value) {
                failing_samples.push((i, p.clone()));
            }
        }
    }
    Ok(DescendingCertificate { generic, failing_samples })
}

/// Polynomials invariant under every fundamental field of an action.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantBasis {
    action: Arc<GroupAction>,
    fns: Vec<Poly>,
}

impl InvariantBasis {
    pub fn new(action: Arc<GroupAction>, fns: Vec<Poly>) -> Result<Self, ActionError> {
        let n = action.chart.dim();
        for (index, f) in fns.iter().enumerate() {
            if f.nvars() != n {
                return Err(ActionError::Expr(ExprError::ChartMismatch(format!(
                    "basis element {index} has {} variables",
                    f.nvars()
                ))));
            }
            let cert = is_invariant(&RatFn::from_poly(f.clone()), &action)?;
            if let Some((_, r)) = cert.residuals.first() {
                return Err(ActionError::NotInvariant { index, residual: r.display(action.chart.coords()).to_string() });
            }
        }
        Ok(InvariantBasis { action, fns })
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }

    pub fn fns(&self) -> &[Poly] {
        &self.fns
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }
}

/// `𝒱°_G = span{𝐝fᵢ}`, each differential certified to kill every fundamental field.
pub fn invariant_codistribution(b: &InvariantBasis) -> Result<Distribution, ActionError> {
    let chart = b.action.chart.clone();
    let mut forms = Vec::with_capacity(b.fns.len());
    for (index, f) in b.fns.iter().enumerate() {
        let df = exterior_derivative_fn(&RatFn::from_poly(f.clone()), &chart);
        for xi in &b.action.liegen {
            let r = df.contract(xi)?;
            if !r.is_zero() {
                return Err(ActionError::NotInvariant { index, residual: r.display(chart.coords()).to_string() });
            }
        }
        forms.push(df);
    }
    Ok(Distribution::cotangent(chart, forms)?)
}

/// `𝒯 = span(declared invariant fields ∪ fundamental fields)` and `𝒯_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescendingTangent {
    pub t: Distribution,
    pub t_g: Distribution,
}

pub fn descending_tangent(a: &GroupAction, declared: &[VectorField]) -> Result<DescendingTangent, ActionError> {
    for (index, x) in declared.iter().enumerate() {
        check_chart(&a.chart, x)?;
        if let Some((_, r)) = is_invariant(x, a)?.residuals.first() {
            return Err(ActionError::NotInvariant { index, residual: r.to_string() });
        }
    }
    let t_g = Distribution::tangent(a.chart.clone(), declared.to_vec())?;
    let all = declared.iter().chain(&a.liegen).cloned().collect();
    let t = Distribution::tangent(a.chart.clone(), all)?;
    Ok(DescendingTangent { t, t_g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, rat, ratio};

    fn r3() -> (Arc<Chart>, GroupAction) {
        let c = Chart::new("R3", &["x", "y", "z"]).unwrap();
        let xi = VectorField::parse(&c, &["-y", "x", "0"]).unwrap();
        let a = GroupAction::torus(c.clone(), vec![xi]).unwrap();
        (c, a)
    }

    fn so3() -> (Arc<Chart>, GroupAction) {
        let c = Chart::new("R6", &["x1", "y1", "z1", "x2", "y2", "z2"]).unwrap();
        let gens = vec![
            VectorField::parse(&c, &["-y1", "x1", "0", "-y2", "x2", "0"]).unwrap(),
            VectorField::parse(&c, &["-z1", "0", "x1", "-z2", "0", "x2"]).unwrap(),
            VectorField::parse(&c, &["0", "z1", "-y1", "0", "z2", "-y2"]).unwrap(),
        ];
        let a = GroupAction::so3(c.clone(), gens).unwrap();
        (c, a)
    }

    fn f(c: &Arc<Chart>, s: &str) -> RatFn {
        parse_expr(s, c).unwrap()
    }

    #[test]
    fn circle_fundamental_field_and_vertical_ranks() {
        let (c, a) = r3();
        assert_eq!(a.kind(), GroupKind::Circle);
        assert_eq!(fundamental_fields(&a), &[VectorField::parse(&c, &["-y", "x", "0"]).unwrap()]);
        let v = vertical_distribution(&a);
        assert_eq!(eval_at(&v, &[rat(1), rat(0), rat(0)]).unwrap().rank(), 1);
        assert_eq!(eval_at(&v, &[rat(0), rat(0), rat(5)]).unwrap().rank(), 0);
    }

    #[test]
    fn generators_that_are_not_rotations_are_rejected() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let shear = VectorField::parse(&c, &["y", "0"]).unwrap();
        assert!(matches!(GroupAction::torus(c.clone(), vec![shear]), Err(ActionError::GeneratorMismatch(_))));
        let scaled = VectorField::parse(&c, &["-2*y", "2*x"]).unwrap();
        assert!(matches!(GroupAction::torus(c.clone(), vec![scaled]), Err(ActionError::GeneratorMismatch(_))));
        let nonlinear = VectorField::parse(&c, &["-y^2", "x"]).unwrap();
        assert!(GroupAction::torus(c, vec![nonlinear]).is_err());
    }

    #[test]
    fn so3_accepts_any_basis_of_the_algebra() {
        let (c, a) = so3();
        let v = vertical_distribution(&a);
        let e3e3 = [0, 0, 1, 0, 0, 1].map(rat);
        assert_eq!(eval_at(&v, &e3e3).unwrap().rank(), 2);
        let dup = vec![fundamental_fields(&a)[0].clone(), fundamental_fields(&a)[0].clone(), fundamental_fields(&a)[1].clone()];
        assert!(GroupAction::so3(c, dup).is_err());
    }

    #[test]
    fn trivial_action_has_no_directions() {
        let c = Chart::new("R1", &["x"]).unwrap();
        let a = GroupAction::trivial(c.clone());
        assert!(fundamental_fields(&a).is_empty());
        assert_eq!(vertical_distribution(&a).generic_rank(), 0);
        let dx = VectorField::coordinate(c.clone(), 0);
        let t = descending_tangent(&a, std::slice::from_ref(&dx)).unwrap();
        assert_eq!(t.t.generic_rank(), 1);
        assert_eq!(average(&dx, &a).unwrap(), dx);
    }

    #[test]
    fn invariance_predicates() {
        let (c, a) = r3();
        assert!(is_invariant(&VectorField::coordinate(c.clone(), 2), &a).unwrap().holds());
        let cert = is_invariant(&f(&c, "x"), &a).unwrap();
        assert_eq!(cert.residuals, vec![(0, f(&c, "-y"))]);
        let form = OneForm::parse(&c, &["x", "y", "0"]).unwrap();
        assert!(is_invariant(&form, &a).unwrap().holds());
    }

    #[test]
    fn descending_predicates() {
        let (c, a) = r3();
        let samples = vec![vec![rat(1), rat(2), rat(3)], vec![rat(0), rat(0), rat(1)]];
        let xi = fundamental_fields(&a)[0].clone();
        assert!(is_descending(&xi, &a, &samples).unwrap().holds());
        let radial = VectorField::parse(&c, &["x", "y", "0"]).unwrap();
        assert!(is_descending(&radial, &a, &samples).unwrap().holds());
        assert!(!is_descending(&VectorField::coordinate(c, 0), &a, &samples).unwrap().holds());
        let (_, s) = so3();
        for g in fundamental_fields(&s) {
            assert!(is_descending(g, &s, &[]).unwrap().holds());
        }
    }

    #[test]
    fn circle_averages() {
        let (c, a) = r3();
        assert!(average(&VectorField::coordinate(c.clone(), 0), &a).unwrap().is_zero());
        let radial = VectorField::parse(&c, &["x", "y", "0"]).unwrap();
        assert_eq!(average(&radial, &a).unwrap(), radial);
        assert_eq!(average(&f(&c, "x^2"), &a).unwrap(), f(&c, "(x^2+y^2)/2"));
        let form = OneForm::parse(&c, &["x^2", "0", "z"]).unwrap();
        let avg = average(&form, &a).unwrap();
        assert!(is_invariant(&avg, &a).unwrap().holds());
        assert_eq!(average(&avg, &a).unwrap(), avg);
    }

    #[test]
    fn averaging_with_invariant_denominator() {
        let (c, a) = r3();
        let g = f(&c, "x^2/(x^2+y^2+1)");
        assert_eq!(average(&g, &a).unwrap(), f(&c, "(x^2+y^2)/(2*x^2+2*y^2+2)"));
        let bad = f(&c, "1/(x+2)");
        assert!(matches!(average(&bad, &a), Err(ActionError::Expr(ExprError::AngleDependentDenominator))));
    }

    #[test]
    fn so3_averages_are_invariant() {
        let (c, a) = so3();
        let g = f(&c, "x1^2");
        assert_eq!(average(&g, &a).unwrap(), f(&c, "(x1^2+y1^2+z1^2)/3"));
        let h = f(&c, "x1*x2");
        assert_eq!(average(&h, &a).unwrap(), f(&c, "(x1*x2+y1*y2+z1*z2)/3"));
        let x = VectorField::parse(&c, &["x1", "z1", "0", "x1", "0", "0"]).unwrap();
        let avg = average(&x, &a).unwrap();
        assert!(is_invariant(&avg, &a).unwrap().holds());
        assert_eq!(avg, VectorField::parse(&c, &["x1/3", "y1/3", "z1/3", "x1/3", "y1/3", "z1/3"]).unwrap());
    }

    #[test]
    fn codistribution_and_basis_validation() {
        let (c, a) = r3();
        let a = Arc::new(a);
        let basis = InvariantBasis::new(a.clone(), vec![f(&c, "x^2+y^2").as_poly().unwrap().clone(), Poly::var(2, 3)]).unwrap();
        let vg = invariant_codistribution(&basis).unwrap();
        assert_eq!(vg.generators()[0].alpha, OneForm::parse(&c, &["2*x", "2*y", "0"]).unwrap());
        assert_eq!(vg.generators()[1].alpha, OneForm::coordinate(c.clone(), 2));
        assert!(matches!(InvariantBasis::new(a.clone(), vec![Poly::var(0, 3)]), Err(ActionError::NotInvariant { index: 0, .. })));
        let empty = InvariantBasis::new(a, vec![]).unwrap();
        assert_eq!(invariant_codistribution(&empty).unwrap().generic_rank(), 0);
    }

    #[test]
    fn descending_tangent_on_the_axis() {
        let (c, a) = r3();
        let declared = vec![VectorField::coordinate(c.clone(), 2), VectorField::parse(&c, &["x", "y", "0"]).unwrap()];
        let t = descending_tangent(&a, &declared).unwrap();
        assert_eq!(eval_at(&t.t, &[rat(0), rat(0), rat(1)]).unwrap().rank(), 1);
        assert_eq!(t.t.generic_rank(), 3);
        assert_eq!(t.t_g.generators().len(), 2);
        assert!(descending_tangent(&a, &[VectorField::coordinate(c, 0)]).is_err());
    }

    #[test]
    fn measure_mass_matches_group() {
        let (_, a) = so3();
        let one = TrigPoly::constant(ratio(1, 1), a.angles().clone(), 0);
        assert!(crate::expr::trig_integrate(&one, a.haar()).unwrap().is_one());
    }
}
