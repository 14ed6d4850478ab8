//! Orbit-space reduction: re-expression in invariants, pushforward of
//! descending data, stratum charts, restriction and reduced Dirac structures.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::actions::{is_descending, is_invariant, ActionError, GroupAction, InvariantBasis};
use crate::calculus::{exterior_derivative_fn, pairing, CalculusError, OneForm, Section, VectorField};
use crate::dirac::{check_integrable, DiracStructure, IntegrabilityReport, ProbeReport};
use crate::distributions::{eval_at, fmt_point, DistError, Distribution, Membership};
use crate::expr::{Chart, ExprError, Monomial, Poly, Rat, RatFn};
use crate::linalg::{self, Solve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("{what} is not invariant: residual {residual}")]
    NotInvariant { what: String, residual: String },
    #[error("{what} is not expressible in the invariants at degree bound {bound}; try a larger bound")]
    NotExpressibleAtBound { what: String, bound: u32 },
    #[error("vector field {0} is not descending")]
    NotDescending(String),
    #[error("presentation does not match the one-form: difference {0}")]
    PresentationMismatch(String),
    #[error("section is not tangent to stratum {stratum}: residual {residual}")]
    NotTangentToStratum { stratum: String, residual: String },
    #[error("invalid stratum {stratum}: {reason}")]
    InvalidStratum { stratum: String, reason: String },
    #[error("invalid quotient map: {0}")]
    InvalidQuotient(String),
    #[error("spanning hypothesis not satisfied for stratum {stratum}: {reason}")]
    HypothesisNotSatisfied { stratum: String, reason: String },
    #[error("reduced generators {i} and {j} are not isotropic: pairing is {residual}")]
    NotIsotropic { i: usize, j: usize, residual: String },
    #[error("rank deficient on stratum {stratum} {site}: rank {rank}, expected {expected}")]
    RankDeficientOnStratum { stratum: String, site: String, rank: usize, expected: usize },
    #[error("no descending sections to reduce")]
    EmptyDescendingSet,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Dirac(#[from] crate::dirac::DiracError),
}

/// Result of [`reexpress`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reexpression {
    /// `q` with `q(f₁, …, f_k) = p`.
    Expressed(Poly),
    NotExpressible,
}

fn weighted_monomials(weights: &[u32], bound: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(i + 1, k, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, weights.len(), bound, &mut Vec::new(), &mut out);
    out
}

/// Finds a polynomial `q` of total degree `≤ bound` in the invariant symbols
/// with `q(f) = p`, by an exact linear solve over ℚ.
pub fn reexpress(p: &Poly, fns: &[Poly], bound: u32) -> Reexpression {
    let k = fns.len();
    if p.is_zero() {
        return Reexpression::Expressed(Poly::zero(k));
    }
    // Homogeneous invariants of positive degree grade the problem; keep only
    // candidates whose degree occurs in p.
    let graded = fns.iter().all(|f| f.is_homogeneous() && f.total_degree() > 0 && !f.is_zero());
    let p_degrees: BTreeSet<u32> = p.terms().map(|(m, _)| m.degree()).collect();
    let candidates: Vec<Vec<u32>> = weighted_monomials(&vec![1; k], bound)
        .into_iter()
        .filter(|e| !graded || p_degrees.contains(&e.iter().zip(fns).map(|(ei, f)| ei * f.total_degree()).sum()))
        .collect();
    let n = p.nvars();
    let mut values: Vec<Poly> = Vec::with_capacity(candidates.len());
    for e in &candidates {
        let v = e.iter().zip(fns).fold(Poly::one(n), |acc, (&ei, f)| if ei == 0 { acc } else { &acc * &f.pow(ei) });
        values.push(v);
    }
    let mut monos: BTreeSet<Monomial> = p.terms().map(|(m, _)| m.clone()).collect();
    for v in &values {
        monos.extend(v.terms().map(|(m, _)| m.clone()));
    }
    let monos: Vec<Monomial> = monos.into_iter().collect();
    let cols: Vec<Vec<Rat>> = values.iter().map(|v| monos.iter().map(|m| v.coefficient(m)).collect()).collect();
    let rhs: Vec<Rat> = monos.iter().map(|m| p.coefficient(m)).collect();
    match linalg::solve_q(&cols, &rhs) {
        Some(c) => Reexpression::Expressed(Poly::from_terms(
            k,
            candidates.into_iter().zip(c).filter(|(_, ci)| !ci.is_zero()).map(|(e, ci)| (Monomial::new(e), ci)),
        )),
        None => Reexpression::NotExpressible,
    }
}

/// The orbit map `π = (f₁, …, f_k)` onto a target chart.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientMap {
    target: Arc<Chart>,
    basis: InvariantBasis,
}

impl QuotientMap {
    pub fn new(basis: InvariantBasis, target: Arc<Chart>) -> Result<Self, ReductionError> {
        if target.dim() != basis.len() {
            return Err(ReductionError::InvalidQuotient(format!(
                "target {target} has {} coordinates for {} invariants",
                target.dim(),
                basis.len()
            )));
        }
        Ok(QuotientMap { target, basis })
    }

    pub fn source(&self) -> &Arc<Chart> {
        self.basis.action().chart()
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn action(&self) -> &GroupAction {
        self.basis.action()
    }

    /// `π(p)`.
    pub fn apply(&self, p: &[Rat]) -> Vec<Rat> {
        self.basis.fns().iter().map(|f| f.eval(p)).collect()
    }

    /// `f̄ ∘ π` for a function on the target chart.
    pub fn pull_back(&self, f: &RatFn) -> Result<RatFn, ReductionError> {
        let values: Vec<RatFn> = self.basis.fns().iter().cloned().map(RatFn::from_poly).collect();
        Ok(f.compose(&values)?)
    }
}

fn reexpress_checked(p: &Poly, q: &QuotientMap, bound: u32, what: &dyn Fn() -> String) -> Result<Poly, ReductionError> {
    match reexpress(p, q.basis.fns(), bound) {
        Reexpression::Expressed(e) => Ok(e),
        Reexpression::NotExpressible => Err(ReductionError::NotExpressibleAtBound { what: what(), bound }),
    }
}

/// `f̄` on the target chart with `f̄ ∘ π = f`.
pub fn pushforward_function(f: &RatFn, q: &QuotientMap, bound: u32) -> Result<RatFn, ReductionError> {
    let names = q.source().coords();
    let cert = is_invariant(f, q.action())?;
    if let Some((_, r)) = cert.residuals.first() {
        return Err(ReductionError::NotInvariant { what: f.display(names).to_string(), residual: r.display(names).to_string() });
    }
    let what = || f.display(names).to_string();
    let num = reexpress_checked(f.numer(), q, bound, &what)?;
    let den = reexpress_checked(f.denom(), q, bound, &what)?;
    let bar = RatFn::new(num, den)?;
    let back = q.pull_back(&bar)?;
    if back != *f {
        return Err(ReductionError::NotExpressibleAtBound { what: what(), bound });
    }
    Ok(bar)
}

/// `X̄ = Σᵢ (X(fᵢ))‾ ∂/∂f̄ᵢ` for a descending field.
pub fn pushforward_vf(x: &VectorField, q: &QuotientMap, bound: u32) -> Result<VectorField, ReductionError> {
    if x.chart() != q.source() {
        return Err(CalculusError::ChartMismatch(x.chart().to_string(), q.source().to_string()).into());
    }
    if !is_descending(x, q.action(), &[])?.holds() {
        return Err(ReductionError::NotDescending(x.to_string()));
    }
    let mut comps = Vec::with_capacity(q.target.dim());
    for f in q.basis.fns() {
        let xf = x.apply(&RatFn::from_poly(f.clone()));
        comps.push(pushforward_function(&xf, q, bound)?);
    }
    let bar = VectorField::new(q.target.clone(), comps)?;
    for (i, f) in q.basis.fns().iter().enumerate() {
        let lhs = q.pull_back(&bar.apply(&RatFn::var(i, q.target.dim())))?;
        if lhs != x.apply(&RatFn::from_poly(f.clone())) {
            return Err(ReductionError::NotExpressibleAtBound { what: x.to_string(), bound });
        }
    }
    Ok(bar)
}

/// A one-form given as `Σ gⱼ 𝐝fⱼ` with invariant `gⱼ`, `fⱼ`.
pub type Presentation = Vec<(RatFn, RatFn)>;

pub fn assemble_presentation(chart: &Arc<Chart>, presentation: &[(RatFn, RatFn)]) -> OneForm {
    presentation.iter().fold(OneForm::zero(chart.clone()), |acc, (g, f)| &acc + &exterior_derivative_fn(f, chart).scale(g))
}

/// `ᾱ = Σ ḡⱼ 𝐝f̄ⱼ` after checking `Σ gⱼ 𝐝fⱼ = a`.
pub fn pushforward_oneform(
    a: &OneForm,
    presentation: &[(RatFn, RatFn)],
    q: &QuotientMap,
    bound: u32,
) -> Result<OneForm, ReductionError> {
    let assembled = assemble_presentation(q.source(), presentation);
    if assembled != *a {
        return Err(ReductionError::PresentationMismatch((a - &assembled).to_string()));
    }
    let mut out = OneForm::zero(q.target.clone());
    for (g, f) in presentation {
        let gbar = pushforward_function(g, q, bound)?;
        let fbar = pushforward_function(f, q, bound)?;
        out = &out + &exterior_derivative_fn(&fbar, &q.target).scale(&gbar);
    }
    Ok(out)
}

/// A descending section with the presentation of its one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct PresentedSection {
    pub section: Section,
    pub presentation: Presentation,
}

pub fn pushforward_section(s: &PresentedSection, q: &QuotientMap, bound: u32) -> Result<Section, ReductionError> {
    let x = pushforward_vf(&s.section.x, q, bound)?;
    let alpha = pushforward_oneform(&s.section.alpha, &s.presentation, q, bound)?;
    Ok(Section::new(x, alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Relation {
    pub fn holds(self, v: &Rat) -> bool {
        match self {
            Relation::Gt => v.is_positive(),
            Relation::Ge => !v.is_negative(),
            Relation::Eq => v.is_zero(),
            Relation::Ne => !v.is_zero(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        Some(match s {
            ">" => Relation::Gt,
            ">=" => Relation::Ge,
            "=" | "==" => Relation::Eq,
            "!=" => Relation::Ne,
            _ => return None,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `h ⋈ 0` for a polynomial `h` in the target coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub poly: Poly,
    pub relation: Relation,
}

/// A chart on one stratum of the orbit space. Parameters are a subset of
/// the target coordinates; `embedding` gives every target coordinate as a
/// function of the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumChart {
    name: String,
    params: Arc<Chart>,
    embedding: Vec<RatFn>,
    /// Position of each parameter among the target coordinates.
    projection: Vec<usize>,
    constraints: Vec<Constraint>,
    upstairs_samples: Vec<Vec<Rat>>,
}

impl StratumChart {
    pub fn new(
        name: impl Into<String>,
        params: Arc<Chart>,
        embedding: Vec<RatFn>,
        constraints: Vec<Constraint>,
        upstairs_samples: Vec<Vec<Rat>>,
        q: &QuotientMap,
    ) -> Result<Self, ReductionError> {
        let name = name.into();
        let invalid = |reason: String| ReductionError::InvalidStratum { stratum: name.clone(), reason };
        let target = q.target();
        if embedding.len() != target.dim() {
            return Err(invalid(format!("embedding has {} entries for {} target coordinates", embedding.len(), target.dim())));
        }
        if embedding.iter().any(|e| e.nvars() != params.dim()) || constraints.iter().any(|c| c.poly.nvars() != target.dim()) {
            return Err(invalid("expression arity does not match the charts".into()));
        }
        let mut projection = Vec::with_capacity(params.dim());
        for (j, p) in params.coords().iter().enumerate() {
            let i = target.index_of(p).ok_or_else(|| invalid(format!("parameter {p} is not a target coordinate")))?;
            if embedding[i] != RatFn::var(j, params.dim()) {
                return Err(invalid(format!("embedding of {p} is not the parameter itself")));
            }
            projection.push(i);
        }
        let st = StratumChart { name: name.clone(), params, embedding, projection, constraints, upstairs_samples };
        for p in &st.upstairs_samples {
            if p.len() != q.source().dim() {
                return Err(invalid(format!("sample {} has the wrong length", fmt_point(p))));
            }
            let t = q.apply(p);
            if !st.contains_target_point(&t) {
                return Err(invalid(format!("sample {} does not project into the stratum", fmt_point(p))));
            }
        }
        Ok(st)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Arc<Chart> {
        &self.params
    }

    pub fn embedding(&self) -> &[RatFn] {
        &self.embedding
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn upstairs_samples(&self) -> &[Vec<Rat>] {
        &self.upstairs_samples
    }

    /// Parameter values of a target point (by projection).
    pub fn param_point(&self, t: &[Rat]) -> Vec<Rat> {
        self.projection.iter().map(|&i| t[i].clone()).collect()
    }

    /// Constraints hold and the point lies on the embedded chart.
    pub fn contains_target_point(&self, t: &[Rat]) -> bool {
        if !self.constraints.iter().all(|c| c.relation.holds(&c.poly.eval(t))) {
            return false;
        }
        let s = self.param_point(t);
        self.embedding.iter().zip(t).all(|(e, ti)| e.eval(&s).as_ref() == Some(ti))
    }

    /// Parameter points of the upstairs samples.
    pub fn param_samples(&self, q: &QuotientMap) -> Vec<Vec<Rat>> {
        self.upstairs_samples.iter().map(|p| self.param_point(&q.apply(p))).collect()
    }

    fn jacobian_columns(&self) -> Vec<Vec<RatFn>> {
        (0..self.params.dim()).map(|j| self.embedding.iter().map(|e| e.derivative(j)).collect()).collect()
    }
}

/// Restricts a target-chart section to the stratum: the vector part is the
/// unique `Y` with `Dψ·Y = X̄∘ψ`, the one-form part is `ψ*ᾱ`.
pub fn restrict_to_stratum(s: &Section, st: &StratumChart) -> Result<Section, ReductionError> {
    let m = st.params.dim();
    let along: Vec<RatFn> = s.x.components().iter().map(|c| c.compose(&st.embedding)).collect::<Result<_, _>>()?;
    let alpha_along: Vec<RatFn> = s.alpha.components().iter().map(|c| c.compose(&st.embedding)).collect::<Result<_, _>>()?;
    let not_tangent = |residual: String| ReductionError::NotTangentToStratum { stratum: st.name.clone(), residual };
    for c in st.constraints.iter().filter(|c| c.relation == Relation::Eq) {
        let xh = s.x.apply(&RatFn::from_poly(c.poly.clone())).compose(&st.embedding)?;
        if !xh.is_zero() {
            return Err(not_tangent(format!("X(h) = {} on the stratum", xh.display(st.params.coords()))));
        }
    }
    let cols = st.jacobian_columns();
    let y = match linalg::solve_columns(&cols, &along, m) {
        Solve::Solution(y) => y,
        Solve::Inconsistent { partial } => {
            let residual: Vec<String> = along
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let image = cols.iter().zip(&partial).fold(RatFn::zero(m), |acc, (c, yj)| &acc + &(&c[i] * yj));
                    (a - &image).display(st.params.coords()).to_string()
                })
                .collect();
            return Err(not_tangent(format!("({})", residual.join(", "))));
        }
    };
    let alpha: Vec<RatFn> =
        cols.iter().map(|col| alpha_along.iter().zip(col).fold(RatFn::zero(m), |acc, (a, d)| &acc + &(a * d))).collect();
    Ok(Section::new(VectorField::new(st.params.clone(), y)?, OneForm::new(st.params.clone(), alpha)?)?)
}

/// The Dirac structure induced on a stratum chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDirac {
    pub stratum: StratumChart,
    pub generators: Vec<Section>,
    /// Index of the upstairs descending section behind each generator.
    pub provenance: Vec<usize>,
    /// Pushforward of each descending section to the target chart.
    pub pushforwards: Vec<Section>,
    pub generic_rank: usize,
    pub sample_ranks: Vec<(Vec<Rat>, usize)>,
    /// Present when the upstairs structure is integrable.
    pub integrability: Option<IntegrabilityReport>,
}

impl ReducedDirac {
    pub fn distribution(&self) -> Distribution {
        Distribution::pontryagin(self.stratum.params.clone(), self.generators.clone()).expect("generators on the params chart")
    }

    /// Nonzero generators.
    pub fn frame(&self) -> Vec<Section> {
        self.generators.iter().filter(|g| !g.is_zero()).cloned().collect()
    }

    pub fn contains(&self, s: &Section) -> Result<Membership, ReductionError> {
        Ok(crate::distributions::membership_in(s, &self.generators)?)
    }
}

/// Pushes every descending section forward, restricts it to the stratum and
/// validates the result as a Lagrangian family of rank `dim(params)`.
pub fn reduced_dirac(
    ds: &[PresentedSection],
    upstairs: &DiracStructure,
    probe: &ProbeReport,
    q: &QuotientMap,
    st: &StratumChart,
    bound: u32,
) -> Result<ReducedDirac, ReductionError> {
    if ds.is_empty() {
        return Err(ReductionError::EmptyDescendingSet);
    }
    let hypothesis = |reason: String| ReductionError::HypothesisNotSatisfied { stratum: st.name.clone(), reason };
    for p in &st.upstairs_samples {
        match probe.samples.iter().find(|s| &s.point == p) {
            None => return Err(hypothesis(format!("no probe result at {}", fmt_point(p)))),
            Some(s) if !s.equal() => {
                return Err(hypothesis(format!(
                    "descending span has dimension {} at {}, intersection has {}",
                    s.span_dim,
                    fmt_point(p),
                    s.intersection_dim
                )))
            }
            Some(_) => {}
        }
    }
    let mut pushforwards = Vec::with_capacity(ds.len());
    let mut generators = Vec::with_capacity(ds.len());
    for s in ds {
        let bar = pushforward_section(s, q, bound)?;
        generators.push(restrict_to_stratum(&bar, st)?);
        pushforwards.push(bar);
    }
    let provenance = (0..ds.len()).collect();
    for (i, a) in generators.iter().enumerate() {
        for (j, b) in generators.iter().enumerate().skip(i) {
            let p = pairing(a, b)?;
            if !p.is_zero() {
                return Err(ReductionError::NotIsotropic { i, j, residual: p.display(st.params.coords()).to_string() });
            }
        }
    }
    let m = st.params.dim();
    let rows: Vec<Vec<RatFn>> = generators.iter().map(Section::to_vector).collect();
    let generic_rank = linalg::rank(&rows, m);
    let deficient =
        |site: String, rank: usize| ReductionError::RankDeficientOnStratum { stratum: st.name.clone(), site, rank, expected: m };
    if generic_rank != m {
        return Err(deficient("generically".into(), generic_rank));
    }
    let dist = Distribution::pontryagin(st.params.clone(), generators.clone())?;
    let mut sample_ranks = Vec::new();
    for p in st.param_samples(q) {
        let r = eval_at(&dist, &p)?.rank();
        if r != m {
            return Err(deficient(format!("at {}", fmt_point(&p)), r));
        }
        sample_ranks.push((p, r));
    }
    let mut reduced = ReducedDirac {
        stratum: st.clone(),
        generators,
        provenance,
        pushforwards,
        generic_rank,
        sample_ranks,
        integrability: None,
    };
    if check_integrable(upstairs)?.holds() {
        reduced.integrability = Some(reduced_integrability(&reduced)?);
    }
    Ok(reduced)
}

/// Courant brackets of all pairs of nonzero reduced generators, with
/// membership in the reduced structure.
pub fn reduced_integrability(r: &ReducedDirac) -> Result<IntegrabilityReport, ReductionError> {
    use crate::calculus::courant_bracket;
    use crate::dirac::BracketCheck;
    let gens = &r.generators;
    let mut checks = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate().skip(i + 1) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let bracket = courant_bracket(a, b)?;
            let membership = crate::distributions::membership_in(&bracket, gens)?;
            checks.push(BracketCheck { i, j, bracket, membership });
        }
    }
    Ok(IntegrabilityReport { checks })
}
