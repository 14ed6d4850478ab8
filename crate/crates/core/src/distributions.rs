//! Finitely generated subdistributions of `TM`, `T*M` and `TM ⊕ T*M`,
//! their pointwise and generic orthogonals, membership and the
//! intersection diagnostics.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::calculus::{CalculusError, OneForm, Section, VectorField};
use crate::expr::{lcm, Chart, Poly, Rat, RatFn};
use crate::linalg::{self, Solve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("generator {generator} has a vanishing denominator at {point}")]
    DenominatorVanishes { generator: usize, point: String },
    #[error("generator {0} does not match the distribution kind")]
    KindMismatch(usize),
    #[error("not a subbundle: pointwise ranks {0:?} across samples")]
    NotASubbundle(Vec<usize>),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

pub fn fmt_point(p: &[Rat]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Which bundle a distribution lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Tangent,
    Cotangent,
    Pontryagin,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Tangent => "tangent",
            Kind::Cotangent => "cotangent",
            Kind::Pontryagin => "pontryagin",
        })
    }
}

/// A distribution spanned by finitely many sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    chart: Arc<Chart>,
    kind: Kind,
    generators: Vec<Section>,
    generic_only: bool,
}

impl Distribution {
    pub fn new(chart: Arc<Chart>, kind: Kind, generators: Vec<Section>) -> Result<Self, DistError> {
        for (i, g) in generators.iter().enumerate() {
            if **g.chart() != *chart {
                return Err(CalculusError::ChartMismatch(g.chart().to_string(), chart.to_string()).into());
            }
            let ok = match kind {
                Kind::Tangent => g.alpha.is_zero(),
                Kind::Cotangent => g.x.is_zero(),
                Kind::Pontryagin => true,
            };
            if !ok {
                return Err(DistError::KindMismatch(i));
            }
        }
        Ok(Distribution { chart, kind, generators, generic_only: false })
    }

    pub fn tangent(chart: Arc<Chart>, fields: Vec<VectorField>) -> Result<Self, DistError> {
        Self::new(chart, Kind::Tangent, fields.into_iter().map(Section::tangent).collect())
    }

    pub fn cotangent(chart: Arc<Chart>, forms: Vec<OneForm>) -> Result<Self, DistError> {
        Self::new(chart, Kind::Cotangent, forms.into_iter().map(Section::cotangent).collect())
    }

    pub fn pontryagin(chart: Arc<Chart>, sections: Vec<Section>) -> Result<Self, DistError> {
        Self::new(chart, Kind::Pontryagin, sections)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn generators(&self) -> &[Section] {
        &self.generators
    }

    /// Set when the generators come from a fraction-field computation and
    /// are only certified on the locus of generic rank.
    pub fn generic_only(&self) -> bool {
        self.generic_only
    }

    /// Width of fiber vectors: `n` for tangent/cotangent, `2n` otherwise.
    pub fn fiber_dim(&self) -> usize {
        match self.kind {
            Kind::Pontryagin => 2 * self.chart.dim(),
            _ => self.chart.dim(),
        }
    }

    fn fiber_vector(&self, s: &Section) -> Vec<RatFn> {
        match self.kind {
            Kind::Tangent => s.x.components().to_vec(),
            Kind::Cotangent => s.alpha.components().to_vec(),
            Kind::Pontryagin => s.to_vector(),
        }
    }

    /// Rank over the function field.
    pub fn generic_rank(&self) -> usize {
        let rows: Vec<Vec<RatFn>> = self.generators.iter().map(|g| self.fiber_vector(g)).collect();
        linalg::rank(&rows, self.chart.dim())
    }

    /// Least common multiple of all generator denominators.
    pub fn denominator_locus(&self) -> Poly {
        let n = self.chart.dim();
        let mut l = Poly::one(n);
        for g in &self.generators {
            for c in g.x.components().iter().chain(g.alpha.components()) {
                if !c.is_polynomial() {
                    l = lcm(&l, c.denom());
                }
            }
        }
        l
    }

    /// Sum of two distributions on the same chart.
    pub fn sum(&self, other: &Distribution) -> Result<Distribution, DistError> {
        let kind = if self.kind == other.kind { self.kind } else { Kind::Pontryagin };
        let gens = self.generators.iter().chain(&other.generators).cloned().collect();
        Distribution::new(self.chart.clone(), kind, gens)
    }

    /// Same generators viewed in the Pontryagin bundle.
    pub fn as_pontryagin(&self) -> Distribution {
        Distribution { kind: Kind::Pontryagin, ..self.clone() }
    }
}

/// The fiber `Δ(m)` of a distribution at a rational point, as an exact
/// reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSubspace {
    pub point: Vec<Rat>,
    pub kind: Kind,
    pub basis: Vec<Vec<Rat>>,
    pub ambient: usize,
}

impl PointSubspace {
    pub fn new(point: Vec<Rat>, kind: Kind, vectors: Vec<Vec<Rat>>, ambient: usize) -> Self {
        let basis = if vectors.is_empty() { Vec::new() } else { linalg::rref_q(vectors).0 };
        PointSubspace { point, kind, basis, ambient }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors in `ℚ^{2n}` (tangent part first).
    pub fn embedded(&self) -> Vec<Vec<Rat>> {
        let zeros = |k: usize| vec![Rat::zero(); k];
        match self.kind {
            Kind::Pontryagin => self.basis.clone(),
            Kind::Tangent => self.basis.iter().map(|v| v.iter().cloned().chain(zeros(v.len())).collect()).collect(),
            Kind::Cotangent => self.basis.iter().map(|v| zeros(v.len()).into_iter().chain(v.iter().cloned()).collect()).collect(),
        }
    }

    /// Pontryagin-bundle version of this fiber.
    pub fn to_pontryagin(&self) -> PointSubspace {
        let ambient = match self.kind {
            Kind::Pontryagin => self.ambient,
            _ => 2 * self.ambient,
        };
        PointSubspace::new(self.point.clone(), Kind::Pontryagin, self.embedded(), ambient)
    }

    pub fn same_span(&self, other: &PointSubspace) -> bool {
        self.to_pontryagin().basis == other.to_pontryagin().basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank_q(&rows) == self.rank()
    }

    pub fn intersection(&self, other: &PointSubspace) -> PointSubspace {
        let a = self.to_pontryagin();
        let b = other.to_pontryagin();
        let basis = linalg::intersection_q(&a.basis, &b.basis, a.ambient);
        PointSubspace { point: self.point.clone(), kind: Kind::Pontryagin, basis, ambient: a.ambient }
    }

    pub fn sum(&self, other: &PointSubspace) -> PointSubspace {
        let a = self.to_pontryagin();
        let b = other.to_pontryagin();
        let mut v = a.basis;
        v.extend(b.basis);
        PointSubspace::new(self.point.clone(), Kind::Pontryagin, v, a.ambient)
    }

    /// Orthogonal in `ℚ^{2n}` under `⟨(u,α),(v,β)⟩ = β(u) + α(v)`.
    pub fn orthogonal(&self) -> PointSubspace {
        let full = self.to_pontryagin();
        let n = full.ambient / 2;
        let rows: Vec<Vec<Rat>> = full.basis.iter().map(|e| swap_halves(e, n)).collect();
        let ker = linalg::kernel_q(&rows, 2 * n);
        PointSubspace::new(self.point.clone(), Kind::Pontryagin, ker, 2 * n)
    }
}

fn swap_halves<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    v[n..].iter().chain(&v[..n]).cloned().collect()
}

/// `Δ(m) = span{σᵢ(m)}`.
pub fn eval_at(d: &Distribution, p: &[Rat]) -> Result<PointSubspace, DistError> {
    let mut vecs = Vec::with_capacity(d.generators.len());
    for (i, g) in d.generators.iter().enumerate() {
        let v = d.fiber_vector(g);
        let vals: Option<Vec<Rat>> = v.iter().map(|c| c.eval(p)).collect();
        let vals = vals.ok_or_else(|| DistError::DenominatorVanishes { generator: i, point: fmt_point(p) })?;
        vecs.push(vals);
    }
    Ok(PointSubspace::new(p.to_vec(), d.kind, vecs, d.fiber_dim()))
}

/// `Δ(m)^{⊥p}` inside the Pontryagin fiber `ℚ^{2n}`.
pub fn pointwise_orthogonal_at(d: &Distribution, p: &[Rat]) -> Result<PointSubspace, DistError> {
    Ok(eval_at(d, p)?.orthogonal())
}

/// Orthogonal computed over the function field. Tangent input gives the
/// annihilator codistribution, cotangent input the annihilated tangent
/// distribution, Pontryagin input the full orthogonal.
pub fn generic_orthogonal(d: &Distribution) -> Distribution {
    let n = d.chart.dim();
    let (rows, width): (Vec<Vec<RatFn>>, usize) = match d.kind {
        Kind::Tangent => (d.generators.iter().map(|g| g.x.components().to_vec()).collect(), n),
        Kind::Cotangent => (d.generators.iter().map(|g| g.alpha.components().to_vec()).collect(), n),
        Kind::Pontryagin => (d.generators.iter().map(|g| swap_halves(&g.to_vector(), n)).collect(), 2 * n),
    };
    let ker = if rows.is_empty() {
        (0..width).map(|i| (0..width).map(|j| if i == j { Poly::one(n) } else { Poly::zero(n) }).collect()).collect()
    } else {
        linalg::kernel(&rows, width, n)
    };
    let to_fns = |v: Vec<Poly>| -> Vec<RatFn> { v.into_iter().map(RatFn::from_poly).collect() };
    let chart = d.chart.clone();
    let (kind, generators) = match d.kind {
        Kind::Tangent => (
            Kind::Cotangent,
            ker.into_iter().map(|v| Section::cotangent(OneForm::new(chart.clone(), to_fns(v)).expect("width n"))).collect(),
        ),
        Kind::Cotangent => (
            Kind::Tangent,
            ker.into_iter().map(|v| Section::tangent(VectorField::new(chart.clone(), to_fns(v)).expect("width n"))).collect(),
        ),
        Kind::Pontryagin => (
            Kind::Pontryagin,
            ker.into_iter().map(|v| Section::from_vector(chart.clone(), to_fns(v)).expect("width 2n")).collect(),
        ),
    };
    Distribution { chart, kind, generators, generic_only: true }
}

/// Full Pontryagin orthogonal over the function field (`TM ⊕ 𝒯°` for a
/// tangent distribution `𝒯`).
pub fn generic_orthogonal_full(d: &Distribution) -> Distribution {
    generic_orthogonal(&d.as_pontryagin())
}

/// Result of a generic membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Coefficients `cᵢ` with `s = Σ cᵢ σᵢ` exactly.
    Member(Vec<RatFn>),
    /// `s − Σ cᵢ σᵢ` for the best partial solution.
    NotMember(Section),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn witness(&self) -> Option<&[RatFn]> {
        match self {
            Membership::Member(c) => Some(c),
            Membership::NotMember(_) => None,
        }
    }
}

/// Decides `s ∈ span_{ℚ(x)}{σᵢ}` against the generators of `d`.
pub fn membership_generic(s: &Section, d: &Distribution) -> Result<Membership, DistError> {
    membership_in(s, &d.generators)
}

/// Membership against an explicit generator list.
pub fn membership_in(s: &Section, generators: &[Section]) -> Result<Membership, DistError> {
    let chart = s.chart();
    if let Some(g) = generators.iter().find(|g| g.chart() != chart) {
        return Err(CalculusError::ChartMismatch(g.chart().to_string(), chart.to_string()).into());
    }
    let n = chart.dim();
    let rhs = s.to_vector();
    if generators.is_empty() {
        return Ok(if s.is_zero() { Membership::Member(Vec::new()) } else { Membership::NotMember(s.clone()) });
    }
    let cols: Vec<Vec<RatFn>> = generators.iter().map(Section::to_vector).collect();
    match linalg::solve_columns(&cols, &rhs, n) {
        Solve::Solution(c) => Ok(Membership::Member(c)),
        Solve::Inconsistent { partial } => {
            let combo = combine(chart, generators, &partial);
            Ok(Membership::NotMember(s - &combo))
        }
    }
}

/// `Σ cᵢ σᵢ`.
pub fn combine(chart: &Arc<Chart>, generators: &[Section], coeffs: &[RatFn]) -> Section {
    generators
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .fold(Section::zero(chart.clone()), |acc, (g, c)| &acc + &g.scale(c))
}

/// Verdicts of the four equivalent intersection conditions at samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionReport {
    /// Pointwise ranks of `Δ₁`, `Δ₂`.
    pub ranks: (usize, usize),
    /// Generic orthogonal of `Δ₁ + Δ₂` attains its generic rank at every sample.
    pub smooth_orthogonal: bool,
    /// `(Δ₁ + Δ₂)^⊥(m) = Δ₁(m)^⊥ ∩ Δ₂(m)^⊥` at every sample.
    pub orthogonal_of_sum: bool,
    /// `((Δ₁ + Δ₂)^⊥)^⊥(m) = Δ₁(m) + Δ₂(m)` at every sample.
    pub double_orthogonal: bool,
    /// `Δ₁^⊥ ∩ Δ₂^⊥` has constant rank across samples.
    pub constant_rank: bool,
    /// Rank of `Δ₁(m)^⊥ ∩ Δ₂(m)^⊥` at each sample.
    pub intersection_ranks: Vec<usize>,
}

impl IntersectionReport {
    pub fn all_hold(&self) -> bool {
        self.smooth_orthogonal && self.orthogonal_of_sum && self.double_orthogonal && self.constant_rank
    }
}

fn constant_ranks(d: &Distribution, samples: &[Vec<Rat>]) -> Result<usize, DistError> {
    let ranks: Vec<usize> = samples.iter().map(|p| eval_at(d, p).map(|s| s.rank())).collect::<Result<_, _>>()?;
    match ranks.first() {
        Some(&r) if ranks.iter().all(|&x| x == r) => Ok(r),
        None => Ok(0),
        _ => Err(DistError::NotASubbundle(ranks)),
    }
}

/// Evaluates the four intersection conditions for two subbundles at samples.
pub fn intersection_report(d1: &Distribution, d2: &Distribution, samples: &[Vec<Rat>]) -> Result<IntersectionReport, DistError> {
    let r1 = constant_ranks(d1, samples)?;
    let r2 = constant_ranks(d2, samples)?;
    let sum = d1.as_pontryagin().sum(&d2.as_pontryagin())?;
    let orth = generic_orthogonal(&sum);
    let generic = orth.generic_rank();
    let mut smooth = true;
    let mut of_sum = true;
    let mut double = true;
    let mut inter_ranks = Vec::with_capacity(samples.len());
    for p in samples {
        let at = eval_at(&orth, p)?;
        smooth &= at.rank() == generic;
        let pointwise = eval_at(d1, p)?.orthogonal().intersection(&eval_at(d2, p)?.orthogonal());
        inter_ranks.push(pointwise.rank());
        of_sum &= at.same_span(&pointwise);
        let span = eval_at(d1, p)?.sum(&eval_at(d2, p)?);
        double &= at.orthogonal().same_span(&span);
    }
    let constant = inter_ranks.windows(2).all(|w| w[0] == w[1]);
    let report = IntersectionReport {
        ranks: (r1, r2),
        smooth_orthogonal: smooth,
        orthogonal_of_sum: of_sum,
        double_orthogonal: double,
        constant_rank: constant,
        intersection_ranks: inter_ranks,
    };
    let verdicts = [smooth, of_sum, double, constant];
    if verdicts.iter().any(|&v| v) && !report.all_hold() {
        return Err(DistError::InternalInconsistency(format!("mixed intersection verdicts {verdicts:?}")));
    }
    Ok(report)
}
