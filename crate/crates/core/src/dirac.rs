//! Dirac structures presented by a frame of `n` sections: validation,
//! integrability, invariance, descending sections and the spanning probe.

use std::sync::Arc;

use thiserror::Error;

use crate::actions::{
    fundamental_fields, is_descending, is_invariant, ActionError, DescendingCertificate, GroupAction, Invariance,
};
use crate::calculus::{courant_bracket, lie_derivative_section, pairing, CalculusError, OneForm, Section, VectorField};
use crate::distributions::{eval_at, fmt_point, membership_generic, DistError, Distribution, Kind, Membership, PointSubspace};
use crate::expr::{Chart, Poly, Rat, RatFn};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiracError {
    #[error("expected {expected} generators, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("generators {i} and {j} are not isotropic: pairing is {residual}")]
    NotIsotropic { i: usize, j: usize, residual: String },
    #[error("rank deficient {site}: rank {rank}, expected {expected}")]
    RankDeficient { site: String, rank: usize, expected: usize },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// Certificates collected while validating a Dirac frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracCertificates {
    pub generic_rank: usize,
    pub sample_ranks: Vec<(Vec<Rat>, usize)>,
    /// A maximal minor of the frame when it is not constant: the frame may
    /// degenerate on its zero set.
    pub degeneracy_minor: Option<Poly>,
}

/// A Lagrangian subbundle of `TM ⊕ T*M` given by `n` sections.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracStructure {
    chart: Arc<Chart>,
    generators: Vec<Section>,
    certificates: DiracCertificates,
}

/// Validates `n` generators: all pairings vanish identically and the rank is
/// `n` over the function field and at every sample.
pub fn new_dirac(generators: Vec<Section>, samples: &[Vec<Rat>]) -> Result<DiracStructure, DiracError> {
    let chart = generators.first().map(|g| g.chart().clone()).ok_or(DiracError::GeneratorCount { expected: 1, got: 0 })?;
    let n = chart.dim();
    if generators.len() != n {
        return Err(DiracError::GeneratorCount { expected: n, got: generators.len() });
    }
    for (i, gi) in generators.iter().enumerate() {
        for (j, gj) in generators.iter().enumerate().skip(i) {
            let p = pairing(gi, gj)?;
            if !p.is_zero() {
                return Err(DiracError::NotIsotropic { i, j, residual: p.display(chart.coords()).to_string() });
            }
        }
    }
    let rows: Vec<Vec<RatFn>> = generators.iter().map(Section::to_vector).collect();
    let mat: Vec<Vec<Poly>> = rows.iter().map(|r| linalg::clear_row(r, n)).collect();
    let ech = linalg::bareiss(mat, 2 * n, n);
    if ech.rank() != n {
        return Err(DiracError::RankDeficient { site: "generically".into(), rank: ech.rank(), expected: n });
    }
    let degeneracy_minor = ech.last_pivot().filter(|p| !p.is_constant()).cloned();
    let d = Distribution::pontryagin(chart.clone(), generators.clone())?;
    let mut sample_ranks = Vec::with_capacity(samples.len());
    for p in samples {
        let r = eval_at(&d, p)?.rank();
        if r != n {
            return Err(DiracError::RankDeficient { site: format!("at {}", fmt_point(p)), rank: r, expected: n });
        }
        sample_ranks.push((p.clone(), r));
    }
    let certificates = DiracCertificates { generic_rank: n, sample_ranks, degeneracy_minor };
    Ok(DiracStructure { chart, generators, certificates })
}

impl DiracStructure {
    /// Normalizes an over-complete spanning set to `n` independent
    /// generators, keeping the earliest independent ones.
    pub fn from_spanning(sections: Vec<Section>, samples: &[Vec<Rat>]) -> Result<Self, DiracError> {
        let Some(first) = sections.first() else {
            return Err(DiracError::GeneratorCount { expected: 1, got: 0 });
        };
        let n = first.chart().dim();
        let mut kept: Vec<Section> = Vec::with_capacity(n);
        for s in sections {
            let mut rows: Vec<Vec<RatFn>> = kept.iter().map(Section::to_vector).collect();
            rows.push(s.to_vector());
            if linalg::rank(&rows, n) == rows.len() {
                kept.push(s);
            }
        }
        new_dirac(kept, samples)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn generators(&self) -> &[Section] {
        &self.generators
    }

    pub fn certificates(&self) -> &DiracCertificates {
        &self.certificates
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::pontryagin(self.chart.clone(), self.generators.clone()).expect("validated generators")
    }

    pub fn contains(&self, s: &Section) -> Result<Membership, DiracError> {
        Ok(membership_generic(s, &self.distribution())?)
    }
}

/// Courant bracket of one generator pair and its membership in `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketCheck {
    pub i: usize,
    pub j: usize,
    pub bracket: Section,
    pub membership: Membership,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub checks: Vec<BracketCheck>,
}

impl IntegrabilityReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.membership.is_member())
    }

    pub fn failing(&self) -> impl Iterator<Item = &BracketCheck> {
        self.checks.iter().filter(|c| !c.membership.is_member())
    }
}

pub fn check_integrable(d: &DiracStructure) -> Result<IntegrabilityReport, DiracError> {
    let dist = d.distribution();
    let mut checks = Vec::new();
    for (i, a) in d.generators.iter().enumerate() {
        for (j, b) in d.generators.iter().enumerate().skip(i + 1) {
            let bracket = courant_bracket(a, b)?;
            let membership = membership_generic(&bracket, &dist)?;
            checks.push(BracketCheck { i, j, bracket, membership });
        }
    }
    Ok(IntegrabilityReport { checks })
}

/// `(L_ξ X, L_ξ α)` for one generator and one fundamental field.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCheck {
    pub generator: usize,
    pub xi: usize,
    pub derivative: Section,
    pub membership: Membership,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracActionReport {
    pub checks: Vec<SymmetryCheck>,
}

impl DiracActionReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.membership.is_member())
    }
}

pub fn check_dirac_action(d: &DiracStructure, a: &GroupAction) -> Result<DiracActionReport, DiracError> {
    let dist = d.distribution();
    let mut checks = Vec::new();
    for (generator, s) in d.generators.iter().enumerate() {
        for (xi, field) in fundamental_fields(a).iter().enumerate() {
            let derivative = lie_derivative_section(field, s)?;
            let membership = membership_generic(&derivative, &dist)?;
            checks.push(SymmetryCheck { generator, xi, derivative, membership });
        }
    }
    Ok(DiracActionReport { checks })
}

/// Certificates for one candidate descending section.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub index: usize,
    pub in_d: Membership,
    /// Nonzero values `α(ξ_i)`.
    pub annihilation_residuals: Vec<(usize, RatFn)>,
    pub alpha_invariance: Invariance<OneForm>,
    pub descending: DescendingCertificate,
}

impl CandidateReport {
    pub fn passes(&self) -> bool {
        self.in_d.is_member()
            && self.annihilation_residuals.is_empty()
            && self.alpha_invariance.holds()
            && self.descending.holds()
    }

    /// Names of the failing certificates.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.in_d.is_member() {
            out.push("not a section of D");
        }
        if !self.annihilation_residuals.is_empty() {
            out.push("one-form does not annihilate the vertical space");
        }
        if !self.alpha_invariance.holds() {
            out.push("one-form is not invariant");
        }
        if !self.descending.holds() {
            out.push("vector field does not preserve the vertical space");
        }
        out
    }
}

/// The accepted descending sections `𝒟^G` with per-candidate certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct DescendingSet {
    pub sections: Vec<Section>,
    /// Candidate index of each accepted section.
    pub accepted: Vec<usize>,
    pub reports: Vec<CandidateReport>,
}

pub fn verify_descending(
    candidates: &[Section],
    d: &DiracStructure,
    a: &GroupAction,
    samples: &[Vec<Rat>],
) -> Result<DescendingSet, DiracError> {
    let dist = d.distribution();
    let mut out = DescendingSet { sections: Vec::new(), accepted: Vec::new(), reports: Vec::new() };
    for (index, s) in candidates.iter().enumerate() {
        let in_d = membership_generic(s, &dist)?;
        let mut annihilation_residuals = Vec::new();
        for (i, xi) in fundamental_fields(a).iter().enumerate() {
            let r = s.alpha.contract(xi)?;
            if !r.is_zero() {
                annihilation_residuals.push((i, r));
            }
        }
        let alpha_invariance = is_invariant(&s.alpha, a)?;
        let descending = is_descending(&s.x, a, samples)?;
        let report = CandidateReport { index, in_d, annihilation_residuals, alpha_invariance, descending };
        if report.passes() {
            out.sections.push(s.clone());
            out.accepted.push(index);
        }
        out.reports.push(report);
    }
    Ok(out)
}

/// Probe outcome at one sample point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSample {
    pub point: Vec<Rat>,
    /// `dim span{s(m) : s descending}`.
    pub span_dim: usize,
    /// `dim D(m) ∩ (𝒯(m) ⊕ 𝒱°_G(m))`.
    pub intersection_dim: usize,
    /// Whether every descending value lies in the intersection.
    pub contained: bool,
}

impl ProbeSample {
    pub fn equal(&self) -> bool {
        self.contained && self.span_dim == self.intersection_dim
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub samples: Vec<ProbeSample>,
}

impl ProbeReport {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(ProbeSample::equal)
    }

    pub fn deficient(&self) -> impl Iterator<Item = &ProbeSample> {
        self.samples.iter().filter(|s| !s.equal())
    }
}

/// Compares the span of descending sections with `D ∩ (𝒯 ⊕ 𝒱°_G)` pointwise.
pub fn spanning_hypothesis_probe(
    d: &DiracStructure,
    t: &Distribution,
    vg: &Distribution,
    ds: &DescendingSet,
    samples: &[Vec<Rat>],
) -> Result<ProbeReport, DiracError> {
    for other in [t.chart(), vg.chart()] {
        if other != &d.chart {
            return Err(CalculusError::ChartMismatch(other.to_string(), d.chart.to_string()).into());
        }
    }
    let dist = d.distribution();
    let span = Distribution::pontryagin(d.chart.clone(), ds.sections.clone())?;
    let mut out = Vec::with_capacity(samples.len());
    for p in samples {
        let dm = eval_at(&dist, p)?;
        let target = dm.intersection(&eval_at(t, p)?.sum(&eval_at(vg, p)?));
        let sm: PointSubspace = eval_at(&span, p)?;
        let contained = sm.basis.iter().all(|v| target.contains(v));
        out.push(ProbeSample { point: p.clone(), span_dim: sm.rank(), intersection_dim: target.rank(), contained });
    }
    Ok(ProbeReport { samples: out })
}

/// The four characteristic distributions of a Dirac structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicDistributions {
    /// `{X : (X, 0) ∈ D}`
    pub g0: Distribution,
    /// Projection of `D` to `TM`.
    pub g1: Distribution,
    /// `{α : (0, α) ∈ D}`
    pub p0: Distribution,
    /// Projection of `D` to `T*M`.
    pub p1: Distribution,
}

/// `G₀` over the function field.
pub fn gauge_distribution(d: &DiracStructure) -> Distribution {
    characteristic_distributions(d).g0
}

pub fn characteristic_distributions(d: &DiracStructure) -> CharacteristicDistributions {
    characteristic_distributions_of(&d.chart, &d.generators)
}

/// Characteristic distributions of the span of an arbitrary frame.
pub fn characteristic_distributions_of(chart: &Arc<Chart>, generators: &[Section]) -> CharacteristicDistributions {
    let chart = chart.clone();
    let n = chart.dim();
    let fields: Vec<VectorField> = generators.iter().map(|g| g.x.clone()).collect();
    let forms: Vec<OneForm> = generators.iter().map(|g| g.alpha.clone()).collect();
    // Coefficient vectors c with Σ cᵢ αᵢ = 0 (resp. Σ cᵢ Xᵢ = 0).
    let relations = |parts: Vec<Vec<RatFn>>| -> Vec<Vec<RatFn>> {
        let rows: Vec<Vec<RatFn>> = (0..n).map(|k| parts.iter().map(|v| v[k].clone()).collect()).collect();
        linalg::kernel(&rows, parts.len(), n).into_iter().map(|v| v.into_iter().map(RatFn::from_poly).collect()).collect()
    };
    let combine_fields = |c: &[RatFn]| -> VectorField {
        fields.iter().zip(c).fold(VectorField::zero(chart.clone()), |acc, (f, ci)| &acc + &f.scale(ci))
    };
    let combine_forms =
        |c: &[RatFn]| -> OneForm { forms.iter().zip(c).fold(OneForm::zero(chart.clone()), |acc, (f, ci)| &acc + &f.scale(ci)) };
    let g0_gens = relations(forms.iter().map(|f| f.components().to_vec()).collect());
    let p0_gens = relations(fields.iter().map(|f| f.components().to_vec()).collect());
    let g0 =
        Distribution::new(chart.clone(), Kind::Tangent, g0_gens.iter().map(|c| Section::tangent(combine_fields(c))).collect())
            .expect("tangent sections");
    let p0 =
        Distribution::new(chart.clone(), Kind::Cotangent, p0_gens.iter().map(|c| Section::cotangent(combine_forms(c))).collect())
            .expect("cotangent sections");
    let g1 = Distribution::tangent(chart.clone(), fields.clone()).expect("same chart");
    let p1 = Distribution::cotangent(chart.clone(), forms.clone()).expect("same chart");
    CharacteristicDistributions { g0, g1, p0, p1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{descending_tangent, invariant_codistribution, InvariantBasis};
    use crate::expr::rat;

    fn r3() -> Arc<Chart> {
        Chart::new("R3", &["x", "y", "z"]).unwrap()
    }

    fn sec(c: &Arc<Chart>, x: &[&str], a: &[&str]) -> Section {
        Section::parse(c, x, a).unwrap()
    }

    fn s1_dirac(c: &Arc<Chart>) -> DiracStructure {
        let gens = vec![
            sec(c, &["1", "0", "0"], &["0", "1", "0"]),
            sec(c, &["0", "1", "0"], &["-1", "0", "0"]),
            sec(c, &["0", "0", "1"], &["0", "0", "0"]),
        ];
        new_dirac(gens, &[vec![rat(1), rat(2), rat(3)]]).unwrap()
    }

    fn rotation(c: &Arc<Chart>) -> GroupAction {
        GroupAction::torus(c.clone(), vec![VectorField::parse(c, &["-y", "x", "0"]).unwrap()]).unwrap()
    }

    #[test]
    fn constant_frame_is_a_closed_invariant_dirac_structure() {
        let c = r3();
        let d = s1_dirac(&c);
        assert!(d.certificates().degeneracy_minor.is_none());
        let integ = check_integrable(&d).unwrap();
        assert!(integ.holds());
        assert!(integ.checks.iter().all(|k| k.bracket.is_zero()));
        assert!(check_dirac_action(&d, &rotation(&c)).unwrap().holds());
    }

    #[test]
    fn isotropy_and_rank_are_enforced() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let bad = vec![sec(&c, &["1", "0"], &["1", "0"]), sec(&c, &["0", "1"], &["0", "0"])];
        match new_dirac(bad, &[]) {
            Err(DiracError::NotIsotropic { i: 0, j: 0, residual }) => assert_eq!(residual, "2"),
            other => panic!("{other:?}"),
        }
        let deficient = vec![sec(&c, &["1", "0"], &["0", "0"]), sec(&c, &["x", "0"], &["0", "0"])];
        assert!(matches!(new_dirac(deficient, &[]), Err(DiracError::RankDeficient { .. })));
        let degenerate = vec![sec(&c, &["x", "0"], &["0", "0"]), sec(&c, &["0", "1"], &["0", "0"])];
        let d = new_dirac(degenerate.clone(), &[vec![rat(1), rat(0)]]).unwrap();
        assert!(d.certificates().degeneracy_minor.is_some());
        assert!(matches!(new_dirac(degenerate, &[vec![rat(0), rat(1)]]), Err(DiracError::RankDeficient { .. })));
        assert!(matches!(new_dirac(vec![sec(&c, &["1", "0"], &["0", "0"])], &[]), Err(DiracError::GeneratorCount { .. })));
    }

    #[test]
    fn over_complete_sets_are_normalized() {
        let c = r3();
        let gens = vec![
            sec(&c, &["1", "0", "0"], &["0", "1", "0"]),
            sec(&c, &["2", "0", "0"], &["0", "2", "0"]),
            sec(&c, &["0", "1", "0"], &["-1", "0", "0"]),
            sec(&c, &["0", "0", "1"], &["0", "0", "0"]),
        ];
        let d = DiracStructure::from_spanning(gens, &[]).unwrap();
        assert_eq!(d.generators().len(), 3);
    }

    #[test]
    fn twisted_graph_is_not_integrable() {
        let c = r3();
        let gens = vec![
            sec(&c, &["1", "0", "0"], &["0", "0", "y"]),
            sec(&c, &["0", "1", "0"], &["0", "0", "0"]),
            sec(&c, &["0", "0", "1"], &["-y", "0", "0"]),
        ];
        let d = new_dirac(gens, &[]).unwrap();
        let report = check_integrable(&d).unwrap();
        assert!(!report.holds());
        let failing: Vec<(usize, usize)> = report.failing().map(|k| (k.i, k.j)).collect();
        assert!(!failing.is_empty());
    }

    #[test]
    fn non_symmetric_action_is_detected() {
        let c = r3();
        let d = s1_dirac(&c);
        let yz = GroupAction::torus(c.clone(), vec![VectorField::parse(&c, &["0", "-z", "y"]).unwrap()]).unwrap();
        let report = check_dirac_action(&d, &yz).unwrap();
        assert!(!report.holds());
        let bad = report.checks.iter().find(|k| !k.membership.is_member()).unwrap();
        assert_eq!(bad.generator, 0);
        assert_eq!(bad.derivative, sec(&c, &["0", "0", "0"], &["0", "0", "-1"]));
    }

    #[test]
    fn descending_candidates() {
        let c = r3();
        let d = s1_dirac(&c);
        let a = rotation(&c);
        let cands = vec![
            sec(&c, &["y", "-x", "0"], &["x", "y", "0"]),
            sec(&c, &["0", "0", "1"], &["0", "0", "0"]),
            sec(&c, &["x", "y", "0"], &["y", "-x", "0"]),
            sec(&c, &["x", "y", "0"], &["-y", "x", "0"]),
            Section::zero(c.clone()),
        ];
        let ds = verify_descending(&cands, &d, &a, &[vec![rat(1), rat(1), rat(1)]]).unwrap();
        assert_eq!(ds.accepted, vec![0, 1, 4]);
        assert!(ds.reports[2].failures().contains(&"one-form does not annihilate the vertical space"));
        assert_eq!(ds.reports[3].failures(), vec!["one-form does not annihilate the vertical space"]);
    }

    #[test]
    fn probe_on_the_circle_scene() {
        let c = r3();
        let d = s1_dirac(&c);
        let a = Arc::new(rotation(&c));
        let ds = verify_descending(
            &[sec(&c, &["y", "-x", "0"], &["x", "y", "0"]), sec(&c, &["0", "0", "1"], &["0", "0", "0"])],
            &d,
            &a,
            &[],
        )
        .unwrap();
        let basis =
            InvariantBasis::new(a.clone(), vec![&Poly::var(0, 3).pow(2) + &Poly::var(1, 3).pow(2), Poly::var(2, 3)]).unwrap();
        let vg = invariant_codistribution(&basis).unwrap();
        let declared = vec![VectorField::coordinate(c.clone(), 2), VectorField::parse(&c, &["x", "y", "0"]).unwrap()];
        let t = descending_tangent(&a, &declared).unwrap().t;
        let samples = vec![vec![rat(1), rat(2), rat(3)], vec![rat(0), rat(0), rat(2)]];
        let report = spanning_hypothesis_probe(&d, &t, &vg, &ds, &samples).unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!(report.samples[0].span_dim, 2);
        assert_eq!(report.samples[1].span_dim, 1);
    }

    #[test]
    fn trivial_action_probe_uses_the_full_bundle() {
        let c = r3();
        let d = s1_dirac(&c);
        let a = Arc::new(GroupAction::trivial(c.clone()));
        let ds = verify_descending(d.generators(), &d, &a, &[]).unwrap();
        assert_eq!(ds.sections.len(), 3);
        let coords: Vec<Poly> = (0..3).map(|i| Poly::var(i, 3)).collect();
        let vg = invariant_codistribution(&InvariantBasis::new(a.clone(), coords).unwrap()).unwrap();
        let t = descending_tangent(&a, &(0..3).map(|i| VectorField::coordinate(c.clone(), i)).collect::<Vec<_>>()).unwrap().t;
        let report = spanning_hypothesis_probe(&d, &t, &vg, &ds, &[vec![rat(0), rat(0), rat(0)]]).unwrap();
        assert!(report.holds());
    }

    #[test]
    fn characteristic_distributions_of_the_circle_scene() {
        let c = r3();
        let d = s1_dirac(&c);
        let ch = characteristic_distributions(&d);
        assert_eq!(ch.g0.generic_rank(), 1);
        assert!(membership_generic(&Section::tangent(VectorField::coordinate(c.clone(), 2)), &ch.g0).unwrap().is_member());
        assert_eq!(ch.g1.generic_rank(), 3);
        assert_eq!(ch.p0.generic_rank(), 0);
        assert_eq!(ch.p1.generic_rank(), 2);
        let tm = new_dirac((0..3).map(|i| Section::tangent(VectorField::coordinate(c.clone(), i))).collect(), &[]).unwrap();
        assert_eq!(gauge_distribution(&tm).generic_rank(), 3);
        let cotangent_graph = new_dirac(
            vec![
                sec(&c, &["0", "1", "0"], &["1", "0", "0"]),
                sec(&c, &["-1", "0", "0"], &["0", "1", "0"]),
                sec(&c, &["0", "0", "0"], &["0", "0", "1"]),
            ],
            &[],
        )
        .unwrap();
        assert_eq!(gauge_distribution(&cotangent_graph).generic_rank(), 0);
    }
}
