//! Check trees for a scene: structural validation, reductions, brackets,
//! probes, averages and Hamiltonian dynamics.

use std::sync::OnceLock;

use super::{Scene, ValidationError};
use crate::actions::{average, descending_tangent, invariant_codistribution, is_invariant, DescendingTangent};
use num_traits::Zero;

use crate::calculus::{courant_bracket, exterior_derivative_fn, Section, VectorField};
use crate::dirac::{
    check_dirac_action, check_integrable, spanning_hypothesis_probe, DescendingSet, IntegrabilityReport, ProbeReport,
};
use crate::distributions::{combine, fmt_point, membership_in, Distribution, Membership};
use crate::dynamics::{reduce_hamiltonian, solve_admissible, Admissibility};
use crate::expr::{Rat, RatFn};
use crate::reduction::{pushforward_vf, reduced_dirac, PresentedSection, ReducedDirac, ReductionError, Relation, StratumChart};
use crate::report::Check;
use crate::sampling::{random_points, rng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    /// Degree bound for re-expressing invariants in the quotient coordinates.
    pub bound: u32,
    /// Restrict stratum-level checks to one stratum.
    pub stratum: Option<String>,
    pub seed: u64,
    /// Extra random points for the spanning-hypothesis probe.
    pub random_samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { bound: 4, stratum: None, seed: 0, random_samples: 20 }
    }
}

/// Upstairs data shared by all reports on one scene.
#[derive(Debug)]
pub struct Analysis<'a> {
    pub scene: &'a Scene,
    pub bound: u32,
    pub descending: DescendingSet,
    pub tangent: DescendingTangent,
    pub annihilator: Distribution,
    pub probe: ProbeReport,
    pub integrability: IntegrabilityReport,
    reduced: Vec<OnceLock<Result<ReducedDirac, ReductionError>>>,
}

impl<'a> Analysis<'a> {
    pub fn new(scene: &'a Scene, bound: u32) -> Result<Self, ValidationError> {
        let samples = scene.all_samples();
        let candidates: Vec<Section> = scene.descending.iter().map(|d| d.section.section.clone()).collect();
        let descending = crate::dirac::verify_descending(&candidates, &scene.dirac, &scene.action, &samples)?;
        let tangent = descending_tangent(&scene.action, &scene.declared_fields())?;
        let annihilator = invariant_codistribution(scene.quotient.basis())?;
        let probe = spanning_hypothesis_probe(&scene.dirac, &tangent.t, &annihilator, &descending, &samples)?;
        let integrability = check_integrable(&scene.dirac)?;
        let reduced = scene.strata.iter().map(|_| OnceLock::new()).collect();
        Ok(Analysis { scene, bound, descending, tangent, annihilator, probe, integrability, reduced })
    }

    /// Accepted descending sections with their presentations.
    pub fn accepted(&self) -> Vec<PresentedSection> {
        self.descending.accepted.iter().map(|&i| self.scene.descending[i].section.clone()).collect()
    }

    pub fn accepted_names(&self) -> Vec<&str> {
        self.descending.accepted.iter().map(|&i| self.scene.descending[i].name.as_str()).collect()
    }

    /// The reduced structure on a stratum, computed once.
    pub fn reduced(&self, stratum: &str) -> Option<&Result<ReducedDirac, ReductionError>> {
        let i = self.scene.strata.iter().position(|s| s.name() == stratum)?;
        Some(self.reduced[i].get_or_init(|| {
            let st = &self.scene.strata[i];
            reduced_dirac(&self.accepted(), &self.scene.dirac, &self.probe, &self.scene.quotient, st, self.bound)
        }))
    }

    /// Probe at arbitrary points.
    pub fn probe_at(&self, points: &[Vec<Rat>]) -> Result<ProbeReport, ValidationError> {
        Ok(spanning_hypothesis_probe(&self.scene.dirac, &self.tangent.t, &self.annihilator, &self.descending, points)?)
    }
}

fn selected<'s>(scene: &'s Scene, opts: &Options) -> Result<Vec<&'s StratumChart>, Check> {
    match &opts.stratum {
        None => Ok(scene.strata.iter().collect()),
        Some(name) => match scene.stratum(name) {
            Some(st) => Ok(vec![st]),
            None => Err(Check::fail("stratum", format!("unknown stratum {name:?}"))),
        },
    }
}

fn section_lines(gens: &[Section]) -> Vec<String> {
    gens.iter().enumerate().map(|(i, g)| format!("{}: {g}", i + 1)).collect()
}

fn analysis_failed(e: ValidationError) -> Check {
    Check::fail("analysis", e.to_string())
}

/// Full validation tree of a scene.
pub fn validate(scene: &Scene, opts: &Options) -> Check {
    let mut root = Check::group("check", Vec::new());
    let certs = scene.dirac.certificates();
    let mut dirac = Check::pass(
        "dirac",
        format!(
            "{} isotropic generators of rank {} generically and at {} samples",
            scene.dirac.generators().len(),
            certs.generic_rank,
            certs.sample_ranks.len()
        ),
    );
    if let Some(m) = &certs.degeneracy_minor {
        dirac = dirac.with_witnesses([format!("frame degenerates where {} = 0", m.display(scene.chart.coords()))]);
    }
    root.push(dirac);
    let analysis = match Analysis::new(scene, opts.bound) {
        Ok(a) => a,
        Err(e) => {
            root.push(analysis_failed(e));
            return root;
        }
    };
    root.push(integrability_check("integrability", &analysis.integrability));
    root.push(match check_dirac_action(&scene.dirac, &scene.action) {
        Ok(r) => {
            let bad: Vec<String> = r
                .checks
                .iter()
                .filter(|c| !c.membership.is_member())
                .map(|c| format!("L_xi{} of generator {} = {}", c.xi + 1, c.generator + 1, c.derivative))
                .collect();
            Check::verdict("action", bad.is_empty(), format!("{} symmetry checks", r.checks.len())).with_witnesses(bad)
        }
        Err(e) => Check::fail("action", e.to_string()),
    });
    let basis: Vec<String> = scene.quotient.basis().fns().iter().map(|f| f.display(scene.chart.coords()).to_string()).collect();
    root.push(Check::pass("invariants", format!("{} invariant polynomials", basis.len())).with_witnesses(basis));
    root.push(descending_check(&analysis));
    root.push(probe_check("probe", &analysis.probe, analysis.descending.sections.is_empty()));
    root.push(constraint_differentials(scene, opts));
    root.push(reduce_report(&analysis, opts));
    root.push(expectations(&analysis, opts));
    root
}

/// For each equality constraint `h` of a stratum, `𝐝(h∘π)` vanishes at the
/// stratum's upstairs samples.
fn constraint_differentials(scene: &Scene, opts: &Options) -> Check {
    let strata = match selected(scene, opts) {
        Ok(s) => s,
        Err(c) => return Check::group("constraint differentials", vec![c]),
    };
    let names = scene.quotient.target().coords();
    let mut out = Vec::new();
    for st in strata {
        for c in st.constraints().iter().filter(|c| c.relation == Relation::Eq) {
            let label = format!("{}: {} = 0", st.name(), c.poly.display(names));
            let pulled = match scene.quotient.pull_back(&RatFn::from_poly(c.poly.clone())) {
                Ok(f) => f,
                Err(e) => {
                    out.push(Check::fail(label, e.to_string()));
                    continue;
                }
            };
            let d = exterior_derivative_fn(&pulled, &scene.chart);
            let bad: Vec<String> = st
                .upstairs_samples()
                .iter()
                .filter_map(|p| match d.eval(p) {
                    Some(v) if v.iter().all(Zero::is_zero) => None,
                    Some(v) => Some(format!("at {}: {}", fmt_point(p), fmt_point(&v))),
                    None => Some(format!("at {}: undefined", fmt_point(p))),
                })
                .collect();
            let detail = format!(
                "differential vanishes at {} of {} samples",
                st.upstairs_samples().len() - bad.len(),
                st.upstairs_samples().len()
            );
            out.push(Check::verdict(label, bad.is_empty(), detail).with_witnesses(bad));
        }
    }
    Check::group("constraint differentials", out)
}

fn integrability_check(name: &str, r: &IntegrabilityReport) -> Check {
    let bad: Vec<String> = r.failing().map(|c| format!("[{}, {}] = {}", c.i + 1, c.j + 1, c.bracket)).collect();
    let detail = if r.checks.is_empty() {
        "no generator pairs".to_string()
    } else if bad.is_empty() {
        format!("{} Courant brackets close", r.checks.len())
    } else {
        format!("{} of {} Courant brackets leave the structure", bad.len(), r.checks.len())
    };
    Check::verdict(name, bad.is_empty(), detail).with_witnesses(bad)
}

fn descending_check(a: &Analysis) -> Check {
    let children = a
        .descending
        .reports
        .iter()
        .map(|r| {
            let name = &a.scene.descending[r.index].name;
            if r.passes() {
                Check::pass(name.clone(), "descending")
            } else {
                Check::warn(name.clone(), r.failures().join("; "))
            }
        })
        .collect();
    let mut g = Check::group("descending", children);
    g.detail = format!("{} of {} candidates accepted", a.descending.sections.len(), a.descending.reports.len());
    g
}

fn probe_check(name: &str, probe: &ProbeReport, empty: bool) -> Check {
    if empty {
        return Check::skip(name, "no descending sections");
    }
    let bad: Vec<String> = probe
        .deficient()
        .map(|s| {
            format!(
                "at {}: span dimension {}, intersection dimension {}{}",
                fmt_point(&s.point),
                s.span_dim,
                s.intersection_dim,
                if s.contained { "" } else { ", span not contained" }
            )
        })
        .collect();
    let detail =
        format!("{} of {} samples satisfy the spanning hypothesis", probe.samples.len() - bad.len(), probe.samples.len());
    Check::verdict(name, bad.is_empty(), detail).with_witnesses(bad)
}

fn reduction_outcome(name: &str, r: &Result<ReducedDirac, ReductionError>) -> Check {
    match r {
        Ok(red) => {
            let frame = red.frame();
            let mut c = Check::pass(name, format!("rank {} with {} nonzero generators", red.generic_rank, frame.len()))
                .with_witnesses(section_lines(&frame));
            match &red.integrability {
                Some(ir) => c.push(integrability_check("integrability", ir)),
                None => c.push(Check::skip("integrability", "upstairs structure is not integrable")),
            }
            c
        }
        Err(ReductionError::HypothesisNotSatisfied { reason, .. }) => {
            Check::skip(name, format!("spanning hypothesis fails: {reason}"))
        }
        Err(ReductionError::EmptyDescendingSet) => Check::skip(name, "no descending sections"),
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Reduced Dirac structure on each selected stratum.
pub fn reduce_report(a: &Analysis, opts: &Options) -> Check {
    let strata = match selected(a.scene, opts) {
        Ok(s) => s,
        Err(c) => return Check::group("reduction", vec![c]),
    };
    let children = strata
        .iter()
        .map(|st| {
            let r = a.reduced(st.name()).expect("selected strata exist");
            let mut c = reduction_outcome(st.name(), r);
            if let (Ok(red), Some(golden)) = (r, a.scene.expected.reduced.iter().find(|g| g.stratum == st.name())) {
                c.push(compare_frames(red, &golden.generators));
            }
            c
        })
        .collect();
    Check::group("reduction", children)
}

fn compare_frames(red: &ReducedDirac, golden: &[Section]) -> Check {
    let mut misses = Vec::new();
    for (i, g) in golden.iter().enumerate() {
        match membership_in(g, &red.generators) {
            Ok(Membership::Member(_)) => {}
            Ok(Membership::NotMember(r)) => {
                misses.push(format!("expected generator {} not in computed span: residual {r}", i + 1))
            }
            Err(e) => misses.push(e.to_string()),
        }
    }
    for (i, g) in red.generators.iter().enumerate() {
        match membership_in(g, golden) {
            Ok(Membership::Member(_)) => {}
            Ok(Membership::NotMember(r)) => {
                misses.push(format!("computed generator {} not in expected span: residual {r}", i + 1))
            }
            Err(e) => misses.push(e.to_string()),
        }
    }
    let detail = if misses.is_empty() { "computed and expected frames span the same module" } else { "frames differ" };
    Check::verdict("expected frame", misses.is_empty(), detail).with_witnesses(misses)
}

fn expectations(a: &Analysis, opts: &Options) -> Check {
    let e = &a.scene.expected;
    let mut out = Vec::new();
    if let Some(want) = e.integrable {
        let got = a.integrability.holds();
        out.push(Check::verdict("integrable", got == want, format!("expected {want}, computed {got}")));
    }
    if let Some(want) = e.probe {
        let got = a.probe.holds();
        out.push(Check::verdict("probe", got == want, format!("expected {want}, computed {got}")));
    }
    if !e.pushforwards.is_empty() {
        let children = e
            .pushforwards
            .iter()
            .map(|p| match pushforward_vf(&p.field, &a.scene.quotient, a.bound) {
                Ok(img) if img == p.image => Check::pass(p.name.clone(), img.to_string()),
                Ok(img) => Check::fail(p.name.clone(), format!("computed {img}, expected {}", p.image)),
                Err(err) => Check::fail(p.name.clone(), err.to_string()),
            })
            .collect();
        out.push(Check::group("pushforwards", children));
    }
    let wanted = |stratum: &str| opts.stratum.as_deref().is_none_or(|s| s == stratum);
    for r in e.relations.iter().filter(|r| wanted(&r.stratum)) {
        let Some(golden) = e.reduced.iter().find(|g| g.stratum == r.stratum) else { continue };
        let lhs = combine(r.section.chart(), &golden.generators, &r.coefficients);
        out.push(Check::verdict(
            format!("relation on {}", r.stratum),
            lhs == r.section,
            format!("combination of expected generators equals {}", r.section),
        ));
    }
    out.extend(e.brackets.iter().filter(|b| wanted(&b.stratum)).map(|b| golden_bracket(a, b)));
    Check::group("expectations", out)
}

fn golden_bracket(a: &Analysis, b: &super::ExpectedBracket) -> Check {
    let name = format!("bracket [{}, {}] on {}", b.i, b.j, b.stratum);
    let Some(golden) = a.scene.expected.reduced.iter().find(|g| g.stratum == b.stratum) else {
        return Check::fail(name, "no expected frame");
    };
    let gens = &golden.generators;
    match courant_bracket(&gens[b.i - 1], &gens[b.j - 1]) {
        Ok(br) => {
            let rhs = combine(br.chart(), gens, &b.coefficients);
            Check::verdict(name, br == rhs, format!("computed {br}"))
        }
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Courant brackets of every pair of reduced generators with their
/// membership witnesses, followed by the expected bracket identities.
pub fn bracket_report(a: &Analysis, opts: &Options) -> Check {
    let strata = match selected(a.scene, opts) {
        Ok(s) => s,
        Err(c) => return Check::group("brackets", vec![c]),
    };
    let mut out = Vec::new();
    for st in strata {
        let r = a.reduced(st.name()).expect("selected strata exist");
        let red = match r {
            Ok(red) => red,
            Err(_) => {
                out.push(reduction_outcome(st.name(), r));
                continue;
            }
        };
        let names = st.params().coords();
        let mut children = Vec::new();
        for (i, g) in red.generators.iter().enumerate() {
            for (j, h) in red.generators.iter().enumerate().skip(i + 1) {
                if g.is_zero() || h.is_zero() {
                    continue;
                }
                let label = format!("[{}, {}]", i + 1, j + 1);
                children.push(match courant_bracket(g, h).map(|br| (membership_in(&br, &red.generators), br)) {
                    Ok((Ok(Membership::Member(c)), br)) => {
                        let coeffs: Vec<String> = c.iter().map(|x| x.display(names).to_string()).collect();
                        Check::pass(label, br.to_string()).with_witnesses([format!("coefficients ({})", coeffs.join(", "))])
                    }
                    Ok((Ok(Membership::NotMember(res)), br)) => {
                        Check::fail(label, format!("{br} leaves the structure: residual {res}"))
                    }
                    Ok((Err(e), _)) => Check::fail(label, e.to_string()),
                    Err(e) => Check::fail(label, e.to_string()),
                });
            }
        }
        out.push(Check::group(st.name(), children));
    }
    let golden: Vec<Check> = a
        .scene
        .expected
        .brackets
        .iter()
        .filter(|b| opts.stratum.as_deref().is_none_or(|s| s == b.stratum))
        .map(|b| golden_bracket(a, b))
        .collect();
    if !golden.is_empty() {
        out.push(Check::group("expected", golden));
    }
    Check::group("brackets", out)
}

/// The spanning-hypothesis probe at the scene samples and at seeded random
/// points.
pub fn probe_report(a: &Analysis, opts: &Options) -> Check {
    let empty = a.descending.sections.is_empty();
    let mut children = vec![probe_check("samples", &a.probe, empty)];
    if opts.random_samples > 0 && !empty {
        let pts = random_points(a.scene.chart.dim(), opts.random_samples, &mut rng(opts.seed), &[]);
        children.push(match a.probe_at(&pts) {
            Ok(p) => probe_check("random", &p, false).with_detail(format!(
                "{} of {} seeded random points (seed {}) satisfy the spanning hypothesis",
                p.samples.iter().filter(|s| s.equal()).count(),
                p.samples.len(),
                opts.seed
            )),
            Err(e) => Check::fail("random", e.to_string()),
        });
    }
    let mut g = Check::group("probe", children);
    g.detail = format!("descending sections: {}", a.accepted_names().join(", "));
    g
}

/// Haar averages of the coordinate fields and of the declared fields.
pub fn average_report(scene: &Scene) -> Check {
    let n = scene.chart.dim();
    let mut out = Vec::new();
    let coordinate = (0..n).map(|i| (format!("d/d{}", scene.chart.coords()[i]), VectorField::coordinate(scene.chart.clone(), i)));
    let declared = scene.fields.iter().map(|f| (f.name.clone(), f.field.clone()));
    for (name, x) in coordinate.chain(declared) {
        out.push(match average(&x, &scene.action) {
            Ok(avg) => {
                let invariant = is_invariant(&avg, &scene.action).map(|r| r.holds()).unwrap_or(false);
                let idempotent = average(&avg, &scene.action).map(|b| b == avg).unwrap_or(false);
                Check::verdict(name, invariant && idempotent, format!("average {avg}")).with_witnesses(
                    [
                        (!invariant).then(|| "average is not invariant".to_string()),
                        (!idempotent).then(|| "averaging is not idempotent".to_string()),
                    ]
                    .into_iter()
                    .flatten(),
                )
            }
            Err(e) => Check::fail(name, e.to_string()),
        });
    }
    Check::group("average", out)
}

/// Admissibility of each declared Hamiltonian and its reduction to every
/// selected stratum.
pub fn hamiltonian_report(a: &Analysis, opts: &Options) -> Check {
    let scene = a.scene;
    let names = scene.chart.coords();
    let strata = match selected(scene, opts) {
        Ok(s) => s,
        Err(c) => return Check::group("hamiltonians", vec![c]),
    };
    let mut out = Vec::new();
    for f in &scene.hamiltonians {
        let label = format!("f = {}", f.display(names));
        let invariant = match is_invariant(f, &scene.action) {
            Ok(r) => r.holds(),
            Err(e) => {
                out.push(Check::fail(label, e.to_string()));
                continue;
            }
        };
        let sol = match solve_admissible(f, &scene.dirac) {
            Admissibility::Admissible(sol) => sol,
            Admissibility::NotAdmissible { residual } => {
                out.push(Check::warn(label, "not admissible").with_witnesses([format!("df - sum c_i alpha_i = {residual}")]));
                continue;
            }
        };
        let gauge = section_lines(sol.gauge.generators());
        let mut node =
            Check::pass(label, format!("X_f = {}", sol.xf)).with_witnesses(gauge.into_iter().map(|g| format!("gauge {g}")));
        if !invariant {
            node.push(Check::skip("reduction", "function is not invariant"));
            out.push(node);
            continue;
        }
        let xf_invariant = is_invariant(&sol.xf, &scene.action).map(|r| r.holds()).unwrap_or(false);
        let sol = if xf_invariant {
            sol
        } else {
            match crate::dynamics::invariant_hamiltonian(f, &scene.dirac, &scene.action) {
                Ok(s) => s,
                Err(e) => {
                    node.push(Check::fail("invariant solution", e.to_string()));
                    out.push(node);
                    continue;
                }
            }
        };
        for st in &strata {
            let r = a.reduced(st.name()).expect("selected strata exist");
            node.push(match r {
                Ok(red) => match reduce_hamiltonian(&sol, &scene.quotient, red, a.bound) {
                    Ok(h) => {
                        let pn = st.params().coords();
                        let coeffs: Vec<String> = h.witness.iter().map(|c| c.display(pn).to_string()).collect();
                        Check::pass(st.name(), format!("reduced pair {}", h.section))
                            .with_witnesses([format!("coefficients ({})", coeffs.join(", "))])
                    }
                    Err(e) => Check::fail(st.name(), e.to_string()),
                },
                Err(_) => reduction_outcome(st.name(), r),
            });
        }
        out.push(node);
    }
    Check::group("hamiltonians", out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use crate::scenes::builtin;

    #[test]
    fn s1_r3_validates_cleanly() {
        let scene = builtin("s1_r3").unwrap();
        let report = validate(&scene, &Options::default());
        assert!(!report.has_fail(), "{report}");
        assert_eq!(report.find("reduction/P1/expected frame").unwrap().status, Status::Pass);
        assert_eq!(report.find("reduction/P2/expected frame").unwrap().status, Status::Pass);
    }

    #[test]
    fn nonintegrable_demo_fails_integrability_only() {
        let scene = builtin("nonintegrable_demo").unwrap();
        let report = validate(&scene, &Options::default());
        assert_eq!(report.find("integrability").unwrap().status, Status::Fail);
        assert_eq!(report.find("expectations/integrable").unwrap().status, Status::Pass);
        assert_eq!(report.find("probe").unwrap().status, Status::Skip);
    }

    #[test]
    fn split_scene_fails_the_probe_and_skips_reduction() {
        let scene = builtin("so3_split_counterexample").unwrap();
        let report = validate(&scene, &Options::default());
        assert_eq!(report.find("probe").unwrap().status, Status::Fail);
        assert!(report.find("probe").unwrap().witnesses[0].contains("(0, 0, 1, 1, 0, 0)"));
        assert_eq!(report.find("reduction/P2").unwrap().status, Status::Skip);
        assert_eq!(report.find("expectations/probe").unwrap().status, Status::Pass);
    }

    #[test]
    fn hamiltonian_report_on_s1_r3() {
        let scene = builtin("s1_r3").unwrap();
        let a = Analysis::new(&scene, 4).unwrap();
        let r = hamiltonian_report(&a, &Options::default());
        let rot = &r.children[0];
        assert_eq!(rot.status, Status::Pass, "{r}");
        assert_eq!(rot.find("P2").unwrap().status, Status::Pass);
        assert_eq!(r.children[1].status, Status::Warn);
    }

    #[test]
    fn unknown_stratum_is_reported() {
        let scene = builtin("s1_r3").unwrap();
        let a = Analysis::new(&scene, 4).unwrap();
        let opts = Options { stratum: Some("P9".into()), ..Options::default() };
        assert!(reduce_report(&a, &opts).has_fail());
    }
}
