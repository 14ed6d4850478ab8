//! Scenes: complete problem statements (chart, action, invariants, Dirac
//! frame, descending sections, strata, samples) with golden expectations.
//!
//! A [`SceneSpec`] is the textual description shared by the built-in scenes
//! and the scene file format; [`build`] turns it into a validated [`Scene`].

mod builtin;
mod format;
mod validate;

use std::sync::Arc;

use thiserror::Error;

use crate::actions::{ActionError, GroupAction, InvariantBasis};
use crate::calculus::{CalculusError, OneForm, Section, VectorField};
use crate::dirac::{new_dirac, DiracError, DiracStructure};
use crate::expr::{parse_expr, parse_rat, Chart, ExprError, Poly, Rat, RatFn};
use crate::reduction::{Constraint, PresentedSection, QuotientMap, ReductionError, Relation, StratumChart};

pub use builtin::{builtin, BUILTIN_NAMES};
pub use format::{parse_scene, write_scene};
pub use validate::{
    average_report, bracket_report, hamiltonian_report, probe_report, reduce_report, validate, Analysis, Options,
};

/// Position of a value in a scene file (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// A string value with an optional source position; equality ignores the
/// position.
#[derive(Debug, Clone, Eq)]
pub struct Text {
    pub text: String,
    pub span: Option<Span>,
}

impl PartialEq for Text {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl From<&str> for Text {
    fn from(s: &str) -> Self {
        Text { text: s.to_string(), span: None }
    }
}

impl From<String> for Text {
    fn from(text: String) -> Self {
        Text { text, span: None }
    }
}

pub(crate) fn texts(items: &[&str]) -> Vec<Text> {
    items.iter().map(|&s| s.into()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Circle,
    Torus,
    So3,
    Trivial,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Circle => "circle",
            ActionKind::Torus => "torus",
            ActionKind::So3 => "so3",
            ActionKind::Trivial => "trivial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "circle" => ActionKind::Circle,
            "torus" => ActionKind::Torus,
            "so3" => ActionKind::So3,
            "trivial" => ActionKind::Trivial,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpec {
    pub x: Vec<Text>,
    pub alpha: Vec<Text>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendingSpec {
    pub name: String,
    pub section: SectionSpec,
    pub presentation: Vec<(Text, Text)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: String,
    pub components: Vec<Text>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumSpec {
    pub name: String,
    pub params: Vec<String>,
    pub embedding: Vec<Text>,
    pub constraints: Vec<(Text, Relation)>,
    pub samples: Vec<Vec<Text>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub name: String,
    pub field: Vec<Text>,
    pub start: Vec<Text>,
    pub time: f64,
    pub steps: usize,
    pub end: Option<Vec<Text>>,
    pub monitors: Vec<Text>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushforwardSpec {
    pub name: String,
    pub field: Vec<Text>,
    pub image: Vec<Text>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSpec {
    pub stratum: String,
    pub generators: Vec<SectionSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSpec {
    pub stratum: String,
    pub section: SectionSpec,
    pub coefficients: Vec<Text>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSpec {
    pub stratum: String,
    /// 1-based indices into the expected generators of the stratum.
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<Text>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectSpec {
    pub integrable: Option<bool>,
    pub probe: Option<bool>,
    pub pushforwards: Vec<PushforwardSpec>,
    pub reduced: Vec<ReducedSpec>,
    pub relations: Vec<RelationSpec>,
    pub brackets: Vec<BracketSpec>,
}

/// Textual description of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub name: String,
    pub chart_name: String,
    pub coords: Vec<String>,
    pub action: ActionKind,
    pub generators: Vec<Vec<Text>>,
    pub target_name: String,
    pub target_coords: Vec<String>,
    pub basis: Vec<Text>,
    pub dirac: Vec<SectionSpec>,
    pub descending: Vec<DescendingSpec>,
    pub fields: Vec<FieldSpec>,
    pub strata: Vec<StratumSpec>,
    pub samples: Vec<Vec<Text>>,
    pub hamiltonians: Vec<Text>,
    pub flows: Vec<FlowSpec>,
    pub expect: ExpectSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("unknown scene {0:?}")]
    UnknownScene(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{context}: {source}")]
    Expression {
        context: String,
        #[source]
        source: ExprError,
    },
    #[error("validation failed in {context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: ValidationError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

impl SceneError {
    fn invalid(context: impl Into<String>, source: impl Into<ValidationError>) -> Self {
        SceneError::Validation { context: context.into(), source: source.into() }
    }

    fn shape(context: impl Into<String>, message: impl Into<String>) -> Self {
        Self::invalid(context, ValidationError::Shape(message.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedField {
    pub name: String,
    pub field: VectorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSection {
    pub name: String,
    pub section: PresentedSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub name: String,
    pub field: VectorField,
    pub start: Vec<Rat>,
    pub time: f64,
    pub steps: usize,
    pub end: Option<Vec<Rat>>,
    pub monitors: Vec<RatFn>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedPushforward {
    pub name: String,
    pub field: VectorField,
    pub image: VectorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedReduced {
    pub stratum: String,
    pub generators: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRelation {
    pub stratum: String,
    pub section: Section,
    pub coefficients: Vec<RatFn>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedBracket {
    pub stratum: String,
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<RatFn>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expectations {
    pub integrable: Option<bool>,
    pub probe: Option<bool>,
    pub pushforwards: Vec<ExpectedPushforward>,
    pub reduced: Vec<ExpectedReduced>,
    pub relations: Vec<ExpectedRelation>,
    pub brackets: Vec<ExpectedBracket>,
}

/// A validated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub spec: SceneSpec,
    pub chart: Arc<Chart>,
    pub action: Arc<GroupAction>,
    pub quotient: QuotientMap,
    pub dirac: DiracStructure,
    pub descending: Vec<NamedSection>,
    pub fields: Vec<NamedField>,
    pub strata: Vec<StratumChart>,
    pub samples: Vec<Vec<Rat>>,
    pub hamiltonians: Vec<RatFn>,
    pub flows: Vec<Flow>,
    pub expected: Expectations,
}

impl Scene {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn stratum(&self, name: &str) -> Option<&StratumChart> {
        self.strata.iter().find(|s| s.name() == name)
    }

    pub fn presented_sections(&self) -> Vec<PresentedSection> {
        self.descending.iter().map(|d| d.section.clone()).collect()
    }

    pub fn declared_fields(&self) -> Vec<VectorField> {
        self.fields.iter().map(|f| f.field.clone()).collect()
    }

    /// Scene samples followed by the upstairs samples of every stratum,
    /// without repetitions.
    pub fn all_samples(&self) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for p in self.samples.iter().chain(self.strata.iter().flat_map(|s| s.upstairs_samples())) {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }
}

fn located(e: ExprError, t: &Text, context: &str) -> SceneError {
    let column_of = |pos: usize| t.text.get(..pos).map_or(pos, |s| s.chars().count());
    match (t.span, &e) {
        (Some(sp), ExprError::SyntaxError { pos, msg }) => {
            SceneError::Parse { line: sp.line, column: sp.column + column_of(*pos), message: format!("{context}: {msg}") }
        }
        (Some(sp), ExprError::UnknownCoordinate { position, .. }) => SceneError::Parse {
            line: sp.line,
            column: sp.column + position.map_or(0, column_of),
            message: format!("{context}: {e}"),
        },
        _ => SceneError::Expression { context: context.to_string(), source: e },
    }
}

fn expr(t: &Text, chart: &Chart, context: &str) -> Result<RatFn, SceneError> {
    parse_expr(&t.text, chart).map_err(|e| located(e, t, context))
}

fn exprs(ts: &[Text], chart: &Chart, context: &str) -> Result<Vec<RatFn>, SceneError> {
    if ts.len() != chart.dim() {
        return Err(SceneError::shape(context, format!("expected {} components, got {}", chart.dim(), ts.len())));
    }
    ts.iter().map(|t| expr(t, chart, context)).collect()
}

fn poly(t: &Text, chart: &Chart, context: &str) -> Result<Poly, SceneError> {
    let f = expr(t, chart, context)?;
    f.as_poly().cloned().ok_or_else(|| SceneError::shape(context, format!("{} is not a polynomial", t.text)))
}

fn rational(t: &Text, context: &str) -> Result<Rat, SceneError> {
    parse_rat(&t.text).ok_or_else(|| match t.span {
        Some(sp) => SceneError::Parse {
            line: sp.line,
            column: sp.column,
            message: format!("{context}: {:?} is not a rational number", t.text),
        },
        None => SceneError::shape(context, format!("{:?} is not a rational number", t.text)),
    })
}

fn point(ts: &[Text], dim: usize, context: &str) -> Result<Vec<Rat>, SceneError> {
    if ts.len() != dim {
        return Err(SceneError::shape(context, format!("point has {} coordinates, expected {dim}", ts.len())));
    }
    ts.iter().map(|t| rational(t, context)).collect()
}

fn field(ts: &[Text], chart: &Arc<Chart>, context: &str) -> Result<VectorField, SceneError> {
    VectorField::new(chart.clone(), exprs(ts, chart, context)?).map_err(|e| SceneError::invalid(context, e))
}

fn section(s: &SectionSpec, chart: &Arc<Chart>, context: &str) -> Result<Section, SceneError> {
    let x = field(&s.x, chart, context)?;
    let alpha = OneForm::new(chart.clone(), exprs(&s.alpha, chart, context)?).map_err(|e| SceneError::invalid(context, e))?;
    Section::new(x, alpha).map_err(|e| SceneError::invalid(context, e))
}

fn chart(name: &str, coords: &[String], context: &str) -> Result<Arc<Chart>, SceneError> {
    Chart::new(name, coords).map_err(|e| SceneError::Expression { context: context.to_string(), source: e })
}

/// Builds and validates a scene.
pub fn build(spec: SceneSpec) -> Result<Scene, SceneError> {
    let base = chart(&spec.chart_name, &spec.coords, "chart")?;
    let n = base.dim();
    let generators: Vec<VectorField> = spec
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| field(g, &base, &format!("action generator {}", i + 1)))
        .collect::<Result<_, _>>()?;
    let action = match spec.action {
        ActionKind::Trivial if generators.is_empty() => GroupAction::trivial(base.clone()),
        ActionKind::Trivial => return Err(SceneError::shape("action", "a trivial action takes no generators")),
        ActionKind::Circle if generators.len() != 1 => {
            return Err(SceneError::shape("action", format!("a circle action takes one generator, got {}", generators.len())))
        }
        ActionKind::Circle | ActionKind::Torus => {
            if generators.is_empty() {
                GroupAction::trivial(base.clone())
            } else {
                GroupAction::torus(base.clone(), generators).map_err(|e| SceneError::invalid("action", e))?
            }
        }
        ActionKind::So3 => GroupAction::so3(base.clone(), generators).map_err(|e| SceneError::invalid("action", e))?,
    };
    let action = Arc::new(action);
    let basis: Vec<Poly> =
        spec.basis.iter().enumerate().map(|(i, t)| poly(t, &base, &format!("invariant {}", i + 1))).collect::<Result<_, _>>()?;
    let basis = InvariantBasis::new(action.clone(), basis).map_err(|e| SceneError::invalid("invariants", e))?;
    let target = chart(&spec.target_name, &spec.target_coords, "invariants target")?;
    let quotient = QuotientMap::new(basis, target.clone()).map_err(|e| SceneError::invalid("invariants", e))?;
    let samples: Vec<Vec<Rat>> =
        spec.samples.iter().enumerate().map(|(i, p)| point(p, n, &format!("sample {}", i + 1))).collect::<Result<_, _>>()?;
    let frame: Vec<Section> = spec
        .dirac
        .iter()
        .enumerate()
        .map(|(i, s)| section(s, &base, &format!("dirac generator {}", i + 1)))
        .collect::<Result<_, _>>()?;
    let dirac = new_dirac(frame, &samples).map_err(|e| SceneError::invalid("dirac", e))?;
    let mut descending = Vec::with_capacity(spec.descending.len());
    for d in &spec.descending {
        let context = format!("descending section {}", d.name);
        let s = section(&d.section, &base, &context)?;
        let presentation = d
            .presentation
            .iter()
            .map(|(g, f)| Ok((expr(g, &base, &context)?, expr(f, &base, &context)?)))
            .collect::<Result<Vec<_>, SceneError>>()?;
        descending.push(NamedSection { name: d.name.clone(), section: PresentedSection { section: s, presentation } });
    }
    let fields = spec
        .fields
        .iter()
        .map(|f| Ok(NamedField { name: f.name.clone(), field: field(&f.components, &base, &format!("field {}", f.name))? }))
        .collect::<Result<Vec<_>, SceneError>>()?;
    let mut strata = Vec::with_capacity(spec.strata.len());
    for st in &spec.strata {
        let context = format!("stratum {}", st.name);
        let params = chart(&st.name, &st.params, &context)?;
        if st.embedding.len() != target.dim() {
            return Err(SceneError::shape(&context, format!("embedding needs {} entries", target.dim())));
        }
        let embedding = st.embedding.iter().map(|t| expr(t, &params, &context)).collect::<Result<Vec<_>, _>>()?;
        let constraints = st
            .constraints
            .iter()
            .map(|(t, relation)| Ok(Constraint { poly: poly(t, &target, &context)?, relation: *relation }))
            .collect::<Result<Vec<_>, SceneError>>()?;
        let ups = st.samples.iter().map(|p| point(p, n, &context)).collect::<Result<Vec<_>, _>>()?;
        let sc = StratumChart::new(st.name.clone(), params, embedding, constraints, ups, &quotient)
            .map_err(|e| SceneError::invalid(&context, e))?;
        if strata.iter().any(|s: &StratumChart| s.name() == sc.name()) {
            return Err(SceneError::shape(context, "duplicate stratum name"));
        }
        strata.push(sc);
    }
    let hamiltonians = spec.hamiltonians.iter().map(|t| expr(t, &base, "hamiltonian")).collect::<Result<Vec<_>, _>>()?;
    let flows = spec
        .flows
        .iter()
        .map(|f| {
            let context = format!("flow {}", f.name);
            if f.steps == 0 {
                return Err(SceneError::shape(&context, "steps must be positive"));
            }
            Ok(Flow {
                name: f.name.clone(),
                field: field(&f.field, &base, &context)?,
                start: point(&f.start, n, &context)?,
                time: f.time,
                steps: f.steps,
                end: f.end.as_ref().map(|e| point(e, n, &context)).transpose()?,
                monitors: f.monitors.iter().map(|m| expr(m, &base, &context)).collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let expected = build_expectations(&spec.expect, &base, &target, &strata)?;
    Ok(Scene { spec, chart: base, action, quotient, dirac, descending, fields, strata, samples, hamiltonians, flows, expected })
}

fn stratum_chart<'a>(strata: &'a [StratumChart], name: &str, context: &str) -> Result<&'a Arc<Chart>, SceneError> {
    strata
        .iter()
        .find(|s| s.name() == name)
        .map(|s| s.params())
        .ok_or_else(|| SceneError::shape(context, format!("unknown stratum {name}")))
}

fn build_expectations(
    e: &ExpectSpec,
    base: &Arc<Chart>,
    target: &Arc<Chart>,
    strata: &[StratumChart],
) -> Result<Expectations, SceneError> {
    let pushforwards = e
        .pushforwards
        .iter()
        .map(|p| {
            let context = format!("expected pushforward {}", p.name);
            Ok(ExpectedPushforward {
                name: p.name.clone(),
                field: field(&p.field, base, &context)?,
                image: field(&p.image, target, &context)?,
            })
        })
        .collect::<Result<Vec<_>, SceneError>>()?;
    let reduced = e
        .reduced
        .iter()
        .map(|r| {
            let context = format!("expected reduction on {}", r.stratum);
            let params = stratum_chart(strata, &r.stratum, &context)?;
            let generators = r.generators.iter().map(|g| section(g, params, &context)).collect::<Result<Vec<_>, _>>()?;
            Ok(ExpectedReduced { stratum: r.stratum.clone(), generators })
        })
        .collect::<Result<Vec<_>, SceneError>>()?;
    let golden_len = |stratum: &str| reduced.iter().find(|r| r.stratum == stratum).map(|r| r.generators.len());
    let relations = e
        .relations
        .iter()
        .map(|r| {
            let context = format!("expected relation on {}", r.stratum);
            let params = stratum_chart(strata, &r.stratum, &context)?;
            let coefficients = r.coefficients.iter().map(|c| expr(c, params, &context)).collect::<Result<Vec<_>, _>>()?;
            if golden_len(&r.stratum) != Some(coefficients.len()) {
                return Err(SceneError::shape(context, "one coefficient per expected generator is required"));
            }
            Ok(ExpectedRelation { stratum: r.stratum.clone(), section: section(&r.section, params, &context)?, coefficients })
        })
        .collect::<Result<Vec<_>, SceneError>>()?;
    let brackets = e
        .brackets
        .iter()
        .map(|b| {
            let context = format!("expected bracket on {}", b.stratum);
            let params = stratum_chart(strata, &b.stratum, &context)?;
            let coefficients = b.coefficients.iter().map(|c| expr(c, params, &context)).collect::<Result<Vec<_>, _>>()?;
            let len = golden_len(&b.stratum);
            if len != Some(coefficients.len()) || b.i == 0 || b.j == 0 || Some(b.i.max(b.j)) > len {
                return Err(SceneError::shape(context, "indices and coefficients must refer to the expected generators"));
            }
            Ok(ExpectedBracket { stratum: b.stratum.clone(), i: b.i, j: b.j, coefficients })
        })
        .collect::<Result<Vec<_>, SceneError>>()?;
    Ok(Expectations { integrable: e.integrable, probe: e.probe, pushforwards, reduced, relations, brackets })
}
