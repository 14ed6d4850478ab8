//! Scene file format: bracketed section headers, `key = value` entries with
//! quoted strings, integers, booleans, `[...]` lists, `(...)` tuples and
//! constraints `"expr" op 0`. `#` starts a comment.

use std::fmt::Write as _;

use super::{
    ActionKind, BracketSpec, DescendingSpec, ExpectSpec, FieldSpec, FlowSpec, PushforwardSpec, ReducedSpec, RelationSpec,
    SceneError, SceneSpec, SectionSpec, Span, StratumSpec, Text,
};
use crate::expr::is_identifier;
use crate::reduction::Relation;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Assign,
    Rel(Relation),
    Str(String),
    Int(i64),
    Ident(String),
    Newline,
}

fn err(span: Span, message: impl Into<String>) -> SceneError {
    SceneError::Parse { line: span.line, column: span.column, message: message.into() }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, SceneError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let span = Span { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            column += 1;
            c
        };
        match c {
            '\n' => {
                chars.next();
                out.push((Tok::Newline, span));
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            '[' | ']' | '(' | ')' | ',' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Comma,
                    },
                    span,
                ));
            }
            '=' | '>' | '!' => {
                bump(&mut chars);
                let eq_follows = chars.peek() == Some(&'=');
                if eq_follows {
                    bump(&mut chars);
                }
                let tok = match (c, eq_follows) {
                    ('=', false) => Tok::Assign,
                    ('=', true) => Tok::Rel(Relation::Eq),
                    ('>', false) => Tok::Rel(Relation::Gt),
                    ('>', true) => Tok::Rel(Relation::Ge),
                    ('!', true) => Tok::Rel(Relation::Ne),
                    _ => return Err(err(span, "expected '!='")),
                };
                out.push((tok, span));
            }
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\n') | None => return Err(err(span, "unterminated string")),
                        Some(c) => s.push(c),
                    }
                }
                out.push((Tok::Str(s), span));
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                s.push(bump(&mut chars).unwrap_or(c));
                while chars.peek().is_some_and(char::is_ascii_digit) {
                    s.push(bump(&mut chars).unwrap_or('0'));
                }
                let v = s.parse().map_err(|_| err(span, format!("invalid integer {s:?}")))?;
                out.push((Tok::Int(v), span));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while chars.peek().is_some_and(|&c| c.is_alphanumeric() || c == '_' || c == '.') {
                    s.push(bump(&mut chars).unwrap_or('_'));
                }
                out.push((Tok::Ident(s), span));
            }
            other => return Err(err(span, format!("unexpected character {other:?}"))),
        }
    }
    out.push((Tok::Newline, Span { line, column }));
    Ok(out)
}

#[derive(Debug, Clone)]
enum Value {
    Str(Text),
    Int(i64, Span),
    Bool(bool, Span),
    List(Vec<Value>, Span),
    Tuple(Vec<Value>, Span),
    Constraint(Text, Relation, Span),
}

impl Value {
    fn span(&self) -> Span {
        match self {
            Value::Str(t) => t.span.unwrap_or(Span { line: 0, column: 0 }),
            Value::Int(_, s) | Value::Bool(_, s) | Value::List(_, s) | Value::Tuple(_, s) | Value::Constraint(_, _, s) => *s,
        }
    }

    fn text(&self, what: &str) -> Result<Text, SceneError> {
        match self {
            Value::Str(t) => Ok(t.clone()),
            other => Err(err(other.span(), format!("{what} must be a quoted string"))),
        }
    }

    fn string(&self, what: &str) -> Result<String, SceneError> {
        self.text(what).map(|t| t.text)
    }

    fn int(&self, what: &str) -> Result<i64, SceneError> {
        match self {
            Value::Int(v, _) => Ok(*v),
            other => Err(err(other.span(), format!("{what} must be an integer"))),
        }
    }

    fn index(&self, what: &str) -> Result<usize, SceneError> {
        usize::try_from(self.int(what)?).map_err(|_| err(self.span(), format!("{what} must be non-negative")))
    }

    fn boolean(&self, what: &str) -> Result<bool, SceneError> {
        match self {
            Value::Bool(b, _) => Ok(*b),
            other => Err(err(other.span(), format!("{what} must be true or false"))),
        }
    }

    fn list(&self, what: &str) -> Result<&[Value], SceneError> {
        match self {
            Value::List(v, _) => Ok(v),
            other => Err(err(other.span(), format!("{what} must be a list"))),
        }
    }

    fn texts(&self, what: &str) -> Result<Vec<Text>, SceneError> {
        self.list(what)?.iter().map(|v| v.text(what)).collect()
    }

    fn strings(&self, what: &str) -> Result<Vec<String>, SceneError> {
        self.list(what)?.iter().map(|v| v.string(what)).collect()
    }

    fn points(&self, what: &str) -> Result<Vec<Vec<Text>>, SceneError> {
        self.list(what)?.iter().map(|v| v.texts(what)).collect()
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at.min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.at.min(self.toks.len() - 1)].1
    }

    fn next(&mut self) -> (Tok, Span) {
        let t = self.toks[self.at.min(self.toks.len() - 1)].clone();
        self.at += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn skip_newlines(&mut self) {
        while !self.at_end() && *self.peek() == Tok::Newline {
            self.at += 1;
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SceneError> {
        let (t, span) = self.next();
        if t == tok {
            Ok(())
        } else {
            Err(err(span, format!("expected {what}")))
        }
    }

    fn value(&mut self) -> Result<Value, SceneError> {
        let (tok, span) = self.next();
        let v = match tok {
            Tok::Str(s) => Value::Str(Text { text: s, span: Some(Span { line: span.line, column: span.column + 1 }) }),
            Tok::Int(v) => Value::Int(v, span),
            Tok::Ident(s) if s == "true" => Value::Bool(true, span),
            Tok::Ident(s) if s == "false" => Value::Bool(false, span),
            Tok::LBracket => Value::List(self.items(Tok::RBracket)?, span),
            Tok::LParen => Value::Tuple(self.items(Tok::RParen)?, span),
            _ => return Err(err(span, "expected a value")),
        };
        let relation = match (self.peek(), &v) {
            (Tok::Rel(r), Value::Str(_)) => Some(*r),
            (Tok::Assign, Value::Str(_)) => Some(Relation::Eq),
            _ => None,
        };
        let Some(relation) = relation else { return Ok(v) };
        let rel_span = self.span();
        self.at += 1;
        match self.next() {
            (Tok::Int(0), _) => {}
            (_, s) => return Err(err(s, "constraints compare against 0")),
        }
        match v {
            Value::Str(t) => Ok(Value::Constraint(t, relation, rel_span)),
            _ => unreachable!("relations follow strings only"),
        }
    }

    fn items(&mut self, close: Tok) -> Result<Vec<Value>, SceneError> {
        let mut items = Vec::new();
        loop {
            self.skip_newlines();
            if *self.peek() == close {
                self.at += 1;
                return Ok(items);
            }
            items.push(self.value()?);
            self.skip_newlines();
            match self.next() {
                (Tok::Comma, _) => {}
                (t, _) if t == close => return Ok(items),
                (_, span) => return Err(err(span, "expected ',' or a closing bracket")),
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    span: Span,
    value: Value,
}

#[derive(Debug)]
struct Block {
    name: String,
    span: Span,
    entries: Vec<Entry>,
}

fn blocks(src: &str) -> Result<Vec<Block>, SceneError> {
    let mut p = Parser { toks: tokenize(src)?, at: 0 };
    let mut out: Vec<Block> = Vec::new();
    loop {
        p.skip_newlines();
        if p.at_end() {
            return Ok(out);
        }
        let (tok, span) = p.next();
        match tok {
            Tok::LBracket => {
                let name = match p.next() {
                    (Tok::Ident(n), _) => n,
                    (_, s) => return Err(err(s, "expected a section name")),
                };
                p.expect(Tok::RBracket, "']'")?;
                p.expect(Tok::Newline, "end of line after section header")?;
                // Repeated headers continue the earlier block.
                let block = match out.iter().position(|b| b.name == name) {
                    Some(i) => Block { span, ..out.remove(i) },
                    None => Block { name, span, entries: Vec::new() },
                };
                out.push(block);
            }
            Tok::Ident(key) => {
                let Some(block) = out.last_mut() else { return Err(err(span, "entry outside of a section")) };
                p.expect(Tok::Assign, "'='")?;
                let value = p.value()?;
                p.expect(Tok::Newline, "end of line after value")?;
                block.entries.push(Entry { key, span, value });
            }
            _ => return Err(err(span, "expected a section header or an entry")),
        }
    }
}

/// Splits entries into records, each starting at `leader`.
fn records<'a>(block: &'a Block, leader: &str, allowed: &[&str]) -> Result<Vec<Vec<&'a Entry>>, SceneError> {
    let mut out: Vec<Vec<&Entry>> = Vec::new();
    for e in &block.entries {
        if e.key == leader {
            out.push(vec![e]);
        } else if !allowed.contains(&e.key.as_str()) {
            return Err(err(e.span, format!("unknown key {:?} in [{}]", e.key, block.name)));
        } else if let Some(r) = out.last_mut() {
            if r.iter().any(|x| x.key == e.key) {
                return Err(err(e.span, format!("duplicate key {:?} in record", e.key)));
            }
            r.push(e);
        } else {
            return Err(err(e.span, format!("record in [{}] must start with {leader:?}", block.name)));
        }
    }
    Ok(out)
}

fn get<'a>(record: &[&'a Entry], key: &str, at: Span) -> Result<&'a Value, SceneError> {
    record.iter().find(|e| e.key == key).map(|e| &e.value).ok_or_else(|| err(at, format!("missing key {key:?}")))
}

fn optional<'a>(record: &[&'a Entry], key: &str) -> Option<&'a Value> {
    record.iter().find(|e| e.key == key).map(|e| &e.value)
}

fn single<'a>(block: &'a Block, allowed: &[&str]) -> Result<Vec<&'a Entry>, SceneError> {
    let mut seen: Vec<&Entry> = Vec::new();
    for e in &block.entries {
        if !allowed.contains(&e.key.as_str()) {
            return Err(err(e.span, format!("unknown key {:?} in [{}]", e.key, block.name)));
        }
        if seen.iter().any(|s| s.key == e.key) {
            return Err(err(e.span, format!("duplicate key {:?}", e.key)));
        }
        seen.push(e);
    }
    Ok(seen)
}

fn repeated(block: &Block, key: &str) -> Result<Vec<Value>, SceneError> {
    block
        .entries
        .iter()
        .map(|e| {
            if e.key == key {
                Ok(e.value.clone())
            } else {
                Err(err(e.span, format!("unknown key {:?} in [{}]", e.key, block.name)))
            }
        })
        .collect()
}

fn section_spec(record: &[&Entry], at: Span) -> Result<SectionSpec, SceneError> {
    Ok(SectionSpec { x: get(record, "X", at)?.texts("X")?, alpha: get(record, "alpha", at)?.texts("alpha")? })
}

fn presentation(v: &Value) -> Result<Vec<(Text, Text)>, SceneError> {
    v.list("presentation")?
        .iter()
        .map(|item| match item {
            Value::Tuple(pair, span) if pair.len() == 2 => Ok((pair[0].text("presentation")?, pair[1].text("presentation")?)),
            other => Err(err(other.span(), "presentation entries are (\"g\", \"f\") pairs")),
        })
        .collect()
}

fn constraints(v: &Value) -> Result<Vec<(Text, Relation)>, SceneError> {
    v.list("constraints")?
        .iter()
        .map(|item| match item {
            Value::Constraint(t, r, _) => Ok((t.clone(), *r)),
            other => Err(err(other.span(), "constraints are written \"expr\" op 0")),
        })
        .collect()
}

const SECTIONS: [&str; 15] = [
    "scene",
    "chart",
    "action",
    "invariants",
    "dirac",
    "descending",
    "fields",
    "strata",
    "samples",
    "hamiltonians",
    "flow",
    "expect",
    "expect.pushforward",
    "expect.reduced",
    "expect.relation",
];

/// Parses a scene file into a [`SceneSpec`].
pub fn parse_scene(src: &str) -> Result<SceneSpec, SceneError> {
    let blocks = blocks(src)?;
    for b in &blocks {
        if !SECTIONS.contains(&b.name.as_str()) && b.name != "expect.bracket" {
            return Err(err(b.span, format!("unknown section [{}]", b.name)));
        }
    }
    let block = |name: &str| blocks.iter().find(|b| b.name == name);
    let required = |name: &str| block(name).ok_or_else(|| err(Span { line: 1, column: 1 }, format!("missing section [{name}]")));

    let scene = required("scene")?;
    let sc = single(scene, &["name"])?;
    let name = get(&sc, "name", scene.span)?.string("name")?;

    let chart = required("chart")?;
    let ch = single(chart, &["name", "coords"])?;
    let chart_name = get(&ch, "name", chart.span)?.string("name")?;
    let coords = get(&ch, "coords", chart.span)?.strings("coords")?;

    let action = required("action")?;
    let mut kind = None;
    let mut generators = Vec::new();
    for e in &action.entries {
        match e.key.as_str() {
            "kind" if kind.is_none() => {
                let k = e.value.string("kind")?;
                kind = Some(ActionKind::parse(&k).ok_or_else(|| err(e.value.span(), format!("unknown action kind {k:?}")))?);
            }
            "generator" => generators.push(e.value.texts("generator")?),
            _ => return Err(err(e.span, format!("unexpected key {:?} in [action]", e.key))),
        }
    }
    let action_kind = kind.ok_or_else(|| err(action.span, "missing key \"kind\""))?;

    let inv = required("invariants")?;
    let iv = single(inv, &["target", "coords", "basis"])?;
    let target_name = get(&iv, "target", inv.span)?.string("target")?;
    let target_coords = get(&iv, "coords", inv.span)?.strings("coords")?;
    let basis = get(&iv, "basis", inv.span)?.texts("basis")?;

    let dirac_block = required("dirac")?;
    let dirac =
        records(dirac_block, "X", &["alpha"])?.iter().map(|r| section_spec(r, r[0].span)).collect::<Result<Vec<_>, _>>()?;

    let descending = match block("descending") {
        None => Vec::new(),
        Some(b) => records(b, "name", &["X", "alpha", "presentation"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                Ok(DescendingSpec {
                    name: get(r, "name", at)?.string("name")?,
                    section: section_spec(r, at)?,
                    presentation: optional(r, "presentation").map(presentation).transpose()?.unwrap_or_default(),
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?,
    };

    let fields = match block("fields") {
        None => Vec::new(),
        Some(b) => records(b, "name", &["X"])?
            .iter()
            .map(|r| {
                Ok(FieldSpec {
                    name: get(r, "name", r[0].span)?.string("name")?,
                    components: get(r, "X", r[0].span)?.texts("X")?,
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?,
    };

    let strata = match block("strata") {
        None => Vec::new(),
        Some(b) => records(b, "name", &["params", "embedding", "constraints", "samples"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                Ok(StratumSpec {
                    name: get(r, "name", at)?.string("name")?,
                    params: get(r, "params", at)?.strings("params")?,
                    embedding: get(r, "embedding", at)?.texts("embedding")?,
                    constraints: optional(r, "constraints").map(constraints).transpose()?.unwrap_or_default(),
                    samples: optional(r, "samples").map(|v| v.points("samples")).transpose()?.unwrap_or_default(),
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?,
    };

    let samples = match block("samples") {
        None => Vec::new(),
        Some(b) => repeated(b, "point")?.iter().map(|v| v.texts("point")).collect::<Result<Vec<_>, _>>()?,
    };

    let hamiltonians = match block("hamiltonians") {
        None => Vec::new(),
        Some(b) => repeated(b, "function")?.iter().map(|v| v.text("function")).collect::<Result<Vec<_>, _>>()?,
    };

    let flows = match block("flow") {
        None => Vec::new(),
        Some(b) => records(b, "name", &["field", "start", "time", "steps", "end", "monitors"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                let time_value = get(r, "time", at)?;
                let time_text = time_value.string("time")?;
                let time: f64 =
                    time_text.parse().map_err(|_| err(time_value.span(), format!("time {time_text:?} is not a number")))?;
                Ok(FlowSpec {
                    name: get(r, "name", at)?.string("name")?,
                    field: get(r, "field", at)?.texts("field")?,
                    start: get(r, "start", at)?.texts("start")?,
                    time,
                    steps: get(r, "steps", at)?.index("steps")?,
                    end: optional(r, "end").map(|v| v.texts("end")).transpose()?,
                    monitors: optional(r, "monitors").map(|v| v.texts("monitors")).transpose()?.unwrap_or_default(),
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?,
    };

    let mut expect = ExpectSpec::default();
    if let Some(b) = block("expect") {
        let ex = single(b, &["integrable", "probe"])?;
        expect.integrable = optional(&ex, "integrable").map(|v| v.boolean("integrable")).transpose()?;
        expect.probe = optional(&ex, "probe").map(|v| v.boolean("probe")).transpose()?;
    }
    if let Some(b) = block("expect.pushforward") {
        expect.pushforwards = records(b, "name", &["field", "image"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                Ok(PushforwardSpec {
                    name: get(r, "name", at)?.string("name")?,
                    field: get(r, "field", at)?.texts("field")?,
                    image: get(r, "image", at)?.texts("image")?,
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?;
    }
    if let Some(b) = block("expect.reduced") {
        // A record is a stratum name followed by X/alpha pairs.
        let mut current: Option<ReducedSpec> = None;
        let mut pending_x: Option<&Entry> = None;
        for e in &b.entries {
            match e.key.as_str() {
                "stratum" => {
                    if let Some(x) = pending_x.take() {
                        return Err(err(x.span, "X without alpha"));
                    }
                    if let Some(r) = current.take() {
                        expect.reduced.push(r);
                    }
                    current = Some(ReducedSpec { stratum: e.value.string("stratum")?, generators: Vec::new() });
                }
                "X" if current.is_some() && pending_x.is_none() => pending_x = Some(e),
                "alpha" if pending_x.is_some() => {
                    let x = pending_x.take().map(|x| x.value.texts("X")).transpose()?.unwrap_or_default();
                    if let Some(r) = current.as_mut() {
                        r.generators.push(SectionSpec { x, alpha: e.value.texts("alpha")? });
                    }
                }
                _ => return Err(err(e.span, format!("unexpected key {:?} in [expect.reduced]", e.key))),
            }
        }
        if let Some(x) = pending_x {
            return Err(err(x.span, "X without alpha"));
        }
        expect.reduced.extend(current);
    }
    if let Some(b) = block("expect.relation") {
        expect.relations = records(b, "stratum", &["X", "alpha", "coefficients"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                Ok(RelationSpec {
                    stratum: get(r, "stratum", at)?.string("stratum")?,
                    section: section_spec(r, at)?,
                    coefficients: get(r, "coefficients", at)?.texts("coefficients")?,
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?;
    }
    if let Some(b) = block("expect.bracket") {
        expect.brackets = records(b, "stratum", &["i", "j", "coefficients"])?
            .iter()
            .map(|r| {
                let at = r[0].span;
                Ok(BracketSpec {
                    stratum: get(r, "stratum", at)?.string("stratum")?,
                    i: get(r, "i", at)?.index("i")?,
                    j: get(r, "j", at)?.index("j")?,
                    coefficients: get(r, "coefficients", at)?.texts("coefficients")?,
                })
            })
            .collect::<Result<Vec<_>, SceneError>>()?;
    }

    for (what, names) in [("coordinate", &coords), ("target coordinate", &target_coords)] {
        if let Some(bad) = names.iter().find(|n| !is_identifier(n)) {
            return Err(err(Span { line: 1, column: 1 }, format!("invalid {what} name {bad:?}")));
        }
    }

    Ok(SceneSpec {
        name,
        chart_name,
        coords,
        action: action_kind,
        generators,
        target_name,
        target_coords,
        basis,
        dirac,
        descending,
        fields,
        strata,
        samples,
        hamiltonians,
        flows,
        expect,
    })
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

fn list<T: AsRef<str>>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|s| quote(s.as_ref())).collect();
    format!("[{}]", parts.join(", "))
}

fn text_list(items: &[Text]) -> String {
    let v: Vec<&str> = items.iter().map(|t| t.text.as_str()).collect();
    list(&v)
}

fn point_list(points: &[Vec<Text>]) -> String {
    let parts: Vec<String> = points.iter().map(|p| text_list(p)).collect();
    format!("[{}]", parts.join(", "))
}

fn write_section(out: &mut String, s: &SectionSpec) {
    let _ = writeln!(out, "X = {}", text_list(&s.x));
    let _ = writeln!(out, "alpha = {}", text_list(&s.alpha));
}

/// Canonical text of a scene; [`parse_scene`] inverts it.
pub fn write_scene(spec: &SceneSpec) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "[scene]\nname = {}\n", quote(&spec.name));
    let _ = writeln!(w, "[chart]\nname = {}\ncoords = {}\n", quote(&spec.chart_name), list(&spec.coords));
    let _ = writeln!(w, "[action]\nkind = {}", quote(spec.action.as_str()));
    for g in &spec.generators {
        let _ = writeln!(w, "generator = {}", text_list(g));
    }
    let _ = writeln!(
        w,
        "\n[invariants]\ntarget = {}\ncoords = {}\nbasis = {}\n",
        quote(&spec.target_name),
        list(&spec.target_coords),
        text_list(&spec.basis)
    );
    let _ = writeln!(w, "[dirac]");
    for s in &spec.dirac {
        write_section(w, s);
    }
    if !spec.descending.is_empty() {
        let _ = writeln!(w, "\n[descending]");
        for d in &spec.descending {
            let _ = writeln!(w, "name = {}", quote(&d.name));
            write_section(w, &d.section);
            if !d.presentation.is_empty() {
                let pairs: Vec<String> =
                    d.presentation.iter().map(|(g, f)| format!("({}, {})", quote(&g.text), quote(&f.text))).collect();
                let _ = writeln!(w, "presentation = [{}]", pairs.join(", "));
            }
        }
    }
    if !spec.fields.is_empty() {
        let _ = writeln!(w, "\n[fields]");
        for f in &spec.fields {
            let _ = writeln!(w, "name = {}\nX = {}", quote(&f.name), text_list(&f.components));
        }
    }
    for st in &spec.strata {
        let _ = writeln!(
            w,
            "\n[strata]\nname = {}\nparams = {}\nembedding = {}",
            quote(&st.name),
            list(&st.params),
            text_list(&st.embedding)
        );
        let cs: Vec<String> = st.constraints.iter().map(|(t, r)| format!("{} {} 0", quote(&t.text), r)).collect();
        let _ = writeln!(w, "constraints = [{}]\nsamples = {}", cs.join(", "), point_list(&st.samples));
    }
    if !spec.samples.is_empty() {
        let _ = writeln!(w, "\n[samples]");
        for p in &spec.samples {
            let _ = writeln!(w, "point = {}", text_list(p));
        }
    }
    if !spec.hamiltonians.is_empty() {
        let _ = writeln!(w, "\n[hamiltonians]");
        for h in &spec.hamiltonians {
            let _ = writeln!(w, "function = {}", quote(&h.text));
        }
    }
    for f in &spec.flows {
        let _ = writeln!(
            w,
            "\n[flow]\nname = {}\nfield = {}\nstart = {}\ntime = {}\nsteps = {}",
            quote(&f.name),
            text_list(&f.field),
            text_list(&f.start),
            quote(&f.time.to_string()),
            f.steps
        );
        if let Some(end) = &f.end {
            let _ = writeln!(w, "end = {}", text_list(end));
        }
        if !f.monitors.is_empty() {
            let _ = writeln!(w, "monitors = {}", text_list(&f.monitors));
        }
    }
    let e = &spec.expect;
    if e.integrable.is_some() || e.probe.is_some() {
        let _ = writeln!(w, "\n[expect]");
        if let Some(b) = e.integrable {
            let _ = writeln!(w, "integrable = {b}");
        }
        if let Some(b) = e.probe {
            let _ = writeln!(w, "probe = {b}");
        }
    }
    if !e.pushforwards.is_empty() {
        let _ = writeln!(w, "\n[expect.pushforward]");
        for p in &e.pushforwards {
            let _ = writeln!(w, "name = {}\nfield = {}\nimage = {}", quote(&p.name), text_list(&p.field), text_list(&p.image));
        }
    }
    if !e.reduced.is_empty() {
        let _ = writeln!(w, "\n[expect.reduced]");
        for r in &e.reduced {
            let _ = writeln!(w, "stratum = {}", quote(&r.stratum));
            for g in &r.generators {
                write_section(w, g);
            }
        }
    }
    if !e.relations.is_empty() {
        let _ = writeln!(w, "\n[expect.relation]");
        for r in &e.relations {
            let _ = writeln!(w, "stratum = {}", quote(&r.stratum));
            write_section(w, &r.section);
            let _ = writeln!(w, "coefficients = {}", text_list(&r.coefficients));
        }
    }
    if !e.brackets.is_empty() {
        let _ = writeln!(w, "\n[expect.bracket]");
        for b in &e.brackets {
            let _ = writeln!(
                w,
                "stratum = {}\ni = {}\nj = {}\ncoefficients = {}",
                quote(&b.stratum),
                b.i,
                b.j,
                text_list(&b.coefficients)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::{build, builtin, BUILTIN_NAMES};

    #[test]
    fn builtins_round_trip_through_text() {
        for name in BUILTIN_NAMES {
            let scene = builtin(name).unwrap();
            let text = write_scene(&scene.spec);
            let spec = parse_scene(&text).unwrap();
            assert_eq!(spec, scene.spec, "{name}");
            assert_eq!(build(spec).unwrap(), scene, "{name}");
        }
    }

    #[test]
    fn malformed_expression_reports_its_position() {
        let text = write_scene(&builtin("s1_r3").unwrap().spec).replace("basis = [\"x^2 + y^2\"", "basis = [\"x^2 + * y^2\"");
        let line = text.lines().position(|l| l.starts_with("basis")).unwrap() + 1;
        match build(parse_scene(&text).unwrap()) {
            Err(SceneError::Parse { line: l, column, .. }) => {
                assert_eq!(l, line);
                assert_eq!(column, "basis = [\"x^2 + ".len() + 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        match parse_scene("[scene]\nname = \"a\"\n[chart]\ncoords = [\"x\" \"y\"]\n") {
            Err(SceneError::Parse { line: 4, column: 15, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_scene("[bogus]\n"), Err(SceneError::Parse { line: 1, .. })));
        assert!(matches!(parse_scene("name = \"x\"\n"), Err(SceneError::Parse { line: 1, column: 1, .. })));
    }

    #[test]
    fn constraints_and_tuples_parse() {
        let b = blocks("[strata]\nconstraints = [\"x\" > 0, \"y\" = 0, \"z\" >= 0, \"w\" != 0]\nsamples = [(\"a\", \"b\")]\n")
            .unwrap();
        let cs = constraints(&b[0].entries[0].value).unwrap();
        let rels: Vec<Relation> = cs.iter().map(|c| c.1).collect();
        assert_eq!(rels, vec![Relation::Gt, Relation::Eq, Relation::Ge, Relation::Ne]);
        assert!(matches!(&b[0].entries[1].value, Value::List(v, _) if matches!(v[0], Value::Tuple(_, _))));
    }

    #[test]
    fn non_invariant_basis_is_a_validation_error() {
        let text =
            write_scene(&builtin("s1_r3").unwrap().spec).replace("basis = [\"x^2 + y^2\", \"z\"]", "basis = [\"x\", \"z\"]");
        match build(parse_scene(&text).unwrap()) {
            Err(SceneError::Validation {
                source: crate::scenes::ValidationError::Action(crate::actions::ActionError::NotInvariant { .. }),
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }
}
