//! Tree of named check results.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Skip,
    Warn,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Skip => "skip",
            Status::Warn => "warn",
            Status::Fail => "fail",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witnesses: Vec<String>,
    pub children: Vec<Check>,
}

impl Check {
    pub fn leaf(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status, detail: detail.into(), witnesses: Vec::new(), children: Vec::new() }
    }

    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::leaf(name, Status::Pass, detail)
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::leaf(name, Status::Fail, detail)
    }

    pub fn warn(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::leaf(name, Status::Warn, detail)
    }

    pub fn skip(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::leaf(name, Status::Skip, detail)
    }

    /// `pass` when `ok`, else `fail`.
    pub fn verdict(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::leaf(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    /// A node whose status is the worst of its children (`skip` when empty).
    pub fn group(name: impl Into<String>, children: Vec<Check>) -> Self {
        let status = aggregate(&children);
        Check { name: name.into(), status, detail: String::new(), witnesses: Vec::new(), children }
    }

    pub fn with_witnesses(mut self, witnesses: impl IntoIterator<Item = String>) -> Self {
        self.witnesses.extend(witnesses);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn push(&mut self, child: Check) {
        self.children.push(child);
        self.status = combine(self.status, child_status(self.children.last()));
    }

    pub fn has_fail(&self) -> bool {
        self.status == Status::Fail || self.children.iter().any(Check::has_fail)
    }

    /// Depth-first search by slash-separated path of names.
    pub fn find(&self, path: &str) -> Option<&Check> {
        let mut node = self;
        for part in path.split('/').filter(|p| !p.is_empty()) {
            node = node.children.iter().find(|c| c.name == part)?;
        }
        Some(node)
    }

    fn render(&self, depth: usize, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = "  ".repeat(depth);
        write!(out, "{pad}[{}] {}", self.status, self.name)?;
        if !self.detail.is_empty() {
            write!(out, ": {}", self.detail)?;
        }
        writeln!(out)?;
        for w in &self.witnesses {
            writeln!(out, "{pad}    {w}")?;
        }
        self.children.iter().try_for_each(|c| c.render(depth + 1, out))
    }
}

/// Worst of two statuses, where `skip` yields to anything else.
fn combine(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Skip, s) | (s, Status::Skip) => s,
        (a, b) => a.max(b),
    }
}

fn child_status(c: Option<&Check>) -> Status {
    c.map_or(Status::Skip, |c| c.status)
}

fn aggregate(children: &[Check]) -> Status {
    children.iter().map(|c| c.status).fold(Status::Skip, combine)
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_take_the_worst_status() {
        let g = Check::group("root", vec![Check::pass("a", ""), Check::skip("b", "no data")]);
        assert_eq!(g.status, Status::Pass);
        let mut g = Check::group("root", vec![Check::pass("a", ""), Check::warn("b", "")]);
        assert_eq!(g.status, Status::Warn);
        g.push(Check::fail("c", "bad"));
        assert_eq!(g.status, Status::Fail);
        assert!(g.has_fail());
        assert_eq!(g.find("c").unwrap().detail, "bad");
        assert_eq!(Check::group("empty", vec![]).status, Status::Skip);
        let mut g = Check::group("grown", vec![]);
        g.push(Check::pass("a", ""));
        assert_eq!(g.status, Status::Pass);
        let mut leaf = Check::pass("leaf", "");
        leaf.push(Check::skip("sub", ""));
        assert_eq!(leaf.status, Status::Pass);
    }

    #[test]
    fn text_rendering_indents_children() {
        let g = Check::group("root", vec![Check::pass("a", "ok").with_witnesses(["w".to_string()])]);
        assert_eq!(g.to_string(), "[pass] root\n  [pass] a: ok\n      w\n");
    }
}
