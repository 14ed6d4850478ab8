use std::fmt;
use std::sync::Arc;

use super::ExprError;

/// A named coordinate chart: an ordered list of distinct coordinate names.
///
/// The declared order fixes the graded-lexicographic monomial order used for
/// every canonical form on the chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>, C: AsRef<str>>(name: S, coords: &[C]) -> Result<Arc<Chart>, ExprError> {
        let name = name.into();
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        for (i, c) in coords.iter().enumerate() {
            if c.is_empty() || !is_identifier(c) {
                return Err(ExprError::InvalidChart(format!("bad coordinate name {c:?}")));
            }
            if coords[..i].contains(c) {
                return Err(ExprError::InvalidChart(format!("duplicate coordinate {c:?}")));
            }
        }
        Ok(Arc::new(Chart { name, coords }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == coord)
    }

    pub fn require_index(&self, coord: &str) -> Result<usize, ExprError> {
        self.index_of(coord).ok_or_else(|| ExprError::UnknownCoordinate { name: coord.to_string(), position: None })
    }

    /// Same coordinate list (names are labels only).
    pub fn same_coords(&self, other: &Chart) -> bool {
        self.coords == other.coords
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.coords.join(", "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(Chart::new("M", &["x", "y", "x"]).is_err());
        assert!(Chart::new("M", &["x", "1y"]).is_err());
        assert!(Chart::new("M", &[""]).is_err());
        let c = Chart::new("M", &["x1", "y1", "delta"]).unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.index_of("delta"), Some(2));
    }
}
