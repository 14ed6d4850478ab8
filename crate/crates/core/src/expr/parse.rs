//! Recursive-descent parser for rational expressions over a chart.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' uint)?
//! base   := int | ident | '(' expr ')' | '-' factor
//! ```

use num_bigint::BigInt;

use super::chart::Chart;
use super::{ExprError, Poly, Rat, RatFn};

/// Parses `text` into a reduced rational function on `chart`.
pub fn parse_expr(text: &str, chart: &Chart) -> Result<RatFn, ExprError> {
    let mut p = Parser { src: text, chars: text.char_indices().collect(), at: 0, chart };
    let value = p.expr()?;
    p.skip_ws();
    if let Some(&(pos, c)) = p.chars.get(p.at) {
        return Err(ExprError::SyntaxError { pos, msg: format!("unexpected {c:?}") });
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    at: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.at).is_some_and(|(_, c)| c.is_whitespace()) {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map(|&(p, _)| p).unwrap_or(self.src.len())
    }

    fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::SyntaxError { pos: self.pos(), msg: msg.into() }
    }

    fn nvars(&self) -> usize {
        self.chart.dim()
    }

    fn expr(&mut self) -> Result<RatFn, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.at += 1;
                    acc = &acc * &self.factor()?;
                }
                Some('/') => {
                    self.at += 1;
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFn, ExprError> {
        let base = self.base()?;
        if self.peek() == Some('^') {
            self.at += 1;
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected unsigned integer exponent"));
            }
            let e: u32 = digits.parse().map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.at) {
            if c.is_ascii_digit() {
                s.push(c);
                self.at += 1;
            } else {
                break;
            }
        }
        s
    }

    fn base(&mut self) -> Result<RatFn, ExprError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(RatFn::constant(Rat::from_integer(n), self.nvars()))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos();
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.get(self.at) {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.at += 1;
                    } else {
                        break;
                    }
                }
                match self.chart.index_of(&name) {
                    Some(i) => Ok(RatFn::from_poly(Poly::var(i, self.nvars()))),
                    None => Err(ExprError::UnknownCoordinate { name, position: Some(start) }),
                }
            }
            Some('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.at += 1;
                Ok(inner)
            }
            Some('-') => {
                self.at += 1;
                Ok(-self.factor()?)
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn removable_singularity_cancels() {
        let c = Chart::new("R", &["x"]).unwrap();
        let f = parse_expr("(x^2 - 1)/(x - 1)", &c).unwrap();
        assert_eq!(f, parse_expr("x + 1", &c).unwrap());
        assert!(f.is_polynomial());
    }

    #[test]
    fn zero_and_precedence() {
        let c = Chart::new("R", &["x", "y"]).unwrap();
        assert!(parse_expr("0", &c).unwrap().is_zero());
        let f = parse_expr("-x^2 + 2*y/4", &c).unwrap();
        let names = c.coords().to_vec();
        assert_eq!(f.display(&names).to_string(), "-x^2 + 1/2*y");
        assert_eq!(parse_expr("2^3^1", &c).map(|_| ()), Err(ExprError::SyntaxError { pos: 3, msg: "unexpected '^'".into() }));
        assert_eq!(parse_expr("3/4*x", &c).unwrap(), RatFn::var(0, 2).scale(&crate::expr::ratio(3, 4)));
        assert_eq!(parse_expr("--x", &c).unwrap(), RatFn::var(0, 2));
        assert_eq!(parse_expr(" 7 ", &c).unwrap().constant_value(), Some(rat(7)));
    }

    #[test]
    fn errors_carry_positions() {
        let c = Chart::new("R", &["x", "y"]).unwrap();
        assert_eq!(parse_expr("x + w", &c), Err(ExprError::UnknownCoordinate { name: "w".into(), position: Some(4) }));
        assert_eq!(parse_expr("x/(y - y)", &c), Err(ExprError::DivisionByZeroPolynomial));
        assert!(matches!(parse_expr("(x + ", &c), Err(ExprError::SyntaxError { pos: 5, .. })));
        assert!(matches!(parse_expr("x y", &c), Err(ExprError::SyntaxError { pos: 2, .. })));
    }

    #[test]
    fn determinant_polynomial() {
        let c = Chart::new("M", &["x1", "y1", "z1", "x2", "y2", "z2"]).unwrap();
        let d = parse_expr("x1*y2 - y1*x2", &c).unwrap();
        let p = d.as_poly().unwrap();
        assert_eq!(p.nterms(), 2);
        assert_eq!(p.total_degree(), 2);
        assert_eq!(d.display(c.coords()).to_string(), "x1*y2 - y1*x2");
    }
}
