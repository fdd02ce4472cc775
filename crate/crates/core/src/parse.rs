//! Text form of polynomials.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := INT | VAR | VAR '^' UINT | '(' expr ')'
//! ```
//!
//! A leading sign on an expression and a power on a parenthesised group are
//! also accepted. Rendering (via `Display`) only emits the strict grammar.

use std::sync::Arc;

use crate::error::PolyError;
use crate::poly::{Poly, PolyRing};

/// Parse `src` as a polynomial of `ring`, reducing integer literals mod p.
pub fn parse_poly(src: &str, ring: &Arc<PolyRing>) -> Result<Poly, PolyError> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
        ring,
    };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<PolyRing>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let negate_first = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate_first {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let p = self.ring.p();
                let mut value = 0u64;
                while let Some(&d) = self.src.get(self.pos).filter(|d| d.is_ascii_digit()) {
                    value = (value * 10 + (d - b'0') as u64) % p;
                    self.pos += 1;
                }
                Ok(Poly::constant(self.ring, value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while let Some(&d) = self
                    .src
                    .get(self.pos)
                    .filter(|d| d.is_ascii_alphanumeric() || **d == b'_')
                {
                    let _ = d;
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let var =
                    Poly::var_named(self.ring, name).ok_or_else(|| PolyError::UnknownVariable {
                        name: name.to_string(),
                        pos: start,
                    })?;
                self.maybe_power(var)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                self.maybe_power(inner)
            }
            Some(_) => Err(self.error("expected a number, variable or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn maybe_power(&mut self, base: Poly) -> Result<Poly, PolyError> {
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let mut exp: u64 = 0;
        while let Some(&d) = self.src.get(self.pos).filter(|d| d.is_ascii_digit()) {
            exp = exp.saturating_mul(10).saturating_add((d - b'0') as u64);
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a nonnegative integer exponent"));
        }
        let bound = self.ring.degree_bound();
        if exp > bound as u64 {
            return Err(PolyError::DegreeBound { degree: exp, bound });
        }
        base.pow(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_literals() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        assert_eq!(parse_poly("x^2 + 4", &r).unwrap().to_string(), "x^2 + 1");
        assert!(parse_poly("0", &r).unwrap().is_zero());
        let r5 = PolyRing::new(5, &["x", "y"]).unwrap();
        assert_eq!(
            parse_poly("2*x*y - y", &r5).unwrap().to_string(),
            "2*x*y + 4*y"
        );
    }

    #[test]
    fn reports_positions() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        assert_eq!(
            parse_poly("x + z", &r),
            Err(PolyError::UnknownVariable {
                name: "z".into(),
                pos: 4
            })
        );
        assert!(matches!(
            parse_poly("x + ", &r),
            Err(PolyError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse_poly("x^", &r),
            Err(PolyError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("(x + 1", &r),
            Err(PolyError::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x y", &r),
            Err(PolyError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn parenthesised_products() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let a = parse_poly("(x + 1)*(x + 2)", &r).unwrap();
        assert_eq!(a.to_string(), "x^2 + 2");
        assert_eq!(parse_poly("-x", &r).unwrap().to_string(), "2*x");
        assert_eq!(parse_poly("(x+2)^3", &r).unwrap().to_string(), "x^3 + 2");
    }

    #[test]
    fn huge_exponent_is_a_resource_error() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        assert!(matches!(
            parse_poly("x^99999999999", &r),
            Err(PolyError::DegreeBound { .. })
        ));
    }
}
