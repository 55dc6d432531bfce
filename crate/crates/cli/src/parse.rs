//! Polynomial input.
//!
//! Two forms are accepted:
//!
//! - a JSON array of coefficient strings, constant term first:
//!   `["-1/2", "1/2"]`;
//! - an expression in `w` over integers with `+ - * / ^` and parentheses,
//!   whitespace-insensitive. Juxtaposition multiplies (`2w^3`), division is by
//!   constants only, and exponents are non-negative integers. Everything
//!   printed by `Poly`'s `Display` parses back to the same polynomial.

use coopbasis_core::{Poly, Rational};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

pub fn parse_poly(input: &str) -> Result<Poly, ParseError> {
    if input.trim_start().starts_with('[') {
        let coeffs: Vec<String> = serde_json::from_str(input).map_err(|e| ParseError {
            offset: e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        return crate::format::poly_from_strings(&coeffs).map_err(|message| ParseError { offset: 0, message });
    }
    let mut parser = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let divisor = self.unary()?;
                let c = match divisor.degree() {
                    None => None,
                    Some(0) => Some(divisor.coeff(0)),
                    Some(_) => {
                        return Err(ParseError {
                            offset: at,
                            message: "division by a non-constant polynomial".into(),
                        })
                    }
                };
                match c {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                    _ => {
                        return Err(ParseError {
                            offset: at,
                            message: "division by zero".into(),
                        })
                    }
                }
            } else if matches!(self.peek(), Some(b'w' | b'(' | b'0'..=b'9')) {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.integer()?;
            let e: u64 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                Ok(Poly::w())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b'0'..=b'9') => Ok(Poly::constant(Rational::from_integer(self.integer()?))),
            Some(_) => Err(self.error("expected a number, `w` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("nonempty digit string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn expressions() {
        assert_eq!(parse_poly("w^2").unwrap(), Poly::w().pow(2));
        assert_eq!(parse_poly("0").unwrap(), Poly::zero());
        assert_eq!(
            parse_poly("((w-1)/2)^2").unwrap(),
            Poly::from_coeffs(vec![q(1, 4), q(-1, 2), q(1, 4)])
        );
        assert_eq!(
            parse_poly("(2w^3 - w^2 + 2w - 3)/8").unwrap(),
            Poly::from_coeffs(vec![q(-3, 8), q(1, 4), q(-1, 8), q(1, 4)])
        );
        assert_eq!(parse_poly("-w/2").unwrap(), Poly::from_coeffs(vec![q(0, 1), q(-1, 2)]));
        assert_eq!(parse_poly(" 3 * w * w ").unwrap(), Poly::monomial(q(3, 1), 2));
        assert_eq!(parse_poly("1/2*w - 1/2").unwrap(), Poly::from_coeffs(vec![q(-1, 2), q(1, 2)]));
    }

    #[test]
    fn coefficient_lists() {
        assert_eq!(
            parse_poly(r#"["-1/2", "1/2"]"#).unwrap(),
            Poly::from_coeffs(vec![q(-1, 2), q(1, 2)])
        );
        assert_eq!(parse_poly("[]").unwrap(), Poly::zero());
        assert!(parse_poly(r#"["x"]"#).is_err());
    }

    #[test]
    fn rejects() {
        for bad in ["", "w/w", "1/0", "(w", "w^", "x", "w^-1", "2 +", "w)"] {
            assert!(parse_poly(bad).is_err(), "{bad:?} parsed");
        }
    }
}
