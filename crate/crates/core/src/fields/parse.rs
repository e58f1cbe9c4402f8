//! Exact parser for the element string format.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | variable | 'sqrt' '(' integer ')' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElement};
use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
                return Err(Error::Parse(format!("decimal literal in {s:?}; exact fields take integers and fractions")));
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token::Int(digits.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else if c == '.' {
            return Err(Error::Parse(format!("decimal literal in {s:?}; exact fields take integers and fractions")));
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    desc: &'a FieldDescriptor,
    tokens: Vec<Token>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in {:?}", self.text))
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d).ok_or(Error::ZeroDenominator)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let e = match self.peek() {
            Some(Token::Int(n)) => n.to_u64().ok_or_else(|| self.err("exponent too large"))?,
            _ => return Err(self.err("expected an integer exponent")),
        };
        self.pos += 1;
        let p = base.pow(e);
        if negative {
            p.inv().ok_or(Error::ZeroDenominator)
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(FieldElement::from_bigint(self.desc, &n))
            }
            Some(Token::Ident(name)) if name == "sqrt" => {
                self.pos += 1;
                if !self.eat('(') {
                    return Err(self.err("expected '(' after sqrt"));
                }
                let n = match self.peek() {
                    Some(Token::Int(n)) => n.clone(),
                    _ => return Err(self.err("expected an integer under sqrt")),
                };
                self.pos += 1;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                self.sqrt(&n)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match (self.desc, self.desc.variable()) {
                    (FieldDescriptor::FunctionField { var, .. }, Some(t)) if **var == *name => Ok(t),
                    _ => Err(self.err(&format!("unknown symbol {name:?} for field {}", self.desc))),
                }
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(self.err("unexpected end of input or symbol")),
        }
    }

    /// `sqrt(n)` is accepted when `n` is a perfect square, or when `n / d`
    /// is one in `Q(sqrt(d))`.
    fn sqrt(&self, n: &BigInt) -> Result<FieldElement> {
        let r = n.sqrt();
        if &(&r * &r) == n {
            return Ok(FieldElement::from_bigint(self.desc, &r));
        }
        if let FieldDescriptor::RealQuadratic(d) = self.desc {
            let d = BigInt::from(*d);
            if !n.is_negative() && (n % &d) == BigInt::from(0) {
                let q = n / &d;
                let s = q.sqrt();
                if &s * &s == q {
                    let root = self.desc.sqrt_d().expect("quadratic");
                    return Ok(root.mul(&FieldElement::from_bigint(self.desc, &s)));
                }
            }
        }
        Err(self.err(&format!("sqrt({n}) does not lie in {}", self.desc)))
    }
}

/// Parses `text` as an element of `desc`.
pub fn parse_element(desc: &FieldDescriptor, text: &str) -> Result<FieldElement> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut p = Parser { desc, tokens, pos: 0, text };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(desc: &str, text: &str) -> String {
        let d: FieldDescriptor = desc.parse().unwrap();
        let x = parse_element(&d, text).unwrap();
        let s = x.to_string();
        assert_eq!(parse_element(&d, &s).unwrap(), x, "{s}");
        s
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(round_trip("Q", "6/-4"), "-3/2");
        assert_eq!(round_trip("Q", "2^-3"), "1/8");
        assert_eq!(round_trip("GF(7)", "-1"), "6");
        assert_eq!(round_trip("GF(7)", "1/3"), "5");
        assert_eq!(round_trip("GF(2)(t)", "(t^2 + t) / t"), "t + 1");
        assert_eq!(round_trip("Q(t)", "t/(2*t^2 - 2)"), "(1/2*t) / (t^2 - 1)");
        assert_eq!(round_trip("Q(sqrt(5))", "(2 + 2*sqrt(5))/2"), "1 + sqrt(5)");
        assert_eq!(round_trip("Q(sqrt(5))", "(-1 + sqrt(5))/2"), "-1/2 + 1/2*sqrt(5)");
        assert_eq!(round_trip("Q(sqrt(5))", "sqrt(20)"), "2*sqrt(5)");
        assert_eq!(round_trip("Q(x)", "x^-1"), "(1) / (x)");
    }

    #[test]
    fn rejects_bad_input() {
        let q = FieldDescriptor::Rationals;
        assert!(matches!(parse_element(&q, "1/0"), Err(Error::ZeroDenominator)));
        assert!(matches!(parse_element(&q, "0.5"), Err(Error::Parse(_))));
        assert!(parse_element(&q, "t").is_err());
        assert!(parse_element(&q, "sqrt(2)").is_err());
        assert!(parse_element(&q, "(1").is_err());
        assert!(parse_element(&q, "").is_err());
    }
}
