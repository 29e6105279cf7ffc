//! Infix polynomial expressions, e.g. `x^2 + 3/4*x*y - 0.5`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*      // '/' only by a nonzero constant
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | variable | '(' expr ')'
//! ```
//!
//! Variables are `x1 .. xk`, with `x`, `y`, `z` as aliases for the first three.

use num_traits::Zero;

use super::poly::MultiPoly;
use super::rational::{parse_rational, Rational};
use super::AlgebraError;

pub fn parse_poly(src: &str, vars: usize) -> Result<MultiPoly<Rational>, AlgebraError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(AlgebraError::Parse(format!(
            "unexpected token {:?} in {src:?}",
            p.tokens[p.pos]
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Var(usize),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let idx = match name.as_str() {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                _ => name
                    .strip_prefix('x')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .map(|n| n - 1)
                    .ok_or_else(|| AlgebraError::Parse(format!("unknown variable {name:?}")))?,
            };
            out.push(Tok::Var(idx));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    vars: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<MultiPoly<Rational>, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs)? } else { acc.sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly<Rational>, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            if op == '*' {
                acc = acc.mul(&rhs)?;
            } else {
                let c = constant_value(&rhs)
                    .ok_or_else(|| AlgebraError::Parse("division by a non-constant".into()))?;
                if c.is_zero() {
                    return Err(AlgebraError::Parse("division by zero".into()));
                }
                acc = acc.scale(&c.recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly<Rational>, AlgebraError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly<Rational>, AlgebraError> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let e: u32 = match self.tokens.get(self.pos) {
            Some(Tok::Num(s)) => s
                .parse()
                .map_err(|_| AlgebraError::Parse(format!("exponent must be a non-negative integer, got {s:?}")))?,
            other => return Err(AlgebraError::Parse(format!("expected exponent, got {other:?}"))),
        };
        self.pos += 1;
        let mut acc = MultiPoly::one(self.vars, &());
        for _ in 0..e {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<MultiPoly<Rational>, AlgebraError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| AlgebraError::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(s) => Ok(MultiPoly::constant(parse_rational(&s)?, self.vars)),
            Tok::Var(i) if i < self.vars => Ok(MultiPoly::var(i, self.vars, &())),
            Tok::Var(i) => Err(AlgebraError::Parse(format!(
                "variable x{} outside the {} declared variables",
                i + 1,
                self.vars
            ))),
            Tok::Op('(') => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(AlgebraError::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Op(c) => Err(AlgebraError::Parse(format!("unexpected {c:?}"))),
        }
    }
}

fn constant_value(p: &MultiPoly<Rational>) -> Option<Rational> {
    match p.terms().collect::<Vec<_>>().as_slice() {
        [] => Some(Rational::zero()),
        [(m, c)] if m.degree() == 0 => Some((*c).clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn parses_aliases_and_indexed_names() {
        let a = parse_poly("x + y", 2).unwrap();
        let b = parse_poly("x1 + x2", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.eval(&[rat(6, 1), rat(1, 1)]).unwrap(), rat(7, 1));
    }

    #[test]
    fn precedence_and_literals() {
        let p = parse_poly("-(x - 1)^2 * 2 + 0.5*y/2", 2).unwrap();
        // -2x^2 + 4x - 2 + y/4
        assert_eq!(p, parse_poly("-2*x^2 + 4*x - 2 + 1/4*y", 2).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_poly("x / y", 2).is_err());
        assert!(parse_poly("z", 2).is_err());
        assert!(parse_poly("x ^ 1.5", 2).is_err());
        assert!(parse_poly("(x + 1", 2).is_err());
        assert!(parse_poly("x $ 2", 2).is_err());
        assert!(parse_poly("x / 0", 2).is_err());
    }
}
