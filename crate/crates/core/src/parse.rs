//! Text grammar for fields, polynomials, rational functions, order elements
//! and curves.
//!
//! One expression parser serves every domain: `+ - * / ^`, parentheses,
//! integer literals, the indeterminates `x` and `y`, and the field generator
//! `t`. Juxtaposition multiplies (`3x`, `(t+1)x^2`). Values are evaluated as
//! polynomials in `y` with rational-function coefficients and then narrowed
//! to the requested domain.

use std::fmt;

use crate::error::{Error, Result};
use crate::ff::FieldSpec;
use crate::funcfield::RationalFunction;
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(char),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, column)
}

fn err_at(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(src, offset);
    Error::Parse(ParseError { line, column, message: message.into() })
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<u64>()
                .map_err(|_| err_at(src, start, "integer literal too large"))?;
            out.push(Token { tok: Tok::Int(n), offset: start });
        } else if matches!(c, 'x' | 'y' | 't') {
            out.push(Token { tok: Tok::Ident(c), offset: i });
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Op(c), offset: i });
            i += 1;
        } else {
            return Err(err_at(src, i, format!("unexpected character '{c}'")));
        }
    }
    out.push(Token { tok: Tok::End, offset: src.len() });
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Env {
    /// Name used for the polynomial indeterminate (`x`, or `t` for moduli).
    indeterminate: char,
    allow_t: bool,
    allow_y: bool,
}

/// A polynomial in y with rational-function coefficients.
#[derive(Clone, Debug)]
pub(crate) struct YPoly(pub(crate) Vec<RationalFunction>);

impl YPoly {
    fn constant(r: RationalFunction) -> Self {
        YPoly(vec![r])
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn field(&self) -> &FieldSpec {
        self.0[0].field()
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = RationalFunction::zero(self.field());
        YPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z).add(o.0.get(i).unwrap_or(&z))).collect())
            .trim()
    }

    fn neg(&self) -> Self {
        YPoly(self.0.iter().map(|c| c.neg()).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let z = RationalFunction::zero(self.field());
        let mut v = vec![z; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        YPoly(v).trim()
    }

    pub(crate) fn y_degree(&self) -> usize {
        self.0.len() - 1
    }

    pub(crate) fn coeff(&self, i: usize) -> RationalFunction {
        self.0.get(i).cloned().unwrap_or_else(|| RationalFunction::zero(self.field()))
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    field: FieldSpec,
    env: Env,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, field: &FieldSpec, env: Env) -> Result<Self> {
        Ok(Parser { src, toks: lex(src)?, pos: 0, field: field.clone(), env })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        err_at(self.src, self.peek().offset, message)
    }

    fn finish(&self) -> Result<()> {
        match self.peek().tok {
            Tok::End => Ok(()),
            _ => Err(self.error("unexpected trailing input")),
        }
    }

    fn expr(&mut self) -> Result<YPoly> {
        let mut acc = match self.peek().tok {
            Tok::Op('-') => {
                self.bump();
                self.term()?.neg()
            }
            Tok::Op('+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<YPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc.mul(&self.power()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    let offset = self.peek().offset;
                    let d = self.power()?;
                    if d.y_degree() > 0 {
                        return Err(err_at(self.src, offset, "cannot divide by an expression in y"));
                    }
                    let inv = RationalFunction::one(&self.field)
                        .div(&d.0[0])
                        .map_err(|_| err_at(self.src, offset, "division by zero"))?;
                    acc = acc.mul(&YPoly::constant(inv));
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::Op('(') => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<YPoly> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let e = match self.bump().tok {
                Tok::Int(e) if e <= 1 << 16 => e,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected a nonnegative exponent"));
                }
            };
            let mut acc = YPoly::constant(RationalFunction::one(&self.field));
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<YPoly> {
        let f = self.field.clone();
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Int(n) => {
                self.bump();
                let c = (n % f.characteristic() as u64) as u32;
                Ok(YPoly::constant(RationalFunction::from_poly(Polynomial::constant(&f, c))))
            }
            Tok::Ident(c) if c == self.env.indeterminate => {
                self.bump();
                Ok(YPoly::constant(RationalFunction::from_poly(Polynomial::x(&f))))
            }
            Tok::Ident('t') if self.env.allow_t => {
                let g = f
                    .generator()
                    .ok_or_else(|| self.error("t is only defined in extension fields"))?;
                self.bump();
                Ok(YPoly::constant(RationalFunction::from_poly(Polynomial::constant(&f, g))))
            }
            Tok::Ident('y') if self.env.allow_y => {
                self.bump();
                let z = RationalFunction::zero(&f);
                Ok(YPoly(vec![z, RationalFunction::one(&f)]))
            }
            Tok::Ident(c) => Err(self.error(format!("variable '{c}' not allowed here"))),
            Tok::Op('(') => {
                self.bump();
                let v = self.expr()?;
                if self.peek().tok != Tok::Op(')') {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(v)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            Tok::Op(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }
}

const X_ENV: Env = Env { indeterminate: 'x', allow_t: true, allow_y: false };
const XY_ENV: Env = Env { indeterminate: 'x', allow_t: true, allow_y: true };

fn parse_with(field: &FieldSpec, text: &str, env: Env) -> Result<YPoly> {
    let mut p = Parser::new(text, field, env)?;
    let v = p.expr()?;
    p.finish()?;
    Ok(v)
}

pub fn parse_rational(field: &FieldSpec, text: &str) -> Result<RationalFunction> {
    Ok(parse_with(field, text, X_ENV)?.0.swap_remove(0))
}

pub fn parse_polynomial(field: &FieldSpec, text: &str) -> Result<Polynomial> {
    let r = parse_rational(field, text)?;
    r.as_polynomial().ok_or_else(|| err_at(text, 0, "expected a polynomial"))
}

pub fn parse_element(field: &FieldSpec, text: &str) -> Result<u32> {
    let env = Env { indeterminate: '\0', allow_t: true, allow_y: false };
    let r = parse_with(field, text, env)?.0.swap_remove(0);
    r.as_polynomial()
        .filter(|p| p.is_constant())
        .map(|p| p.coeff(0))
        .ok_or_else(|| err_at(text, 0, "expected a field element"))
}

/// Parse an expression in x and y, returning it as a polynomial in y.
pub(crate) fn parse_ypoly(field: &FieldSpec, text: &str) -> Result<YPoly> {
    parse_with(field, text, XY_ENV)
}

/// Parse an equation `lhs = rhs` and return `lhs - rhs` as a polynomial in y.
pub(crate) fn parse_equation(field: &FieldSpec, text: &str) -> Result<YPoly> {
    let eq = text.find('=').ok_or_else(|| err_at(text, text.len(), "expected '='"))?;
    if text[eq + 1..].contains('=') {
        return Err(err_at(text, eq + 1 + text[eq + 1..].find('=').unwrap(), "more than one '='"));
    }
    let lhs = parse_with(field, &text[..eq], XY_ENV)?;
    let rhs = parse_with(field, &text[eq + 1..], XY_ENV).map_err(|e| match e {
        Error::Parse(mut pe) => {
            pe.column += text[..=eq].chars().count();
            Error::Parse(pe)
        }
        other => other,
    })?;
    Ok(lhs.add(&rhs.neg()))
}

fn prime_power(n: u32) -> Option<(u32, u32)> {
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

/// `GF(q)`, `GF(p^k)`, optionally followed by `:<modulus in t>`.
pub fn parse_field(text: &str) -> Result<FieldSpec> {
    let s = text.trim();
    let bad = |off: usize, m: &str| err_at(text, off, m.to_string());
    let body = s
        .strip_prefix("GF(")
        .ok_or_else(|| bad(0, "field must start with 'GF('"))?;
    let close = body.find(')').ok_or_else(|| bad(s.len(), "expected ')'"))?;
    let inside = &body[..close];
    let (p_txt, k_txt) = match inside.split_once('^') {
        Some((a, b)) => (a, Some(b)),
        None => (inside, None),
    };
    let n: u32 = p_txt.trim().parse().map_err(|_| bad(3, "expected a prime or prime power"))?;
    let (p, k) = match k_txt {
        Some(k) => {
            let k = k.trim().parse().map_err(|_| bad(4 + p_txt.len(), "expected an exponent"))?;
            (n, k)
        }
        None => prime_power(n).ok_or_else(|| bad(3, "field order must be a prime power"))?,
    };
    let rest = body[close + 1..].trim();
    if rest.is_empty() {
        return FieldSpec::new(p, k);
    }
    let modulus_txt = rest
        .strip_prefix(':')
        .ok_or_else(|| bad(4 + close, "expected ':' before the modulus"))?;
    let base = FieldSpec::prime(p)?;
    let env = Env { indeterminate: 't', allow_t: false, allow_y: false };
    let m = parse_with(&base, modulus_txt, env)?.0.swap_remove(0);
    let m = m.as_polynomial().ok_or_else(|| bad(0, "modulus must be a polynomial"))?;
    let field = FieldSpec::with_modulus(p, m.coeffs().to_vec())?;
    if field.degree() != k {
        return Err(Error::InvalidField(format!(
            "modulus has degree {} but the field was declared with k = {k}",
            field.degree()
        )));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        assert_eq!(parse_field("GF(5)").unwrap(), FieldSpec::prime(5).unwrap());
        let f4 = parse_field("GF(4):t^2+t+1").unwrap();
        assert_eq!(f4.order(), 4);
        assert_eq!(parse_field("GF(2^2):t^2+t+1").unwrap(), f4);
        assert!(parse_field("GF(6)").is_err());
        assert_eq!(parse_field("GF(2^2)").unwrap(), f4);
        assert!(parse_field("GF(2^2):t^2+1").is_err());
        assert!(parse_field("GF(2^3):t^2+t+1").is_err());
    }

    #[test]
    fn polynomial_forms() {
        let f5 = FieldSpec::prime(5).unwrap();
        let a = parse_polynomial(&f5, "3*x^2 + 2x - 1").unwrap();
        assert_eq!(a.coeffs(), &[4, 2, 3]);
        let b = parse_polynomial(&f5, "(x+1)(x-1)").unwrap();
        assert_eq!(b.coeffs(), &[4, 0, 1]);
        assert!(parse_polynomial(&f5, "1/x").is_err());
        let f4 = parse_field("GF(2^2)").unwrap();
        let c = parse_polynomial(&f4, "(t+1)*x^2+t").unwrap();
        assert_eq!(c.coeffs(), &[2, 0, 3]);
    }

    #[test]
    fn error_positions() {
        let f5 = FieldSpec::prime(5).unwrap();
        match parse_polynomial(&f5, "x^2 + $") {
            Err(Error::Parse(e)) => assert_eq!((e.line, e.column), (1, 7)),
            other => panic!("{other:?}"),
        }
        match parse_polynomial(&f5, "x^2 +\n (x") {
            Err(Error::Parse(e)) => assert_eq!(e.line, 2),
            other => panic!("{other:?}"),
        }
        match parse_polynomial(&f5, "t*x") {
            Err(Error::Parse(e)) => assert_eq!(e.column, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_forms() {
        let f5 = FieldSpec::prime(5).unwrap();
        let r = parse_rational(&f5, "(x^2+1)/x").unwrap();
        assert_eq!(r.to_string(), "(x^2+1)/x");
        let s = parse_rational(&f5, "x + 1/x").unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn equations() {
        let f2 = FieldSpec::prime(2).unwrap();
        let e = parse_equation(&f2, "y^2 + (x)y + (x) = 0").unwrap();
        assert_eq!(e.y_degree(), 2);
        assert_eq!(e.coeff(1).to_string(), "x");
        match parse_equation(&f2, "y^2 = x + $") {
            Err(Error::Parse(pe)) => assert_eq!(pe.column, 11),
            other => panic!("{other:?}"),
        }
    }
}
