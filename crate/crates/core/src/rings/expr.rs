//! Parser for the sparse polynomial literals used in ring descriptors, ring
//! elements and series literals, e.g. `u^2+5*u+5` or `1*T^-3 + 2*T^-1`.
//!
//! Expressions evaluate to multivariate Laurent polynomials with rational
//! coefficients; callers then map them into a concrete ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector keyed by variable name; zero exponents are never stored.
pub type Monomial = BTreeMap<String, i64>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentExpr {
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentExpr {
    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        LaurentExpr { terms }
    }

    pub fn var(name: &str) -> Self {
        let mut mono = Monomial::new();
        mono.insert(name.to_string(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(mono, BigRational::one());
        LaurentExpr { terms }
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        LaurentExpr { terms }
    }

    fn neg(&self) -> Self {
        LaurentExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentExpr::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    let x = m.entry(v.clone()).or_insert(0);
                    *x += e;
                    if *x == 0 {
                        m.remove(v);
                    }
                }
                out = out.add(&LaurentExpr {
                    terms: BTreeMap::from([(m, ca * cb)]),
                });
            }
        }
        out
    }

    fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            // only monomials can be inverted
            if self.terms.len() != 1 {
                return Err(Error::Parse("negative power of a non-monomial".into()));
            }
            let (m, c) = self.terms.iter().next().unwrap();
            let m: Monomial = m.iter().map(|(v, x)| (v.clone(), x * e)).collect();
            let c = c.recip().pow(-e as i32);
            return Ok(LaurentExpr {
                terms: BTreeMap::from([(m, c)]),
            });
        }
        let mut acc = LaurentExpr::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Variables that occur with a nonzero exponent.
    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self.terms.keys().flat_map(|m| m.keys().cloned()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Splits off one variable: returns `exp ↦ coefficient expression`.
    pub fn collect_by(&self, var: &str) -> BTreeMap<i64, LaurentExpr> {
        let mut out: BTreeMap<i64, LaurentExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.remove(var).unwrap_or(0);
            let entry = out.entry(e).or_default();
            *entry = entry.add(&LaurentExpr {
                terms: BTreeMap::from([(rest, c.clone())]),
            });
        }
        out
    }

    /// Dense integer coefficient list of a univariate polynomial in `var`.
    pub fn univariate_integer_coeffs(&self, var: &str) -> Result<Vec<BigInt>> {
        let vars = self.variables();
        if vars.iter().any(|v| v != var) {
            return Err(Error::Parse(format!("expected a polynomial in {var} only")));
        }
        let mut out: Vec<BigInt> = Vec::new();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            if e < 0 {
                return Err(Error::Parse("negative exponent in polynomial".into()));
            }
            if !c.is_integer() {
                return Err(Error::Parse("non-integer coefficient in polynomial".into()));
            }
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, BigInt::zero());
            }
            out[e] = c.to_integer();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Sym('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentExpr> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentExpr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Sym('('))) {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let paren = !neg && self.eat('(');
        let neg = neg || (paren && self.eat('-'));
        let v = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                i64::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?
            }
            _ => return Err(Error::Parse("expected integer exponent".into())),
        };
        if paren && !self.eat(')') {
            return Err(Error::Parse("expected ')'".into()));
        }
        Ok(if neg { -v } else { v })
    }

    fn factor(&mut self) -> Result<LaurentExpr> {
        let base = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            LaurentExpr::constant(BigRational::new(n, d))
                        }
                        _ => return Err(Error::Parse("expected nonzero denominator".into())),
                    }
                } else {
                    LaurentExpr::constant(BigRational::from_integer(n))
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                LaurentExpr::var(&name)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                e
            }
            other => return Err(Error::Parse(format!("unexpected token {other:?}"))),
        };
        if self.eat('^') {
            let e = self.signed_int()?;
            base.pow(e)
        } else {
            Ok(base)
        }
    }
}

pub fn parse_expr(text: &str) -> Result<LaurentExpr> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser { toks, pos: 0 };
    let e = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input after position {} in '{text}'",
            parser.pos
        )));
    }
    Ok(e)
}

/// Renders `Σ c_i x^i` (ascending coefficients) as e.g. `x^2+5*x+5`.
pub fn format_univariate(coeffs: &[BigInt], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        let mag = c.abs();
        let body = if mono.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{mag}*{mono}")
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if c.is_negative() { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{sign}{body}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.concat()
    }
}
