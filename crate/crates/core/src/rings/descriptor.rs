use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::{format_univariate, parse_expr};
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Coefficient base of an Artin local ring: `Z/p^n` (`n = 1` gives `F_p`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    pub p: u64,
    pub n: u32,
}

/// Defining relations of an Artin local ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relations {
    /// Monic univariate modulus, ascending coefficients reduced mod `p^n`.
    Modulus(Vec<u64>),
    /// All monomials of total degree `≥ d` vanish.
    TruncationDegree(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    PrimeField { p: u64 },
    IntegersModPn { p: u64, n: u32 },
    Rationals,
    ArtinLocal {
        base: BaseRing,
        variables: Vec<String>,
        relations: Relations,
    },
}

impl RingDescriptor {
    /// Residue characteristic, `None` for the rationals.
    pub fn prime(&self) -> Option<u64> {
        match self {
            RingDescriptor::PrimeField { p } | RingDescriptor::IntegersModPn { p, .. } => Some(*p),
            RingDescriptor::ArtinLocal { base, .. } => Some(base.p),
            RingDescriptor::Rationals => None,
        }
    }

    /// Base ring of a finite descriptor (a finite ring with no variables for the modular kinds).
    pub fn base(&self) -> Option<BaseRing> {
        match self {
            RingDescriptor::PrimeField { p } => Some(BaseRing { p: *p, n: 1 }),
            RingDescriptor::IntegersModPn { p, n } => Some(BaseRing { p: *p, n: *n }),
            RingDescriptor::ArtinLocal { base, .. } => Some(*base),
            RingDescriptor::Rationals => None,
        }
    }

    /// Checks the invariants that do not require building the ring.
    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.base() {
            if !is_prime(b.p) {
                return Err(Error::NotPrime(b.p));
            }
            if b.n == 0 {
                return Err(Error::InvalidRing("exponent n must be at least 1".into()));
            }
        }
        if let RingDescriptor::ArtinLocal {
            base,
            variables,
            relations,
        } = self
        {
            if variables.is_empty() {
                return Err(Error::InvalidRing("Artin local ring needs a variable".into()));
            }
            match relations {
                Relations::TruncationDegree(0) => {
                    return Err(Error::InvalidRing("truncation degree must be at least 1".into()))
                }
                Relations::TruncationDegree(_) => {}
                Relations::Modulus(coeffs) => {
                    if variables.len() != 1 {
                        return Err(Error::InvalidRing(
                            "a modulus polynomial needs exactly one variable".into(),
                        ));
                    }
                    if coeffs.len() < 2 || coeffs.last() != Some(&1) {
                        return Err(Error::InvalidRing("modulus polynomial must be monic of degree ≥ 1".into()));
                    }
                    if coeffs[..coeffs.len() - 1].iter().any(|c| c % base.p != 0) {
                        return Err(Error::InvalidRing(format!(
                            "modulus must reduce to {}^{} mod {} so the ring is local with residue field F_{}",
                            variables[0],
                            coeffs.len() - 1,
                            base.p,
                            base.p
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn base_name(b: BaseRing) -> String {
    if b.n == 1 {
        format!("Fp({})", b.p)
    } else {
        format!("Zmod({},{})", b.p, b.n)
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::PrimeField { p } => write!(f, "Fp({p})"),
            RingDescriptor::IntegersModPn { p, n } => write!(f, "Zmod({p},{n})"),
            RingDescriptor::Rationals => write!(f, "Q"),
            RingDescriptor::ArtinLocal {
                base,
                variables,
                relations,
            } => {
                write!(f, "{}[{}]/", base_name(*base), variables.join(","))?;
                match relations {
                    Relations::Modulus(c) => {
                        let c: Vec<BigInt> = c.iter().map(|x| BigInt::from(*x)).collect();
                        write!(f, "({})", format_univariate(&c, &variables[0]))
                    }
                    Relations::TruncationDegree(d) => write!(f, "({})^{d}", variables.join(",")),
                }
            }
        }
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected an integer, got '{s}'")))
}

fn prime_power(q: u64) -> Result<BaseRing> {
    let p = (2..=q)
        .find(|d| q % d == 0)
        .ok_or_else(|| Error::Parse(format!("{q} is not a prime power")))?;
    let mut n = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        n += 1;
    }
    if r != 1 {
        return Err(Error::Parse(format!("{q} is not a prime power")));
    }
    Ok(BaseRing { p, n })
}

/// Splits `"Fp(5)[u]/(u^4)"` into the base text and the optional `[..]/..` tail.
fn split_base(s: &str) -> (&str, &str) {
    match s.find('[') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

fn parse_base(s: &str) -> Result<Option<BaseRing>> {
    let s = s.trim();
    if s == "Q" || s == "QQ" {
        return Ok(None);
    }
    let inner = |prefix: &str| -> Option<&str> { s.strip_prefix(prefix)?.strip_suffix(')') };
    if let Some(x) = inner("Fp(").or_else(|| inner("GF(")).or_else(|| inner("F(")) {
        return Ok(Some(BaseRing { p: parse_u64(x)?, n: 1 }));
    }
    if let Some(x) = inner("Zmod(") {
        let parts: Vec<&str> = x.split(',').collect();
        return match parts.as_slice() {
            [p, n] => Ok(Some(BaseRing {
                p: parse_u64(p)?,
                n: parse_u64(n)? as u32,
            })),
            [q] => prime_power(parse_u64(q)?).map(Some),
            _ => Err(Error::Parse(format!("bad Zmod arguments '{x}'"))),
        };
    }
    if let Some(x) = s.strip_prefix("Z/") {
        let x = x.trim_start_matches('(').trim_end_matches(')');
        if let Some((p, n)) = x.split_once('^') {
            return Ok(Some(BaseRing {
                p: parse_u64(p)?,
                n: parse_u64(n)? as u32,
            }));
        }
        return prime_power(parse_u64(x)?).map(Some);
    }
    if let Some(x) = s.strip_prefix("F_").or_else(|| s.strip_prefix('F')) {
        return Ok(Some(BaseRing { p: parse_u64(x)?, n: 1 }));
    }
    Err(Error::Parse(format!("unknown base ring '{s}'")))
}

/// Parses the ring grammar: `Fp(5)`, `F5`, `Z/125`, `Zmod(5,3)`, `Q`,
/// `Fp(5)[u]/(u^4)`, `Zmod(5,3)[X]/(X^2+5*X+5)`, `Fp(3)[x1,x2]/(x1,x2)^2`.
pub fn parse_ring(text: &str) -> Result<RingDescriptor> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (base_txt, tail) = split_base(&text);
    let base = parse_base(base_txt)?;
    let desc = if tail.is_empty() {
        match base {
            None => RingDescriptor::Rationals,
            Some(BaseRing { p, n: 1 }) => RingDescriptor::PrimeField { p },
            Some(BaseRing { p, n }) => RingDescriptor::IntegersModPn { p, n },
        }
    } else {
        let base = base.ok_or_else(|| Error::Parse("Artin rings over Q are not supported".into()))?;
        let close = tail
            .find(']')
            .ok_or_else(|| Error::Parse("missing ']'".into()))?;
        let variables: Vec<String> = tail[1..close].split(',').map(|v| v.to_string()).collect();
        if variables.iter().any(|v| v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_')) {
            return Err(Error::Parse(format!("bad variable list '{}'", &tail[1..close])));
        }
        let rel = tail[close + 1..]
            .strip_prefix('/')
            .ok_or_else(|| Error::Parse("expected '/' after the variable list".into()))?;
        let relations = parse_relations(rel, &variables, base)?;
        RingDescriptor::ArtinLocal {
            base,
            variables,
            relations,
        }
    };
    desc.validate()?;
    Ok(desc)
}

fn parse_relations(rel: &str, variables: &[String], base: BaseRing) -> Result<Relations> {
    // `(u,v)^d` : truncation by total degree
    if let Some(open) = rel.strip_prefix('(') {
        if let Some(close) = open.find(')') {
            let inside = &open[..close];
            let after = &open[close + 1..];
            let names: Vec<&str> = inside.split(',').collect();
            let all_vars = names.len() == variables.len()
                && names.iter().zip(variables).all(|(a, b)| *a == b.as_str());
            if let Some(d) = after.strip_prefix('^') {
                if all_vars && (variables.len() > 1 || !d.is_empty()) {
                    if variables.len() > 1 {
                        return Ok(Relations::TruncationDegree(parse_u64(d)? as u32));
                    }
                }
            }
            if variables.len() > 1 {
                return Err(Error::Parse(
                    "multivariate rings need the form (x1,...,xk)^d".into(),
                ));
            }
        }
    }
    if variables.len() != 1 {
        return Err(Error::Parse("multivariate rings need the form (x1,...,xk)^d".into()));
    }
    let poly = parse_expr(rel)?;
    let coeffs = poly.univariate_integer_coeffs(&variables[0])?;
    if coeffs.last().map(|c| c.is_one()) != Some(true) {
        return Err(Error::InvalidRing("modulus polynomial must be monic".into()));
    }
    let m = BigInt::from(base.p.pow(base.n));
    let reduced = coeffs
        .iter()
        .map(|c| {
            let r = ((c % &m) + &m) % &m;
            r.to_u64().unwrap()
        })
        .collect();
    Ok(Relations::Modulus(reduced))
}

impl FromStr for RingDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_ring(s)
    }
}

impl Serialize for RingDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_ring(&s).map_err(serde::de::Error::custom)
    }
}
