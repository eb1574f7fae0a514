//! Exact coefficient rings: `F_p`, `Z/p^n`, Artin local rings over them, and
//! the rationals.
//!
//! Elements are plain values; every operation goes through the ring handle,
//! which is cheap to clone and safe to share across threads.

mod artin;
mod descriptor;
pub mod expr;
mod rational;
mod small_ext;
mod zmod;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use artin::ArtinRing;
pub use descriptor::{parse_ring, BaseRing, Relations, RingDescriptor};
pub use rational::{p_valuation, RationalField};
pub use small_ext::{small_extension, SurjectionWitness};
pub use zmod::Zmod;

use crate::error::{Error, Result};
use expr::LaurentExpr;

/// A commutative ring with exact, canonical element representations.
pub trait Ring: Clone + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// True iff the residue of `a` in the residue field is nonzero.
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Residue characteristic `p`; `None` for the rationals.
    fn residue_characteristic(&self) -> Option<u64>;
    /// Upper bound on the nilpotency index of any nilpotent element.
    fn nilpotency_bound(&self) -> usize;
    /// Some `r` with `r^m − a` nilpotent, chosen canonically (smallest residue).
    fn residue_root(&self, a: &Self::Elem, m: u64) -> Option<Self::Elem>;
    /// Named generator of the ring (`u` in `F_p[u]/(u^4)`).
    fn generator(&self, name: &str) -> Option<Self::Elem>;
    fn format(&self, a: &Self::Elem) -> String;
    fn descriptor(&self) -> RingDescriptor;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Maps `num/den` into the ring; fails when `den` is not a unit.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        let inv = self
            .inv(&den)
            .ok_or_else(|| Error::NotAUnit(format!("denominator {}", q.denom())))?;
        Ok(self.mul(&num, &inv))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let inv = self.inv(b).ok_or_else(|| Error::NotAUnit(self.format(b)))?;
        Ok(self.mul(a, &inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn is_nilpotent(&self, a: &Self::Elem) -> bool {
        self.nilpotency_index(a).is_some()
    }

    /// Least `e ≥ 1` with `a^e = 0`, or `None` when `a` is not nilpotent.
    fn nilpotency_index(&self, a: &Self::Elem) -> Option<usize> {
        if self.is_unit(a) {
            return None;
        }
        let mut acc = a.clone();
        for e in 1..=self.nilpotency_bound() {
            if self.is_zero(&acc) {
                return Some(e);
            }
            acc = self.mul(&acc, a);
        }
        None
    }

    /// Evaluates a parsed literal; ring variables may carry negative exponents
    /// only when they are units.
    fn element_from_expr(&self, e: &LaurentExpr) -> Result<Self::Elem> {
        let mut acc = self.zero();
        for (mono, c) in &e.terms {
            let mut term = self.from_rational(c)?;
            for (var, &exp) in mono {
                let g = self
                    .generator(var)
                    .ok_or_else(|| Error::Parse(format!("unknown ring variable '{var}'")))?;
                let g = if exp < 0 {
                    self.inv(&g).ok_or_else(|| Error::NotAUnit(var.clone()))?
                } else {
                    g
                };
                term = self.mul(&term, &self.pow(&g, exp.unsigned_abs()));
            }
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }

    fn parse_element(&self, text: &str) -> Result<Self::Elem> {
        self.element_from_expr(&expr::parse_expr(text)?)
    }

    /// `m`-th root of a unit `a`, lifted from the residue root by Newton's method.
    fn nth_root_unit(&self, a: &Self::Elem, m: u64) -> Result<Self::Elem> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(self.format(a)));
        }
        let m_elem = self.from_i64(m as i64);
        let m_inv = self
            .inv(&m_elem)
            .ok_or_else(|| Error::Precondition(format!("{m} is not invertible in the ring")))?;
        let mut r = self
            .residue_root(a, m)
            .ok_or_else(|| Error::Precondition(format!("{} has no {m}-th root", self.format(a))))?;
        for _ in 0..=(2 * self.nilpotency_bound() + 64) {
            let rm1 = self.pow(&r, m - 1);
            let err = self.sub(&self.mul(&rm1, &r), a);
            if self.is_zero(&err) {
                return Ok(r);
            }
            let denom_inv = self
                .inv(&rm1)
                .ok_or_else(|| Error::NotAUnit(self.format(&rm1)))?;
            let step = self.mul(&self.mul(&err, &denom_inv), &m_inv);
            r = self.sub(&r, &step);
        }
        Err(Error::Verification(format!(
            "{m}-th root iteration did not converge for {}",
            self.format(a)
        )))
    }
}

/// Runtime-selected ring, produced by [`mk_ring`].
#[derive(Clone, Debug)]
pub enum AnyRing {
    Zmod(Zmod),
    Artin(ArtinRing),
    Rationals(RationalField),
}

/// Builds a ring from its descriptor, validating the descriptor invariants.
pub fn mk_ring(descriptor: &RingDescriptor) -> Result<AnyRing> {
    match descriptor {
        RingDescriptor::PrimeField { p } => Ok(AnyRing::Zmod(Zmod::new(*p, 1)?)),
        RingDescriptor::IntegersModPn { p, n } => Ok(AnyRing::Zmod(Zmod::new(*p, *n)?)),
        RingDescriptor::Rationals => Ok(AnyRing::Rationals(RationalField)),
        RingDescriptor::ArtinLocal { .. } => Ok(AnyRing::Artin(ArtinRing::new(descriptor)?)),
    }
}

/// Number of elements is `p^length`; `None` for the rationals.
pub fn ring_length(ring: &AnyRing) -> Option<usize> {
    match ring {
        AnyRing::Zmod(z) => Some(z.exponent() as usize),
        AnyRing::Artin(a) => Some(a.length()),
        AnyRing::Rationals(_) => None,
    }
}
