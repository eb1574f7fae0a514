use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Ring, RingDescriptor};

/// The field `Q`, exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalField;

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// `v_p(q)`; `None` for `q = 0`.
pub fn p_valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

fn exact_root(n: &BigInt, m: u64) -> Option<BigInt> {
    if n.is_negative() && m % 2 == 0 {
        return None;
    }
    let r = n.abs().nth_root(m as u32);
    let r = if n.is_negative() { -r } else { r };
    (num_traits::pow(r.clone(), m as usize) == *n).then_some(r)
}

impl Ring for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn is_unit(&self, a: &BigRational) -> bool {
        !a.is_zero()
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn residue_characteristic(&self) -> Option<u64> {
        None
    }

    fn nilpotency_bound(&self) -> usize {
        1
    }

    fn residue_root(&self, a: &BigRational, m: u64) -> Option<BigRational> {
        if m == 0 {
            return None;
        }
        let n = exact_root(a.numer(), m)?;
        let d = exact_root(a.denom(), m)?;
        Some(BigRational::new(n, d))
    }

    fn generator(&self, _name: &str) -> Option<BigRational> {
        None
    }

    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Rationals
    }
}
