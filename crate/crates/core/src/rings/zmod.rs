use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Ring, RingDescriptor};
use crate::arith::{inv_mod, is_prime};
use crate::error::{Error, Result};

/// `Z/p^n`; with `n = 1` this is the prime field `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Zmod {
    p: u64,
    n: u32,
    modulus: u64,
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidRing("exponent n must be at least 1".into()));
        }
        let modulus = p
            .checked_pow(n)
            .filter(|m| *m < (1 << 31))
            .ok_or_else(|| Error::InvalidRing(format!("{p}^{n} is too large")))?;
        Ok(Zmod { p, n, modulus })
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_field(&self) -> bool {
        self.n == 1
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    /// Representative in `(−p^n/2, p^n/2]`, used for display of small negatives.
    pub fn signed(&self, x: u64) -> i64 {
        if x > self.modulus / 2 {
            x as i64 - self.modulus as i64
        } else {
            x as i64
        }
    }
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

impl Ring for Zmod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.modulus)).to_u64().unwrap()
    }

    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.modulus
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn is_unit(&self, a: &u64) -> bool {
        a % self.p != 0
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.modulus)
    }

    fn residue_characteristic(&self) -> Option<u64> {
        Some(self.p)
    }

    fn nilpotency_bound(&self) -> usize {
        self.n as usize
    }

    fn residue_root(&self, a: &u64, m: u64) -> Option<u64> {
        let target = a % self.p;
        (0..self.p).find(|&r| pow_mod(r, m, self.p) == target)
    }

    fn generator(&self, _name: &str) -> Option<u64> {
        None
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }

    fn descriptor(&self) -> RingDescriptor {
        if self.n == 1 {
            RingDescriptor::PrimeField { p: self.p }
        } else {
            RingDescriptor::IntegersModPn { p: self.p, n: self.n }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Zmod::prime_field(5).unwrap();
        assert_eq!(f5.add(&2, &4), 1);
        assert_eq!(f5.inv(&2), Some(3));
        assert!(Zmod::new(4, 1).is_err());
        assert!(Zmod::new(5, 0).is_err());
    }

    #[test]
    fn five_is_nilpotent_of_index_three_in_z125() {
        let z = Zmod::new(5, 3).unwrap();
        assert_eq!(z.nilpotency_index(&5), Some(3));
        assert_eq!(z.nilpotency_index(&25), Some(2));
        assert_eq!(z.nilpotency_index(&7), None);
        assert!(z.is_unit(&7) && !z.is_unit(&10));
    }

    #[test]
    fn residue_roots() {
        let f7 = Zmod::prime_field(7).unwrap();
        let r = f7.residue_root(&2, 2).unwrap();
        assert_eq!(r * r % 7, 2);
        assert_eq!(f7.residue_root(&3, 2), None);
        let z = Zmod::new(5, 3).unwrap();
        let r = z.nth_root_unit(&6, 2).unwrap();
        assert_eq!(z.mul(&r, &r), 6);
    }
}
