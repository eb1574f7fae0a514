use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{Relations, Ring, RingDescriptor, Zmod};
use crate::arith::inv_mod;
use crate::error::{Error, Result};

/// Finite-length local ring `Z/p^n[x_1..x_k]/I`, with `I` a monic univariate
/// modulus `f ≡ u^d (mod p)` or all monomials of total degree `≥ d`.
///
/// Elements are coefficient vectors over the graded-lex monomial basis.
/// Descriptors without variables (`F_p`, `Z/p^n`) are accepted too and give
/// the one-element basis `{1}`.
#[derive(Clone, Debug)]
pub struct ArtinRing {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    base: Zmod,
    descriptor: RingDescriptor,
    variables: Vec<String>,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// `table[i * B + j]` is the product of basis elements `i` and `j`.
    table: Vec<Vec<(usize, u64)>>,
    /// Reduced images of the generators.
    generators: Vec<Vec<u64>>,
}

impl PartialEq for ArtinRing {
    fn eq(&self, other: &Self) -> bool {
        self.inner.descriptor == other.inner.descriptor
    }
}

impl Eq for ArtinRing {}

fn graded_lex_basis(k: usize, d: u32) -> Vec<Vec<u32>> {
    fn fill(k: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == k {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=total).rev() {
            prefix.push(e);
            fill(k, total - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..d {
        fill(k, total, &mut Vec::new(), &mut out);
    }
    out
}

impl ArtinRing {
    pub fn new(descriptor: &RingDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let base_desc = descriptor
            .base()
            .ok_or_else(|| Error::InvalidRing("Artin rings need a finite base".into()))?;
        let base = Zmod::new(base_desc.p, base_desc.n)?;
        let (variables, basis, table, generators) = match descriptor {
            RingDescriptor::ArtinLocal {
                variables,
                relations: Relations::TruncationDegree(d),
                ..
            } => {
                let basis = graded_lex_basis(variables.len(), *d);
                let index: HashMap<_, _> =
                    basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
                let b = basis.len();
                let mut table = vec![Vec::new(); b * b];
                for i in 0..b {
                    for j in 0..b {
                        let prod: Vec<u32> =
                            basis[i].iter().zip(&basis[j]).map(|(x, y)| x + y).collect();
                        if let Some(&k) = index.get(&prod) {
                            table[i * b + j] = vec![(k, 1)];
                        }
                    }
                }
                let generators = (0..variables.len())
                    .map(|v| {
                        let mut e = vec![0; variables.len()];
                        e[v] = 1;
                        let mut x = vec![0; b];
                        if let Some(&k) = index.get(&e) {
                            x[k] = 1;
                        }
                        x
                    })
                    .collect();
                (variables.clone(), basis, table, generators)
            }
            RingDescriptor::ArtinLocal {
                variables,
                relations: Relations::Modulus(f),
                ..
            } => {
                let d = f.len() - 1;
                // powers u^e reduced mod f, for e ≤ max(1, 2d − 2)
                let top = (2 * d).saturating_sub(2).max(1);
                let mut powers: Vec<Vec<u64>> = Vec::with_capacity(top + 1);
                let mut cur = vec![0u64; d];
                cur[0] = base.one();
                powers.push(cur.clone());
                for _ in 1..=top {
                    // multiply by u, then replace u^d by −(f_0 + … + f_{d−1} u^{d−1})
                    let carry = cur[d - 1];
                    let mut next = vec![0u64; d];
                    next[1..d].copy_from_slice(&cur[..(d - 1)]);
                    for (slot, fc) in next.iter_mut().zip(f) {
                        *slot = base.sub(slot, &base.mul(&carry, fc));
                    }
                    cur = next;
                    powers.push(cur.clone());
                }
                let sparse = |v: &Vec<u64>| -> Vec<(usize, u64)> {
                    v.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i, *c)).collect()
                };
                let mut table = vec![Vec::new(); d * d];
                for i in 0..d {
                    for j in 0..d {
                        table[i * d + j] = sparse(&powers[i + j]);
                    }
                }
                let basis = (0..d as u32).map(|e| vec![e]).collect();
                (variables.clone(), basis, table, vec![powers[1].clone()])
            }
            _ => (Vec::new(), vec![Vec::new()], vec![vec![(0, 1)]], Vec::new()),
        };
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(ArtinRing {
            inner: Arc::new(Inner {
                base,
                descriptor: descriptor.clone(),
                variables,
                basis,
                index,
                table,
                generators,
            }),
        })
    }

    pub fn base(&self) -> &Zmod {
        &self.inner.base
    }

    pub fn variables(&self) -> &[String] {
        &self.inner.variables
    }

    /// Exponent vectors of the monomial basis, graded-lex order.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.inner.basis
    }

    pub fn dim(&self) -> usize {
        self.inner.basis.len()
    }

    /// Length as a module over itself: `n · #basis`.
    pub fn length(&self) -> usize {
        self.inner.base.exponent() as usize * self.dim()
    }

    pub fn monomial_index(&self, exps: &[u32]) -> Option<usize> {
        self.inner.index.get(exps).copied()
    }

    pub fn basis_element(&self, i: usize) -> Vec<u64> {
        let mut x = vec![0; self.dim()];
        x[i] = self.base().one();
        x
    }

    /// Product of generator powers; works for monomials outside the basis.
    pub fn monomial(&self, exps: &[u32]) -> Vec<u64> {
        exps.iter()
            .zip(&self.inner.generators)
            .fold(self.one(), |acc, (&e, g)| self.mul(&acc, &self.pow(g, e as u64)))
    }

    pub fn from_base(&self, c: u64) -> Vec<u64> {
        let mut x = vec![0; self.dim()];
        x[0] = c % self.base().modulus();
        x
    }

    pub fn scale(&self, c: u64, x: &[u64]) -> Vec<u64> {
        let b = self.base();
        x.iter().map(|v| b.mul(&c, v)).collect()
    }

    /// Coefficient of basis monomial `i`.
    pub fn coordinate(&self, x: &[u64], i: usize) -> u64 {
        x[i]
    }

    fn monomial_name(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .zip(&self.inner.variables)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        parts.join("*")
    }
}

impl Ring for ArtinRing {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    fn one(&self) -> Vec<u64> {
        self.from_base(1)
    }

    fn from_bigint(&self, n: &BigInt) -> Vec<u64> {
        self.from_base(self.base().from_bigint(n))
    }

    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.from_base(self.base().reduce_i64(n))
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let z = self.base();
        a.iter().zip(b).map(|(x, y)| z.add(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        let z = self.base();
        a.iter().map(|x| z.neg(x)).collect()
    }

    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let z = self.base();
        a.iter().zip(b).map(|(x, y)| z.sub(x, y)).collect()
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let d = self.dim();
        let m = self.base().modulus();
        if d == 1 {
            return vec![a[0] * b[0] % m];
        }
        let mut acc = vec![0u64; d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let xy = x * y % m;
                for &(k, c) in &self.inner.table[i * d + j] {
                    acc[k] = (acc[k] + xy * c) % m;
                }
            }
        }
        acc
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|x| *x == 0)
    }

    fn is_unit(&self, a: &Vec<u64>) -> bool {
        a[0] % self.base().p() != 0
    }

    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if !self.is_unit(a) {
            return None;
        }
        let c = inv_mod(a[0], self.base().modulus())?;
        let mut y = self.from_base(c);
        let two = self.from_i64(2);
        // y ← y(2 − a·y); 1 − a·y is nilpotent, so the error squares each step
        for _ in 0..64 {
            let ay = self.mul(a, &y);
            if ay == self.one() {
                return Some(y);
            }
            y = self.mul(&y, &self.sub(&two, &ay));
        }
        None
    }

    fn residue_characteristic(&self) -> Option<u64> {
        Some(self.base().p())
    }

    fn nilpotency_bound(&self) -> usize {
        self.length()
    }

    fn residue_root(&self, a: &Vec<u64>, m: u64) -> Option<Vec<u64>> {
        let p = self.base().p();
        let r = self.base().residue_root(&(a[0] % p), m)?;
        Some(self.from_base(r))
    }

    fn generator(&self, name: &str) -> Option<Vec<u64>> {
        let i = self.inner.variables.iter().position(|v| v == name)?;
        Some(self.inner.generators[i].clone())
    }

    fn format(&self, a: &Vec<u64>) -> String {
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, &c)| {
                let mono = self.monomial_name(&self.inner.basis[i]);
                match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    (_, false) => format!("{c}*{mono}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    fn descriptor(&self) -> RingDescriptor {
        self.inner.descriptor.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::parse_ring;
    use proptest::prelude::*;

    fn ring(s: &str) -> ArtinRing {
        ArtinRing::new(&parse_ring(s).unwrap()).unwrap()
    }

    #[test]
    fn truncated_univariate() {
        let r = ring("Fp(5)[u]/(u^4)");
        assert_eq!(r.length(), 4);
        let u = r.generator("u").unwrap();
        assert!(r.is_zero(&r.mul(&r.pow(&u, 3), &u)));
        assert!(!r.is_zero(&r.pow(&u, 3)));
        assert_eq!(r.nilpotency_index(&u), Some(4));
        let one_u = r.add(&r.one(), &u);
        assert!(r.is_unit(&one_u));
        assert_eq!(r.nilpotency_index(&one_u), None);
        assert_eq!(r.format(&one_u), "1+u");
        let inv = r.inv(&one_u).unwrap();
        assert_eq!(r.format(&inv), "1+4*u+u^2+4*u^3");
    }

    #[test]
    fn eisenstein_modulus() {
        let r = ring("Zmod(5,3)[X]/(X^2+5*X+5)");
        assert_eq!(r.length(), 6);
        let x = r.generator("X").unwrap();
        // X^2 = −5X − 5
        assert_eq!(r.mul(&x, &x), vec![120, 120]);
        assert!(r.is_nilpotent(&x));
        assert!(r.is_nilpotency_consistent());
    }

    #[test]
    fn multivariate_truncation() {
        let r = ring("Fp(3)[x1,x2]/(x1,x2)^3");
        assert_eq!(r.basis(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        let x1 = r.generator("x1").unwrap();
        let x2 = r.generator("x2").unwrap();
        let p = r.mul(&x1, &x2);
        assert_eq!(r.format(&p), "x1*x2");
        assert!(r.is_zero(&r.mul(&p, &x1)));
    }

    #[test]
    fn rejects_nonlocal_modulus() {
        assert!(ArtinRing::new(&RingDescriptor::ArtinLocal {
            base: crate::rings::BaseRing { p: 5, n: 1 },
            variables: vec!["u".into()],
            relations: Relations::Modulus(vec![1, 0, 1]),
        })
        .is_err());
    }

    impl ArtinRing {
        fn is_nilpotency_consistent(&self) -> bool {
            (0..self.dim()).skip(1).all(|i| {
                let b = self.basis_element(i);
                self.nilpotency_index(&b).is_some_and(|e| e <= self.length())
            })
        }
    }

    fn elem(r: &ArtinRing) -> impl Strategy<Value = Vec<u64>> {
        let m = r.base().modulus();
        prop::collection::vec(0..m, r.dim())
    }

    proptest! {
        #[test]
        fn ring_axioms(seed in 0usize..4, xs in prop::collection::vec(prop::collection::vec(0u64..1_000_000, 6), 3)) {
            let r = [
                ring("Fp(5)[u]/(u^4)"),
                ring("Zmod(3,2)[X]/(X^2+3*X+3)"),
                ring("Fp(3)[x1,x2]/(x1,x2)^2"),
                ring("Zmod(7,2)[X]/(X^3+7*X^2+14*X+7)"),
            ][seed].clone();
            let m = r.base().modulus();
            let take = |v: &Vec<u64>| v.iter().take(r.dim()).map(|x| x % m).collect::<Vec<_>>();
            let (a, b, c) = (take(&xs[0]), take(&xs[1]), take(&xs[2]));
            prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
            prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            if r.is_unit(&a) {
                prop_assert_eq!(r.mul(&a, &r.inv(&a).unwrap()), r.one());
            } else {
                let e = r.nilpotency_index(&a);
                prop_assert!(e.is_some_and(|e| e <= r.length()));
            }
        }

        #[test]
        fn units_have_inverses(a in elem(&ring("Fp(5)[eps]/(eps^2)"))) {
            let r = ring("Fp(5)[eps]/(eps^2)");
            prop_assert_eq!(r.inv(&a).is_some(), a[0] != 0);
        }
    }
}
