use super::{ArtinRing, Relations, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// A verified small extension `A′ → A` with principal kernel `(t)`, `t·𝓜_{A′} = 0`.
#[derive(Clone, Debug)]
pub struct SurjectionWitness {
    pub source: ArtinRing,
    pub target: ArtinRing,
    /// Kernel generator in `A′`.
    pub generator: Vec<u64>,
    /// Image in `A` of each basis element of `A′`.
    images: Vec<Vec<u64>>,
}

impl SurjectionWitness {
    /// The reduction map `A′ → A`.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let a = &self.target;
        let m = a.base().modulus();
        let mut acc = a.zero();
        for (c, img) in x.iter().zip(&self.images) {
            if c % m != 0 {
                acc = a.add(&acc, &a.scale(c % m, img));
            }
        }
        acc
    }

    /// Canonical set-theoretic lift `A → A′` (same monomials, same integer coefficients).
    pub fn lift(&self, y: &[u64]) -> Vec<u64> {
        let src = &self.source;
        let mut acc = src.zero();
        for (j, &c) in y.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let exps = &self.target.basis()[j];
            let mono = exps
                .iter()
                .zip(self.target.variables())
                .fold(src.one(), |acc, (&e, v)| {
                    let g = src.generator(v).expect("target variables are source variables");
                    src.mul(&acc, &src.pow(&g, e as u64))
                });
            acc = src.add(&acc, &src.scale(c, &mono));
        }
        acc
    }

    /// `c ∈ F_p` with `x = c·t`, when one exists.
    pub fn scalar_multiple_of(&self, x: &[u64]) -> Option<u64> {
        let src = &self.source;
        (0..src.base().p()).find(|&c| src.scale(c, &self.generator) == x)
    }
}

fn as_artin(d: &RingDescriptor) -> Result<ArtinRing> {
    ArtinRing::new(d)
}

/// Rank over `F_p` of vectors all of whose entries are multiples of `p^{n−1}`.
fn socle_rank(ring: &ArtinRing, vecs: &[Vec<u64>]) -> usize {
    let p = ring.base().p();
    let scale = ring.base().modulus() / p;
    let mut rows: Vec<Vec<u64>> = vecs
        .iter()
        .map(|v| v.iter().map(|x| x / scale % p).collect())
        .collect();
    crate::linalg::rank_mod_p(&mut rows, p)
}

/// Verifies that `A` is `A′` modulo a principal ideal `(t)` with `t·𝓜_{A′} = 0`.
pub fn small_extension(a_prime: &RingDescriptor, a: &RingDescriptor) -> Result<SurjectionWitness> {
    let src = as_artin(a_prime)?;
    let tgt = as_artin(a)?;
    let (bs, bt) = (src.base(), tgt.base());
    if bs.p() != bt.p() || bt.exponent() > bs.exponent() {
        return Err(Error::Precondition(format!(
            "{a} is not a quotient of {a_prime}: incompatible coefficient rings"
        )));
    }
    if let Some(v) = tgt.variables().iter().find(|v| !src.variables().contains(v)) {
        return Err(Error::Precondition(format!(
            "{a} is not a quotient of {a_prime}: variable {v} has no preimage"
        )));
    }
    // images of the source generators: same-named variable, or 0
    let gen_images: Vec<Vec<u64>> = src
        .variables()
        .iter()
        .map(|v| tgt.generator(v).unwrap_or_else(|| tgt.zero()))
        .collect();
    let eval_in_target = |exps: &[u32]| -> Vec<u64> {
        exps.iter()
            .zip(&gen_images)
            .fold(tgt.one(), |acc, (&e, g)| tgt.mul(&acc, &tgt.pow(g, e as u64)))
    };
    let images: Vec<Vec<u64>> = src.basis().iter().map(|e| eval_in_target(e)).collect();

    // the relations of A′ must die in A
    let relations_vanish = match a_prime {
        RingDescriptor::ArtinLocal {
            relations: Relations::Modulus(f),
            ..
        } => {
            let m = bt.modulus();
            let val = f.iter().enumerate().fold(tgt.zero(), |acc, (e, c)| {
                tgt.add(&acc, &tgt.scale(c % m, &eval_in_target(&[e as u32])))
            });
            tgt.is_zero(&val)
        }
        RingDescriptor::ArtinLocal {
            variables,
            relations: Relations::TruncationDegree(d),
            ..
        } => monomials_of_degree(variables.len(), *d)
            .iter()
            .all(|e| tgt.is_zero(&eval_in_target(e))),
        _ => true,
    };
    if !relations_vanish {
        return Err(Error::Precondition(format!(
            "the relations of {a_prime} do not vanish in {a}"
        )));
    }

    // generators of the kernel ideal
    let mut gens: Vec<Vec<u64>> = Vec::new();
    if bt.exponent() < bs.exponent() {
        gens.push(src.from_i64(bt.modulus() as i64));
    }
    for v in src.variables() {
        if tgt.generator(v).is_none() {
            gens.push(src.generator(v).unwrap());
        }
    }
    let lift_var = |v: &String| src.generator(v).unwrap();
    match a {
        RingDescriptor::ArtinLocal {
            variables,
            relations: Relations::Modulus(f),
            ..
        } => {
            let u = lift_var(&variables[0]);
            let val = f.iter().enumerate().fold(src.zero(), |acc, (e, c)| {
                src.add(&acc, &src.scale(*c, &src.pow(&u, e as u64)))
            });
            gens.push(val);
        }
        RingDescriptor::ArtinLocal {
            variables,
            relations: Relations::TruncationDegree(d),
            ..
        } => {
            let lifted: Vec<Vec<u64>> = variables.iter().map(lift_var).collect();
            for e in monomials_of_degree(variables.len(), *d) {
                gens.push(
                    e.iter()
                        .zip(&lifted)
                        .fold(src.one(), |acc, (&k, g)| src.mul(&acc, &src.pow(g, k as u64))),
                );
            }
        }
        _ => {}
    }
    gens.retain(|g| !src.is_zero(g));
    if gens.is_empty() {
        return Err(Error::Precondition(format!("{a_prime} → {a} has zero kernel")));
    }

    // 𝓜_{A′}-annihilation, checked on every basis monomial of 𝓜 and on p
    let p_elem = src.from_i64(bs.p() as i64);
    let max_ideal_basis: Vec<Vec<u64>> = (1..src.dim())
        .map(|i| src.basis_element(i))
        .chain(std::iter::once(p_elem))
        .collect();
    for g in &gens {
        for x in &max_ideal_basis {
            if !src.is_zero(&src.mul(g, x)) {
                return Err(Error::Precondition(format!(
                    "not a small extension: t·𝓜 ≠ 0 ({} · {} = {})",
                    src.format(g),
                    src.format(x),
                    src.format(&src.mul(g, x))
                )));
            }
        }
    }
    // killed by 𝓜, so the kernel is the F_p-span of the generators
    let rank = socle_rank(&src, &gens);
    if rank != 1 {
        return Err(Error::Precondition(format!(
            "kernel of {a_prime} → {a} is not principal (F_p-dimension {rank})"
        )));
    }
    if src.length() != tgt.length() + 1 {
        return Err(Error::Verification(format!(
            "length({a_prime}) = {} but length({a}) + 1 = {}",
            src.length(),
            tgt.length() + 1
        )));
    }
    Ok(SurjectionWitness {
        generator: gens[0].clone(),
        source: src,
        target: tgt,
        images,
    })
}

fn monomials_of_degree(k: usize, d: u32) -> Vec<Vec<u32>> {
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
    fill(k, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::parse_ring;

    fn ext(a: &str, b: &str) -> Result<SurjectionWitness> {
        small_extension(&parse_ring(a).unwrap(), &parse_ring(b).unwrap())
    }

    #[test]
    fn truncations_are_small() {
        let w = ext("Fp(5)[u]/(u^5)", "Fp(5)[u]/(u^4)").unwrap();
        assert_eq!(w.source.format(&w.generator), "u^4");
        let u = w.source.generator("u").unwrap();
        assert!(w.source.is_zero(&w.source.mul(&u, &w.generator)));
        let x = w.source.parse_element("1+2*u+3*u^4").unwrap();
        assert_eq!(w.target.format(&w.apply(&x)), "1+2*u");
        assert_eq!(w.scalar_multiple_of(&w.source.parse_element("3*u^4").unwrap()), Some(3));
        assert_eq!(w.scalar_multiple_of(&u), None);
    }

    #[test]
    fn dual_numbers_onto_residue_field() {
        let w = ext("Fp(3)[eps]/(eps^2)", "Fp(3)").unwrap();
        assert_eq!(w.source.format(&w.generator), "eps");
        let w = ext("Z/9", "F3").unwrap();
        assert_eq!(w.source.format(&w.generator), "3");
    }

    #[test]
    fn rejects_non_small() {
        let err = ext("Fp(5)[u]/(u^3)", "Fp(5)[u]/(u)").unwrap_err();
        assert!(err.to_string().contains("t·𝓜 ≠ 0"), "{err}");
        let err = ext("Fp(3)[x,y]/(x,y)^2", "Fp(3)").unwrap_err();
        assert!(err.to_string().contains("not principal"), "{err}");
    }

    #[test]
    fn lift_then_reduce_is_identity() {
        let w = ext("Fp(3)[x1,x2]/(x1,x2)^3", "Fp(3)[x1,x2]/(x1,x2)^2").unwrap_err();
        // (x1,x2)^2 / (x1,x2)^3 has dimension 3
        assert!(w.to_string().contains("not principal"));
        let w = ext("Zmod(5,2)[u]/(u^2)", "Fp(5)[u]/(u^2)");
        assert!(w.is_err());
        let w = ext("Fp(7)[u]/(u^3)", "Fp(7)[u]/(u^2)").unwrap();
        let y = w.target.parse_element("3+5*u").unwrap();
        assert_eq!(w.apply(&w.lift(&y)), y);
    }
}
