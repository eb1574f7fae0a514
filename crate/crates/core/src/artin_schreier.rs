//! Artin–Schreier classes over `F_p((t))`: polar parts, Harbater dimensions,
//! Riemann–Hurwitz genera, and the deformed covers `ξ^p − ξ a(t)^{p−1} = t^l`
//! with their tangent directions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{conductor_split, is_prime};
use crate::automorphisms::SeriesAutomorphism;
use crate::cohomology::{class_rank, PrecisionPolicy, ThetaElement};
use crate::error::{Error, Result};
use crate::rings::{expr, parse_ring, ArtinRing, Ring, Zmod};
use crate::series::Series;

/// Element of `F_p((t))` modulo `F_p[[t]]`, stored as `j ↦ coefficient of t^{−j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsClass {
    pub p: u64,
    pub tail: BTreeMap<u64, u64>,
}

impl AsClass {
    pub fn new(p: u64, terms: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut tail = BTreeMap::new();
        for (j, c) in terms {
            if j == 0 {
                continue;
            }
            let e = tail.entry(j).or_insert(0);
            *e = (*e + c % p) % p;
        }
        tail.retain(|_, c| *c != 0);
        Ok(AsClass { p, tail })
    }

    /// Parses a finite Laurent sum in one variable, e.g. `1*T^-9 + 1*T^-3`;
    /// terms of nonnegative degree are integral and dropped.
    pub fn parse(p: u64, text: &str) -> Result<Self> {
        let k = Zmod::prime_field(p)?;
        let e = expr::parse_expr(text)?;
        let vars = e.variables();
        if vars.len() > 1 {
            return Err(Error::Parse(format!("expected one variable, found {vars:?}")));
        }
        let mut terms = Vec::new();
        if let Some(v) = vars.first() {
            for (exp, coeff) in e.collect_by(v) {
                let c = k.element_from_expr(&coeff)?;
                if exp < 0 {
                    terms.push((exp.unsigned_abs(), c));
                }
            }
        }
        Self::new(p, terms)
    }

    /// `𝔭(β t^{−l}) = β^p t^{−pl} − β t^{−l}`.
    pub fn wp_monomial(p: u64, beta: u64, l: u64) -> Self {
        let k = Zmod::prime_field(p).expect("p is prime");
        let bp = k.pow(&beta, p);
        AsClass::new(p, [(p * l, bp), (l, k.neg(&beta))]).expect("p is prime")
    }

    pub fn add(&self, other: &Self) -> Self {
        AsClass::new(self.p, self.tail.iter().chain(&other.tail).map(|(j, c)| (*j, *c)))
            .expect("p is prime")
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        AsClass::new(p, self.tail.iter().map(|(j, c)| (*j, (p - c) % p))).expect("p is prime")
    }

    pub fn is_zero(&self) -> bool {
        self.tail.is_empty()
    }

    pub fn to_literal(&self) -> String {
        if self.tail.is_empty() {
            return "0".into();
        }
        self.tail
            .iter()
            .rev()
            .map(|(j, c)| format!("{c}*T^-{j}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `Σ_{j=1}^{m} α_j t^{−j}` with `α_j = 0` for `p | j` and `α_m ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarPart {
    pub p: u64,
    pub m: u64,
    /// `α_1, …, α_m`.
    pub coeffs: Vec<u64>,
}

impl PolarPart {
    pub fn as_class(&self) -> AsClass {
        AsClass::new(self.p, self.coeffs.iter().enumerate().map(|(i, c)| (i as u64 + 1, *c)))
            .expect("p is prime")
    }

    pub fn is_valid(&self) -> bool {
        let top_ok = self.m == 0 || self.coeffs.last().is_some_and(|c| *c != 0);
        let len_ok = self.coeffs.len() as u64 == self.m;
        let free_ok = self
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| (i as u64 + 1) % self.p != 0 || *c == 0);
        top_ok && len_ok && free_ok
    }
}

/// `c = polar + 𝔭(w)` modulo `F_p[[t]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarReduction {
    pub input: AsClass,
    pub polar: PolarPart,
    pub witness: AsClass,
    pub steps: usize,
}

impl PolarReduction {
    /// Recomputes `c − polar − 𝔭(w)` and checks that it has no polar terms.
    pub fn verify(&self) -> bool {
        let p = self.input.p;
        let wp = self
            .witness
            .tail
            .iter()
            .fold(AsClass::default_for(p), |acc, (l, b)| acc.add(&AsClass::wp_monomial(p, *b, *l)));
        let rest = self.input.add(&self.polar.as_class().neg()).add(&wp.neg());
        rest.is_zero() && self.polar.is_valid()
    }
}

impl AsClass {
    fn default_for(p: u64) -> Self {
        AsClass { p, tail: BTreeMap::new() }
    }
}

/// Unique polar part in the class of `c`, by repeatedly removing the top term
/// `β^p t^{−pl}` with `𝔭(β t^{−l})`. On `F_p` the `p`-th root is the identity.
pub fn polar_reduce(c: &AsClass) -> PolarReduction {
    let p = c.p;
    let mut cur = c.clone();
    let mut witness = AsClass::default_for(p);
    let mut steps = 0;
    while let Some((&j, &a)) = cur.tail.iter().rev().find(|(j, _)| *j % p == 0) {
        let beta = a;
        let w = AsClass::wp_monomial(p, beta, j / p);
        cur = cur.add(&w.neg());
        witness = witness.add(&AsClass::new(p, [(j / p, beta)]).expect("p is prime"));
        steps += 1;
    }
    let m = cur.tail.keys().next_back().copied().unwrap_or(0);
    let coeffs = (1..=m).map(|j| cur.tail.get(&j).copied().unwrap_or(0)).collect();
    PolarReduction {
        input: c.clone(),
        polar: PolarPart { p, m, coeffs },
        witness,
        steps,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarbaterReport {
    pub p: u64,
    pub conductors: Vec<u64>,
    /// `Σ (m_i − ⌊m_i/p⌋)`.
    pub dim: u64,
    /// Number of punctured lines (one per branch point).
    pub r: u64,
    /// Number of affine lines.
    pub r_prime: u64,
}

fn check_conductors(p: u64, conductors: &[u64]) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for &m in conductors {
        if m == 0 || m % p == 0 {
            return Err(Error::Precondition(format!(
                "conductor {m} must be positive and prime to p = {p}"
            )));
        }
    }
    Ok(())
}

/// Dimension of the Harbater space with the given conductors, checked against
/// a count of the free polar coefficients.
pub fn harbater_dim(p: u64, conductors: &[u64]) -> Result<HarbaterReport> {
    check_conductors(p, conductors)?;
    let dim: u64 = conductors.iter().map(|m| m - m / p).sum();
    let (mut r, mut r_prime) = (0, 0);
    for &m in conductors {
        let free = (1..=m).filter(|j| j % p != 0).count() as u64;
        r += 1;
        r_prime += free - 1;
    }
    if r + r_prime != dim {
        return Err(Error::Verification(format!(
            "census r + r′ = {} differs from Σ(m_i − ⌊m_i/p⌋) = {dim}",
            r + r_prime
        )));
    }
    Ok(HarbaterReport {
        p,
        conductors: conductors.to_vec(),
        dim,
        r,
        r_prime,
    })
}

/// Genus of a `Z/p` cover of a genus-`g_quotient` curve with the given
/// conductors: `2g − 2 = p(2g_Σ − 2) + Σ (m_i + 1)(p − 1)`.
pub fn genus_rh(p: u64, conductors: &[u64], g_quotient: u64) -> Result<u64> {
    check_conductors(p, conductors)?;
    let (p, gq) = (p as i128, g_quotient as i128);
    let ram: i128 = conductors.iter().map(|&m| (m as i128 + 1) * (p - 1)).sum();
    let two_g = p * (2 * gq - 2) + ram + 2;
    if two_g < 0 || two_g % 2 != 0 {
        return Err(Error::Precondition(format!(
            "Riemann–Hurwitz gives 2g = {two_g}, not a non-negative even integer"
        )));
    }
    Ok((two_g / 2) as u64)
}

/// `a(t) = t^q + x_1 t^{q−1} + ⋯`, with `x_q` present only when `l = 1`.
fn deformation_poly<R: Ring>(ring: &R, q: u64, xs: &[R::Elem], t: &Series<R>) -> (Series<R>, Series<R>) {
    let prec = t.prec();
    let coeff = |i: u64| -> R::Elem {
        if i == 0 {
            ring.one()
        } else {
            xs.get(i as usize - 1).cloned().unwrap_or_else(|| ring.zero())
        }
    };
    let mut a = Series::zero(ring, prec);
    let mut da = Series::zero(ring, prec);
    for i in 0..=q {
        a = a.mul(t).add(&Series::constant(ring, coeff(i), prec));
    }
    // a′(t) = Σ (q − i) x_i t^{q−i−1}
    for i in 0..q {
        let c = ring.mul(&coeff(i), &ring.from_i64((q - i) as i64));
        da = da.mul(t).add(&Series::constant(ring, c, prec));
    }
    (a, da)
}

/// Deformed Artin–Schreier cover over `A`: `t` as a series in the uniformizer
/// `u` (`u = ξ` for `l = 1`, `u = η` with `η^l = ξ` otherwise) and
/// `σ(ξ) = ξ + a(t)`.
#[derive(Clone, Debug)]
pub struct DeformedAsCover<R: Ring> {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub l: u64,
    pub xs: Vec<R::Elem>,
    pub t: Series<R>,
    pub sigma: SeriesAutomorphism<R>,
    pub newton_steps: usize,
}

/// Number of deformation parameters: `q` when `l = 1`, else `q − 1`.
pub fn parameter_count(p: u64, m: u64) -> u64 {
    let (q, l) = conductor_split(p, m);
    if l == 1 {
        q
    } else {
        q - 1
    }
}

fn truncated<R: Ring>(s: &Series<R>, prec: i64) -> Series<R> {
    s.truncate(prec)
}

/// Solves `t = G(t)` with `G(t) = u^p − u·a(t)^{p−1}` (`l = 1`) or
/// `G(t) = u^p (1 − (a(t) u^{−l})^{p−1})^{1/l}`, by Newton's method on `t − G(t)`.
fn solve_t<R: Ring>(p: u64, q: u64, l: u64, ring: &R, xs: &[R::Elem], prec: i64) -> Result<(Series<R>, usize)> {
    let work = prec + l as i64 + 2;
    let u = Series::t(ring, work);
    let up = Series::monomial(ring, ring.one(), p as i64, work);
    let pm1 = ring.from_i64(p as i64 - 1);
    let l_inv = ring
        .inv(&ring.from_i64(l as i64))
        .ok_or_else(|| Error::NotAUnit(format!("l = {l}")))?;
    let g_and_dg = |t: &Series<R>| -> Result<(Series<R>, Series<R>)> {
        let (a, da) = deformation_poly(ring, q, xs, t);
        if l == 1 {
            let ap2 = a.pow(p as i64 - 2)?;
            let g = up.sub(&u.mul(&ap2.mul(&a)));
            let dg = u.mul(&ap2).mul(&da).scale(&pm1).neg();
            Ok((g, dg))
        } else {
            let w = a.shift(-(l as i64));
            let wp2 = w.pow(p as i64 - 2)?;
            let big_w = Series::one(ring, work).sub(&wp2.mul(&w));
            let root = big_w.truncate(work).mth_root_unit(l)?;
            let g = up.mul(&root);
            // G′ = u^p (1/l) W^{1/l − 1} · (−(p−1) w^{p−2} a′ u^{−l})
            let dg = up
                .mul(&root.div(&big_w)?)
                .mul(&wp2)
                .mul(&da.shift(-(l as i64)))
                .scale(&ring.mul(&l_inv, &pm1))
                .neg();
            Ok((g, dg))
        }
    };
    let mut t = up.clone();
    let cap = 2 * (prec as usize + ring.nilpotency_bound()) + 16;
    for step in 0..cap {
        let (g, dg) = g_and_dg(&t)?;
        let h = t.sub(&g);
        if truncated(&h, prec).is_zero() {
            return Ok((t.truncate(prec), step));
        }
        let dh = Series::one(ring, work).sub(&dg);
        t = t.sub(&h.div(&dh)?).truncate(work);
    }
    Err(Error::NotStabilized(format!(
        "implicit solve for t did not converge at precision {prec}"
    )))
}

/// Builds the deformed cover of conductor `m = pq − l` with parameters `xs`
/// (`q` of them if `l = 1`, `q − 1` otherwise; missing entries are zero) and
/// verifies that `t` is `σ`-invariant and that `σ` has order `p`.
pub fn build_deformed_cover<R: Ring>(
    p: u64,
    m: u64,
    ring: &R,
    xs: &[R::Elem],
    prec: i64,
) -> Result<DeformedAsCover<R>> {
    check_conductors(p, &[m])?;
    if p == 2 {
        return Err(Error::Precondition("the cover construction needs p > 2".into()));
    }
    if ring.residue_characteristic() != Some(p) || ring.descriptor().base().map(|b| b.n) != Some(1) {
        return Err(Error::Precondition(format!(
            "coefficients must be an F_{p}-algebra"
        )));
    }
    let (q, l) = conductor_split(p, m);
    let n = parameter_count(p, m) as usize;
    if xs.len() > n {
        return Err(Error::Precondition(format!(
            "{} parameters given, at most {n} allowed for (p, m) = ({p}, {m})",
            xs.len()
        )));
    }
    if let Some(x) = xs.iter().find(|x| !ring.is_zero(x) && !ring.is_nilpotent(x)) {
        return Err(Error::Precondition(format!(
            "parameter {} is not in the maximal ideal",
            ring.format(x)
        )));
    }
    let mut xs = xs.to_vec();
    xs.resize(n, ring.zero());
    let work = prec + 4;
    let (t, newton_steps) = solve_t(p, q, l, ring, &xs, work)?;
    let (a, _) = deformation_poly(ring, q, &xs, &t);
    let image = if l == 1 {
        Series::t(ring, work).add(&a)
    } else {
        let w = a.shift(-(l as i64));
        let inner = Series::one(ring, work).add(&w).truncate(work);
        Series::t(ring, work).mul(&inner.mth_root_unit(l)?)
    };
    let sigma = SeriesAutomorphism::new(image.truncate(prec))?;
    let moved = t.compose(sigma.image())?;
    if !moved.agrees_with(&t) {
        return Err(Error::Verification("t is not fixed by σ".into()));
    }
    if !sigma.power(p as i64)?.is_identity() || sigma.is_identity() {
        return Err(Error::Verification(format!(
            "σ does not have order {p} at precision {prec}"
        )));
    }
    Ok(DeformedAsCover {
        p,
        m,
        q,
        l,
        xs,
        t: t.truncate(prec),
        sigma,
        newton_steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub l: u64,
    pub ring: String,
    pub uniformizer: String,
    pub parameters: Vec<String>,
    pub t_series: String,
    pub sigma_image: String,
    pub conductor: u64,
    pub order_p: bool,
    pub prec: i64,
}

impl<R: Ring> DeformedAsCover<R> {
    pub fn uniformizer(&self) -> &'static str {
        if self.l == 1 {
            "xi"
        } else {
            "eta"
        }
    }

    pub fn report(&self) -> Result<CoverReport> {
        let ring = self.sigma.ring();
        // conductor of the special fibre: first unit coefficient of σ(u) − u
        let diff = self.sigma.image().sub(&Series::t(ring, self.sigma.prec()));
        let conductor = diff
            .terms()
            .find(|(_, c)| ring.is_unit(c))
            .map(|(e, _)| e as u64 - 1)
            .ok_or_else(|| Error::NotStabilized("special fibre of σ is the identity".into()))?;
        Ok(CoverReport {
            p: self.p,
            m: self.m,
            q: self.q,
            l: self.l,
            ring: ring.descriptor().to_string(),
            uniformizer: self.uniformizer().into(),
            parameters: self.xs.iter().map(|x| ring.format(x)).collect(),
            t_series: self.t.to_string(),
            sigma_image: self.sigma.image().to_string(),
            conductor,
            order_p: true,
            prec: self.sigma.prec(),
        })
    }
}

/// Undeformed cover over `F_p`.
pub fn undeformed_sigma(p: u64, m: u64, prec: i64) -> Result<SeriesAutomorphism<Zmod>> {
    let k = Zmod::prime_field(p)?;
    Ok(build_deformed_cover(p, m, &k, &[], prec)?.sigma)
}

/// Valid direction indices: `1..=q` when `l = 1`, `1..=q−1` otherwise.
pub fn direction_range(p: u64, m: u64) -> std::ops::RangeInclusive<u64> {
    1..=parameter_count(p, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub l: u64,
    pub j: u64,
    pub phi: String,
    pub valuation: i64,
    /// `p(q − j) − (l − 1)`.
    pub predicted: i64,
}

/// `φ_j` with `σ(u) = σ_0(u) + ε φ_j(u)` over `F_p[ε]/(ε²)` for `x_j = ε`.
pub fn direction_series(p: u64, m: u64, j: u64, prec: i64) -> Result<Series<Zmod>> {
    if !direction_range(p, m).contains(&j) {
        return Err(Error::Precondition(format!(
            "direction j = {j} outside {:?} for (p, m) = ({p}, {m})",
            direction_range(p, m)
        )));
    }
    let ring = ArtinRing::new(&parse_ring(&format!("Fp({p})[e]/(e^2)"))?)?;
    let eps = ring.generator("e").expect("variable e");
    let mut xs = vec![ring.zero(); j as usize];
    xs[j as usize - 1] = eps;
    let cover = build_deformed_cover(p, m, &ring, &xs, prec)?;
    let base = undeformed_sigma(p, m, prec)?;
    let k = Zmod::prime_field(p)?;
    let image = cover.sigma.image();
    let e_idx = ring.monomial_index(&[1]).expect("basis contains e");
    let constant_part = Series::from_fn(&k, 0, image.prec(), |e| ring.coordinate(&image.coeff(e), 0));
    if !constant_part.agrees_with(base.image()) {
        return Err(Error::Verification("ε = 0 does not recover σ_0".into()));
    }
    Ok(Series::from_fn(&k, 0, image.prec(), |e| ring.coordinate(&image.coeff(e), e_idx)))
}

/// `v_u(φ_j)`, checked against `p(q − j) − (l − 1)`.
pub fn deformation_direction_valuation(p: u64, m: u64, j: u64) -> Result<DirectionReport> {
    let (q, l) = conductor_split(p, m);
    let predicted = (p * (q - j)) as i64 - (l as i64 - 1);
    let prec = predicted + 2 * p as i64 + 8;
    let phi = direction_series(p, m, j, prec)?;
    let valuation = phi.valuation().ok_or_else(|| {
        Error::NotStabilized(format!("φ_{j} vanishes modulo u^{prec}"))
    })?;
    if valuation != predicted {
        return Err(Error::Verification(format!(
            "v(φ_{j}) = {valuation}, expected {predicted} for (p, m) = ({p}, {m})"
        )));
    }
    Ok(DirectionReport {
        p,
        m,
        q,
        l,
        j,
        phi: phi.to_string(),
        valuation,
        predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub p: u64,
    pub m: u64,
    pub directions: Vec<u64>,
    pub cocycles: Vec<bool>,
    pub rank: usize,
    pub independent: bool,
}

/// Tests linear independence in `H¹` of the classes `φ_j d/du`, where the
/// derivation is `h = φ_j / σ_0(u)′`, i.e. `σ = (1 + εD) ∘ σ_0`.
pub fn independence_check(p: u64, m: u64, directions: &[u64]) -> Result<IndependenceReport> {
    let beta = (m + 1) * (p - 1);
    let policy = PrecisionPolicy::default();
    let window = (2 * beta + 2 * p) as i64 + p as i64;
    let prec = beta as i64 + window + 8;
    let base = undeformed_sigma(p, m, prec)?;
    let ds = base.image().derivative();
    let hs = directions
        .iter()
        .map(|&j| Ok(ThetaElement::new(direction_series(p, m, j, prec)?.div(&ds)?)))
        .collect::<Result<Vec<_>>>()?;
    let r = class_rank(|pr| undeformed_sigma(p, m, pr), p, beta, &hs, &policy)?;
    Ok(IndependenceReport {
        p,
        m,
        directions: directions.to_vec(),
        independent: r.cocycles.iter().all(|c| *c) && r.rank == directions.len(),
        cocycles: r.cocycles,
        rank: r.rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_reduction_char_3() {
        let c = AsClass::parse(3, "1*T^-9 + 1*T^-3").unwrap();
        let r = polar_reduce(&c);
        assert_eq!(r.polar, PolarPart { p: 3, m: 1, coeffs: vec![2] });
        assert_eq!(r.steps, 2);
        assert!(r.verify());
        assert_eq!(r.witness, AsClass::new(3, [(3, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn polar_input_is_fixed() {
        let c = AsClass::parse(3, "T^-5").unwrap();
        let r = polar_reduce(&c);
        assert_eq!(r.polar.as_class(), c);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn coboundary_reduces_to_zero() {
        let c = AsClass::wp_monomial(5, 3, 2);
        let r = polar_reduce(&c);
        assert_eq!(r.polar.m, 0);
        assert!(r.verify());
        let integral = AsClass::parse(5, "1 + T + 3*T^2").unwrap();
        assert!(integral.is_zero());
    }

    #[test]
    fn harbater_examples() {
        assert_eq!(harbater_dim(3, &[5]).unwrap().dim, 4);
        assert_eq!(harbater_dim(3, &[1, 1]).unwrap().dim, 2);
        let r = harbater_dim(5, &[2, 3, 4]).unwrap();
        assert_eq!((r.dim, r.r, r.r_prime), (9, 3, 6));
        assert!(harbater_dim(3, &[6]).is_err());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_rh(5, &[2], 0).unwrap(), 2);
        assert_eq!(genus_rh(3, &[2], 0).unwrap(), 1);
        assert_eq!(genus_rh(3, &[2, 2], 0).unwrap(), 4);
        assert_eq!(genus_rh(5, &[1], 1).unwrap(), 5);
        assert_eq!(genus_rh(3, &[1], 0).unwrap(), 0);
        assert!(genus_rh(3, &[], 0).is_err());
    }

    #[test]
    fn undeformed_cover_matches_sigma0_invariants() {
        for (p, m) in [(3, 2), (3, 4), (5, 3), (5, 4), (3, 5)] {
            let s = undeformed_sigma(p, m, 60).unwrap();
            assert_eq!(s.conductor().unwrap().0, m, "p={p} m={m}");
            assert_eq!(s.order(p + 1).unwrap(), Some(p));
        }
    }

    #[test]
    fn deformed_cover_p3_m5() {
        let ring = ArtinRing::new(&parse_ring("Fp(3)[e]/(e^2)").unwrap()).unwrap();
        let eps = ring.generator("e").unwrap();
        let cover = build_deformed_cover(3, 5, &ring, &[eps.clone()], 40).unwrap();
        assert_eq!((cover.q, cover.l), (2, 1));
        // σ(ξ) = ξ + t² + εt
        let t = &cover.t;
        let expected = Series::t(&ring, 40)
            .add(&t.mul(t))
            .add(&t.scale(&eps));
        assert!(cover.sigma.image().agrees_with(&expected.truncate(40)));
        let r = cover.report().unwrap();
        assert_eq!(r.conductor, 5);
        assert_eq!(r.uniformizer, "xi");
    }

    #[test]
    fn deformed_cover_p3_m4_eta() {
        let ring = ArtinRing::new(&parse_ring("Fp(3)[e]/(e^2)").unwrap()).unwrap();
        let eps = ring.generator("e").unwrap();
        let cover = build_deformed_cover(3, 4, &ring, &[eps], 40).unwrap();
        assert_eq!((cover.q, cover.l), (2, 2));
        assert_eq!(cover.uniformizer(), "eta");
        // t^l = ξ^p − ξ a(t)^{p−1} with ξ = η^2
        let t = &cover.t;
        let (a, _) = deformation_poly(&ring, 2, &cover.xs, t);
        let xi = Series::monomial(&ring, ring.one(), 2, 40);
        let rhs = xi.pow(3).unwrap().sub(&xi.mul(&a.pow(2).unwrap()));
        assert!(t.mul(t).agrees_with(&rhs.truncate(40)));
    }

    #[test]
    fn too_many_parameters_rejected() {
        let ring = ArtinRing::new(&parse_ring("Fp(3)[e]/(e^2)").unwrap()).unwrap();
        let eps = ring.generator("e").unwrap();
        assert!(build_deformed_cover(3, 4, &ring, &[eps.clone(), eps], 30).is_err());
    }

    #[test]
    fn direction_valuations() {
        assert_eq!(deformation_direction_valuation(3, 5, 1).unwrap().valuation, 3);
        assert_eq!(deformation_direction_valuation(3, 4, 1).unwrap().valuation, 2);
        assert_eq!(deformation_direction_valuation(5, 4, 1).unwrap().valuation, 0);
        assert!(deformation_direction_valuation(3, 4, 2).is_err());
    }

    #[test]
    fn independence_p3_m5() {
        let r = independence_check(3, 5, &[1, 2]).unwrap();
        assert!(r.independent, "{r:?}");
        let r = independence_check(3, 5, &[2]).unwrap();
        assert!(r.independent && r.rank == 1);
    }

    #[test]
    fn zero_direction_is_dependent() {
        let k = Zmod::prime_field(3).unwrap();
        let zero = ThetaElement::new(Series::zero(&k, 80));
        let r = class_rank(|pr| undeformed_sigma(3, 5, pr), 3, 12, &[zero], &PrecisionPolicy::default()).unwrap();
        assert_eq!(r.rank, 0);
    }

    fn arb_class(p: u64) -> impl Strategy<Value = AsClass> {
        prop::collection::vec((1u64..30, 0u64..p), 0..6)
            .prop_map(move |terms| AsClass::new(p, terms).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn polar_reduce_is_idempotent_and_class_invariant(
            (p, c, w) in prop::sample::select(vec![2u64, 3, 5, 7])
                .prop_flat_map(|p| (Just(p), arb_class(p), arb_class(p))),
        ) {
            let r = polar_reduce(&c);
            prop_assert!(r.verify());
            prop_assert_eq!(polar_reduce(&r.polar.as_class()).polar, r.polar.clone());
            let wp = w.tail.iter().fold(AsClass::default_for(p), |acc, (l, b)| acc.add(&AsClass::wp_monomial(p, *b, *l)));
            prop_assert_eq!(polar_reduce(&c.add(&wp)).polar, r.polar);
        }

        #[test]
        fn harbater_census(p in prop::sample::select(vec![2u64, 3, 5, 7]), ms in prop::collection::vec(1u64..40, 1..5)) {
            let ms: Vec<u64> = ms.into_iter().filter(|m| m % p != 0).collect();
            prop_assume!(!ms.is_empty());
            let r = harbater_dim(p, &ms).unwrap();
            prop_assert_eq!(r.dim, r.r + r.r_prime);
        }

        #[test]
        fn riemann_hurwitz_identity(p in prop::sample::select(vec![3u64, 5, 7]), ms in prop::collection::vec(1u64..20, 1..4), gq in 0u64..4) {
            let ms: Vec<u64> = ms.into_iter().filter(|m| m % p != 0).collect();
            prop_assume!(!ms.is_empty());
            if let Ok(g) = genus_rh(p, &ms, gq) {
                let lhs = 2 * g as i64 - 2;
                let rhs = p as i64 * (2 * gq as i64 - 2) + ms.iter().map(|m| (*m as i64 + 1) * (p as i64 - 1)).sum::<i64>();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
