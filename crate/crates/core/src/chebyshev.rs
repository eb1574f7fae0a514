//! Chebyshev polynomials `T_p`, `S_{p−1}` and the generator `ψ` of the ideal
//! they cut out after `X ↦ X/2 + 1`, together with the Möbius family
//! `σ_a(T) = (T + a)/(1 + T + a)` used for conductor one.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, is_prime};
use crate::automorphisms::standard_sigma;
use crate::error::{Error, Result};
use crate::rings::{p_valuation, ArtinRing, BaseRing, Relations, Ring, RingDescriptor};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigRational>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c·X + d`.
    pub fn linear(c: BigRational, d: BigRational) -> Self {
        Self::new(vec![d, c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> BigRational {
        self.coeffs.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(rat(1)), |acc, _| acc.mul(self))
    }

    /// `self(g(X))`.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc.mul(g).add(&Self::constant(c.clone())))
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Precondition("division by the zero polynomial".into()))?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[top - dd + i] -= &c * d;
            }
            quo[top - dd] = c;
            rem.pop();
        }
        Ok((Self::new(quo), Self::new(rem)))
    }

    pub fn divides(&self, other: &Self) -> Result<bool> {
        Ok(other.div_rem(self)?.1.is_zero())
    }

    /// All denominators prime to `p`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs.iter().all(|c| p_valuation(c, p).map_or(true, |v| v >= 0))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Every denominator is a power of `b`.
    pub fn denominators_powers_of(&self, b: u64) -> bool {
        let b = BigInt::from(b);
        self.coeffs.iter().all(|c| {
            let mut d = c.denom().clone();
            while (&d % &b).is_zero() {
                d /= &b;
            }
            d.is_one()
        })
    }

    /// `p`-adic valuation of each coefficient (`None` for zero coefficients).
    pub fn valuations(&self, p: u64) -> Vec<Option<i64>> {
        self.coeffs.iter().map(|c| p_valuation(c, p)).collect()
    }

    /// Reduction modulo `p`; requires `p`-integral coefficients.
    pub fn reduce_mod(&self, p: u64) -> Result<Vec<u64>> {
        let ring = crate::rings::Zmod::prime_field(p)?;
        let mut out: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| ring.from_rational(c))
            .collect::<Result<_>>()?;
        while out.last() == Some(&0) {
            out.pop();
        }
        Ok(out)
    }

    /// Coefficients as residues modulo `p^n`; requires `p`-integrality.
    pub fn residues_mod(&self, p: u64, n: u32) -> Result<Vec<u64>> {
        let ring = crate::rings::Zmod::new(p, n)?;
        self.coeffs.iter().map(|c| ring.from_rational(c)).collect()
    }

    /// Horner evaluation at a ring element.
    pub fn eval<R: Ring>(&self, ring: &R, x: &R::Elem) -> Result<R::Elem> {
        self.coeffs.iter().rev().try_fold(ring.zero(), |acc, c| {
            Ok(ring.add(&ring.mul(&acc, x), &ring.from_rational(c)?))
        })
    }

    /// Monic, `p` divides every lower coefficient, `p²` does not divide the constant.
    pub fn is_eisenstein(&self, p: u64) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 || !self.coeffs[d].is_one() || !self.has_integer_coeffs() {
            return false;
        }
        let lower_ok = self.coeffs[..d]
            .iter()
            .all(|c| p_valuation(c, p).map_or(true, |v| v >= 1));
        lower_ok && p_valuation(&self.coeffs[0], p) == Some(1)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_integer_coeffs() {
            let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.to_integer()).collect();
            return f.write_str(&crate::rings::expr::format_univariate(&ints, "X"));
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let mono = match e {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{e}"),
            };
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{mag}*{mono}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::Precondition("p must be odd".into()));
    }
    Ok(())
}

/// `C(n−l, l)·n/(n−l)` as a rational.
fn first_kind_weight(n: u64, l: u64) -> BigRational {
    BigRational::from_integer(binomial(n - l, l)) * BigRational::new(BigInt::from(n), BigInt::from(n - l))
}

fn sign(l: u64) -> BigRational {
    if l % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Sum `Σ_l w(l)·(−1)^l·base^{top−step·l}` for `l = 0..=lmax`.
fn alternating_sum(
    base: &IntPolynomial,
    top: u64,
    step: u64,
    lmax: u64,
    w: impl Fn(u64) -> BigRational,
) -> IntPolynomial {
    (0..=lmax).fold(IntPolynomial::zero(), |acc, l| {
        acc.add(&base.pow((top - step * l) as u32).scale(&(w(l) * sign(l))))
    })
}

/// `(T_p, S_{p−1})` from their binomial sums.
pub fn cheb_polys(p: u64) -> Result<(IntPolynomial, IntPolynomial)> {
    require_odd_prime(p)?;
    let two_x = IntPolynomial::linear(rat(2), rat(0));
    let t = alternating_sum(&two_x, p, 2, p / 2, |l| first_kind_weight(p, l)).scale(&BigRational::new(1.into(), 2.into()));
    let s = alternating_sum(&two_x, p - 1, 2, (p - 1) / 2, |l| BigRational::from_integer(binomial(p - 1 - l, l)));
    Ok((t, s))
}

type Laurent = BTreeMap<i64, BigRational>;

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_insert_with(BigRational::zero) += x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn laurent_add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert_with(BigRational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `f((Z + Z^{−1})/2)` in `Q[Z, Z^{−1}]`.
fn substitute_joukowski(f: &IntPolynomial) -> Laurent {
    let half = BigRational::new(1.into(), 2.into());
    let x: Laurent = [(1, half.clone()), (-1, half)].into_iter().collect();
    f.coeffs().iter().rev().fold(Laurent::new(), |acc, c| {
        let mut next = laurent_mul(&acc, &x);
        next = laurent_add(&next, &[(0, c.clone())].into_iter().filter(|(_, c)| !c.is_zero()).collect());
        next
    })
}

/// Checks `2T_p = Z^p + Z^{−p}` and `(Z − Z^{−1})S_{p−1} = Z^p − Z^{−p}` after
/// `2X = Z + Z^{−1}`.
pub fn defining_identities_hold(p: u64) -> Result<(bool, bool)> {
    let (t, s) = cheb_polys(p)?;
    let p = p as i64;
    let lhs_t = substitute_joukowski(&t.scale(&rat(2)));
    let rhs_t: Laurent = [(p, rat(1)), (-p, rat(1))].into_iter().collect();
    let z_minus: Laurent = [(1, rat(1)), (-1, rat(-1))].into_iter().collect();
    let lhs_s = laurent_mul(&z_minus, &substitute_joukowski(&s));
    let rhs_s: Laurent = [(p, rat(1)), (-p, rat(-1))].into_iter().collect();
    Ok((lhs_t == rhs_t, lhs_s == rhs_s))
}

/// `ψ` with its Bézout certificate `U·(T_p − 1) + V·S_{p−1} = φ`, `ψ(X) = φ(X/2 + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiCertificate {
    pub p: u64,
    pub t_p: IntPolynomial,
    pub s_p_minus_1: IntPolynomial,
    pub phi: IntPolynomial,
    pub u: IntPolynomial,
    pub v: IntPolynomial,
    pub psi: IntPolynomial,
}

/// Builds ψ and the Bézout data, verifying the identity, the 2-power
/// denominators of `U, V`, and `ψ(X) = φ(X/2 + 1)`.
pub fn psi_poly(p: u64) -> Result<PsiCertificate> {
    let (t_p, s) = cheb_polys(p)?;
    let h = (p - 1) / 2;
    let two_x_plus_2 = IntPolynomial::linear(rat(2), rat(2));
    let phi = alternating_sum(&two_x_plus_2, h, 1, h, |l| BigRational::from_integer(binomial(p - 1 - l, l)));
    let u = phi.scale(&BigRational::new((-1).into(), 2.into()));
    let v = alternating_sum(&two_x_plus_2, (p + 1) / 2, 1, p / 2, |l| first_kind_weight(p, l))
        .scale(&BigRational::new(1.into(), 4.into()));
    let x_plus_4 = IntPolynomial::linear(rat(1), rat(4));
    let psi = alternating_sum(&x_plus_4, h, 1, h, |l| BigRational::from_integer(binomial(p - 1 - l, l)));

    let t_minus_1 = t_p.sub(&IntPolynomial::constant(rat(1)));
    let lhs = u.mul(&t_minus_1).add(&v.mul(&s));
    if lhs != phi {
        return Err(Error::Verification(format!(
            "Bézout identity fails for p = {p}: U(T_p−1)+V·S = {lhs}, φ = {phi}"
        )));
    }
    if !(u.denominators_powers_of(2) && v.denominators_powers_of(2)) {
        return Err(Error::Verification(format!(
            "Bézout coefficients have odd denominators for p = {p}"
        )));
    }
    let shift = IntPolynomial::linear(BigRational::new(1.into(), 2.into()), rat(1));
    if phi.compose(&shift) != psi {
        return Err(Error::Verification(format!("ψ ≠ φ(X/2+1) for p = {p}")));
    }
    Ok(PsiCertificate { p, t_p, s_p_minus_1: s, phi, u, v, psi })
}

impl PsiCertificate {
    /// `T_p(X/2 + 1) − 1` and `S_{p−1}(X/2 + 1)`.
    pub fn shifted_generators(&self) -> (IntPolynomial, IntPolynomial) {
        let shift = IntPolynomial::linear(BigRational::new(1.into(), 2.into()), rat(1));
        (
            self.t_p.compose(&shift).sub(&IntPolynomial::constant(rat(1))),
            self.s_p_minus_1.compose(&shift),
        )
    }

    /// ψ divides both shifted generators over `Q`.
    pub fn psi_divides_generators(&self) -> Result<bool> {
        let (a, b) = self.shifted_generators();
        Ok(self.psi.divides(&a)? && self.psi.divides(&b)?)
    }

    /// `ψ mod p = c·X^{(p−1)/2}` with `c ≠ 0`; returns `c`.
    pub fn mod_p_unit(&self) -> Result<Option<u64>> {
        let red = self.psi.reduce_mod(self.p)?;
        let h = ((self.p - 1) / 2) as usize;
        let ok = red.len() == h + 1 && red[..h].iter().all(|&c| c == 0);
        Ok(ok.then(|| red[h]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub p: u64,
    pub t_p: String,
    pub s_p_minus_1: String,
    pub phi: String,
    pub psi: String,
    pub u: String,
    pub v: String,
    pub laurent_identities: bool,
    pub bezout_verified: bool,
    pub denominators_powers_of_two: bool,
    pub psi_divides_generators: bool,
    pub psi_mod_p_unit: Option<u64>,
    pub psi_eisenstein: bool,
}

pub fn chebyshev_report(p: u64) -> Result<ChebyshevReport> {
    let (id_t, id_s) = defining_identities_hold(p)?;
    let cert = psi_poly(p)?;
    Ok(ChebyshevReport {
        p,
        t_p: cert.t_p.to_string(),
        s_p_minus_1: cert.s_p_minus_1.to_string(),
        phi: cert.phi.to_string(),
        psi: cert.psi.to_string(),
        u: cert.u.to_string(),
        v: cert.v.to_string(),
        laurent_identities: id_t && id_s,
        bezout_verified: true,
        denominators_powers_of_two: cert.u.denominators_powers_of(2) && cert.v.denominators_powers_of(2),
        psi_divides_generators: cert.psi_divides_generators()?,
        psi_mod_p_unit: cert.mod_p_unit()?,
        psi_eisenstein: cert.psi.is_eisenstein(p),
    })
}

/// 2×2 matrix over a ring, acting on `T` by `(αT + β)/(γT + δ)`.
#[derive(Clone, Debug)]
pub struct MobiusMatrix<R: Ring> {
    ring: R,
    entries: [R::Elem; 4],
    det: R::Elem,
}

impl<R: Ring> PartialEq for MobiusMatrix<R> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<R: Ring> MobiusMatrix<R> {
    pub fn new(ring: &R, entries: [R::Elem; 4]) -> Self {
        let [a, b, c, d] = &entries;
        let det = ring.sub(&ring.mul(a, d), &ring.mul(b, c));
        MobiusMatrix { ring: ring.clone(), entries, det }
    }

    /// `M_a = [[1, a], [1, 1 + a]]`.
    pub fn family(ring: &R, a: &R::Elem) -> Self {
        let one = ring.one();
        Self::new(ring, [one.clone(), a.clone(), one.clone(), ring.add(&one, a)])
    }

    pub fn identity(ring: &R) -> Self {
        Self::new(ring, [ring.one(), ring.zero(), ring.zero(), ring.one()])
    }

    pub fn entries(&self) -> &[R::Elem; 4] {
        &self.entries
    }

    pub fn det(&self) -> &R::Elem {
        &self.det
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = &self.ring;
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        Self::new(
            r,
            [
                r.add(&r.mul(a, e), &r.mul(b, g)),
                r.add(&r.mul(a, f), &r.mul(b, h)),
                r.add(&r.mul(c, e), &r.mul(d, g)),
                r.add(&r.mul(c, f), &r.mul(d, h)),
            ],
        )
    }

    pub fn pow(&self, e: u64) -> Self {
        (0..e).fold(Self::identity(&self.ring), |acc, _| acc.mul(self))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ring)
    }

    pub fn format(&self) -> String {
        let f = |x: &R::Elem| self.ring.format(x);
        let [a, b, c, d] = &self.entries;
        format!("[[{}, {}], [{}, {}]]", f(a), f(b), f(c), f(d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobiusOrderReport {
    pub p: u64,
    pub a: String,
    pub is_identity_power: bool,
    pub matrix_power: String,
    pub t_p_shift_minus_one: String,
    pub s_p_minus_1_shift: String,
    pub chebyshev_verdict: bool,
    /// `None` when `a` is not topologically nilpotent (series route undefined).
    pub series_verdict: Option<bool>,
}

/// Decides `M_a^p = Id` by matrix power and by the Chebyshev conditions at
/// `a/2 + 1`, plus `σ_a^p = Id` by composition when `a` is nilpotent.
pub fn mobius_order_test<R: Ring>(p: u64, ring: &R, a: &R::Elem) -> Result<MobiusOrderReport> {
    require_odd_prime(p)?;
    let two = ring.from_i64(2);
    if ring.inv(&two).is_none() {
        return Err(Error::Precondition("2 is not a unit in the ring".into()));
    }
    let mp = MobiusMatrix::family(ring, a).pow(p);
    let matrix_verdict = mp.is_identity();
    let (t_p, s) = cheb_polys(p)?;
    let x = ring.add(&ring.div(a, &two)?, &ring.one());
    let tv = ring.sub(&t_p.eval(ring, &x)?, &ring.one());
    let sv = s.eval(ring, &x)?;
    let cheb_verdict = ring.is_zero(&tv) && ring.is_zero(&sv);
    let nilpotent = ring.is_zero(a) || ring.is_nilpotent(a);
    let series_verdict = if nilpotent && ring.residue_characteristic() == Some(p) {
        let prec = (4 * p as i64).max(24);
        let sigma = standard_sigma(p, 1, ring, a, prec)?;
        Some(sigma.power(p as i64)?.is_identity())
    } else {
        None
    };
    if matrix_verdict != cheb_verdict || series_verdict.is_some_and(|v| v != matrix_verdict) {
        return Err(Error::Verification(format!(
            "order verdicts disagree for a = {}: matrix {matrix_verdict}, Chebyshev {cheb_verdict}, series {series_verdict:?}",
            ring.format(a)
        )));
    }
    Ok(MobiusOrderReport {
        p,
        a: ring.format(a),
        is_identity_power: matrix_verdict,
        matrix_power: mp.format(),
        t_p_shift_minus_one: ring.format(&tv),
        s_p_minus_1_shift: ring.format(&sv),
        chebyshev_verdict: cheb_verdict,
        series_verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersalM1Report {
    pub p: u64,
    pub n_precision: u32,
    pub ring: String,
    pub psi: String,
    pub psi_degree: usize,
    pub eisenstein: bool,
    pub series_prec: i64,
    pub order_p: bool,
    pub nontrivial: bool,
}

/// The ring `Z/p^n[X]/(ψ)` as an Artin descriptor.
pub fn versal_m1_ring(p: u64, n: u32) -> Result<RingDescriptor> {
    let cert = psi_poly(p)?;
    Ok(RingDescriptor::ArtinLocal {
        base: BaseRing { p, n },
        variables: vec!["X".into()],
        relations: Relations::Modulus(cert.psi.residues_mod(p, n)?),
    })
}

/// Checks that `σ_X(T) = (T + X)/(1 + T + X)` has order exactly `p` over
/// `Z/p^n[X]/(ψ)` and that ψ is Eisenstein.
pub fn versal_m1_check(p: u64, n: u32) -> Result<VersalM1Report> {
    require_odd_prime(p)?;
    if p == 3 {
        return Err(Error::Precondition(
            "p = 3 is the rigid case; the versal check needs p > 3".into(),
        ));
    }
    let cert = psi_poly(p)?;
    let desc = versal_m1_ring(p, n)?;
    let ring = ArtinRing::new(&desc)?;
    let x = ring
        .generator("X")
        .ok_or_else(|| Error::InvalidRing("missing generator X".into()))?;
    let prec = (4 * p as i64).max(24);
    let sigma = standard_sigma(p, 1, &ring, &x, prec)?;
    let order_p = sigma.power(p as i64)?.is_identity();
    if !order_p {
        return Err(Error::Verification(format!(
            "σ_X^{p} ≠ Id over {desc} at precision {prec}"
        )));
    }
    Ok(VersalM1Report {
        p,
        n_precision: n,
        ring: desc.to_string(),
        psi: cert.psi.to_string(),
        psi_degree: cert.psi.degree().unwrap_or(0),
        eisenstein: cert.psi.is_eisenstein(p),
        series_prec: prec,
        order_p,
        nontrivial: !sigma.is_identity(),
    })
}

/// `p`-adic valuation of the constant term of ψ, as a small integer.
pub fn psi_constant_valuation(p: u64) -> Result<Option<i64>> {
    Ok(psi_poly(p)?.psi.valuations(p).first().cloned().flatten())
}

/// Integer coefficients of ψ as machine integers, when they fit.
pub fn psi_int_coeffs(p: u64) -> Result<Vec<i64>> {
    psi_poly(p)?
        .psi
        .coeffs()
        .iter()
        .map(|c| {
            c.to_integer()
                .to_i64()
                .ok_or_else(|| Error::Precondition("coefficient overflow".into()))
        })
        .collect()
}
