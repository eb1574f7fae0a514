//! Truncated power series and finite-tailed Laurent series over a [`Ring`].
//!
//! A [`Series`] stores the coefficients of `T^low, …, T^{prec−1}`; exponents
//! below `low` are exactly zero and everything from `T^prec` on is unknown.
//! Every operation returns the largest window its inputs determine.

use std::fmt;

use crate::error::{Error, Result};
use crate::rings::expr::parse_expr;
use crate::rings::Ring;

#[derive(Clone, Debug)]
pub struct Series<R: Ring> {
    ring: R,
    low: i64,
    coeffs: Vec<R::Elem>,
    prec: i64,
}

impl<R: Ring> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.low == other.low && self.prec == other.prec && self.coeffs == other.coeffs
    }
}

impl<R: Ring> Series<R> {
    /// Coefficients of `T^low, T^{low+1}, …`; entries at or past `prec` are dropped.
    pub fn new(ring: &R, low: i64, mut coeffs: Vec<R::Elem>, prec: i64) -> Self {
        let low = low.min(prec);
        coeffs.truncate((prec - low) as usize);
        coeffs.resize((prec - low) as usize, ring.zero());
        let mut s = Series {
            ring: ring.clone(),
            low,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    pub fn zero(ring: &R, prec: i64) -> Self {
        Series::new(ring, prec, Vec::new(), prec)
    }

    pub fn constant(ring: &R, c: R::Elem, prec: i64) -> Self {
        Series::new(ring, 0, vec![c], prec)
    }

    pub fn one(ring: &R, prec: i64) -> Self {
        Series::constant(ring, ring.one(), prec)
    }

    /// `c·T^e` known modulo `T^prec`.
    pub fn monomial(ring: &R, c: R::Elem, e: i64, prec: i64) -> Self {
        Series::new(ring, e, vec![c], prec)
    }

    /// The variable `T`.
    pub fn t(ring: &R, prec: i64) -> Self {
        Series::monomial(ring, ring.one(), 1, prec)
    }

    /// Builds `Σ f(e) T^e` for `low ≤ e < prec`.
    pub fn from_fn(ring: &R, low: i64, prec: i64, f: impl Fn(i64) -> R::Elem) -> Self {
        Series::new(ring, low, (low..prec).map(f).collect(), prec)
    }

    fn normalize(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| !self.ring.is_zero(c))
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Coefficient of `T^e`; `e` must lie below `prec`.
    pub fn coeff(&self, e: i64) -> R::Elem {
        debug_assert!(e < self.prec, "coefficient T^{e} is outside the window (prec {})", self.prec);
        if e < self.low || e >= self.prec {
            self.ring.zero()
        } else {
            self.coeffs[(e - self.low) as usize].clone()
        }
    }

    /// `(exponent, coefficient)` pairs of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R::Elem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    /// Least exponent with a nonzero coefficient; `None` means "≥ prec".
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_power_series(&self) -> bool {
        self.low >= 0
    }

    /// Lowers the window to `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Series::new(&self.ring, self.low, self.coeffs.clone(), prec)
    }

    /// Equality on the common window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let p = self.prec.min(other.prec);
        self.truncate(p) == other.truncate(p)
    }

    fn binary(&self, other: &Self, f: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Self {
        let prec = self.prec.min(other.prec);
        let low = self.low.min(other.low).min(prec);
        let coeffs = (low..prec)
            .map(|e| {
                let a = if e < self.prec { self.coeff(e) } else { self.ring.zero() };
                let b = if e < other.prec { other.coeff(e) } else { self.ring.zero() };
                f(&a, &b)
            })
            .collect();
        Series::new(&self.ring, low, coeffs, prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| self.ring.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        Series::new(&self.ring, self.low, coeffs, self.prec)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(c, x)).collect();
        Series::new(&self.ring, self.low, coeffs, self.prec)
    }

    /// Multiplication by `T^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            ring: self.ring.clone(),
            low: self.low + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec + k,
        }
    }

    /// Product; known modulo `T^{min(prec_a + v_b, prec_b + v_a)}`.
    pub fn mul(&self, other: &Self) -> Self {
        let prec = (self.prec + other.low).min(other.prec + self.low);
        self.mul_trunc(other, prec)
    }

    /// Product truncated to `prec` (which must not exceed the natural bound).
    pub fn mul_trunc(&self, other: &Self, prec: i64) -> Self {
        let prec = prec.min((self.prec + other.low).min(other.prec + self.low));
        let low = self.low + other.low;
        let n = (prec - low).max(0) as usize;
        let r = &self.ring;
        let mut out = vec![r.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if r.is_zero(b) {
                    continue;
                }
                out[i + j] = r.add(&out[i + j], &r.mul(a, b));
            }
        }
        Series::new(r, low, out, prec)
    }

    /// Leading coefficient (at the valuation), when the series is nonzero.
    pub fn leading(&self) -> Option<&R::Elem> {
        self.coeffs.first()
    }

    /// `1/self`; the leading coefficient must be a unit. Known modulo `T^{prec − 2v}`.
    pub fn inverse(&self) -> Result<Self> {
        let r = &self.ring;
        let lead = self
            .leading()
            .ok_or_else(|| Error::NotAUnit("series is zero to the known precision".into()))?;
        let c_inv = r
            .inv(lead)
            .ok_or_else(|| Error::NotAUnit(format!("leading coefficient {}", r.format(lead))))?;
        let v = self.low;
        let n = self.coeffs.len();
        let mut b: Vec<R::Elem> = Vec::with_capacity(n);
        b.push(c_inv.clone());
        for k in 1..n {
            let mut acc = r.zero();
            for j in 1..=k {
                let u = &self.coeffs[j];
                if !r.is_zero(u) {
                    acc = r.add(&acc, &r.mul(u, &b[k - j]));
                }
            }
            b.push(r.neg(&r.mul(&c_inv, &acc)));
        }
        Ok(Series::new(r, -v, b, self.prec - 2 * v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `self^e`; negative `e` goes through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&sq),
                    None => sq.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap_or_else(|| Series::one(&self.ring, self.prec.max(1))))
    }

    /// Same coefficients, window moved to `prec` (padding with zeros when raised).
    fn with_prec(&self, prec: i64) -> Self {
        Series::new(&self.ring, self.low, self.coeffs.clone(), prec)
    }

    /// Termwise `d/dT`, window lowered by one.
    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| r.mul(&r.from_i64(self.low + i as i64), c))
            .collect();
        Series::new(r, self.low - 1, coeffs, self.prec - 1)
    }

    /// `f ∘ g` for `g` a power series with nilpotent constant term.
    ///
    /// With `c = g(0) = 0` the result is known modulo `T^{min(prec_f·v_g, prec_g)}`;
    /// with `c ≠ 0` of nilpotency index `e`, modulo `T^{min(prec_f − (e−1), prec_g)}`.
    /// Laurent `f` needs `c = 0` and a unit leading coefficient in `g`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let r = &self.ring;
        if g.low < 0 {
            return Err(Error::Precondition("cannot substitute a Laurent series".into()));
        }
        let c = if g.prec > 0 { g.coeff(0) } else { r.zero() };
        if r.is_unit(&c) {
            return Err(Error::Precondition(format!(
                "g(0) = {} is a unit; the composition leaves the ring",
                r.format(&c)
            )));
        }
        let (tail, step) = if r.is_zero(&c) {
            match g.valuation() {
                Some(vg) => (self.prec.saturating_mul(vg), vg),
                None => {
                    if self.low < 0 {
                        return Err(Error::Precondition("substituting 0 into a Laurent series".into()));
                    }
                    let f0 = if self.prec > 0 { self.coeff(0) } else { r.zero() };
                    return Ok(Series::constant(r, f0, g.prec.min(self.prec.max(0) * g.prec)));
                }
            }
        } else {
            let e = r.nilpotency_index(&c).ok_or_else(|| {
                Error::Precondition(format!("g(0) = {} is not nilpotent", r.format(&c)))
            })?;
            if self.low < 0 {
                return Err(Error::Precondition(
                    "Laurent composition needs g(0) = 0".into(),
                ));
            }
            (self.prec - (e as i64 - 1), 0)
        };
        let target = tail.min(g.prec);
        let g_t = if self.low < 0 { g.clone() } else { g.truncate(target) };
        // Horner on the nonnegative part F of T^{−low} f (or f itself)
        let shift = self.low.min(0);
        let top = self.prec - shift; // exclusive bound on F's exponents
        let mut acc = Series::zero(r, target - shift * step.max(1));
        let work_prec = acc.prec;
        let last = if step > 0 {
            top.min((work_prec + step - 1) / step)
        } else {
            top
        };
        for i in (0..last).rev() {
            acc = acc.mul_trunc(&g_t, work_prec);
            let fi = self.coeff(i + shift);
            if !r.is_zero(&fi) {
                acc = acc.add(&Series::constant(r, fi, acc.prec));
            }
        }
        let mut out = acc;
        if shift < 0 {
            out = out.mul(&g_t.pow(shift)?);
        }
        Ok(out.truncate(target))
    }

    /// Compositional inverse: `f(0)` nilpotent, `f′(0)` a unit.
    pub fn reversion(&self) -> Result<Self> {
        let r = &self.ring;
        if self.low < 0 {
            return Err(Error::Precondition("reversion of a Laurent series".into()));
        }
        let c = self.coeff(0);
        let f1 = if self.prec > 1 { self.coeff(1) } else { r.zero() };
        if !r.is_unit(&f1) {
            return Err(Error::NotAUnit(format!("f′(0) = {}", r.format(&f1))));
        }
        if !r.is_zero(&c) {
            // f = c + f̃, so f⁻¹ = f̃⁻¹ ∘ (T − c)
            let f_tilde = self.sub(&Series::constant(r, c.clone(), self.prec));
            let inner = Series::t(r, self.prec).sub(&Series::constant(r, c, self.prec));
            return f_tilde.reversion()?.compose(&inner);
        }
        let prec = self.prec;
        let t = Series::t(r, prec);
        let fp = self.derivative();
        let mut g = Series::monomial(r, r.inv(&f1).unwrap(), 1, prec.min(2));
        let mut cur = prec.min(2);
        for _ in 0..(2 * prec + 8) {
            let gt = g.with_prec(cur);
            let num = self.truncate(cur).compose(&gt)?.sub(&t.truncate(cur));
            let den = fp.truncate(cur - 1).compose(&gt)?;
            let next = gt.sub(&num.div(&den)?).with_prec(cur);
            if cur == prec && next == g {
                break;
            }
            g = next;
            cur = (2 * cur).min(prec);
        }
        let g = g.truncate(prec);
        let ok = self.compose(&g)?.agrees_with(&t) && g.compose(self)?.agrees_with(&t);
        if !ok {
            return Err(Error::Verification("reversion failed to invert".into()));
        }
        Ok(g)
    }

    /// `m`-th root of a series whose constant term is a unit `m`-th power.
    pub fn mth_root_unit(&self, m: u64) -> Result<Self> {
        let r = &self.ring;
        if m == 0 {
            return Err(Error::Precondition("m must be positive".into()));
        }
        if let Some(p) = r.residue_characteristic() {
            if m % p == 0 {
                return Err(Error::Precondition(format!(
                    "m = {m} is divisible by the characteristic {p}"
                )));
            }
        }
        if self.low < 0 || self.prec <= 0 {
            return Err(Error::Precondition("m-th root needs a power series".into()));
        }
        let c = self.coeff(0);
        let root0 = r.nth_root_unit(&c, m)?;
        let prec = self.prec;
        let m_inv = r.inv(&r.from_i64(m as i64)).expect("m is prime to p");
        let mut x = Series::constant(r, root0, prec);
        for _ in 0..(2 * (prec as usize + r.nilpotency_bound()) + 8) {
            let xm1 = x.pow(m as i64 - 1)?;
            let err = xm1.mul(&x).sub(self);
            if err.is_zero() {
                return Ok(x);
            }
            let step = err.div(&xm1)?.scale(&m_inv);
            x = x.sub(&step).truncate(prec);
        }
        Err(Error::Verification("m-th root iteration did not converge".into()))
    }

    /// Sparse `c*T^e` literal without a precision marker.
    pub fn to_literal(&self) -> String {
        let parts: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let cs = self.ring.format(c);
                let cs = if e != 0 && (cs.contains(['+', '*', '-']) || cs.starts_with('-')) {
                    format!("({cs})")
                } else {
                    cs
                };
                match (e, cs.as_str()) {
                    (0, _) => cs,
                    (1, "1") => "T".into(),
                    (_, "1") => format!("T^{e}"),
                    (1, _) => format!("{cs}*T"),
                    _ => format!("{cs}*T^{e}"),
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<R: Ring> fmt::Display for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O(T^{})", self.prec)
        } else {
            write!(f, "{} + O(T^{})", self.to_literal(), self.prec)
        }
    }
}

/// Parses a sparse literal such as `"1*T^-3 + 2*T^-1"` or `"T + (1+u)*T^2"`.
pub fn parse_series<R: Ring>(ring: &R, text: &str, prec: i64) -> Result<Series<R>> {
    let e = parse_expr(text)?;
    let by_t = e.collect_by("T");
    let low = by_t.keys().next().copied().unwrap_or(0).min(prec);
    let mut coeffs = vec![ring.zero(); (prec - low).max(0) as usize];
    for (exp, c) in by_t {
        if exp < prec {
            coeffs[(exp - low) as usize] = ring.element_from_expr(&c)?;
        }
    }
    Ok(Series::new(ring, low, coeffs, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{parse_ring, ArtinRing, Zmod};
    use proptest::prelude::*;

    fn fp(p: u64) -> Zmod {
        Zmod::prime_field(p).unwrap()
    }

    fn s(r: &Zmod, text: &str, prec: i64) -> Series<Zmod> {
        parse_series(r, text, prec).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let r = fp(7);
        let a = s(&r, "1+T", 5);
        let b = s(&r, "1-T", 5);
        assert_eq!(a.mul(&b), s(&r, "1-T^2", 5));
        let f3 = fp(3);
        let inv = s(&f3, "1+T", 4).inverse().unwrap();
        assert_eq!(inv, s(&f3, "1+2*T+T^2+2*T^3", 4));
        let x = Series::monomial(&r, 1, -3, 10).mul(&Series::monomial(&r, 1, 5, 10));
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.to_literal(), "T^2");
    }

    #[test]
    fn composition_examples() {
        let r = fp(7);
        let f = s(&r, "T^2", 5);
        let g = s(&r, "T+T^2", 5);
        assert_eq!(f.compose(&g).unwrap(), s(&r, "T^2+2*T^3+T^4", 5));
        assert_eq!(g.compose(&Series::t(&r, 5)).unwrap(), g);
        let a = ArtinRing::new(&parse_ring("Fp(5)[u]/(u^2)").unwrap()).unwrap();
        let g = parse_series(&a, "T+u", 6).unwrap();
        let f = Series::t(&a, 6);
        assert_eq!(f.compose(&g).unwrap().to_literal(), "u + T");
        let bad = parse_series(&a, "1+T", 6).unwrap();
        assert!(f.compose(&bad).is_err());
    }

    #[test]
    fn reversion_examples() {
        let r = fp(7);
        let g = s(&r, "T+T^2", 4).reversion().unwrap();
        assert_eq!(g, s(&r, "T-T^2+2*T^3", 4));
        assert_eq!(Series::t(&r, 6).reversion().unwrap(), Series::t(&r, 6));
        let f5 = fp(5);
        assert_eq!(s(&f5, "2*T", 6).reversion().unwrap(), s(&f5, "3*T", 6));
    }

    #[test]
    fn roots_and_derivatives() {
        let f3 = fp(3);
        let r = s(&f3, "1+T^2", 5).mth_root_unit(2).unwrap();
        assert_eq!(r, s(&f3, "1+2*T^2+T^4", 5));
        assert_eq!(r.mul(&r), s(&f3, "1+T^2", 5));
        assert_eq!(Series::one(&f3, 5).mth_root_unit(4).unwrap(), Series::one(&f3, 5));
        assert!(s(&f3, "1+T", 5).mth_root_unit(3).is_err());
        assert!(s(&f3, "T^3", 5).derivative().is_zero());
        let f7 = fp(7);
        assert_eq!(s(&f7, "1+T+T^2", 5).derivative(), s(&f7, "1+2*T", 4));
        let d = Series::monomial(&f7, 1, -2, 5).derivative();
        assert_eq!(d, Series::monomial(&f7, 5, -3, 4));
    }

    #[test]
    fn laurent_literals_round_trip() {
        let r = fp(5);
        let x = s(&r, "1*T^-3 + 2*T^-1", 4);
        assert_eq!(x.valuation(), Some(-3));
        assert_eq!(x.to_literal(), "T^-3 + 2*T^-1");
        assert_eq!(parse_series(&r, &x.to_literal(), 4).unwrap(), x);
    }

    #[test]
    fn laurent_composition_on_units() {
        // T^{-1} ∘ (T + T^2) = T^{-1}(1 + T)^{-1}
        let r = fp(5);
        let f = Series::monomial(&r, 1, -1, 6);
        let g = s(&r, "T+T^2", 8);
        let direct = g.inverse().unwrap();
        let got = f.compose(&g).unwrap();
        assert!(got.agrees_with(&direct));
        assert!(got.prec() >= 5);
    }

    fn unit_linear(p: u64) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0..p, 8).prop_map(move |mut v| {
            v[0] = 0;
            if v[1] == 0 {
                v[1] = 1;
            }
            v
        })
    }

    proptest! {
        #[test]
        fn reversion_inverts(c in unit_linear(5)) {
            let r = fp(5);
            let f = Series::new(&r, 0, c, 8);
            let g = f.reversion().unwrap();
            let t = Series::t(&r, 8);
            prop_assert!(f.compose(&g).unwrap().agrees_with(&t));
            prop_assert!(g.compose(&f).unwrap().agrees_with(&t));
        }

        #[test]
        fn roots_power_back(mut c in prop::collection::vec(0u64..7, 8), m in prop::sample::select(vec![1u64, 2, 3, 4, 5, 6])) {
            let r = fp(7);
            c[0] = 1;
            let x = Series::new(&r, 0, c, 8);
            let root = x.mth_root_unit(m).unwrap();
            prop_assert_eq!(root.pow(m as i64).unwrap().truncate(8), x);
        }

        #[test]
        fn leibniz(a in prop::collection::vec(0u64..5, 8), b in prop::collection::vec(0u64..5, 8)) {
            let r = fp(5);
            let (f, g) = (Series::new(&r, 0, a, 8), Series::new(&r, 0, b, 8));
            let lhs = f.mul(&g).derivative();
            let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn precision_is_monotone(a in unit_linear(3), extra in prop::collection::vec(0u64..3, 8)) {
            let r = fp(3);
            let mut long = a.clone();
            long.extend(extra);
            let short = Series::new(&r, 0, a, 8);
            let long = Series::new(&r, 0, long, 16);
            prop_assert!(short.reversion().unwrap().agrees_with(&long.reversion().unwrap()));
            prop_assert!(short.compose(&short).unwrap().agrees_with(&long.compose(&long).unwrap()));
        }
    }
}
