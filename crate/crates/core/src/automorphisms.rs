//! Continuous automorphisms of `A[[T]]` given by the image `s(T)` of `T`,
//! acting by `σ(f) = f ∘ s`.

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::rings::Ring;
use crate::series::Series;

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesAutomorphism<R: Ring> {
    image: Series<R>,
}

/// Serialized form: ring descriptor, sparse image literal, precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismRecord {
    pub ring: String,
    #[serde(rename = "image_of_T")]
    pub image_of_t: String,
    pub prec: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationData {
    pub order: u64,
    /// `i(σ^j) = v_T(σ^j(T) − T)` for `j = 1, …, order − 1`.
    pub breaks: Vec<u64>,
    /// `|G_i|` for `i = 0, 1, …` up to the last nontrivial group.
    pub filtration: Vec<u64>,
    pub conductor: Option<u64>,
    pub beta: u64,
    pub warnings: Vec<String>,
}

/// Default precision for order-`p` work: `max(2β + 2p, 64)`.
pub fn default_prec(p: u64, m: u64) -> i64 {
    let beta = (m + 1) * (p - 1);
    (2 * beta + 2 * p).max(64) as i64
}

impl<R: Ring> SeriesAutomorphism<R> {
    /// Checks that `s(0)` is nilpotent and `s′(0)` a unit.
    pub fn new(image: Series<R>) -> Result<Self> {
        let r = image.ring().clone();
        if !image.is_power_series() || image.prec() < 2 {
            return Err(Error::Precondition(
                "image of T must be a power series known past T^1".into(),
            ));
        }
        let c = image.coeff(0);
        if !r.is_zero(&c) && !r.is_nilpotent(&c) {
            return Err(Error::Precondition(format!(
                "s(0) = {} is not nilpotent",
                r.format(&c)
            )));
        }
        let lin = image.coeff(1);
        if !r.is_unit(&lin) {
            return Err(Error::NotAUnit(format!("s′(0) = {}", r.format(&lin))));
        }
        Ok(SeriesAutomorphism { image })
    }

    pub fn identity(ring: &R, prec: i64) -> Self {
        SeriesAutomorphism {
            image: Series::t(ring, prec),
        }
    }

    pub fn image(&self) -> &Series<R> {
        &self.image
    }

    pub fn ring(&self) -> &R {
        self.image.ring()
    }

    pub fn prec(&self) -> i64 {
        self.image.prec()
    }

    /// `σ(f) = f ∘ s`.
    pub fn apply(&self, f: &Series<R>) -> Result<Series<R>> {
        f.compose(&self.image)
    }

    /// `σ ∘ τ`, whose image of `T` is `t ∘ s`.
    pub fn then(&self, tau: &Self) -> Result<Self> {
        Ok(SeriesAutomorphism {
            image: tau.image.compose(&self.image)?,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(SeriesAutomorphism {
            image: self.image.reversion()?,
        })
    }

    pub fn power(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = SeriesAutomorphism::identity(self.ring(), self.prec());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.then(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Images of `T` under `σ^0, …, σ^{count−1}`.
    pub fn power_images(&self, count: usize) -> Result<Vec<Series<R>>> {
        let mut out = Vec::with_capacity(count);
        let mut cur = Series::t(self.ring(), self.prec());
        for _ in 0..count {
            let next = self.image.compose(&cur)?;
            out.push(cur);
            cur = next;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.image.agrees_with(&Series::t(self.ring(), self.prec()))
    }

    /// Least `e ≥ 1` with `σ^e(T) ≡ T (mod T^prec)`, searched up to `cap`.
    pub fn order(&self, cap: u64) -> Result<Option<u64>> {
        let t = Series::t(self.ring(), self.prec());
        let mut cur = self.image.clone();
        for e in 1..=cap {
            if cur.prec() < 2 {
                return Err(Error::Precondition(format!(
                    "precision exhausted after {e} compositions"
                )));
            }
            if cur.agrees_with(&t) {
                return Ok(Some(e));
            }
            cur = self.image.compose(&cur)?;
        }
        Ok(None)
    }

    /// Conductor `m = v_T(σ(T) − T) − 1`, with a warning when `p | m`.
    pub fn conductor(&self) -> Result<(u64, Option<String>)> {
        let diff = self.image.sub(&Series::t(self.ring(), self.prec()));
        let v = diff
            .valuation()
            .ok_or_else(|| Error::Precondition("σ is the identity: no conductor".into()))?;
        if v < 1 {
            return Err(Error::Precondition("σ(T) − T has a constant term".into()));
        }
        let m = (v - 1) as u64;
        let warning = self.ring().residue_characteristic().and_then(|p| {
            (gcd(m, p) != 1).then(|| format!("conductor {m} is divisible by p = {p}"))
        });
        Ok((m, warning))
    }

    /// Breaks, filtration and different exponent of the cyclic group `⟨σ⟩`.
    pub fn ramification_data(&self, cap: u64) -> Result<RamificationData> {
        let p = self
            .ring()
            .residue_characteristic()
            .ok_or_else(|| Error::Precondition("needs a ring of positive characteristic".into()))?;
        let order = self
            .order(cap)?
            .ok_or_else(|| Error::Precondition(format!("no order ≤ {cap} at precision {}", self.prec())))?;
        let mut q = order;
        while q % p == 0 {
            q /= p;
        }
        if q != 1 {
            return Err(Error::Precondition(format!("order {order} is not a power of {p}")));
        }
        let images = self.power_images(order as usize)?;
        let mut breaks = Vec::new();
        for (j, s) in images.iter().enumerate().skip(1) {
            let d = s.sub(&Series::t(self.ring(), s.prec()));
            let v = d.valuation().ok_or_else(|| {
                Error::Verification(format!("σ^{j} is the identity to precision {}", s.prec()))
            })?;
            breaks.push(v as u64);
        }
        let top = breaks.iter().copied().max().unwrap_or(0);
        let filtration: Vec<u64> = (0..top)
            .map(|i| 1 + breaks.iter().filter(|&&b| b >= i + 1).count() as u64)
            .collect();
        let beta = breaks.iter().sum::<u64>();
        debug_assert_eq!(beta, filtration.iter().map(|g| g - 1).sum::<u64>());
        let mut warnings = Vec::new();
        let conductor = if order == p {
            let m = breaks[0] - 1;
            if gcd(m, p) != 1 {
                warnings.push(format!("conductor {m} is divisible by p = {p}"));
            }
            if beta != (m + 1) * (p - 1) {
                return Err(Error::Verification(format!(
                    "β = {beta} but (m+1)(p−1) = {}",
                    (m + 1) * (p - 1)
                )));
            }
            Some(m)
        } else {
            None
        };
        Ok(RamificationData {
            order,
            breaks,
            filtration,
            conductor,
            beta,
            warnings,
        })
    }

    /// `Y = Π_{i<d} σ^i(T)`, checked to have valuation `d` and to be `σ`-fixed.
    pub fn norm_series(&self, order: u64) -> Result<Series<R>> {
        let images = self.power_images(order as usize)?;
        let mut y = images[0].clone();
        for s in &images[1..] {
            y = y.mul(s);
        }
        if y.valuation() != Some(order as i64) {
            return Err(Error::Verification(format!(
                "v_T(Y) = {:?}, expected {order}",
                y.valuation()
            )));
        }
        if !self.apply(&y)?.agrees_with(&y) {
            return Err(Error::Verification("σ(Y) ≠ Y".into()));
        }
        Ok(y)
    }

    pub fn to_record(&self) -> AutomorphismRecord {
        AutomorphismRecord {
            ring: self.ring().descriptor().to_string(),
            image_of_t: self.image.to_literal(),
            prec: self.prec(),
        }
    }
}

/// Order computed at `prec` and `2·prec`; disagreement is a verification failure.
pub fn certified_order<R: Ring>(
    build: impl Fn(i64) -> Result<SeriesAutomorphism<R>>,
    prec: i64,
    cap: u64,
) -> Result<Option<u64>> {
    let lo = build(prec)?.order(cap)?;
    let hi = build(2 * prec)?.order(cap)?;
    if lo != hi {
        return Err(Error::Verification(format!(
            "order {lo:?} at precision {prec} but {hi:?} at {}",
            2 * prec
        )));
    }
    Ok(lo)
}

/// The family `σ_a`: `T/(a + T^m)^{1/m}` for `m > 1` (`a ∈ 1 + 𝓜_A`) and
/// `(T + a)/(1 + T + a)` for `m = 1` (`a ∈ 𝓜_A`).
///
/// For `m > 1` the map sends `T^{−m}` to `a·T^{−m} + 1`; at `a = 1` it is
/// `T/(1 + T^m)^{1/m}`.
pub fn standard_sigma<R: Ring>(p: u64, m: u64, ring: &R, a: &R::Elem, prec: i64) -> Result<SeriesAutomorphism<R>> {
    if m == 0 {
        return Err(Error::Precondition("conductor m must be positive".into()));
    }
    if m % p == 0 {
        return Err(Error::Precondition(format!(
            "p = {p} divides m = {m}; the exceptional wild case is not handled"
        )));
    }
    if let Some(c) = ring.residue_characteristic() {
        if c != p {
            return Err(Error::Precondition(format!(
                "ring has residue characteristic {c}, not {p}"
            )));
        }
    }
    let in_max_ideal = |x: &R::Elem| ring.is_zero(x) || ring.is_nilpotent(x);
    let image = if m > 1 {
        let a_minus_1 = ring.sub(a, &ring.one());
        if !in_max_ideal(&a_minus_1) {
            return Err(Error::Precondition(format!(
                "a = {} is not in 1 + 𝓜_A",
                ring.format(a)
            )));
        }
        let base = Series::constant(ring, a.clone(), prec)
            .add(&Series::monomial(ring, ring.one(), m as i64, prec));
        let root = base.mth_root_unit(m)?;
        Series::t(ring, prec).mul(&root.inverse()?)
    } else {
        if !in_max_ideal(a) {
            return Err(Error::Precondition(format!(
                "a = {} is not in 𝓜_A",
                ring.format(a)
            )));
        }
        let num = Series::t(ring, prec).add(&Series::constant(ring, a.clone(), prec));
        let den = num.add(&Series::one(ring, prec));
        num.div(&den)?
    };
    SeriesAutomorphism::new(image.truncate(prec))
}
