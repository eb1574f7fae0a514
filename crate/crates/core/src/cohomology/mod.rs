//! The `G`-module `Θ = k[[T]] d/dT` for `G = ⟨σ⟩` cyclic of order `p^n`, and
//! its transport to the different ideal `E = T^β k[[T]]`.

mod structure;
mod window;

use serde::{Deserialize, Serialize};

pub use structure::{h1_module_structure, smith_divisors, ModuleStructure};
pub use window::{
    class_rank, cocycle_class_check, h_dims_bruteforce, window_operators, BruteForce, ClassRank, ClassStatus,
    PrecisionPolicy, WindowOperators,
};

use crate::arith::{ceil_div, floor_div};
use crate::automorphisms::{standard_sigma, SeriesAutomorphism};
use crate::error::{Error, Result};
use crate::rings::{Ring, Zmod};
use crate::series::Series;

/// `h d/dT`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaElement<R: Ring> {
    pub h: Series<R>,
}

impl<R: Ring> ThetaElement<R> {
    pub fn new(h: Series<R>) -> Self {
        ThetaElement { h }
    }
}

/// `σ^i · (h d/dT) = h(σ^i(T)) · (dσ^i(T)/dT)^{−1} d/dT`.
pub fn theta_action<R: Ring>(
    sigma: &SeriesAutomorphism<R>,
    i: i64,
    x: &ThetaElement<R>,
) -> Result<ThetaElement<R>> {
    if i == 0 {
        return Ok(x.clone());
    }
    let si = sigma.power(i)?;
    act_with_image(si.image(), x)
}

fn act_with_image<R: Ring>(s: &Series<R>, x: &ThetaElement<R>) -> Result<ThetaElement<R>> {
    let ds = s.derivative();
    let moved = x.h.compose(s)?;
    let h = moved
        .div(&ds)
        .map_err(|e| Error::Verification(format!("dσ^i(T)/dT is not invertible: {e}")))?;
    Ok(ThetaElement { h })
}

/// `(δx, Nx)` with `δx = σ·x − x` and `Nx = Σ_{i<order} σ^i·x`.
pub fn delta_and_norm<R: Ring>(
    sigma: &SeriesAutomorphism<R>,
    order: u64,
    x: &ThetaElement<R>,
) -> Result<(ThetaElement<R>, ThetaElement<R>)> {
    let images = sigma.power_images(order as usize)?;
    let mut norm = x.h.clone();
    let mut first = None;
    for s in images.iter().skip(1) {
        let acted = act_with_image(s, x)?;
        if first.is_none() {
            first = Some(acted.h.clone());
        }
        norm = norm.add(&acted.h);
    }
    let delta = match first {
        Some(f) => f.sub(&x.h),
        None => Series::zero(x.h.ring(), x.h.prec()),
    };
    Ok((ThetaElement { h: delta }, ThetaElement { h: norm }))
}

/// `h d/dT ↦ h · dY/dT`, landing in `T^β k[[T]]`.
pub fn transport_to_different<R: Ring>(y: &Series<R>, x: &ThetaElement<R>) -> Series<R> {
    x.h.mul(&y.derivative())
}

/// `dim H¹ = dim H² = ⌊2β/p^n⌋ − ⌈β/p^n⌉`.
pub fn h_dims_formula(p_power: u64, beta: u64) -> (i64, i64) {
    let q = p_power as i64;
    let b = beta as i64;
    let d = floor_div(2 * b, q) - ceil_div(b, q);
    (d, d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub p: u64,
    pub p_power: u64,
    pub m: u64,
    pub beta: u64,
    /// Brute-force values over the stabilized window.
    pub dim_h1: i64,
    pub dim_h2: i64,
    pub dim_h1_formula: i64,
    pub dim_h2_formula: i64,
    pub elementary_divisors: Vec<u64>,
    /// Window size `M` at which the dimensions stabilized.
    pub precision_used: u64,
    pub stabilized: bool,
    /// Which reading of the ideals `E ∩ k[[Y]]`, `N(E)` the window data support.
    pub invariants_reading: String,
    pub norm_image_reading: String,
}

/// The order-`p` automorphism `σ_0` of conductor `m` over `F_p`:
/// `T/(1 + T^m)^{1/m}` for `m > 1`, `T/(1 + T)` for `m = 1`.
pub fn sigma0(p: u64, m: u64, prec: i64) -> Result<SeriesAutomorphism<Zmod>> {
    let k = Zmod::prime_field(p)?;
    let a = if m == 1 { k.zero() } else { k.one() };
    standard_sigma(p, m, &k, &a, prec)
}

/// Brute-force and closed-form cohomology of `⟨σ_0⟩` with conductor `m`;
/// with `structure` set the elementary divisors are filled in as well.
pub fn cohomology_report(p: u64, m: u64, policy: &PrecisionPolicy, structure: bool) -> Result<CohomologyReport> {
    Zmod::prime_field(p)?;
    if m == 0 || m % p == 0 {
        return Err(Error::Precondition(format!("need m ≥ 1 with p ∤ m (p = {p}, m = {m})")));
    }
    let beta = (m + 1) * (p - 1);
    let bf = h_dims_bruteforce(|prec| sigma0(p, m, prec), p, beta, policy)?;
    let (f1, f2) = h_dims_formula(p, beta);
    let elementary_divisors = if structure {
        h1_module_structure(p, m)?.elementary_divisors
    } else {
        Vec::new()
    };
    Ok(CohomologyReport {
        p,
        p_power: p,
        m,
        beta,
        dim_h1: bf.h1,
        dim_h2: bf.h2,
        dim_h1_formula: f1,
        dim_h2_formula: f2,
        elementary_divisors,
        precision_used: bf.window as u64,
        stabilized: bf.stabilized,
        invariants_reading: bf.invariants_reading,
        norm_image_reading: bf.norm_image_reading,
    })
}

/// Class of `T·d/dT` (`m > 1`) or `1·d/dT` (`m = 1`) in `H¹` for `σ_0`.
pub fn distinguished_class(p: u64, m: u64, policy: &PrecisionPolicy) -> Result<ClassStatus> {
    let k = Zmod::prime_field(p)?;
    if m == 0 || m % p == 0 {
        return Err(Error::Precondition(format!("need m ≥ 1 with p ∤ m (p = {p}, m = {m})")));
    }
    let beta = (m + 1) * (p - 1);
    let prec = (16 * beta + 8 * p) as i64;
    let h = if m == 1 { Series::one(&k, prec) } else { Series::t(&k, prec) };
    cocycle_class_check(|n| sigma0(p, m, n), p, beta, &ThetaElement::new(h), policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_series;

    #[test]
    fn distinguished_classes() {
        let pol = PrecisionPolicy::default();
        assert_eq!(distinguished_class(5, 2, &pol).unwrap(), ClassStatus::Nonzero);
        assert_eq!(distinguished_class(5, 1, &pol).unwrap(), ClassStatus::Nonzero);
        // N(d/dT) = (Σ i²)T² for m = 1, nonzero only when p = 3
        assert_eq!(distinguished_class(3, 1, &pol).unwrap(), ClassStatus::NotCocycle);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(h_dims_formula(5, 12), (1, 1));
        assert_eq!(h_dims_formula(3, 4), (0, 0));
        for m in [1u64, 3, 5, 7, 9] {
            let d = ((m + 1) / 2) as i64;
            assert_eq!(h_dims_formula(2, m + 1), (d, d));
        }
    }

    #[test]
    fn action_basics() {
        let s = sigma0(5, 2, 40).unwrap();
        let k = s.ring().clone();
        let x = ThetaElement::new(parse_series(&k, "T", 40).unwrap());
        assert_eq!(theta_action(&s, 0, &x).unwrap(), x);
        // T d/dT is killed by N for m > 1
        let (_, n) = delta_and_norm(&s, 5, &x).unwrap();
        assert!(n.h.is_zero());
        // 1·d/dT is killed by N for m = 1
        let s1 = sigma0(5, 1, 40).unwrap();
        let one = ThetaElement::new(Series::one(&k, 40));
        let (_, n) = delta_and_norm(&s1, 5, &one).unwrap();
        assert!(n.h.is_zero());
    }

    #[test]
    fn transport_valuation_p3_m2() {
        let s = sigma0(3, 2, 40).unwrap();
        let y = s.norm_series(3).unwrap();
        let k = s.ring().clone();
        let x = ThetaElement::new(Series::t(&k, 40));
        assert_eq!(transport_to_different(&y, &x).valuation(), Some(7));
        assert!(transport_to_different(&y, &ThetaElement::new(Series::zero(&k, 40))).is_zero());
    }

    #[test]
    fn transport_is_equivariant() {
        let s = sigma0(5, 3, 60).unwrap();
        let y = s.norm_series(5).unwrap();
        let k = s.ring().clone();
        for text in ["1+2*T+T^4", "3*T^2+T^7", "T^3+4*T^5+2*T^11"] {
            let x = ThetaElement::new(parse_series(&k, text, 60).unwrap());
            let lhs = transport_to_different(&y, &theta_action(&s, 1, &x).unwrap());
            let rhs = s.apply(&transport_to_different(&y, &x)).unwrap();
            assert!(lhs.agrees_with(&rhs), "{text}");
            assert!(lhs.prec() >= 40);
        }
    }

    #[test]
    fn norm_kills_coboundaries() {
        let s = sigma0(3, 4, 60).unwrap();
        let k = s.ring().clone();
        let x = ThetaElement::new(parse_series(&k, "1+T^2+2*T^5", 60).unwrap());
        let (d, _) = delta_and_norm(&s, 3, &x).unwrap();
        let (_, nd) = delta_and_norm(&s, 3, &d).unwrap();
        assert!(nd.h.is_zero());
    }
}
