//! Order-`p` families `σ_a`, their obstructions across small extensions, and
//! the local and global dimension counts.

use serde::{Deserialize, Serialize};

use crate::arith::{ceil_div, conductor_split, floor_div, is_prime};
use crate::automorphisms::standard_sigma;
use crate::chebyshev::{cheb_polys, MobiusMatrix};
use crate::cohomology::h_dims_formula;
use crate::error::{Error, Result};
use crate::rings::{small_extension, ArtinRing, BaseRing, Relations, Ring, RingDescriptor};
use crate::series::Series;

fn require_order_p_setting(p: u64, m: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 || m % p == 0 {
        return Err(Error::Precondition(format!(
            "conductor m = {m} must be positive and prime to p = {p}"
        )));
    }
    Ok(())
}

/// `Σ_{i<p} a^i`.
pub fn geometric_sum<R: Ring>(ring: &R, a: &R::Elem, p: u64) -> R::Elem {
    let mut acc = ring.zero();
    let mut pw = ring.one();
    for _ in 0..p {
        acc = ring.add(&acc, &pw);
        pw = ring.mul(&pw, a);
    }
    acc
}

/// Precision at which `σ_a^p` is compared with the identity.
pub fn family_prec(p: u64, m: u64) -> i64 {
    (2 * (m + 1) + 2 * p + 4) as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub p: u64,
    pub m: u64,
    pub ring: String,
    pub a: String,
    pub geometric_sum: String,
    pub series_order_p: bool,
    pub sum_vanishes: bool,
}

/// Decides `σ_a^p = Id` by composition and `Σ a^i = 0` by ring arithmetic,
/// and fails when the two disagree.
pub fn order_condition_check<R: Ring>(p: u64, m: u64, ring: &R, a: &R::Elem) -> Result<OrderCheck> {
    require_order_p_setting(p, m)?;
    if m == 1 || p == 2 {
        return Err(Error::Precondition("the sum criterion needs m > 1 and p > 2".into()));
    }
    let prec = family_prec(p, m);
    let sigma = standard_sigma(p, m, ring, a, prec)?;
    let series_order_p = sigma.power(p as i64)?.is_identity();
    let sum = geometric_sum(ring, a, p);
    let sum_vanishes = ring.is_zero(&sum);
    if series_order_p != sum_vanishes {
        return Err(Error::Verification(format!(
            "σ_a^p = Id is {series_order_p} but Σ a^i = 0 is {sum_vanishes} for a = {}",
            ring.format(a)
        )));
    }
    Ok(OrderCheck {
        p,
        m,
        ring: ring.descriptor().to_string(),
        a: ring.format(a),
        geometric_sum: ring.format(&sum),
        series_order_p,
        sum_vanishes,
    })
}

/// `(m + 1)p < p⌊2(m + 1)(p − 1)/p⌋`: the obstruction space is large enough
/// for the obstruction class to be nonzero.
pub fn nontriviality_inequality(p: u64, m: u64) -> bool {
    let lhs = (m + 1) * p;
    let rhs = p * ((2 * (m + 1) * (p - 1)) / p);
    lhs < rhs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub p: u64,
    pub m: u64,
    pub source: String,
    pub target: String,
    pub kernel_generator: String,
    pub a_prime: String,
    pub a: String,
    pub defect: String,
    pub predicted_defect: String,
    /// `Σ a′^i` for `m > 1`, `C_p` from `M_{a′}^p` for `m = 1`.
    pub criterion_value: String,
    pub defect_vanishes: bool,
    pub class_vanishes: bool,
    pub formula_matches: bool,
    /// `m = 1` only: Chebyshev conditions at `a′/2 + 1` and `M_{a′}^p = Id`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chebyshev_vanishes: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix_identity: Option<bool>,
    pub inequality_holds: bool,
}

/// Obstruction to lifting `σ_a` from `A` to `A′` along a small extension,
/// computed from the defect `σ_{a′}^p(T) − T` and compared with the closed forms.
pub fn obstruction_class(
    p: u64,
    m: u64,
    source: &RingDescriptor,
    target: &RingDescriptor,
    a_prime: &[u64],
) -> Result<ObstructionReport> {
    require_order_p_setting(p, m)?;
    if p == 2 {
        return Err(Error::Precondition("obstruction formulas need p > 2".into()));
    }
    let w = small_extension(source, target)?;
    let (a1, a0) = (&w.source, &w.target);
    if a1.base().p() != p {
        return Err(Error::Precondition(format!("{source} does not have residue characteristic {p}")));
    }
    let a = w.apply(a_prime);
    let prec = family_prec(p, m);
    let t_gen = a1.format(&w.generator);

    // σ_a must already have order p over A
    let base_ok = if m > 1 {
        order_condition_check(p, m, a0, &a)?.series_order_p
    } else {
        MobiusMatrix::family(a0, &a).pow(p).is_identity()
    };
    if !base_ok {
        return Err(Error::Precondition(format!(
            "σ_a^p ≠ Id over {target} for a = {}",
            a0.format(&a)
        )));
    }

    let sigma = standard_sigma(p, m, a1, &a_prime.to_vec(), prec)?;
    let defect = sigma.power(p as i64)?.image().sub(&Series::t(a1, prec));
    let in_kernel = defect.terms().all(|(_, c)| a0.is_zero(&w.apply(c)));
    if !in_kernel {
        return Err(Error::Verification("defect does not lie in the kernel of A′ → A".into()));
    }

    let report = |predicted: Series<ArtinRing>,
                  criterion: Vec<u64>,
                  class_vanishes: bool,
                  formula_matches: bool,
                  chebyshev_vanishes: Option<bool>,
                  matrix_identity: Option<bool>| ObstructionReport {
        p,
        m,
        source: source.to_string(),
        target: target.to_string(),
        kernel_generator: t_gen.clone(),
        a_prime: a1.format(&a_prime.to_vec()),
        a: a0.format(&a),
        defect: defect.to_string(),
        predicted_defect: predicted.to_string(),
        criterion_value: a1.format(&criterion),
        defect_vanishes: defect.is_zero(),
        class_vanishes,
        formula_matches,
        chebyshev_vanishes,
        matrix_identity,
        inequality_holds: nontriviality_inequality(p, m),
    };

    if m > 1 {
        let sum = geometric_sum(a1, &a_prime.to_vec(), p);
        let m_inv = a1
            .inv(&a1.from_i64(m as i64))
            .ok_or_else(|| Error::NotAUnit(format!("m = {m}")))?;
        let lead = a1.neg(&a1.mul(&m_inv, &sum));
        let predicted = Series::monomial(a1, lead, (m + 1) as i64, defect.prec());
        let low_terms_match = (0..=(m + 1) as i64).all(|e| defect.coeff(e) == predicted.coeff(e));
        let class_vanishes = a1.is_zero(&sum);
        let formula_matches = low_terms_match && (class_vanishes == defect.is_zero());
        Ok(report(predicted, sum, class_vanishes, formula_matches, None, None))
    } else {
        let mp = MobiusMatrix::family(a1, &a_prime.to_vec()).pow(p);
        let c_big = mp.entries()[2].clone();
        let c_p = w.scalar_multiple_of(&c_big).ok_or_else(|| {
            Error::Verification(format!("C_p = {} is not a multiple of t", a1.format(&c_big)))
        })?;
        let predicted = Series::monomial(a1, a1.neg(&c_big), 2, defect.prec());
        let class_vanishes = c_p == 0;
        let (tp, s) = cheb_polys(p)?;
        let two = a1.from_i64(2);
        let x = a1.add(&a1.div(&a_prime.to_vec(), &two)?, &a1.one());
        let cheb = a1.is_zero(&a1.sub(&tp.eval(a1, &x)?, &a1.one())) && a1.is_zero(&s.eval(a1, &x)?);
        let matrix = mp.is_identity();
        let formula_matches = defect.agrees_with(&predicted) && cheb == class_vanishes && matrix == class_vanishes;
        Ok(report(predicted, c_big, class_vanishes, formula_matches, Some(cheb), Some(matrix)))
    }
}

/// Quotient of `A′` by its last nonzero power of the maximal ideal, for the
/// univariate and `Z/p^n` cases; `None` when there is no canonical choice.
pub fn default_small_quotient(source: &RingDescriptor) -> Option<RingDescriptor> {
    match source {
        RingDescriptor::IntegersModPn { p, n } if *n >= 3 => {
            Some(RingDescriptor::IntegersModPn { p: *p, n: n - 1 })
        }
        RingDescriptor::IntegersModPn { p, n: 2 } => Some(RingDescriptor::PrimeField { p: *p }),
        RingDescriptor::ArtinLocal {
            base: BaseRing { p, n: 1 },
            variables,
            relations,
        } if variables.len() == 1 => {
            let d = match relations {
                Relations::Modulus(f) if f[..f.len() - 1].iter().all(|c| *c == 0) => f.len() - 1,
                Relations::TruncationDegree(d) => *d as usize,
                _ => return None,
            };
            match d {
                0 | 1 => None,
                2 => Some(RingDescriptor::PrimeField { p: *p }),
                _ => {
                    let mut g = vec![0; d - 1];
                    g.push(1);
                    Some(RingDescriptor::ArtinLocal {
                        base: BaseRing { p: *p, n: 1 },
                        variables: variables.clone(),
                        relations: Relations::Modulus(g),
                    })
                }
            }
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrullReport {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub l: u64,
    /// Krull dimension including the `W(k)` direction.
    pub absolute: u64,
    /// `absolute − 1`.
    pub relative: u64,
    /// `m + 2 − ⌊β/p⌋` from the global chain (`p > 2`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chain_value: Option<u64>,
    pub chain_discrepancy: bool,
    pub rigid: bool,
    /// `Some(true)` where complete intersection is known, `None` where open.
    pub complete_intersection: Option<bool>,
    pub notes: Vec<String>,
}

/// Local Krull dimension: `q` (`l ≠ 1`) or `q + 1` (`l = 1`) for `p > 2`,
/// and `(m + 1)/2 + 1` for `p = 2`.
pub fn krull_dim_local(p: u64, m: u64) -> Result<KrullReport> {
    require_order_p_setting(p, m)?;
    let (q, l) = conductor_split(p, m);
    let beta = (m + 1) * (p - 1);
    let h1 = h_dims_formula(p, beta).0;
    let rigid = h1 == 0;
    let mut notes = Vec::new();
    if p == 2 {
        let rel = (m + 1) / 2;
        notes.push("p = 2: power series ring in (m+1)/2 variables over W(k), unobstructed".into());
        return Ok(KrullReport {
            p,
            m,
            q,
            l,
            absolute: rel + 1,
            relative: rel,
            chain_value: None,
            chain_discrepancy: false,
            rigid,
            complete_intersection: Some(true),
            notes,
        });
    }
    let absolute = if l == 1 { q + 1 } else { q };
    let chain = m + 2 - beta / p;
    let chain_discrepancy = chain != absolute;
    if chain_discrepancy {
        notes.push(format!(
            "m + 2 − ⌊β/p⌋ = {chain} differs from the stated value {absolute} (l = {l} ≠ 1)"
        ));
    }
    let complete_intersection = if rigid {
        notes.push("rigid: H¹ = H² = 0".into());
        Some(true)
    } else if m < p - 1 || m == 1 || (p, m) == (5, 2) {
        Some(true)
    } else {
        if m == p - 1 {
            notes.push("complete intersection for m = p − 1 is open".into());
        }
        None
    };
    Ok(KrullReport {
        p,
        m,
        q,
        l,
        absolute,
        relative: absolute - 1,
        chain_value: Some(chain),
        chain_discrepancy,
        rigid,
        complete_intersection,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub m: u64,
    pub q: u64,
    pub l: u64,
    pub beta: u64,
    pub dim_h1: i64,
    pub dim_h2: i64,
    pub krull_local: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub p: u64,
    pub conductors: Vec<u64>,
    pub genus_quotient: u64,
    pub points: Vec<LocalPoint>,
    /// `3g_Σ − 3 + Σ⌈2β_i/p⌉`.
    pub dim_h1_global_formula: i64,
    /// `3g_Σ − 3 + Σ⌊β_i/p⌋`.
    pub n_prime_formula: i64,
    /// `h¹(Σ, T_Σ(−Σ⌊β_i/p⌋ b_i))` computed exactly.
    pub n_prime_exact: i64,
    pub dim_h1_exact: i64,
    /// `Σ(krull_i − 1) + 1 + N′_exact`.
    pub krull_global: i64,
    /// `N − 2` with `N = Σ(m_i + 1)`, for `g_Σ = 0`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub moduli_dim: Option<i64>,
    pub consistency_flags: Vec<String>,
}

/// `h⁰` of a degree-`d` line bundle `L` with `L ≅ Ω^{⊗2}(D)` on a genus-`g` curve.
fn h0_quadratic_twist(g: i64, d: i64) -> i64 {
    let deg = 4 * g - 4 + d;
    match g {
        0 => (deg + 1).max(0),
        // Ω^{⊗2} is trivial on an elliptic curve
        1 if d == 0 => 1,
        1 => deg.max(0),
        _ => deg + 1 - g,
    }
}

/// Local and global tangent dimensions for a `Z/p` cover with the given
/// conductors over a genus-`g_Σ` base, with the Krull bookkeeping.
pub fn global_dim_report(p: u64, conductors: &[u64], g_quotient: u64) -> Result<DimensionReport> {
    if conductors.is_empty() {
        return Err(Error::Precondition("at least one branch point is needed".into()));
    }
    for &m in conductors {
        require_order_p_setting(p, m)?;
    }
    let pi = p as i64;
    let g = g_quotient as i64;
    let mut points = Vec::new();
    for &m in conductors {
        let (q, l) = conductor_split(p, m);
        let beta = (m + 1) * (p - 1);
        let (h1, h2) = h_dims_formula(p, beta);
        points.push(LocalPoint {
            m,
            q,
            l,
            beta,
            dim_h1: h1,
            dim_h2: h2,
            krull_local: krull_dim_local(p, m)?.absolute,
        });
    }
    let sum_ceil2: i64 = points.iter().map(|x| ceil_div(2 * x.beta as i64, pi)).sum();
    let sum_floor: i64 = points.iter().map(|x| floor_div(x.beta as i64, pi)).sum();
    let local_sum: i64 = points.iter().map(|x| x.dim_h1).sum();
    let dim_h1_global_formula = 3 * g - 3 + sum_ceil2;
    let n_prime_formula = 3 * g - 3 + sum_floor;
    let n_prime_exact = h0_quadratic_twist(g, sum_floor);
    let dim_h1_exact = local_sum + n_prime_exact;
    let krull_global = points.iter().map(|x| x.krull_local as i64 - 1).sum::<i64>() + 1 + n_prime_exact;
    let moduli_dim = (g == 0).then(|| conductors.iter().map(|m| *m as i64 + 1).sum::<i64>() - 2);

    let mut flags = Vec::new();
    if n_prime_formula != n_prime_exact {
        flags.push(format!(
            "n_prime: Riemann–Roch value {n_prime_formula} differs from exact h¹ = {n_prime_exact}"
        ));
    }
    if dim_h1_global_formula != dim_h1_exact {
        flags.push(format!(
            "dim_h1_global: closed form {dim_h1_global_formula} differs from local sum + exact N′ = {dim_h1_exact}"
        ));
    }
    if let Some(md) = moduli_dim {
        if md != krull_global {
            flags.push(format!("krull_global: Σ(krull_i − 1) + 1 + N′ = {krull_global} differs from N − 2 = {md}"));
        }
    }
    for x in &points {
        if p > 2 && x.l != 1 {
            flags.push(format!(
                "krull_local(m = {}): stated value {} differs from m + 2 − ⌊β/p⌋ = {}",
                x.m,
                x.krull_local,
                x.q + 1
            ));
        }
    }
    Ok(DimensionReport {
        p,
        conductors: conductors.to_vec(),
        genus_quotient: g_quotient,
        points,
        dim_h1_global_formula,
        n_prime_formula,
        n_prime_exact,
        dim_h1_exact,
        krull_global,
        moduli_dim,
        consistency_flags: flags,
    })
}
