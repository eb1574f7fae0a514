//! `H¹(G, Θ) ≅ ⊕_{j=1}^{p−1} k[[Y]]/(Y^{q+s_j})` for `σ` of order `p` and
//! conductor `m = pq − l`.

use serde::{Deserialize, Serialize};

use super::{h_dims_formula, sigma0};
use crate::arith::{conductor_split, floor_div};
use crate::automorphisms::SeriesAutomorphism;
use crate::error::{Error, Result};
use crate::linalg::solve_in_span;
use crate::rings::{Ring, Zmod};
use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleStructure {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub l: u64,
    pub beta: u64,
    pub xi_valuation: i64,
    /// `γ(j)` for `j = 0, …, p−1`.
    pub gamma: Vec<i64>,
    /// `r_j = v_T(z_j)`.
    pub residues: Vec<u64>,
    pub s_prime: Vec<i64>,
    pub s_double_prime: Vec<i64>,
    /// `s_1, …, s_{p−1}`.
    pub s: Vec<i64>,
    pub w_valuations: Vec<i64>,
    /// `q + s_j`, sorted.
    pub predicted_divisors: Vec<u64>,
    /// Smith form of `δ` on the `w`-basis, sorted.
    pub elementary_divisors: Vec<u64>,
    pub dim_formula: i64,
}

impl ModuleStructure {
    /// Every failed structural check, as text; empty when all hold.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let expected_vals: Vec<i64> = (0..self.p as i64).map(|i| self.beta as i64 + i).collect();
        let mut vals = self.w_valuations.clone();
        vals.sort();
        if vals != expected_vals {
            out.push(format!("w valuations {vals:?} ≠ β..β+p−1"));
        }
        if self.elementary_divisors != self.predicted_divisors {
            out.push(format!(
                "elementary divisors {:?} ≠ predicted {:?}",
                self.elementary_divisors, self.predicted_divisors
            ));
        }
        let sum: i64 = self.elementary_divisors.iter().map(|&e| e as i64).sum();
        if sum != self.dim_formula {
            out.push(format!("Σ divisors = {sum} ≠ dim H¹ = {}", self.dim_formula));
        }
        let last_expected = if self.l == 1 { 0 } else { -1 };
        if self.s.last() != Some(&last_expected) {
            out.push(format!("s_(p−1) = {:?}, expected {last_expected}", self.s.last()));
        }
        if self.elementary_divisors.iter().any(|&e| e > self.q + 1) {
            out.push("a divisor exceeds q+1".into());
        }
        out
    }
}

/// Valuations of the diagonal of a Smith reduction over `k[[Y]]/(Y^K)`;
/// `None` marks a diagonal entry that vanishes to the known precision.
///
/// Pivots are entries of minimal valuation, ties broken by lowest row then column.
pub fn smith_divisors(mut a: Vec<Vec<Series<Zmod>>>) -> Result<Vec<Option<u64>>> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for step in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(step) {
            for (c, x) in row.iter().enumerate().skip(step) {
                if let Some(v) = x.valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r, c)) = best else {
            out.extend((step..n).map(|_| None));
            break;
        };
        a.swap(step, r);
        for row in a.iter_mut() {
            row.swap(step, c);
        }
        let unit_inv = a[step][step].shift(-v).inverse()?;
        for r in step + 1..n {
            if a[r][step].is_zero() {
                continue;
            }
            let f = a[r][step].shift(-v).mul(&unit_inv);
            for c in step..n {
                let t = f.mul(&a[step][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
        for c in step + 1..n {
            if a[step][c].is_zero() {
                continue;
            }
            let f = a[step][c].shift(-v).mul(&unit_inv);
            for r in step..n {
                let t = f.mul(&a[r][step]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
        let known = a[step][step].prec();
        if v >= known {
            return Err(Error::Precondition("pivot beyond the known precision".into()));
        }
        out.push(Some(v as u64));
    }
    Ok(out)
}

/// Expands `f ∈ T^β k[[T]]` as `Σ a_i(Y) w_i`, returning `a_i` mod `Y^{k_y}`.
fn decompose(
    f: &Series<Zmod>,
    beta: i64,
    p: i64,
    k_y: usize,
    yw: &[Vec<Series<Zmod>>],
    w_vals: &[i64],
) -> Result<Vec<Series<Zmod>>> {
    let k = f.ring().clone();
    let limit = beta + p * k_y as i64;
    if f.prec() < limit {
        return Err(Error::Precondition(format!(
            "need δ(w) modulo T^{limit}, have T^{}",
            f.prec()
        )));
    }
    let mut f = f.truncate(limit);
    let mut coeffs = vec![vec![0u64; k_y]; w_vals.len()];
    while let Some(v) = f.valuation() {
        let i = w_vals
            .iter()
            .position(|&wv| wv <= v && (v - wv) % p == 0)
            .ok_or_else(|| Error::Verification(format!("no basis element below T^{v}")))?;
        let e = ((v - w_vals[i]) / p) as usize;
        let basis = &yw[i][e];
        let c = k.div(f.leading().unwrap(), basis.leading().unwrap())?;
        f = f.sub(&basis.scale(&c).truncate(limit));
        coeffs[i][e] = k.add(&coeffs[i][e], &c);
    }
    Ok(coeffs
        .into_iter()
        .map(|c| Series::new(&k, 0, c, k_y as i64))
        .collect())
}

/// `δ²(T^e)` for `e = from, …, from+count−1`, modulo `T^top`.
fn delta_squared_columns(
    sigma: &SeriesAutomorphism<Zmod>,
    from: i64,
    count: usize,
    top: i64,
) -> Result<Vec<Series<Zmod>>> {
    let k = sigma.ring().clone();
    let s1 = sigma.image().truncate(top);
    let s2 = s1.compose(&s1)?.truncate(top);
    let two = k.from_i64(2);
    let mut p1 = s1.pow(from)?.truncate(top);
    let mut p2 = s2.pow(from)?.truncate(top);
    let mut out = Vec::with_capacity(count);
    for e in from..from + count as i64 {
        let te = Series::monomial(&k, 1, e, top);
        out.push(p2.sub(&p1.scale(&two)).add(&te));
        p1 = p1.mul_trunc(&s1, top);
        p2 = p2.mul_trunc(&s2, top);
    }
    Ok(out)
}

/// Searches `ξ = T^v + Σ_{k≥1} c_k T^{v+k}` with `δ²ξ = 0`, `δξ ≠ 0`, trying
/// `v = l, l+p, …`; `ξ` is returned modulo `T^{v+len}`.
fn find_xi(sigma: &SeriesAutomorphism<Zmod>, p: u64, m: u64, l: u64, len: usize) -> Result<Series<Zmod>> {
    let k = sigma.ring().clone();
    for v in (0..3).map(|i| (l + i * p) as i64) {
        let unknowns = len + 2 * m as usize + p as usize;
        let top = v + unknowns as i64 + 2 * m as i64;
        let cols = delta_squared_columns(sigma, v, unknowns, top)?;
        let coords = |s: &Series<Zmod>| -> Vec<u64> { (v..top).map(|e| s.coeff(e)).collect() };
        let rhs: Vec<u64> = coords(&cols[0]).iter().map(|x| k.neg(x)).collect();
        let vecs: Vec<Vec<u64>> = cols[1..].iter().map(coords).collect();
        if let Some(c) = solve_in_span(&vecs, &rhs, p) {
            let mut coeffs = vec![1u64];
            coeffs.extend(c.into_iter().take(len - 1));
            let xi = Series::new(&k, v, coeffs, v + len as i64);
            let dxi = sigma.apply(&xi)?.sub(&xi);
            if !dxi.is_zero() {
                return Ok(xi);
            }
        }
    }
    Err(Error::Precondition(format!(
        "no ξ with δ²ξ = 0 found near valuation {l}"
    )))
}

/// Builds `ξ`, the basis `z_j`, `w_j`, the matrix of `δ` over truncated
/// `k[[Y]]`, and its elementary divisors, for `σ_0` with conductor `m`.
pub fn h1_module_structure(p: u64, m: u64) -> Result<ModuleStructure> {
    Zmod::prime_field(p)?;
    if m == 0 || m % p == 0 {
        return Err(Error::Precondition(format!("need p ∤ m (p = {p}, m = {m})")));
    }
    let (q, l) = conductor_split(p, m);
    let beta = (m + 1) * (p - 1);
    let (pi, qi, li, bi) = (p as i64, q as i64, l as i64, beta as i64);
    let gamma: Vec<i64> = (0..pi).map(|j| j * qi + floor_div(li * (pi - 1 - j), pi)).collect();
    let residues: Vec<u64> = (0..pi).map(|j| ((li * (pi - 1 - j)).rem_euclid(pi)) as u64).collect();
    let s_prime: Vec<i64> = residues.iter().map(|&r| i64::from((r as i64) < li - 1)).collect();
    let s_double_prime: Vec<i64> = (0..pi as usize - 1).map(|j| gamma[j + 1] - gamma[j] - qi).collect();
    let s: Vec<i64> = (0..pi as usize - 1)
        .map(|j| s_prime[j] + s_double_prime[j] - s_prime[j + 1])
        .collect();
    let mut predicted: Vec<u64> = s.iter().map(|sj| (qi + sj) as u64).collect();
    predicted.sort();

    let k_y = (2 * q + 6) as usize;
    let target = bi + pi * k_y as i64;
    let mut len = (target + pi * gamma[p as usize - 1] + 2 * bi + 2 * pi) as usize;
    for _ in 0..4 {
        let prec = (len as i64 + 4 * bi + 4 * pi * qi).max(target + 2);
        let sigma = sigma0(p, m, prec)?;
        let k = sigma.ring().clone();
        let y = sigma.norm_series(p)?;
        let xi = find_xi(&sigma, p, m, l, len)?;
        let xi_pow = xi.pow(pi - 1)?;
        // δ^j(ξ^{p−1}) for j = 0..p−1
        let mut deltas = vec![xi_pow.clone()];
        for _ in 1..p {
            let last = deltas.last().unwrap();
            deltas.push(sigma.apply(last)?.sub(last));
        }
        let mut w = Vec::with_capacity(p as usize);
        for j in 0..p as usize {
            let dj = &deltas[j];
            let expected = pi * gamma[j] + residues[j] as i64;
            if dj.valuation() != Some(expected) {
                return Err(Error::Verification(format!(
                    "v(δ^{j} ξ^(p−1)) = {:?}, expected {expected}",
                    dj.valuation()
                )));
            }
            let e = pi * qi - (li - 1) - qi + s_prime[j] - gamma[j];
            w.push(dj.mul(&y.pow(e)?));
        }
        let w_vals: Vec<i64> = w.iter().map(|x| x.valuation().unwrap_or(i64::MAX)).collect();
        let dw: Vec<Series<Zmod>> = w
            .iter()
            .map(|x| Ok(sigma.apply(x)?.sub(x)))
            .collect::<Result<_>>()?;
        if dw.iter().any(|d| d.prec() < target) || w.iter().any(|x| x.prec() < target) {
            len *= 2;
            continue;
        }
        let y_pows: Vec<Series<Zmod>> = (0..k_y)
            .map(|e| y.pow(e as i64).map(|s| s.truncate(target)))
            .collect::<Result<_>>()?;
        let yw: Vec<Vec<Series<Zmod>>> = w
            .iter()
            .map(|wi| y_pows.iter().map(|ye| ye.mul(wi).truncate(target)).collect())
            .collect();
        let mut sorted_vals = w_vals.clone();
        sorted_vals.sort();
        let elementary_divisors = if sorted_vals == (bi..bi + pi).collect::<Vec<_>>() {
            // column j of the matrix holds the coordinates of δ(w_j)
            let cols: Vec<Vec<Series<Zmod>>> = dw
                .iter()
                .map(|d| decompose(d, bi, pi, k_y, &yw, &w_vals))
                .collect::<Result<_>>()?;
            let rows: Vec<Vec<Series<Zmod>>> = (0..p as usize)
                .map(|i| cols.iter().map(|c| c[i].clone()).collect())
                .collect();
            let mut d: Vec<u64> = smith_divisors(rows)?.into_iter().flatten().collect();
            d.sort();
            d
        } else {
            Vec::new()
        };
        let _ = k;
        return Ok(ModuleStructure {
            p,
            m,
            q,
            l,
            beta,
            xi_valuation: xi.valuation().unwrap_or(0),
            gamma,
            residues,
            s_prime,
            s_double_prime,
            s,
            w_valuations: w_vals,
            predicted_divisors: predicted,
            elementary_divisors,
            dim_formula: h_dims_formula(p, beta).0,
        });
    }
    Err(Error::NotStabilized(
        "could not reach the precision needed for the w-basis".into(),
    ))
}
