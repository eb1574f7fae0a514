//! Finite-window linear algebra for `H¹`, `H²` on `E = T^β k[[T]]`.
//!
//! The window `W_M = E / T^{β+M} E` has basis `T^{β+k}`, `k < M`. Operators
//! are lower triangular in this basis since `σ` preserves valuations.

use serde::{Deserialize, Serialize};

use super::{act_with_image, transport_to_different, ThetaElement};
use crate::arith::{ceil_div, floor_div};
use crate::automorphisms::SeriesAutomorphism;
use crate::error::{Error, Result};
use crate::linalg::{kernel, rank_of};
use crate::rings::Zmod;
use crate::series::Series;

type Mat = Vec<Vec<u64>>;

/// Window sizes for the brute-force cohomology: defaults `M = 2β + 2p^n`,
/// giving up past `8β`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_window: Option<usize>,
}

impl PrecisionPolicy {
    fn initial(&self, beta: u64, q: u64) -> usize {
        self.initial_window.unwrap_or((2 * beta + 2 * q) as usize)
    }

    fn max(&self, beta: u64, q: u64) -> usize {
        self.max_window
            .unwrap_or((8 * beta as usize).max(self.initial(beta, q) + q as usize))
    }
}

/// Matrices of `σ`, `δ = σ − 1` and `N = Σ σ^i` on a window of size `size`.
#[derive(Clone, Debug)]
pub struct WindowOperators {
    pub p: u64,
    pub q: u64,
    pub beta: u64,
    pub size: usize,
    pub sigma: Mat,
    pub delta: Mat,
    pub norm: Mat,
    /// Norm series `Y`, known modulo `T^{β+size}` at least.
    pub y: Series<Zmod>,
}

fn mat_mul_lower(a: &Mat, b: &Mat, p: u64) -> Mat {
    let n = a.len();
    let lazy = p < (1 << 26);
    let mut c = vec![vec![0u64; n]; n];
    for r in 0..n {
        let row = &mut c[r];
        for k in 0..=r {
            let x = a[r][k];
            if x == 0 {
                continue;
            }
            for (cc, y) in row[..=k].iter_mut().zip(&b[k][..=k]) {
                if lazy {
                    *cc += x * y;
                } else {
                    *cc = (*cc + x * y) % p;
                }
            }
        }
        for v in row.iter_mut() {
            *v %= p;
        }
    }
    c
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            let mut r = vec![0; n];
            r[i] = 1;
            r
        })
        .collect()
}

fn block(a: &Mat, n: usize) -> Mat {
    a[..n].iter().map(|r| r[..n].to_vec()).collect()
}

fn columns(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|c| (0..n).map(|r| a[r][c]).collect()).collect()
}

/// Coordinates of `f` on `T^β, …, T^{β+n−1}`.
fn window_coords(f: &Series<Zmod>, beta: u64, n: usize) -> Result<Vec<u64>> {
    let top = beta as i64 + n as i64;
    if f.prec() < top {
        return Err(Error::Precondition(format!(
            "series known modulo T^{} but the window needs T^{top}",
            f.prec()
        )));
    }
    if f.valuation().is_some_and(|v| v < beta as i64) {
        return Err(Error::Precondition(format!(
            "element has valuation {:?} < β = {beta}",
            f.valuation()
        )));
    }
    Ok((0..n).map(|k| f.coeff(beta as i64 + k as i64)).collect())
}

/// Builds the window operators of `σ` (of order `q`) on `W_size`; `σ` must be
/// known modulo `T^{β+size}`.
pub fn window_operators(
    sigma: &SeriesAutomorphism<Zmod>,
    q: u64,
    beta: u64,
    size: usize,
) -> Result<WindowOperators> {
    let k = sigma.ring().clone();
    let p = k.p();
    let top = (beta as usize + size) as i64;
    let s = sigma.image();
    let mut pw = s.pow(beta as i64)?;
    let mut cols: Mat = Vec::with_capacity(size);
    for c in 0..size {
        cols.push(window_coords(&pw, beta, size).map_err(|_| {
            Error::Precondition(format!(
                "σ known modulo T^{} is too coarse for a window of size {size} (column {c})",
                s.prec()
            ))
        })?);
        pw = pw.mul_trunc(s, top);
    }
    let sig = columns(&cols);
    let mut delta = sig.clone();
    for (i, row) in delta.iter_mut().enumerate() {
        row[i] = (row[i] + p - 1) % p;
    }
    // N = I + S(I + S(…)) by Horner
    let id = identity(size);
    let mut norm = id.clone();
    for _ in 1..q {
        norm = mat_mul_lower(&sig, &norm, p);
        for (i, row) in norm.iter_mut().enumerate() {
            row[i] = (row[i] + 1) % p;
        }
    }
    let y = sigma.norm_series(q)?;
    if y.prec() < top {
        return Err(Error::Precondition("norm series too coarse for the window".into()));
    }
    Ok(WindowOperators {
        p,
        q,
        beta,
        size,
        sigma: sig,
        delta,
        norm,
        y,
    })
}

impl WindowOperators {
    /// `δ^e` on the full window.
    pub fn delta_power(&self, e: u64) -> Mat {
        let mut acc = identity(self.size);
        for _ in 0..e {
            acc = mat_mul_lower(&self.delta, &acc, self.p);
        }
        acc
    }

    fn projected_rank(&self, vecs: &[Vec<u64>], m: usize) -> usize {
        let proj: Mat = vecs.iter().map(|v| v[..m].to_vec()).collect();
        rank_of(&proj, self.p)
    }

    fn column_space(&self, a: &Mat, m: usize) -> Mat {
        columns(&block(a, m))
    }

    /// `Y^j` (and `Y^j T^i` when `t_multiples`) for `j ≥ from`, projected to `W_m`.
    fn y_span(&self, from: u64, m: usize, t_multiples: bool) -> Result<Mat> {
        let top = self.beta as i64 + m as i64;
        let k = self.y.ring().clone();
        let mut out = Vec::new();
        let mut j = from;
        while ((self.q * j) as i64) < top {
            let yj = self.y.pow(j as i64)?.truncate(top);
            if t_multiples {
                let mut i = 0;
                while (self.q * j) as i64 + i < top {
                    let g = yj.mul(&Series::monomial(&k, 1, i, top));
                    out.push(window_coords(&g, self.beta, m)?);
                    i += 1;
                }
            } else {
                out.push(window_coords(&yj, self.beta, m)?);
            }
            j += 1;
        }
        Ok(out)
    }
}

fn same_span(a: &Mat, b: &Mat, p: u64) -> bool {
    let ra = rank_of(a, p);
    let rb = rank_of(b, p);
    let mut both = a.clone();
    both.extend(b.iter().cloned());
    ra == rb && rank_of(&both, p) == ra
}

fn reading(ky: bool, kt: bool) -> String {
    match (ky, kt) {
        (true, false) => "k[[Y]]",
        (false, true) => "k[[T]]",
        (true, true) => "both",
        (false, false) => "neither",
    }
    .to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForce {
    pub h1: i64,
    pub h2: i64,
    /// Window size `M` at which two consecutive windows agreed.
    pub window: usize,
    /// Size of the larger window the kernels were projected from.
    pub outer_window: usize,
    pub stabilized: bool,
    pub invariants_reading: String,
    pub norm_image_reading: String,
}

struct Kernels {
    ker_norm: Mat,
    ker_delta: Mat,
}

fn dims_at(ops: &WindowOperators, ker: &Kernels, m: usize) -> (i64, i64) {
    let p = ops.p;
    let rank_delta = rank_of(&block(&ops.delta, m), p) as i64;
    let rank_norm = rank_of(&block(&ops.norm, m), p) as i64;
    let h1 = ops.projected_rank(&ker.ker_norm, m) as i64 - rank_delta;
    let h2 = ops.projected_rank(&ker.ker_delta, m) as i64 - rank_norm;
    (h1, h2)
}

/// Brute-force `dim H¹`, `dim H²` for the cyclic group generated by the
/// automorphism that `build(prec)` returns, of order `q`, different exponent `β`.
///
/// True kernels of `N` and `δ` on `E` are approximated by projecting kernels
/// from an outer window of size `M + p^n + 2β + 2p^n`; the quotient by
/// `im δ`, `im N` is taken in `W_M`. Stabilization means agreement at `M` and
/// `M + p^n`.
pub fn h_dims_bruteforce(
    build: impl Fn(i64) -> Result<SeriesAutomorphism<Zmod>>,
    q: u64,
    beta: u64,
    policy: &PrecisionPolicy,
) -> Result<BruteForce> {
    let max = policy.max(beta, q);
    let step = q as usize;
    let mut m = policy.initial(beta, q);
    loop {
        let outer = m + step + 2 * beta as usize + 2 * step;
        let sigma = build((outer as u64 + beta) as i64 + 2)?;
        let ops = window_operators(&sigma, q, beta, outer)?;
        let p = ops.p;
        let ker = Kernels {
            ker_norm: kernel(&ops.norm, outer, p),
            ker_delta: kernel(&ops.delta, outer, p),
        };
        let a = dims_at(&ops, &ker, m);
        let b = dims_at(&ops, &ker, m + step);
        if a == b {
            let proj_inv: Mat = ker.ker_delta.iter().map(|v| v[..m].to_vec()).collect();
            let im_norm = ops.column_space(&ops.norm, m);
            let c_inv = ceil_div(beta as i64, q as i64) as u64;
            let c_norm = floor_div(2 * beta as i64, q as i64) as u64;
            let inv_ky = same_span(&proj_inv, &ops.y_span(c_inv, m, false)?, p);
            let inv_kt = same_span(&proj_inv, &ops.y_span(c_inv, m, true)?, p);
            let norm_ky = same_span(&im_norm, &ops.y_span(c_norm, m, false)?, p);
            let norm_kt = same_span(&im_norm, &ops.y_span(c_norm, m, true)?, p);
            return Ok(BruteForce {
                h1: a.0,
                h2: a.1,
                window: m,
                outer_window: outer,
                stabilized: true,
                invariants_reading: reading(inv_ky, inv_kt),
                norm_image_reading: reading(norm_ky, norm_kt),
            });
        }
        if m + step > max {
            return Err(Error::NotStabilized(format!(
                "window dimensions {a:?} at M = {m} and {b:?} at M = {} disagree; maximum window {max} reached",
                m + step
            )));
        }
        m += step;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassStatus {
    Zero,
    Nonzero,
    NotCocycle,
}

impl ClassStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassStatus::Zero => "zero",
            ClassStatus::Nonzero => "nonzero",
            ClassStatus::NotCocycle => "not_cocycle",
        }
    }
}

/// Class of `x ∈ Θ` in `H¹(⟨σ⟩, Θ)` for `σ` of order `q`: `N x` must vanish,
/// then `x` is transported to `E` and tested against `im δ` in two windows.
pub fn cocycle_class_check(
    build: impl Fn(i64) -> Result<SeriesAutomorphism<Zmod>>,
    q: u64,
    beta: u64,
    x: &ThetaElement<Zmod>,
    policy: &PrecisionPolicy,
) -> Result<ClassStatus> {
    let r = class_rank(build, q, beta, std::slice::from_ref(x), policy)?;
    Ok(if !r.cocycles[0] {
        ClassStatus::NotCocycle
    } else if r.rank == 0 {
        ClassStatus::Zero
    } else {
        ClassStatus::Nonzero
    })
}

/// Span of a family of classes in `H¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRank {
    /// Whether each input is killed by `N`.
    pub cocycles: Vec<bool>,
    /// `dim_k` of the span of the cocycle classes in `H¹`.
    pub rank: usize,
    pub window: usize,
}

/// Rank of the classes of `xs` in `H¹ = ker N / im δ`, computed in the windows
/// `M` and `M + q` and required to agree. Non-cocycles are left out of the span.
pub fn class_rank(
    build: impl Fn(i64) -> Result<SeriesAutomorphism<Zmod>>,
    q: u64,
    beta: u64,
    xs: &[ThetaElement<Zmod>],
    policy: &PrecisionPolicy,
) -> Result<ClassRank> {
    let m = policy.initial(beta, q);
    let windows = [m, m + q as usize];
    let outer = windows[1];
    let prec = (beta as usize + outer + 2) as i64;
    let sigma = build(prec)?;
    let p = sigma.ring().p();
    let images = sigma.power_images(q as usize)?;
    let ops = window_operators(&sigma, q, beta, outer)?;
    let mut cocycles = Vec::with_capacity(xs.len());
    let mut transported = Vec::new();
    for x in xs {
        let x = ThetaElement::new(x.h.truncate(prec));
        let mut nx = x.h.clone();
        for s in images.iter().skip(1) {
            nx = nx.add(&act_with_image(s, &x)?.h);
        }
        cocycles.push(nx.is_zero());
        if nx.is_zero() {
            transported.push(transport_to_different(&ops.y, &x));
        }
    }
    let mut ranks = Vec::new();
    for &w in &windows {
        let mut span = ops.column_space(&ops.delta, w);
        let base = rank_of(&span, p);
        for f in &transported {
            span.push(window_coords(f, beta, w)?);
        }
        ranks.push(rank_of(&span, p) - base);
    }
    if ranks[0] != ranks[1] {
        return Err(Error::NotStabilized(format!(
            "class rank differs between windows {} and {}",
            windows[0], windows[1]
        )));
    }
    Ok(ClassRank {
        cocycles,
        rank: ranks[0],
        window: windows[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{h_dims_formula, sigma0};
    use crate::series::parse_series;

    fn brute(p: u64, m: u64) -> BruteForce {
        let beta = (m + 1) * (p - 1);
        h_dims_bruteforce(|prec| sigma0(p, m, prec), p, beta, &PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn worked_examples() {
        let b = brute(5, 2);
        assert_eq!((b.h1, b.h2), (1, 1));
        let b = brute(3, 1);
        assert_eq!((b.h1, b.h2), (0, 0));
        let b = brute(3, 5);
        assert_eq!((b.h1, b.h2), (4, 4));
        assert_eq!(b.invariants_reading, "k[[Y]]");
        assert_eq!(b.norm_image_reading, "k[[Y]]");
    }

    #[test]
    fn small_grid_matches_formula() {
        for (p, m) in [(2, 1), (2, 3), (3, 2), (5, 1), (5, 3), (7, 2)] {
            let b = brute(p, m);
            let beta = (m + 1) * (p - 1);
            assert_eq!((b.h1, b.h2), h_dims_formula(p, beta), "p={p} m={m}");
        }
    }

    #[test]
    fn delta_nilpotent_and_norm_is_top_power() {
        for (p, m) in [(3, 2), (5, 2)] {
            let beta = (m + 1) * (p - 1);
            let size = (2 * beta + 2 * p) as usize;
            let s = sigma0(p, m, (size as u64 + beta) as i64 + 2).unwrap();
            let ops = window_operators(&s, p, beta, size).unwrap();
            assert_eq!(ops.delta_power(p - 1), ops.norm);
            assert!(ops.delta_power(p).iter().flatten().all(|x| *x == 0));
            assert!(ops.delta_power(p - 1).iter().flatten().any(|x| *x != 0));
        }
    }

    #[test]
    fn coboundaries_are_zero_classes() {
        let (p, m) = (5, 2);
        let beta = 12;
        let s = sigma0(p, m, 80).unwrap();
        let k = s.ring().clone();
        let y = ThetaElement::new(parse_series(&k, "1+3*T+T^4+2*T^9", 80).unwrap());
        let (d, _) = super::super::delta_and_norm(&s, p, &y).unwrap();
        let status = cocycle_class_check(|prec| sigma0(p, m, prec), p, beta, &d, &PrecisionPolicy::default()).unwrap();
        assert_eq!(status, ClassStatus::Zero);
        let t = ThetaElement::new(Series::t(&k, 80));
        let status = cocycle_class_check(|prec| sigma0(p, m, prec), p, beta, &t, &PrecisionPolicy::default()).unwrap();
        assert_eq!(status, ClassStatus::Nonzero);
        let bad = ThetaElement::new(Series::one(&k, 80));
        let status = cocycle_class_check(|prec| sigma0(p, m, prec), p, beta, &bad, &PrecisionPolicy::default()).unwrap();
        assert_eq!(status, ClassStatus::NotCocycle);
    }
}
