//! Dense linear algebra over `F_p`.

use crate::arith::inv_mod;

/// Row-reduces `rows` in place to reduced echelon form; returns pivot columns.
pub fn row_reduce(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] % p != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c] % p, p).unwrap();
        for x in rows[r].iter_mut() {
            *x = *x % p * inv % p;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c] % p;
            if f == 0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = (*x % p + p * p - f * y % p) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank_mod_p(rows: &mut Vec<Vec<u64>>, p: u64) -> usize {
    row_reduce(rows, p).len()
}

/// Rank of a list of vectors (not consumed).
pub fn rank_of(vecs: &[Vec<u64>], p: u64) -> usize {
    rank_mod_p(&mut vecs.to_vec(), p)
}

/// Basis of `{x : A x = 0}` where `a` is given as rows (`m × n`).
pub fn kernel(a: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut rows = a.to_vec();
    let pivots = if rows.is_empty() { Vec::new() } else { row_reduce(&mut rows, p) };
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = (p - row[f] % p) % p;
            }
            v
        })
        .collect()
}

/// `x` with `Σ x_i v_i = target`, or `None` when `target` is outside the span.
pub fn solve_in_span(vecs: &[Vec<u64>], target: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = vecs.len();
    let dim = target.len();
    // augmented system: columns are the vectors, last column the target
    let mut rows: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut r: Vec<u64> = vecs.iter().map(|v| v[i] % p).collect();
            r.push(target[i] % p);
            r
        })
        .collect();
    let pivots = row_reduce(&mut rows, p);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![0u64; n];
    for (row, &pc) in rows.iter().zip(&pivots) {
        x[pc] = row[n];
    }
    Some(x)
}

pub fn in_span(vecs: &[Vec<u64>], target: &[u64], p: u64) -> bool {
    target.iter().all(|x| x % p == 0) || solve_in_span(vecs, target, p).is_some()
}

/// `y = A x` with `a` given as columns (`a[j]` is the image of basis vector `j`).
pub fn apply_columns(cols: &[Vec<u64>], x: &[u64], p: u64) -> Vec<u64> {
    let dim = cols.first().map_or(0, |c| c.len());
    let mut y = vec![0u64; dim];
    for (c, &xj) in cols.iter().zip(x) {
        if xj % p == 0 {
            continue;
        }
        for (yi, ci) in y.iter_mut().zip(c) {
            *yi = (*yi + xj % p * ci) % p;
        }
    }
    y
}

/// Transposes a column list into a row list.
pub fn columns_to_rows(cols: &[Vec<u64>], nrows: usize) -> Vec<Vec<u64>> {
    (0..nrows)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_system() {
        let rows = vec![vec![1, 2, 3], vec![0, 1, 4]];
        assert_eq!(rank_of(&rows, 5), 2);
        let k = kernel(&rows, 3, 5);
        assert_eq!(k.len(), 1);
        for r in &rows {
            assert_eq!(r.iter().zip(&k[0]).map(|(a, b)| a * b).sum::<u64>() % 5, 0);
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(m in prop::collection::vec(prop::collection::vec(0u64..7, 5), 1..6)) {
            let r = rank_of(&m, 7);
            let k = kernel(&m, 5, 7);
            prop_assert_eq!(r + k.len(), 5);
            for v in &k {
                for row in &m {
                    prop_assert_eq!(row.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % 7, 0);
                }
            }
        }

        #[test]
        fn solved_combinations_reproduce_target(vs in prop::collection::vec(prop::collection::vec(0u64..3, 4), 1..5), cs in prop::collection::vec(0u64..3, 5)) {
            let target = apply_columns(&vs, &cs[..vs.len()], 3);
            let x = solve_in_span(&vs, &target, 3).unwrap();
            prop_assert_eq!(apply_columns(&vs, &x, 3), target);
        }
    }
}
