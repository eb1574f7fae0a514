//! Small integer helpers shared across modules.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

pub fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `m = pq − l` with `l ∈ [1, p−1]`; returns `(q, l)`. Requires `p ∤ m`.
pub fn conductor_split(p: u64, m: u64) -> (u64, u64) {
    let l = (p - m % p) % p;
    debug_assert!(l != 0);
    ((m + l) / p, l)
}

pub fn binomial(n: u64, k: u64) -> num_bigint::BigInt {
    use num_bigint::BigInt;
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_inverses() {
        assert!(is_prime(13) && !is_prime(4) && !is_prime(1));
        assert_eq!(inv_mod(2, 5), Some(3));
        assert_eq!(inv_mod(5, 125), None);
        assert_eq!(inv_mod(7, 125).map(|x| x * 7 % 125), Some(1));
    }

    #[test]
    fn conductor_decomposition() {
        assert_eq!(conductor_split(3, 5), (2, 1));
        assert_eq!(conductor_split(3, 4), (2, 2));
        assert_eq!(conductor_split(5, 3), (1, 2));
        assert_eq!(conductor_split(5, 4), (1, 1));
        assert_eq!(conductor_split(2, 5), (3, 1));
    }

    #[test]
    fn ceil_floor() {
        assert_eq!(ceil_div(12, 5), 3);
        assert_eq!(floor_div(24, 5), 4);
        assert_eq!(ceil_div(-3, 2), -1);
    }
}
