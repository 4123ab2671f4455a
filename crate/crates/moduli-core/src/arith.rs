//! Small integer helpers shared across the crate: extended gcd, CRT,
//! factorisation by trial division, and 64-bit modular arithmetic for the
//! multi-modular resultant code.

use alloc::vec::Vec;
use num_integer::Integer;

/// Extended gcd on `i128`: returns `(g, x, y)` with `a*x + b*y = g` and
/// `g = gcd(a, b) >= 0`.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

/// Chinese remainder lift: the unique `x mod lcm(m1, m2)` with
/// `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)`, or `None` when the congruences
/// conflict. Moduli must be positive.
pub(crate) fn crt(r1: i128, m1: i128, r2: i128, m2: i128) -> Option<i128> {
    debug_assert!(m1 > 0 && m2 > 0);
    let (g, s, _) = ext_gcd(m1, m2);
    let diff = r2 - r1;
    if diff % g != 0 {
        return None;
    }
    let m2g = m2 / g;
    let lcm = m1 * m2g;
    // x = r1 + m1 * t with t ≡ (diff/g) * s  (mod m2/g)
    let t = ((diff / g) % m2g * (s % m2g)) % m2g;
    Some((r1 + m1 * t).rem_euclid(lcm))
}

/// Distinct prime divisors of `n > 1` by trial division.
pub(crate) fn prime_divisors(n: i64) -> Vec<i64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether `|n|` is squarefree, by trial division.
pub(crate) fn is_squarefree(n: i64) -> bool {
    let mut n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Jacobi symbol `(a / n)` for odd positive `n`, extended by `(a / 1) = 1`.
/// Returns `0` when `gcd(a, n) > 1`.
pub(crate) fn jacobi(a: i64, n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 { sign } else { 0 }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse mod a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for `u64` (the standard 12-base certificate).
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The first `count` primes above `2^62`, for multi-modular reconstruction.
pub(crate) fn primes_above_2_62(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = (1u64 << 62) + 1;
    while out.len() < count {
        if is_prime_u64(candidate) {
            out.push(candidate);
        }
        candidate += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_bezout() {
        for (a, b) in [(240i128, 46), (-240, 46), (0, 7), (12, 0), (-5, -15)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert!(g >= 0);
        }
    }

    #[test]
    fn crt_basic() {
        assert_eq!(crt(2, 3, 3, 5), Some(8));
        assert_eq!(crt(1, 4, 3, 6), Some(9));
        assert_eq!(crt(1, 4, 2, 6), None);
        let x = crt(5, 14, 12, 21).unwrap();
        assert_eq!(x % 14, 5);
        assert_eq!(x % 21, 12);
    }

    #[test]
    fn prime_divisor_lists() {
        assert_eq!(prime_divisors(360), alloc::vec![2, 3, 5]);
        assert_eq!(prime_divisors(97), alloc::vec![97]);
        assert!(is_squarefree(105));
        assert!(!is_squarefree(98));
        assert!(is_squarefree(1));
    }

    #[test]
    fn jacobi_matches_euler_criterion_mod_primes() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23] {
            for a in -30i64..30 {
                let euler = match a.rem_euclid(p) {
                    0 => 0,
                    r => {
                        if (1..p).any(|x| (x * x - r) % p == 0) {
                            1
                        } else {
                            -1
                        }
                    }
                };
                assert_eq!(jacobi(a, p), euler, "a = {a}, p = {p}");
            }
        }
        // Multiplicative in the denominator, and (a / 1) = 1.
        for a in -30i64..30 {
            assert_eq!(jacobi(a, 15), jacobi(a, 3) * jacobi(a, 5), "a = {a}");
            assert_eq!(jacobi(a, 21), jacobi(a, 3) * jacobi(a, 7), "a = {a}");
            assert_eq!(jacobi(a, 1), 1);
        }
        assert_eq!(jacobi(6, 15), 0);
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let slow = |n: u64| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) && n >= 2;
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), slow(n), "n = {n}");
        }
    }

    #[test]
    fn prime_generator_yields_primes() {
        let ps = primes_above_2_62(5);
        assert_eq!(ps.len(), 5);
        for p in ps {
            assert!(p > 1 << 62);
            assert!(is_prime_u64(p));
        }
    }
}
