//! Integer factorization and small number-theory helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime factorization `m = p_1^r_1 ... p_s^r_s` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub m: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// The prime-power moduli `p_i^r_i`, in factor order.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, r)| p.pow(r)).collect()
    }
}

/// Factor `2 <= m < 2^63` by trial division.
pub fn factorize(m: u64) -> Result<Factorization> {
    if !(2..1u64 << 63).contains(&m) {
        return Err(Error::InvalidModulus(m));
    }
    let mut rest = m;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut r = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            r += 1;
        }
        if r > 0 {
            factors.push((p, r));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut d = 5u64;
    while d.saturating_mul(d) <= rest {
        push(d, &mut rest);
        push(d + 2, &mut rest);
        d += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { m, factors })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Returns `(p, n)` with `q = p^n` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q).ok()?;
    match f.factors.as_slice() {
        [(p, n)] => Some((*p, *n)),
        _ => None,
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = base as u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// `base^exp`, or `None` on overflow past `limit`.
pub(crate) fn checked_pow_below(base: u64, exp: u32, limit: u64) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc >= limit {
            return None;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(7).unwrap().factors, vec![(7, 1)]);
        assert_eq!(
            factorize(360).unwrap().factors,
            vec![(2, 3), (3, 2), (5, 1)]
        );
        assert_eq!(factorize(97).unwrap().factors, vec![(97, 1)]);
    }

    #[test]
    fn factorize_rejects_small() {
        assert_eq!(factorize(1), Err(Error::InvalidModulus(1)));
        assert_eq!(factorize(0), Err(Error::InvalidModulus(0)));
        assert!(factorize(1 << 63).is_err());
    }

    #[test]
    fn factorization_invariants_up_to_5000() {
        for m in 2..5000u64 {
            let f = factorize(m).unwrap();
            let prod: u64 = f.factors.iter().map(|&(p, r)| p.pow(r)).product();
            assert_eq!(prod, m);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors.iter().all(|&(p, r)| is_prime(p) && r >= 1));
        }
    }

    #[test]
    fn large_semiprime() {
        let m = 2_147_483_647u64 * 65_537;
        assert_eq!(
            factorize(m).unwrap().factors,
            vec![(65_537, 1), (2_147_483_647, 1)]
        );
    }

    #[test]
    fn inverse_and_power() {
        assert_eq!(inv_mod(5, 12), Some(5));
        assert_eq!(inv_mod(8, 12), None);
        assert_eq!(pow_mod(3, 4, 7), 81 % 7);
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
    }
}
