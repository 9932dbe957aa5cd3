//! Brute-force reference implementations for small rings. Everything here is
//! written from the definitions, independently of the library: element
//! arithmetic by hand, determinants by the Leibniz formula, invertibility as
//! "determinant is a unit", laws by exhaustive enumeration.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

/// A small commutative ring on `0..size`, indexed like the library: for local
/// rings `a + q * j` with `a` the residue digit.
pub trait OracleRing: Sync {
    fn size(&self) -> u64;
    fn add(&self, x: u64, y: u64) -> u64;
    fn mul(&self, x: u64, y: u64) -> u64;
    fn neg(&self, x: u64) -> u64;
    fn is_unit(&self, x: u64) -> bool;
}

pub struct Mod(pub u64);

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl OracleRing for Mod {
    fn size(&self) -> u64 {
        self.0
    }
    fn add(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.0
    }
    fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.0
    }
    fn neg(&self, x: u64) -> u64 {
        (self.0 - x) % self.0
    }
    fn is_unit(&self, x: u64) -> bool {
        gcd(x, self.0) == 1
    }
}

/// `F_4 = F_2[x]/(x^2 + x + 1)`, element `a0 + 2 a1`.
pub struct F4;

impl OracleRing for F4 {
    fn size(&self) -> u64 {
        4
    }
    fn add(&self, x: u64, y: u64) -> u64 {
        x ^ y
    }
    fn mul(&self, x: u64, y: u64) -> u64 {
        let (a0, a1, b0, b1) = (x & 1, x >> 1, y & 1, y >> 1);
        // (a0 + a1 x)(b0 + b1 x), x^2 = x + 1
        let c0 = a0 * b0 + a1 * b1;
        let c1 = a0 * b1 + a1 * b0 + a1 * b1;
        (c0 % 2) | (c1 % 2) << 1
    }
    fn neg(&self, x: u64) -> u64 {
        x
    }
    fn is_unit(&self, x: u64) -> bool {
        x != 0
    }
}

/// `F_2[t]/(t^2)`, element `a + 2 b` for `a + b t`.
pub struct DualF2;

impl OracleRing for DualF2 {
    fn size(&self) -> u64 {
        4
    }
    fn add(&self, x: u64, y: u64) -> u64 {
        x ^ y
    }
    fn mul(&self, x: u64, y: u64) -> u64 {
        let (a, b, c, d) = (x & 1, x >> 1, y & 1, y >> 1);
        (a * c) | ((a * d + b * c) % 2) << 1
    }
    fn neg(&self, x: u64) -> u64 {
        x
    }
    fn is_unit(&self, x: u64) -> bool {
        x & 1 == 1
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // (permutation, is_odd), Heap's algorithm
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    out.push((a.clone(), odd));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            odd = !odd;
            out.push((a.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Leibniz determinant of a row-major `n x n` matrix.
pub fn det<R: OracleRing + ?Sized>(
    ring: &R,
    n: usize,
    m: &[u64],
    perms: &[(Vec<usize>, bool)],
) -> u64 {
    let mut acc = 0;
    for (perm, odd) in perms {
        let mut term = 1 % ring.size();
        for (i, &j) in perm.iter().enumerate() {
            term = ring.mul(term, m[i * n + j]);
        }
        acc = ring.add(acc, if *odd { ring.neg(term) } else { term });
    }
    acc
}

/// Every invertible `n x n` matrix, in lexicographic order of entries.
pub fn invertibles<R: OracleRing + ?Sized>(ring: &R, n: usize) -> Vec<Vec<u64>> {
    let q = ring.size();
    let total = q.pow((n * n) as u32);
    let perms = permutations(n);
    let mut out = Vec::new();
    let mut m = vec![0u64; n * n];
    for idx in 0..total {
        let mut x = idx;
        for slot in m.iter_mut().rev() {
            *slot = x % q;
            x /= q;
        }
        if ring.is_unit(det(ring, n, &m, &perms)) {
            out.push(m.clone());
        }
    }
    out
}

pub fn corner(m: &[u64], n: usize, s: usize) -> Vec<u64> {
    (0..s).flat_map(|i| m[i * n..i * n + s].to_vec()).collect()
}

/// Number of invertible `n x n` matrices with each upper-left `s x s` corner.
pub fn fiber_counts<R: OracleRing + ?Sized>(
    ring: &R,
    n: usize,
    s: usize,
) -> BTreeMap<Vec<u64>, u64> {
    let mut out = BTreeMap::new();
    for m in invertibles(ring, n) {
        *out.entry(corner(&m, n, s)).or_insert(0) += 1;
    }
    out
}

/// Haar law of the corner.
pub fn corner_law<R: OracleRing + ?Sized>(
    ring: &R,
    n: usize,
    s: usize,
) -> BTreeMap<Vec<u64>, BigRational> {
    let counts = fiber_counts(ring, n, s);
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(k, c)| (k, BigRational::new(BigInt::from(c), BigInt::from(total))))
        .collect()
}

/// Every `s x s` corner over a ring of `q` elements, lexicographically.
pub fn all_corners(q: u64, s: usize) -> Vec<Vec<u64>> {
    let total = q.pow((s * s) as u32);
    (0..total)
        .map(|idx| {
            let mut x = idx;
            let mut m = vec![0u64; s * s];
            for slot in m.iter_mut().rev() {
                *slot = x % q;
                x /= q;
            }
            m
        })
        .collect()
}

/// Exact TV distance of a law on `M_s` to uniform.
pub fn tv_to_uniform(law: &BTreeMap<Vec<u64>, BigRational>, q: u64, s: usize) -> BigRational {
    let cells = BigInt::from(q).pow((s * s) as u32);
    let u = BigRational::new(BigInt::from(1), cells.clone());
    let mut sum = BigRational::from_integer(BigInt::from(0));
    for p in law.values() {
        let d = p - &u;
        sum += if d < BigRational::from_integer(0.into()) {
            -d
        } else {
            d
        };
    }
    let missing = cells - BigInt::from(law.len());
    sum += &u * BigRational::from_integer(missing);
    sum / BigRational::from_integer(BigInt::from(2))
}

/// Leibniz determinant over `Z_m`.
pub fn det_mod(m: u64, n: usize, entries: &[u64]) -> u64 {
    det(&Mod(m), n, entries, &permutations(n))
}
