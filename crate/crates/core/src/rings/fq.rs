//! Finite fields `F_q = F_p[x]/(f)`.
//!
//! Elements are stored as their canonical index: the coefficient vector
//! `(c_0, ..., c_{n-1})` read as a base-`p` number with `c_0` least significant.
//! Multiplication goes through log/antilog tables when `q <= 2^16` and through
//! polynomial reduction otherwise; both paths are always available.

use crate::error::{Error, Result};

use super::factor::{checked_pow_below, factorize, is_prime, pow_mod};
use super::poly::{self, Poly};
use super::zm::MAX_MODULUS;

const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqOp {
    Add,
    Mul,
    Inv,
}

#[derive(Debug, Clone)]
struct LogTables {
    /// `exp[i] = g^i` for `i in 0..q-1`, doubled in length to skip a reduction.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct FqField {
    p: u64,
    n: u32,
    q: u64,
    modulus: Poly,
    tables: Option<LogTables>,
}

impl FqField {
    /// `F_{p^n}` with the smallest irreducible monic modulus, ordering candidates by
    /// their index (lower coefficients least significant).
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let q = Self::validate_order(p, n)?;
        let base = q; // p^n candidates for the lower coefficients
        let modulus = (0..base)
            .map(|idx| {
                let mut f = digits(idx, p, n);
                f.push(1);
                f
            })
            .find(|f| poly::is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        Ok(Self::build(p, n, q, modulus))
    }

    /// `F_p[x]/(poly)` for a user-supplied monic irreducible `poly`.
    pub fn with_modulus(p: u64, poly: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = poly.len().saturating_sub(1) as u32;
        if n == 0 || !poly::is_irreducible(poly, p) {
            return Err(Error::NotIrreducible(poly.to_vec()));
        }
        let q = Self::validate_order(p, n)?;
        Ok(Self::build(p, n, q, poly.to_vec()))
    }

    fn validate_order(p: u64, n: u32) -> Result<u64> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::Precondition("extension degree must be >= 1".into()));
        }
        checked_pow_below(p, n, MAX_MODULUS).ok_or(Error::InvalidModulus(u64::MAX))
    }

    fn build(p: u64, n: u32, q: u64, modulus: Poly) -> Self {
        let mut field = FqField {
            p,
            n,
            q,
            modulus,
            tables: None,
        };
        if n > 1 && q <= TABLE_LIMIT {
            field.tables = Some(field.log_tables());
        }
        field
    }

    fn log_tables(&self) -> LogTables {
        let order = self.q - 1;
        let prime_divisors: Vec<u64> = factorize(order.max(2))
            .map(|f| f.factors.iter().map(|&(l, _)| l).collect())
            .unwrap_or_default();
        let is_generator = |g: u64| {
            prime_divisors
                .iter()
                .all(|&l| !order.is_multiple_of(l) || self.pow_slow(g, order / l) != 1)
        };
        let g = (2..self.q).find(|&g| is_generator(g)).unwrap_or(1);
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u64;
        for i in 0..order {
            exp.push(x as u32);
            log[x as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        exp.extend_from_within(..);
        LogTables { exp, log }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Modulus polynomial, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn check(&self, a: u64) -> Result<u64> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::OutOfRange {
                value: a,
                bound: self.q,
            })
        }
    }

    pub fn to_coeffs(&self, a: u64) -> Vec<u64> {
        digits(a, self.p, self.n)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.n == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        if self.n == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        self.digitwise(a, 0, |x, _| (self.p - x) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.n == 1 {
            return a * b % self.p;
        }
        match &self.tables {
            Some(t) => {
                let i = t.log[a as usize] as usize + t.log[b as usize] as usize;
                t.exp[i] as u64
            }
            None => self.mul_slow(a, b),
        }
    }

    /// Multiplication by polynomial arithmetic and reduction; no tables.
    pub fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let prod = poly::mul_mod(
            &self.to_coeffs(a),
            &self.to_coeffs(b),
            &self.modulus,
            self.p,
        );
        self.from_coeffs(&prod)
    }

    fn pow_slow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if self.n == 1 {
            return Some(pow_mod(a, self.p - 2, self.p));
        }
        Some(match &self.tables {
            Some(t) => {
                let order = (self.q - 1) as usize;
                t.exp[(order - t.log[a as usize] as usize) % order] as u64
            }
            None => self.pow_slow(a, self.q - 2),
        })
    }

    /// Range-checked field operation; `b` is ignored for `Inv`.
    pub fn arith(&self, op: FqOp, a: u64, b: u64) -> Result<u64> {
        self.check(a)?;
        if op != FqOp::Inv {
            self.check(b)?;
        }
        match op {
            FqOp::Add => Ok(self.add(a, b)),
            FqOp::Mul => Ok(self.mul(a, b)),
            FqOp::Inv => self.inv(a).ok_or(Error::DivisionByZero),
        }
    }

    fn digitwise(&self, mut a: u64, mut b: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += f(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }
}

fn digits(mut idx: u64, p: u64, n: u32) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}
