use crate::error::{Error, Result};

use super::factor::{factorize, gcd, inv_mod, Factorization};

/// Upper bound (exclusive) on moduli used for arithmetic; keeps products in 64 bits.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZmOp {
    Add,
    Mul,
    Neg,
}

/// The ring `Z/mZ`, elements canonical in `[0, m)`.
#[derive(Debug, Clone)]
pub struct ZmRing {
    modulus: u64,
    factorization: Factorization,
    /// Idempotents `e_i` with `e_i = 1 mod p_i^r_i` and `0` mod the other components.
    crt_basis: Vec<u64>,
}

impl ZmRing {
    pub fn new(m: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&m) {
            return Err(Error::InvalidModulus(m));
        }
        let factorization = factorize(m)?;
        let crt_basis = factorization
            .prime_powers()
            .into_iter()
            .map(|pr| {
                let cofactor = m / pr;
                // cofactor is coprime to pr by construction
                let inv = inv_mod(cofactor % pr, pr).unwrap_or(0);
                cofactor * inv % m
            })
            .collect();
        Ok(ZmRing {
            modulus: m,
            factorization,
            crt_basis,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn is_field(&self) -> bool {
        self.factorization.factors == [(self.modulus, 1)]
    }

    pub fn check(&self, x: u64) -> Result<u64> {
        if x < self.modulus {
            Ok(x)
        } else {
            Err(Error::OutOfRange {
                value: x,
                bound: self.modulus,
            })
        }
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.modulus - x
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.modulus
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        gcd(x, self.modulus) == 1
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        inv_mod(x, self.modulus)
    }

    /// Range-checked ring operation; `y` is ignored for `Neg`.
    pub fn arith(&self, op: ZmOp, x: u64, y: u64) -> Result<u64> {
        self.check(x)?;
        if op != ZmOp::Neg {
            self.check(y)?;
        }
        Ok(match op {
            ZmOp::Add => self.add(x, y),
            ZmOp::Mul => self.mul(x, y),
            ZmOp::Neg => self.neg(x),
        })
    }

    pub fn checked_is_unit(&self, x: u64) -> Result<bool> {
        self.check(x).map(|x| self.is_unit(x))
    }

    /// Component `i` is `x mod p_i^r_i`.
    pub fn crt_split(&self, x: u64) -> Result<Vec<u64>> {
        self.check(x)?;
        Ok(self
            .factorization
            .prime_powers()
            .into_iter()
            .map(|pr| x % pr)
            .collect())
    }

    /// Inverse of [`ZmRing::crt_split`].
    pub fn crt_combine(&self, components: &[u64]) -> Result<u64> {
        let moduli = self.factorization.prime_powers();
        if components.len() != moduli.len() {
            return Err(Error::Shape(format!(
                "expected {} CRT components, got {}",
                moduli.len(),
                components.len()
            )));
        }
        let mut acc = 0;
        for ((&c, &pr), &e) in components.iter().zip(&moduli).zip(&self.crt_basis) {
            if c >= pr {
                return Err(Error::OutOfRange {
                    value: c,
                    bound: pr,
                });
            }
            acc = self.add(acc, self.mul(c, e));
        }
        Ok(acc)
    }
}

/// The reduction `Z_v -> Z_u` for `u | v`.
pub fn reduce_mod(x: u64, v: u64, u: u64) -> Result<u64> {
    if u == 0 || v == 0 || !v.is_multiple_of(u) {
        return Err(Error::InvalidReduction { from: v, to: u });
    }
    if x >= v {
        return Err(Error::OutOfRange { value: x, bound: v });
    }
    Ok(x % u)
}
