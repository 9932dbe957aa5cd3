//! Finite commutative local rings.
//!
//! Two families are realized: `Z/p^r` and truncated polynomial rings
//! `F_q[t]/(t^k)`. In both, an element index `x` decomposes as
//! `x = a + q * j` where `a in [0, q)` is the canonical residue representative and
//! `q * j` lies in the maximal ideal, so the ideal is exactly the multiples of `q`
//! in index space.

use crate::error::{Error, Result};

use super::factor::{checked_pow_below, factorize, inv_mod, is_prime};
use super::fq::FqField;
use super::zm::MAX_MODULUS;

#[derive(Debug, Clone)]
pub enum LocalKind {
    PrimePower { p: u64, r: u32 },
    TruncatedPoly { base: FqField, k: u32 },
}

#[derive(Debug, Clone)]
pub struct LocalRing {
    kind: LocalKind,
    residue_field: FqField,
    size: u64,
}

impl LocalRing {
    pub fn prime_power(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::Precondition("exponent r must be >= 1".into()));
        }
        let size = checked_pow_below(p, r, MAX_MODULUS).ok_or(Error::InvalidModulus(u64::MAX))?;
        Ok(LocalRing {
            kind: LocalKind::PrimePower { p, r },
            residue_field: FqField::new(p, 1)?,
            size,
        })
    }

    pub fn truncated_poly(base: FqField, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition(
                "nilpotency depth k must be >= 1".into(),
            ));
        }
        let size = checked_pow_below(base.order(), k, MAX_MODULUS)
            .ok_or(Error::InvalidModulus(u64::MAX))?;
        Ok(LocalRing {
            residue_field: base.clone(),
            kind: LocalKind::TruncatedPoly { base, k },
            size,
        })
    }

    /// `Z/mZ` viewed as a local ring; only prime powers qualify.
    pub fn from_modulus(m: u64) -> Result<Self> {
        let f = factorize(m)?;
        match f.factors.as_slice() {
            [(p, r)] => Self::prime_power(*p, *r),
            _ => Err(Error::NotLocalRing(m)),
        }
    }

    pub fn kind(&self) -> &LocalKind {
        &self.kind
    }

    pub fn residue_field(&self) -> &FqField {
        &self.residue_field
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// `q = |residue field|`.
    pub fn residue_order(&self) -> u64 {
        self.residue_field.order()
    }

    /// `|m| = |ring| / q`.
    pub fn ideal_size(&self) -> u64 {
        self.size / self.residue_order()
    }

    /// Canonical residue representatives `{a_0 = 0, a_1, ..., a_{q-1}}`.
    pub fn representatives(&self) -> Vec<u64> {
        (0..self.residue_order()).collect()
    }

    pub fn check(&self, x: u64) -> Result<u64> {
        if x < self.size {
            Ok(x)
        } else {
            Err(Error::OutOfRange {
                value: x,
                bound: self.size,
            })
        }
    }

    #[inline]
    pub fn residue(&self, x: u64) -> u64 {
        x % self.residue_order()
    }

    /// Embed a residue-field element as its representative.
    #[inline]
    pub fn representative(&self, a: u64) -> u64 {
        a
    }

    /// The `j`-th element of the maximal ideal, `j in [0, |m|)`.
    #[inline]
    pub fn ideal_element(&self, j: u64) -> u64 {
        j * self.residue_order()
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        self.residue(x) != 0
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        match &self.kind {
            LocalKind::PrimePower { .. } => (x + y) % self.size,
            LocalKind::TruncatedPoly { base, k } => {
                self.coefficientwise(x, y, *k, base.order(), |a, b| base.add(a, b))
            }
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        match &self.kind {
            LocalKind::PrimePower { .. } => (self.size - x) % self.size,
            LocalKind::TruncatedPoly { base, k } => {
                self.coefficientwise(x, 0, *k, base.order(), |a, _| base.neg(a))
            }
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match &self.kind {
            LocalKind::PrimePower { .. } => x * y % self.size,
            LocalKind::TruncatedPoly { base, k } => {
                let q = base.order();
                let a = coeffs(x, q, *k);
                let b = coeffs(y, q, *k);
                let mut out = vec![0u64; *k as usize];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate().take(*k as usize - i) {
                        out[i + j] = base.add(out[i + j], base.mul(ai, bj));
                    }
                }
                index(&out, q)
            }
        }
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        if !self.is_unit(x) {
            return None;
        }
        match &self.kind {
            LocalKind::PrimePower { .. } => inv_mod(x, self.size),
            LocalKind::TruncatedPoly { base, k } => {
                let q = base.order();
                let a = coeffs(x, q, *k);
                let c0_inv = base.inv(a[0])?;
                let mut b = vec![0u64; *k as usize];
                b[0] = c0_inv;
                for i in 1..*k as usize {
                    let mut s = 0;
                    for j in 1..=i {
                        s = base.add(s, base.mul(a[j], b[i - j]));
                    }
                    b[i] = base.neg(base.mul(c0_inv, s));
                }
                Some(index(&b, q))
            }
        }
    }

    fn coefficientwise(&self, x: u64, y: u64, k: u32, q: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..k {
            out += f(x % q, y % q) * place;
            x /= q;
            y /= q;
            place *= q;
        }
        out
    }
}

fn coeffs(mut x: u64, q: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let c = x % q;
            x /= q;
            c
        })
        .collect()
}

fn index(c: &[u64], q: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &d| acc * q + d)
}
