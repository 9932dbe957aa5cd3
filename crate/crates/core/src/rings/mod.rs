//! Finite commutative rings: `Z/mZ`, finite fields and finite local rings.
//!
//! Every ring stores elements as canonical `u64` indices in `[0, |ring|)`, so
//! matrices and samplers can stay ring-agnostic and dispatch through [`Ring`].

mod descriptor;
mod factor;
mod fq;
mod local;
mod poly;
mod zm;

use std::fmt;

pub use descriptor::RingDescriptor;
pub use factor::{factorize, gcd, inv_mod, is_prime, prime_power, Factorization};
pub use fq::{FqField, FqOp};
pub use local::{LocalKind, LocalRing};
pub use zm::{reduce_mod, ZmOp, ZmRing, MAX_MODULUS};

use crate::error::{Error, Result};

/// `base^exp` when it is at most `limit`.
pub(crate) fn checked_pow_at_most(base: u64, exp: u32, limit: u64) -> Option<u64> {
    factor::checked_pow_below(base, exp, limit.checked_add(1)?)
}

/// `p^r` checked against [`MAX_MODULUS`].
pub fn prime_power_modulus(p: u64, r: u32) -> Result<u64> {
    factor::checked_pow_below(p, r, MAX_MODULUS).ok_or(Error::InvalidModulus(u64::MAX))
}

#[derive(Debug, Clone)]
pub enum Ring {
    Zm(ZmRing),
    Fq(FqField),
    Local(LocalRing),
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn zm(m: u64) -> Result<Self> {
        ZmRing::new(m).map(Ring::Zm)
    }

    pub fn fq(p: u64, n: u32) -> Result<Self> {
        FqField::new(p, n).map(Ring::Fq)
    }

    pub fn local_prime_power(p: u64, r: u32) -> Result<Self> {
        LocalRing::prime_power(p, r).map(Ring::Local)
    }

    pub fn local_truncated(p: u64, n: u32, k: u32) -> Result<Self> {
        LocalRing::truncated_poly(FqField::new(p, n)?, k).map(Ring::Local)
    }

    pub fn from_descriptor(d: &RingDescriptor) -> Result<Self> {
        match d {
            RingDescriptor::Zm { m } => Ring::zm(*m),
            RingDescriptor::Fq { p, n, poly: None } => Ring::fq(*p, *n),
            RingDescriptor::Fq {
                p,
                n,
                poly: Some(poly),
            } => {
                if poly.len() != *n as usize + 1 {
                    return Err(Error::NotIrreducible(poly.clone()));
                }
                FqField::with_modulus(*p, poly).map(Ring::Fq)
            }
            RingDescriptor::LocalPp { p, r } => Ring::local_prime_power(*p, *r),
            RingDescriptor::LocalTp { p, n, k } => Ring::local_truncated(*p, *n, *k),
        }
    }

    /// Canonical descriptor; finite fields always carry their modulus polynomial.
    pub fn descriptor(&self) -> RingDescriptor {
        match self {
            Ring::Zm(z) => RingDescriptor::Zm { m: z.modulus() },
            Ring::Fq(f) => RingDescriptor::Fq {
                p: f.p(),
                n: f.degree(),
                poly: Some(f.modulus().to_vec()),
            },
            Ring::Local(l) => match l.kind() {
                LocalKind::PrimePower { p, r } => RingDescriptor::LocalPp { p: *p, r: *r },
                LocalKind::TruncatedPoly { base, k } => RingDescriptor::LocalTp {
                    p: base.p(),
                    n: base.degree(),
                    k: *k,
                },
            },
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Ring::Zm(z) => z.modulus(),
            Ring::Fq(f) => f.order(),
            Ring::Local(l) => l.size(),
        }
    }

    pub fn is_field(&self) -> bool {
        match self {
            Ring::Zm(z) => z.is_field(),
            Ring::Fq(_) => true,
            Ring::Local(l) => l.ideal_size() == 1,
        }
    }

    pub fn check(&self, x: u64) -> Result<u64> {
        if x < self.size() {
            Ok(x)
        } else {
            Err(Error::OutOfRange {
                value: x,
                bound: self.size(),
            })
        }
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        match self {
            Ring::Zm(z) => z.add(x, y),
            Ring::Fq(f) => f.add(x, y),
            Ring::Local(l) => l.add(x, y),
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        match self {
            Ring::Zm(z) => z.neg(x),
            Ring::Fq(f) => f.neg(x),
            Ring::Local(l) => l.neg(x),
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match self {
            Ring::Zm(z) => z.mul(x, y),
            Ring::Fq(f) => f.mul(x, y),
            Ring::Local(l) => l.mul(x, y),
        }
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        match self {
            Ring::Zm(z) => z.is_unit(x),
            Ring::Fq(_) => x != 0,
            Ring::Local(l) => l.is_unit(x),
        }
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        match self {
            Ring::Zm(z) => z.inv(x),
            Ring::Fq(f) => f.inv(x),
            Ring::Local(l) => l.inv(x),
        }
    }

    /// Residue field and reduction map when the ring is local (prime-power `Z_m`
    /// included). Returns `(p, r)`-style data through [`LocalRing`].
    pub fn as_local(&self) -> Option<LocalRing> {
        match self {
            Ring::Zm(z) => LocalRing::from_modulus(z.modulus()).ok(),
            Ring::Fq(f) => LocalRing::truncated_poly(f.clone(), 1).ok(),
            Ring::Local(l) => Some(l.clone()),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Zm(z) => write!(f, "Z_{}", z.modulus()),
            Ring::Fq(q) => write!(f, "F_{}", q.order()),
            Ring::Local(l) => match l.kind() {
                LocalKind::PrimePower { p, r } => write!(f, "Z_{}^{} (local)", p, r),
                LocalKind::TruncatedPoly { base, k } => {
                    write!(f, "F_{}[t]/(t^{})", base.order(), k)
                }
            },
        }
    }
}
