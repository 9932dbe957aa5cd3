//! Exact group orders, corner-fiber counts and bounds, exact corner laws, and
//! the brute-force enumeration oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::rings::{factorize, is_prime, prime_power, Ring};

/// Largest number of candidate matrices the enumeration oracle will visit.
pub const ENUMERATION_CAP: u64 = 100_000_000;

const SHARDS: u64 = 64;

pub type BigCount = BigUint;

fn big_pow(base: u64, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

/// `prod_{j=lo}^{hi-1} (q^n - q^j)`.
fn row_choices(q: u64, n: usize, lo: usize, hi: usize) -> BigUint {
    let qn = big_pow(q, n);
    (lo..hi).map(|j| &qn - big_pow(q, j)).product()
}

/// `|GL_n(F_q)| = prod_{j=0}^{n-1} (q^n - q^j)`.
pub fn order_gl_field(q: u64, n: usize) -> Result<BigCount> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    Ok(row_choices(q, n, 0, n))
}

/// `|GL_n(Z_{p^r})| = p^{(r-1) n^2} |GL_n(F_p)|`.
pub fn order_gl_prime_power(p: u64, r: u32, n: usize) -> Result<BigCount> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::Precondition("exponent r must be >= 1".into()));
    }
    Ok(big_pow(p, (r as usize - 1) * n * n) * order_gl_field(p, n)?)
}

/// `|GL_n(Z_m)|` as the product over CRT components.
pub fn order_gl_zm(m: u64, n: usize) -> Result<BigCount> {
    factorize(m)?
        .factors
        .iter()
        .try_fold(BigUint::one(), |acc, &(p, r)| {
            Ok(acc * order_gl_prime_power(p, r, n)?)
        })
}

/// `|GL_n(R)|` for any supported ring.
pub fn order_gl(ring: &Ring, n: usize) -> Result<BigCount> {
    match ring {
        Ring::Zm(z) => order_gl_zm(z.modulus(), n),
        Ring::Fq(f) => order_gl_field(f.order(), n),
        Ring::Local(l) => {
            Ok(big_pow(l.ideal_size(), n * n) * order_gl_field(l.residue_order(), n)?)
        }
    }
}

/// Number of `X in GL_n(F_q)` whose `s x s` corner is a fixed invertible matrix:
/// `q^{s(n-s)} prod_{j=0}^{n-s-1} (q^n - q^{s+j})`.
pub fn corner_fiber_formula(q: u64, n: usize, s: usize) -> BigCount {
    big_pow(q, s * (n - s)) * row_choices(q, n, s, n)
}

/// Fiber count for an invertible corner `w` over a field.
pub fn corner_fiber_count_invertible(w: &Matrix, n: usize) -> Result<BigCount> {
    let ring = w.ring();
    if !ring.is_field() {
        return Err(Error::NotAField(ring.to_string()));
    }
    let s = w.rows();
    if !w.is_square() || s > n {
        return Err(Error::Shape(format!(
            "corner {}x{} does not fit in {n}x{n}",
            w.rows(),
            w.cols()
        )));
    }
    if w.rank_over_field()? != s {
        return Err(Error::Precondition("corner is not invertible".into()));
    }
    Ok(corner_fiber_formula(ring.size(), n, s))
}

/// Two-sided bounds on corner fiber counts over `Z_{p^r}` and on the ratio of
/// corner probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub p: u64,
    pub r: u32,
    pub n: usize,
    pub s: usize,
    pub lower: BigCount,
    pub upper: BigCount,
    /// `lower / upper`.
    pub ratio_lower: BigRational,
    /// `upper / lower`; `None` when `lower = 0` (no finite bound, `2s > n`).
    pub ratio_upper: Option<BigRational>,
}

/// `lower = prod_{i<s} (p^{n-s} - p^i) * R`, `upper = p^{s(n-s)} * R` with
/// `R = prod_{j<n-s} (p^n - p^{s+j})`, both scaled by `p^{(r-1)(n^2 - s^2)}` for
/// the lifts of the entries outside the corner.
pub fn corner_fiber_bounds(p: u64, r: u32, n: usize, s: usize) -> Result<BoundsReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::Precondition("exponent r must be >= 1".into()));
    }
    if s == 0 || s > n {
        return Err(Error::Shape(format!("corner size {s} outside 1..={n}")));
    }
    let rest = row_choices(p, n, s, n);
    let top_right_free = big_pow(p, s * (n - s));
    let top_right_full_rank = {
        let pk = BigInt::from(big_pow(p, n - s));
        let prod: BigInt = (0..s).map(|i| &pk - BigInt::from(big_pow(p, i))).product();
        // a zero factor appears before any negative one, so the product is >= 0
        if prod.is_positive() {
            prod.magnitude().clone()
        } else {
            BigUint::zero()
        }
    };
    let lift = big_pow(p, (r as usize - 1) * (n * n - s * s));
    let lower = &top_right_full_rank * &rest * &lift;
    let upper = &top_right_free * &rest * &lift;
    let ratio_lower = BigRational::new(
        BigInt::from(top_right_full_rank.clone()),
        BigInt::from(top_right_free.clone()),
    );
    let ratio_upper = (!top_right_full_rank.is_zero()).then(|| {
        BigRational::new(
            BigInt::from(top_right_free),
            BigInt::from(top_right_full_rank),
        )
    });
    Ok(BoundsReport {
        p,
        r,
        n,
        s,
        lower,
        upper,
        ratio_lower,
        ratio_upper,
    })
}

fn enumeration_size(ring: &Ring, n: usize) -> Result<u64> {
    let cells = (n * n) as u32;
    crate::rings::checked_pow_at_most(ring.size(), cells, ENUMERATION_CAP)
        .ok_or_else(|| Error::TooLarge(format!("{}^{}", ring.size(), n * n), ENUMERATION_CAP))
}

fn decode(index: u64, base: u64, out: &mut [u64]) {
    let mut x = index;
    for e in out.iter_mut() {
        *e = x % base;
        x /= base;
    }
}

/// Iterator over every element of `GL_n(R)`, each exactly once.
pub struct GlEnumerator {
    ring: Arc<Ring>,
    n: usize,
    next: u64,
    total: u64,
}

impl Iterator for GlEnumerator {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        let base = self.ring.size();
        while self.next < self.total {
            let mut entries = vec![0u64; self.n * self.n];
            decode(self.next, base, &mut entries);
            self.next += 1;
            if self.next.is_multiple_of(1 << 22) {
                log::debug!("enumerated {}/{} candidates", self.next, self.total);
            }
            let m = Matrix::from_raw(self.ring.clone(), self.n, self.n, entries);
            if m.is_invertible() {
                return Some(m);
            }
        }
        None
    }
}

/// Enumerate `GL_n(R)`; refuses when `|R|^{n^2}` exceeds [`ENUMERATION_CAP`].
pub fn enumerate_gl(ring: &Arc<Ring>, n: usize) -> Result<GlEnumerator> {
    if n == 0 {
        return Err(Error::Shape("dimension must be >= 1".into()));
    }
    let total = enumeration_size(ring, n)?;
    Ok(GlEnumerator {
        ring: ring.clone(),
        n,
        next: 0,
        total,
    })
}

/// For every `s x s` corner, the number of elements of `GL_n(R)` with that
/// corner, by exhaustive enumeration. The index space is split into fixed
/// shards whose partial tallies are merged by exact addition.
pub fn corner_fiber_counts(
    ring: &Arc<Ring>,
    n: usize,
    s: usize,
) -> Result<BTreeMap<Vec<u64>, u64>> {
    if s == 0 || s > n {
        return Err(Error::Shape(format!("corner size {s} outside 1..={n}")));
    }
    let total = enumeration_size(ring, n)?;
    log::info!("enumerating {total} matrices over {ring} (n={n}, s={s})");
    let base = ring.size();
    let shard_len = total.div_ceil(SHARDS);
    let partials: Vec<HashMap<Vec<u64>, u64>> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut tally = HashMap::new();
            let mut entries = vec![0u64; n * n];
            let start = shard * shard_len;
            let end = (start + shard_len).min(total);
            for index in start..end {
                decode(index, base, &mut entries);
                let m = Matrix::from_raw(ring.clone(), n, n, entries.clone());
                if m.is_invertible() {
                    let key: Vec<u64> = (0..s).flat_map(|i| m.row(i)[..s].to_vec()).collect();
                    *tally.entry(key).or_insert(0) += 1;
                }
            }
            tally
        })
        .collect();
    let mut merged = BTreeMap::new();
    for part in partials {
        for (k, v) in part {
            *merged.entry(k).or_insert(0) += v;
        }
    }
    Ok(merged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistMethod {
    Enumerate,
    Formula,
}

/// Mass of the non-invertible corners when only their total is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualMass {
    pub mass: BigRational,
    pub cells: BigCount,
}

/// Exact law of the `s x s` corner of a Haar element of `GL_n(R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDist {
    pub ring: Arc<Ring>,
    pub n: usize,
    pub s: usize,
    /// Row-major corner entries to probability; only positive masses are stored.
    pub probs: BTreeMap<Vec<u64>, BigRational>,
    pub residual: Option<ResidualMass>,
}

impl ExactDist {
    pub fn total_mass(&self) -> BigRational {
        let explicit = self
            .probs
            .values()
            .fold(BigRational::zero(), |acc, p| acc + p);
        match &self.residual {
            Some(r) => explicit + &r.mass,
            None => explicit,
        }
    }

    pub fn prob(&self, corner: &[u64]) -> BigRational {
        self.probs
            .get(corner)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `|M_s(R)|`.
    pub fn cell_count(&self) -> BigCount {
        big_pow(self.ring.size(), self.s * self.s)
    }

    /// Uniform law over every corner in `support`, as used for `U_s(R)` and for
    /// the Haar law itself when `s = n`.
    /// Repeated corners count once.
    pub fn uniform_on(
        ring: Arc<Ring>,
        n: usize,
        s: usize,
        support: impl IntoIterator<Item = Vec<u64>>,
    ) -> Result<Self> {
        let keys: BTreeSet<Vec<u64>> = support.into_iter().collect();
        if keys.is_empty() {
            return Err(Error::Precondition("empty support".into()));
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(keys.len()));
        Ok(ExactDist {
            ring,
            n,
            s,
            probs: keys.into_iter().map(|k| (k, p.clone())).collect(),
            residual: None,
        })
    }
}

pub fn exact_corner_dist(
    ring: &Arc<Ring>,
    n: usize,
    s: usize,
    method: DistMethod,
) -> Result<ExactDist> {
    if s == 0 || s > n {
        return Err(Error::Shape(format!("corner size {s} outside 1..={n}")));
    }
    match method {
        DistMethod::Enumerate => {
            let counts = corner_fiber_counts(ring, n, s)?;
            let total: u64 = counts.values().sum();
            let probs = counts
                .into_iter()
                .map(|(k, c)| (k, BigRational::new(BigInt::from(c), BigInt::from(total))))
                .collect();
            Ok(ExactDist {
                ring: ring.clone(),
                n,
                s,
                probs,
                residual: None,
            })
        }
        DistMethod::Formula => {
            if !ring.is_field() {
                return Err(Error::NotAField(ring.to_string()));
            }
            let q = ring.size();
            let order = BigInt::from(order_gl_field(q, n)?);
            let per_corner = BigRational::new(BigInt::from(corner_fiber_formula(q, n, s)), order);
            let mut probs = BTreeMap::new();
            for w in enumerate_gl(ring, s)? {
                probs.insert(w.into_entries(), per_corner.clone());
            }
            let invertible = BigUint::from(probs.len());
            let mass = BigRational::one() - per_corner * BigInt::from(invertible.clone());
            let cells = big_pow(q, s * s) - invertible;
            let residual = if mass.is_zero() {
                None
            } else if cells.is_one() {
                // s = 1: the zero corner is the only non-invertible one
                probs.insert(vec![0; s * s], mass);
                None
            } else {
                Some(ResidualMass { mass, cells })
            };
            Ok(ExactDist {
                ring: ring.clone(),
                n,
                s,
                probs,
                residual,
            })
        }
    }
}

/// `(1/2) sum_W |P(W) - 1/|M_s(R)||`, exactly.
pub fn tv_to_uniform(dist: &ExactDist) -> Result<BigRational> {
    if let Some(r) = &dist.residual {
        return Err(Error::IndeterminateResidual(r.cells.to_string()));
    }
    let cells = dist.cell_count();
    let u = BigRational::new(BigInt::one(), BigInt::from(cells.clone()));
    let on_support = dist
        .probs
        .values()
        .fold(BigRational::zero(), |acc, p| acc + (p - &u).abs());
    let missing = BigInt::from(cells) - BigInt::from(dist.probs.len());
    let off_support = &u * missing;
    Ok((on_support + off_support) / BigInt::from(2))
}
