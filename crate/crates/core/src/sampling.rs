//! Exact uniform samplers on `M_N` and on `GL_N` over every supported ring.
//!
//! * fields: row-chain construction (each row uniform outside the span of the
//!   previous ones), with a rejection sampler kept as an independent oracle;
//! * local rings, including `Z_{p^r}`: a uniform invertible matrix of residue
//!   representatives plus an independent uniform matrix over the maximal ideal;
//! * composite `Z_m`: independent prime-power draws glued by the CRT.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrices::{Matrix, RowBasis};
use crate::rings::{FqField, LocalRing, Ring, ZmRing};
use crate::rng::{RngStream, RNG_VERSION};

/// Default attempt cap for [`sample_gl_reject`].
pub const DEFAULT_RETRY_CAP: u64 = 1_000_000;

/// Corners per independent child stream in batch sampling.
pub const CHUNK_SIZE: usize = 4096;

pub fn sample_element(ring: &Ring, rng: &mut RngStream) -> u64 {
    rng.below(ring.size())
}

pub fn sample_uniform_matrix(
    ring: &Arc<Ring>,
    rows: usize,
    cols: usize,
    rng: &mut RngStream,
) -> Matrix {
    let size = ring.size();
    let entries = (0..rows * cols).map(|_| rng.below(size)).collect();
    Matrix::from_raw(ring.clone(), rows, cols, entries)
}

/// Entries uniform over the maximal ideal of a local ring (or prime-power `Z_m`).
pub fn sample_ideal_matrix(
    ring: &Arc<Ring>,
    rows: usize,
    cols: usize,
    rng: &mut RngStream,
) -> Result<Matrix> {
    let local = ring
        .as_local()
        .ok_or_else(|| Error::NotLocalRing(ring.size()))?;
    let ideal = local.ideal_size();
    let entries = (0..rows * cols)
        .map(|_| local.ideal_element(rng.below(ideal)))
        .collect();
    Ok(Matrix::from_raw(ring.clone(), rows, cols, entries))
}

/// First `k` rows of a uniform element of `GL_n` over a field, row-major.
/// Each row is redrawn until it leaves the span of the rows already chosen.
fn chain_rows(field: &Ring, n: usize, k: usize, rng: &mut RngStream) -> Vec<u64> {
    debug_assert!(field.is_field() && k <= n);
    let q = field.size();
    let mut basis = RowBasis::new(n);
    let mut out = Vec::with_capacity(k * n);
    let mut row = vec![0u64; n];
    while basis.rank() < k {
        for x in row.iter_mut() {
            *x = rng.below(q);
        }
        if basis.insert(field, &row) {
            out.extend_from_slice(&row);
        }
    }
    out
}

fn require_field(ring: &Ring) -> Result<()> {
    if ring.is_field() {
        Ok(())
    } else {
        Err(Error::NotAField(ring.to_string()))
    }
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Shape("dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Uniform element of `GL_n(F_q)` by the row-chain construction.
pub fn sample_gl_field_chain(field: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    require_field(field)?;
    require_dim(n)?;
    Ok(Matrix::from_raw(
        field.clone(),
        n,
        n,
        chain_rows(field, n, n, rng),
    ))
}

/// Uniform element of `GL_n(R)` by drawing uniform matrices until one is
/// invertible. Returns the matrix and the number of attempts used.
pub fn sample_gl_reject_counting(
    ring: &Arc<Ring>,
    n: usize,
    rng: &mut RngStream,
    cap: u64,
) -> Result<(Matrix, u64)> {
    require_dim(n)?;
    for attempt in 1..=cap {
        let m = sample_uniform_matrix(ring, n, n, rng);
        let ok = if ring.is_field() {
            m.rank_over_field()? == n
        } else {
            m.is_invertible()
        };
        if ok {
            return Ok((m, attempt));
        }
    }
    Err(Error::SamplingFailure(cap))
}

pub fn sample_gl_reject(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    sample_gl_reject_counting(ring, n, rng, DEFAULT_RETRY_CAP).map(|(m, _)| m)
}

/// Lift `residue in GL_n(F_p)` to `Z_{p^r}` by adding an entrywise uniform
/// element of `p Z_{p^r}`.
pub fn lift_to_prime_power(residue: &Matrix, r: u32, rng: &mut RngStream) -> Result<Matrix> {
    let p = residue.ring().size();
    let prime_field = match residue.ring().as_ref() {
        Ring::Fq(f) => f.degree() == 1,
        Ring::Zm(z) => z.is_field(),
        Ring::Local(l) => l.ideal_size() == 1,
    };
    if !prime_field {
        return Err(Error::Precondition(format!(
            "residue must be over a prime field, got {}",
            residue.ring()
        )));
    }
    if !residue.is_square() || residue.rank_over_field()? != residue.rows() {
        return Err(Error::Precondition(
            "residue matrix is not invertible".into(),
        ));
    }
    if r == 0 {
        return Err(Error::Precondition("exponent r must be >= 1".into()));
    }
    let modulus = crate::rings::prime_power_modulus(p, r)?;
    let ring = Arc::new(Ring::Zm(ZmRing::new(modulus)?));
    let fiber = modulus / p;
    let entries = residue
        .entries()
        .iter()
        .map(|&a| a + p * rng.below(fiber))
        .collect();
    Ok(Matrix::from_raw(
        ring,
        residue.rows(),
        residue.cols(),
        entries,
    ))
}

/// Haar element of `GL_n(Z_{p^r})`: chain sampler over `F_p`, then lift.
pub fn sample_gl_prime_power(p: u64, r: u32, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    let field = Arc::new(Ring::Fq(FqField::new(p, 1)?));
    let residue = sample_gl_field_chain(&field, n, rng)?;
    lift_to_prime_power(&residue, r, rng)
}

/// Haar element of `GL_n(Z_m)`: independent prime-power draws, CRT-combined.
pub fn sample_gl_zm(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    let Ring::Zm(z) = ring.as_ref() else {
        return Err(Error::Precondition(format!("expected Z_m, got {ring}")));
    };
    let parts = z
        .factorization()
        .factors
        .iter()
        .map(|&(p, r)| sample_gl_prime_power(p, r, n, rng))
        .collect::<Result<Vec<_>>>()?;
    Matrix::crt_combine(ring.clone(), &parts)
}

/// Haar element of `GL_n(A)` for a finite local ring `A`: `Z + U` with `Z`
/// uniform among invertible matrices of residue representatives and `U`
/// entrywise uniform over the maximal ideal.
pub fn sample_gl_local(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    let Ring::Local(local) = ring.as_ref() else {
        return Err(Error::Precondition(format!(
            "expected a local ring, got {ring}"
        )));
    };
    require_dim(n)?;
    let entries = local_rows(local, n, n, n, rng);
    Ok(Matrix::from_raw(ring.clone(), n, n, entries))
}

/// Rows `0..k`, columns `0..width` of a Haar element of `GL_n` over a local ring.
fn local_rows(
    local: &LocalRing,
    n: usize,
    k: usize,
    width: usize,
    rng: &mut RngStream,
) -> Vec<u64> {
    let field = Ring::Fq(local.residue_field().clone());
    let residue = chain_rows(&field, n, k, rng);
    let ideal = local.ideal_size();
    let mut out = Vec::with_capacity(k * width);
    for i in 0..k {
        for &a in &residue[i * n..i * n + width] {
            out.push(local.add(
                local.representative(a),
                local.ideal_element(rng.below(ideal)),
            ));
        }
    }
    out
}

/// Haar element of `GL_n` over any supported ring.
pub fn sample_gl(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
    match ring.as_ref() {
        Ring::Fq(_) => sample_gl_field_chain(ring, n, rng),
        Ring::Zm(z) if z.is_field() => sample_gl_field_chain(ring, n, rng),
        Ring::Zm(_) => sample_gl_zm(ring, n, rng),
        Ring::Local(_) => sample_gl_local(ring, n, rng),
    }
}

/// Upper-left `s x s` corner of a Haar element of `GL_n`.
///
/// Only the first `s` rows are generated, each of full width `n`: the law of
/// the first `s` rows of a Haar matrix is that of the first `s` chain rows, and
/// rows below them never touch the corner. Memory is `O(n s)`.
pub fn sample_corner(ring: &Arc<Ring>, n: usize, s: usize, rng: &mut RngStream) -> Result<Matrix> {
    require_dim(n)?;
    if s == 0 || s > n {
        return Err(Error::Shape(format!("corner size {s} outside 1..={n}")));
    }
    let entries = match ring.as_ref() {
        Ring::Fq(_) => field_corner(ring, n, s, rng),
        Ring::Zm(z) if z.is_field() => field_corner(ring, n, s, rng),
        Ring::Zm(z) => {
            let mut parts = Vec::with_capacity(z.factorization().factors.len());
            for &(p, r) in &z.factorization().factors {
                let local = LocalRing::prime_power(p, r)?;
                parts.push(local_rows(&local, n, s, s, rng));
            }
            let mut comps = vec![0u64; parts.len()];
            (0..s * s)
                .map(|idx| {
                    for (c, part) in comps.iter_mut().zip(&parts) {
                        *c = part[idx];
                    }
                    z.crt_combine(&comps)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Ring::Local(local) => local_rows(local, n, s, s, rng),
    };
    Ok(Matrix::from_raw(ring.clone(), s, s, entries))
}

fn field_corner(ring: &Ring, n: usize, s: usize, rng: &mut RngStream) -> Vec<u64> {
    let rows = chain_rows(ring, n, s, rng);
    (0..s)
        .flat_map(|i| rows[i * n..i * n + s].to_vec())
        .collect()
}

/// Independent corners `X^{(N)}[S]` of independent Haar draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    pub ring: Arc<Ring>,
    pub n: usize,
    pub s: usize,
    pub seed: u64,
    pub rng_version: String,
    pub corners: Vec<Matrix>,
}

/// `count` corners; chunk `i` of [`CHUNK_SIZE`] corners uses the child stream
/// `rng.split("chunk/i")`, so the batch is the same for every thread count.
pub fn sample_truncated(
    ring: &Arc<Ring>,
    n: usize,
    s: usize,
    count: usize,
    rng: &RngStream,
) -> Result<SampleBatch> {
    sample_truncated_parallel(ring, n, s, count, rng, 1)
}

pub fn sample_truncated_parallel(
    ring: &Arc<Ring>,
    n: usize,
    s: usize,
    count: usize,
    rng: &RngStream,
    threads: usize,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::Precondition("count must be >= 1".into()));
    }
    if s == 0 || s > n {
        return Err(Error::Shape(format!("corner size {s} outside 1..={n}")));
    }
    let chunks = count.div_ceil(CHUNK_SIZE);
    let run_chunk = |i: usize| -> Result<Vec<Matrix>> {
        let mut child = rng.split(&format!("chunk/{i}"));
        let len = CHUNK_SIZE.min(count - i * CHUNK_SIZE);
        (0..len)
            .map(|_| sample_corner(ring, n, s, &mut child))
            .collect()
    };
    let parts: Vec<Vec<Matrix>> = if threads <= 1 {
        (0..chunks).map(run_chunk).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?;
        pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(run_chunk)
                .collect::<Result<_>>()
        })?
    };
    Ok(SampleBatch {
        ring: ring.clone(),
        n,
        s,
        seed: rng.seed(),
        rng_version: RNG_VERSION.to_string(),
        corners: parts.into_iter().flatten().collect(),
    })
}

/// Deliberately incorrect samplers used as negative controls for the
/// uniformity tests. Never use these for real sampling.
pub mod controls {
    use super::*;

    /// Uniform over `M_n(R)` conditioned on `det != 0` instead of `det` a unit.
    pub fn sample_nonzero_det(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Result<Matrix> {
        for _ in 0..DEFAULT_RETRY_CAP {
            let m = sample_uniform_matrix(ring, n, n, rng);
            if m.determinant()? != 0 {
                return Ok(m);
            }
        }
        Err(Error::SamplingFailure(DEFAULT_RETRY_CAP))
    }

    /// The rejection sampler with its rejection step removed.
    pub fn sample_skip_rejection(ring: &Arc<Ring>, n: usize, rng: &mut RngStream) -> Matrix {
        sample_uniform_matrix(ring, n, n, rng)
    }
}
