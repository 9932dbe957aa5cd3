//! Dense matrices over a [`Ring`].
//!
//! Indexing is 0-based here; documentation and CLI output use the 1-based
//! `(X_ij)_{1 <= i, j <= S}` convention.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::{FqField, Ring, RingDescriptor, ZmRing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

/// JSON form: `{"ring": <descriptor>, "rows": N, "cols": M, "entries": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub ring: RingDescriptor,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl Matrix {
    pub fn new(ring: Arc<Ring>, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty shape {rows}x{cols}")));
        }
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for &e in &entries {
            ring.check(e)?;
        }
        Ok(Matrix {
            ring,
            rows,
            cols,
            entries,
        })
    }

    /// Skips the canonical-entry check; callers guarantee it.
    pub(crate) fn from_raw(ring: Arc<Ring>, rows: usize, cols: usize, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        debug_assert!(entries.iter().all(|&e| e < ring.size()));
        Matrix {
            ring,
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(ring: Arc<Ring>, rows: usize, cols: usize) -> Self {
        Matrix::from_raw(ring, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(ring: Arc<Ring>, n: usize) -> Self {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_record(&self) -> MatrixRecord {
        MatrixRecord {
            ring: self.ring.descriptor(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
    }

    pub fn from_record(record: &MatrixRecord) -> Result<Self> {
        let ring = Arc::new(Ring::from_descriptor(&record.ring)?);
        Matrix::new(ring, record.rows, record.cols, record.entries.clone())
    }

    fn same_ring(&self, other: &Matrix) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ))
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Ok(Matrix::from_raw(
            self.ring.clone(),
            self.rows,
            self.cols,
            entries,
        ))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out[idx] = r.add(out[idx], r.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(Matrix::from_raw(
            self.ring.clone(),
            self.rows,
            other.cols,
            out,
        ))
    }

    /// Determinant by Berkowitz's division-free algorithm, valid over any
    /// commutative ring; `O(N^4)` ring operations.
    pub fn determinant(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let poly = self.characteristic_polynomial();
        let n = self.rows;
        let c = poly[n];
        Ok(if n.is_multiple_of(2) {
            c
        } else {
            self.ring.neg(c)
        })
    }

    /// Coefficients of `det(x I - A)`, leading coefficient first.
    pub fn characteristic_polynomial(&self) -> Vec<u64> {
        let r = &self.ring;
        let n = self.rows;
        let mut v: Vec<u64> = vec![1];
        for k in 0..n {
            // A_{k+1} = [[A_k, C], [R, a_kk]]
            let col: Vec<u64> = (0..k).map(|i| self.get(i, k)).collect();
            let mut t = Vec::with_capacity(k + 2);
            t.push(1);
            t.push(r.neg(self.get(k, k)));
            let mut w = col;
            for _ in 0..k {
                let rw = (0..k).fold(0, |acc, j| r.add(acc, r.mul(self.get(k, j), w[j])));
                t.push(r.neg(rw));
                w = (0..k)
                    .map(|i| (0..k).fold(0, |acc, j| r.add(acc, r.mul(self.get(i, j), w[j]))))
                    .collect();
            }
            let mut next = vec![0u64; k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, &vj) in v.iter().enumerate().take(i + 1) {
                    *slot = r.add(*slot, r.mul(t[i - j], vj));
                }
            }
            v = next;
        }
        v
    }

    /// `det A` is a unit of the ring.
    pub fn is_invertible(&self) -> bool {
        self.is_square()
            && self
                .determinant()
                .map(|d| self.ring.is_unit(d))
                .unwrap_or(false)
    }

    /// Invertibility through the reduction to the residue field: a matrix over a
    /// local ring is invertible iff its reduction modulo the maximal ideal is
    /// invertible there. Composite `Z_m` is decided per CRT component.
    pub fn is_invertible_by_residue(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        match self.ring.as_ref() {
            Ring::Zm(z) if !z.factorization().is_prime_power() => self
                .crt_split()
                .map(|parts| parts.iter().all(Matrix::is_invertible_by_residue))
                .unwrap_or(false),
            ring => {
                let local = ring.as_local().expect("prime power or local ring");
                let field = Arc::new(Ring::Fq(local.residue_field().clone()));
                let reduced = self.entries.iter().map(|&x| local.residue(x)).collect();
                let m = Matrix::from_raw(field, self.rows, self.cols, reduced);
                m.rank_over_field().map(|r| r == self.rows).unwrap_or(false)
            }
        }
    }

    /// Upper-left `s x s` corner.
    pub fn truncate(&self, s: usize) -> Result<Matrix> {
        if s == 0 || s > self.rows.min(self.cols) {
            return Err(Error::Shape(format!(
                "corner size {s} outside 1..={}",
                self.rows.min(self.cols)
            )));
        }
        let entries = (0..s)
            .flat_map(|i| self.row(i)[..s].iter().copied())
            .collect();
        Ok(Matrix::from_raw(self.ring.clone(), s, s, entries))
    }

    /// Row rank by Gaussian elimination; the ring must be a field.
    pub fn rank_over_field(&self) -> Result<usize> {
        let r = self.ring.as_ref();
        if !r.is_field() {
            return Err(Error::NotAField(r.to_string()));
        }
        let mut basis = RowBasis::new(self.cols);
        for i in 0..self.rows {
            basis.insert(r, self.row(i));
        }
        Ok(basis.rank())
    }

    /// Entrywise CRT decomposition over the prime-power components of `Z_m`.
    pub fn crt_split(&self) -> Result<Vec<Matrix>> {
        let Ring::Zm(z) = self.ring.as_ref() else {
            return Err(Error::Precondition(format!(
                "CRT split needs Z_m, got {}",
                self.ring
            )));
        };
        z.factorization()
            .prime_powers()
            .into_iter()
            .map(|pr| {
                let ring = Arc::new(Ring::Zm(ZmRing::new(pr)?));
                let entries = self.entries.iter().map(|&x| x % pr).collect();
                Ok(Matrix::from_raw(ring, self.rows, self.cols, entries))
            })
            .collect()
    }

    /// Inverse of [`Matrix::crt_split`]: components must be over `Z_{p_i^{r_i}}`
    /// (or the matching local prime-power ring) in factor order.
    pub fn crt_combine(ring: Arc<Ring>, parts: &[Matrix]) -> Result<Matrix> {
        let Ring::Zm(z) = ring.as_ref() else {
            return Err(Error::Precondition(format!(
                "CRT combine needs Z_m, got {ring}"
            )));
        };
        let moduli = z.factorization().prime_powers();
        if parts.len() != moduli.len() {
            return Err(Error::Shape(format!(
                "expected {} components, got {}",
                moduli.len(),
                parts.len()
            )));
        }
        let (rows, cols) = (parts[0].rows, parts[0].cols);
        for (part, &pr) in parts.iter().zip(&moduli) {
            if !is_integer_residue_ring(&part.ring, pr) {
                return Err(Error::RingMismatch(
                    part.ring.to_string(),
                    format!("Z_{pr}"),
                ));
            }
            if (part.rows, part.cols) != (rows, cols) {
                return Err(Error::Shape("component shapes differ".into()));
            }
        }
        let mut entries = Vec::with_capacity(rows * cols);
        let mut comps = vec![0u64; parts.len()];
        for idx in 0..rows * cols {
            for (c, part) in comps.iter_mut().zip(parts) {
                *c = part.entries[idx];
            }
            entries.push(z.crt_combine(&comps)?);
        }
        Ok(Matrix::from_raw(ring, rows, cols, entries))
    }
}

/// `Z_pr` itself, its local-ring view, or `F_p` when `pr = p`.
fn is_integer_residue_ring(ring: &Ring, pr: u64) -> bool {
    use crate::rings::LocalKind;
    ring.size() == pr
        && match ring {
            Ring::Zm(_) => true,
            Ring::Fq(f) => f.degree() == 1,
            Ring::Local(l) => matches!(l.kind(), LocalKind::PrimePower { .. }),
        }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained echelon basis of a row span over a field.
#[derive(Debug, Clone)]
pub(crate) struct RowBasis {
    width: usize,
    /// `(pivot column, row)`; each row is normalized to 1 at its pivot.
    rows: Vec<(usize, Vec<u64>)>,
}

impl RowBasis {
    pub(crate) fn new(width: usize) -> Self {
        RowBasis {
            width,
            rows: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, ring: &Ring, v: &[u64]) -> Vec<u64> {
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = w[*pivot];
            if c != 0 {
                for (x, &b) in w.iter_mut().zip(row) {
                    *x = ring.sub(*x, ring.mul(c, b));
                }
            }
        }
        w
    }

    /// Adds `v` to the span; returns false when it was already inside.
    pub(crate) fn insert(&mut self, ring: &Ring, v: &[u64]) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let w = self.reduce(ring, v);
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = ring.inv(w[pivot]).expect("field element");
        let w: Vec<u64> = w.iter().map(|&x| ring.mul(x, inv)).collect();
        self.rows.push((pivot, w));
        true
    }
}

/// Shared handle to the prime field `F_p`.
pub fn prime_field_ring(p: u64) -> Result<Arc<Ring>> {
    Ok(Arc::new(Ring::Fq(FqField::new(p, 1)?)))
}
