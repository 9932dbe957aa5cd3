//! Empirical corner laws, TV and chi-squared comparisons, convergence sweeps.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::counting::{exact_corner_dist, tv_to_uniform, DistMethod, ExactDist};
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::rings::Ring;
use crate::rng::RngStream;
use crate::sampling::{sample_truncated, SampleBatch};

/// Expected count below which chi-squared cells are merged.
pub const MIN_EXPECTED: f64 = 5.0;

/// Cap on reference cells materialized for a chi-squared test against the
/// uniform law.
pub const MAX_UNIFORM_CELLS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDist {
    pub ring: Arc<Ring>,
    pub s: usize,
    pub counts: BTreeMap<Vec<u64>, u64>,
    pub total: u64,
}

impl EmpiricalDist {
    pub fn from_corners<'a>(
        ring: &Arc<Ring>,
        s: usize,
        corners: impl IntoIterator<Item = &'a Matrix>,
    ) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for c in corners {
            if c.ring() != ring {
                return Err(Error::Format(format!(
                    "corner over {} in a batch over {ring}",
                    c.ring()
                )));
            }
            if (c.rows(), c.cols()) != (s, s) {
                return Err(Error::Format(format!(
                    "corner of shape {}x{} in a batch with S={s}",
                    c.rows(),
                    c.cols()
                )));
            }
            *counts.entry(c.entries().to_vec()).or_insert(0) += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::InsufficientData("empty batch".into()));
        }
        Ok(EmpiricalDist {
            ring: ring.clone(),
            s,
            counts,
            total,
        })
    }

    pub fn from_batch(batch: &SampleBatch) -> Result<Self> {
        Self::from_corners(&batch.ring, batch.s, &batch.corners)
    }

    pub fn count(&self, corner: &[u64]) -> u64 {
        self.counts.get(corner).copied().unwrap_or(0)
    }

    /// `|M_s(R)|` as a float.
    pub fn cell_count(&self) -> f64 {
        (self.ring.size() as f64).powi((self.s * self.s) as i32)
    }
}

/// Reference law for comparisons.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    /// Uniform on `M_s(R)`.
    Uniform,
    Exact(&'a ExactDist),
}

fn check_compatible(emp: &EmpiricalDist, reference: Reference<'_>) -> Result<()> {
    if let Reference::Exact(d) = reference {
        if d.ring != emp.ring {
            return Err(Error::RingMismatch(
                emp.ring.to_string(),
                d.ring.to_string(),
            ));
        }
        if d.s != emp.s {
            return Err(Error::Shape(format!("S={} vs S={}", emp.s, d.s)));
        }
        if let Some(r) = &d.residual {
            return Err(Error::IndeterminateResidual(r.cells.to_string()));
        }
    }
    Ok(())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Plug-in estimate `(1/2) sum_W |emp(W)/n - ref(W)|`.
pub fn tv_estimate(emp: &EmpiricalDist, reference: Reference<'_>) -> Result<f64> {
    check_compatible(emp, reference)?;
    let n = emp.total as f64;
    let sum = match reference {
        Reference::Uniform => {
            let cells = emp.cell_count();
            let u = 1.0 / cells;
            let observed: f64 = emp.counts.values().map(|&c| (c as f64 / n - u).abs()).sum();
            observed + (cells - emp.counts.len() as f64) * u
        }
        Reference::Exact(d) => {
            let on_ref: f64 = d
                .probs
                .iter()
                .map(|(k, p)| (emp.count(k) as f64 / n - to_f64(p)).abs())
                .sum();
            let off_ref: f64 = emp
                .counts
                .iter()
                .filter(|(k, _)| !d.probs.contains_key(*k))
                .map(|(_, &c)| c as f64 / n)
                .sum();
            on_ref + off_ref
        }
    };
    Ok(sum / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper tail `P(chi^2_df >= x) = Q(df/2, x/2)`.
pub fn chi_squared_p_value(statistic: f64, df: usize) -> f64 {
    if statistic.is_infinite() {
        return 0.0;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    statrs::function::gamma::gamma_ur(df as f64 / 2.0, statistic / 2.0)
}

/// Pearson goodness of fit against the reference law.
///
/// Cells are taken in corner-key order. While some cell expects fewer than
/// [`MIN_EXPECTED`] draws, the two cells with the smallest expectations (earlier
/// key first on ties) are pooled under the lexicographically later of their
/// keys. A draw on a corner of zero reference mass makes the statistic
/// infinite.
pub fn chi_squared_test(emp: &EmpiricalDist, reference: Reference<'_>) -> Result<ChiSquared> {
    check_compatible(emp, reference)?;
    let n = emp.total as f64;
    let mut cells: Vec<(f64, f64)> = match reference {
        Reference::Uniform => {
            let k = emp.cell_count();
            if k > MAX_UNIFORM_CELLS as f64 {
                return Err(Error::TooLarge(format!("{k} cells"), MAX_UNIFORM_CELLS));
            }
            let k = k as u64;
            let s2 = emp.s * emp.s;
            let base = emp.ring.size();
            let mut key = vec![0u64; s2];
            (0..k)
                .map(|idx| {
                    // corner keys in lexicographic (BTreeMap) order
                    let mut x = idx;
                    for slot in key.iter_mut().rev() {
                        *slot = x % base;
                        x /= base;
                    }
                    (n / k as f64, emp.count(&key) as f64)
                })
                .collect()
        }
        Reference::Exact(d) => {
            if emp.counts.keys().any(|k| !d.probs.contains_key(k)) {
                return Ok(ChiSquared {
                    statistic: f64::INFINITY,
                    df: d.probs.len().saturating_sub(1),
                    p_value: 0.0,
                });
            }
            d.probs
                .iter()
                .map(|(k, p)| (n * to_f64(p), emp.count(k) as f64))
                .collect()
        }
    };
    loop {
        if cells.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{} draws leave fewer than two cells with expected count >= {MIN_EXPECTED}",
                emp.total
            )));
        }
        // two smallest expectations, earlier key first on ties
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[a].0.total_cmp(&cells[b].0).then(a.cmp(&b)));
        if cells[order[0]].0 >= MIN_EXPECTED {
            break;
        }
        let (lo, hi) = (order[0].min(order[1]), order[0].max(order[1]));
        let merged = cells.remove(lo);
        cells[hi - 1].0 += merged.0;
        cells[hi - 1].1 += merged.1;
    }
    let statistic: f64 = cells.iter().map(|&(e, o)| (o - e) * (o - e) / e).sum();
    let df = cells.len() - 1;
    Ok(ChiSquared {
        statistic,
        df,
        p_value: chi_squared_p_value(statistic, df),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Exact,
    MonteCarlo,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::Exact => "exact",
            SweepMode::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub mode: SweepMode,
    pub tv_exact: Option<BigRational>,
    pub tv_float: Option<f64>,
    pub draws: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub ring: Arc<Ring>,
    pub s: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// TV values as floats in row order (exact rows converted).
    pub fn tv_values(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match (&r.tv_exact, r.tv_float) {
                (Some(e), _) => to_f64(e),
                (None, Some(f)) => f,
                (None, None) => f64::NAN,
            })
            .collect()
    }
}

/// Child stream used for the Monte Carlo row at dimension `n`.
pub fn sweep_stream(seed: u64, n: usize) -> RngStream {
    RngStream::new(seed).split(&format!("sweep/N={n}"))
}

/// One row per `n`: exact rows from [`exact_corner_dist`] (closed form over
/// fields when `s = 1`, enumeration otherwise), Monte Carlo rows from `draws`
/// sampled corners against the uniform law. Rows are computed in parallel over
/// `threads` workers and reported in `n_list` order.
pub fn convergence_sweep(
    ring: &Arc<Ring>,
    s: usize,
    n_list: &[usize],
    mode: SweepMode,
    draws: usize,
    seed: u64,
    threads: usize,
) -> Result<SweepResult> {
    if n_list.is_empty() {
        return Err(Error::Precondition("empty list of dimensions".into()));
    }
    if let Some(&bad) = n_list.iter().find(|&&n| n < s) {
        return Err(Error::Shape(format!("N={bad} is smaller than S={s}")));
    }
    if mode == SweepMode::MonteCarlo && draws == 0 {
        return Err(Error::Precondition("draws must be >= 1".into()));
    }
    let row = |&n: &usize| -> Result<SweepRow> {
        log::debug!("sweep row N={n} mode={}", mode.as_str());
        match mode {
            SweepMode::Exact => {
                let method = if ring.is_field() && s == 1 {
                    DistMethod::Formula
                } else {
                    DistMethod::Enumerate
                };
                let dist = exact_corner_dist(ring, n, s, method)?;
                Ok(SweepRow {
                    n,
                    mode,
                    tv_exact: Some(tv_to_uniform(&dist)?),
                    tv_float: None,
                    draws: 0,
                    seed: None,
                })
            }
            SweepMode::MonteCarlo => {
                let batch = sample_truncated(ring, n, s, draws, &sweep_stream(seed, n))?;
                let emp = EmpiricalDist::from_batch(&batch)?;
                Ok(SweepRow {
                    n,
                    mode,
                    tv_exact: None,
                    tv_float: Some(tv_estimate(&emp, Reference::Uniform)?),
                    draws: draws as u64,
                    seed: Some(seed),
                })
            }
        }
    };
    let rows: Vec<SweepRow> = if threads <= 1 {
        n_list.iter().map(row).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?;
        pool.install(|| n_list.par_iter().map(row).collect::<Result<_>>())?
    };
    Ok(SweepResult {
        ring: ring.clone(),
        s,
        rows,
    })
}

/// `1 / (2 (2^n - 1))`: exact TV of the `1 x 1` corner over `F_2` to uniform.
pub fn tv_closed_form_f2_corner(n: usize) -> BigRational {
    let den = (num_traits::pow(BigInt::from(2), n) - 1) * 2;
    BigRational::new(BigInt::from(1), den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::exact_corner_dist;

    fn ring(r: Ring) -> Arc<Ring> {
        Arc::new(r)
    }

    fn emp_from(ring: &Arc<Ring>, s: usize, cells: &[(&[u64], u64)]) -> EmpiricalDist {
        let mut counts = BTreeMap::new();
        for (k, c) in cells {
            counts.insert(k.to_vec(), *c);
        }
        EmpiricalDist {
            ring: ring.clone(),
            s,
            total: cells.iter().map(|c| c.1).sum(),
            counts,
        }
    }

    #[test]
    fn p_values_match_tables() {
        assert!((chi_squared_p_value(3.841, 1) - 0.05).abs() < 1e-3);
        assert!((chi_squared_p_value(11.070, 5) - 0.05).abs() < 1e-3);
        assert!((chi_squared_p_value(24.996, 15) - 0.05).abs() < 1e-3);
        assert!((chi_squared_p_value(6.635, 1) - 0.01).abs() < 1e-3);
        // statistic = df
        assert!((chi_squared_p_value(1.0, 1) - 0.3173).abs() < 1e-3);
        assert!((chi_squared_p_value(5.0, 5) - 0.4159).abs() < 1e-3);
        assert!((chi_squared_p_value(15.0, 15) - 0.4514).abs() < 1e-3);
        assert_eq!(chi_squared_p_value(0.0, 3), 1.0);
        assert_eq!(chi_squared_p_value(f64::INFINITY, 3), 0.0);
    }

    #[test]
    fn p_value_closed_forms() {
        // df = 2: Q(1, x/2) = exp(-x/2)
        for x in [0.1, 1.0, 4.0, 30.0] {
            assert!((chi_squared_p_value(x, 2) - (-x / 2.0f64).exp()).abs() < 1e-10);
        }
        // df = 4: exp(-x/2)(1 + x/2)
        for x in [0.5, 3.0, 12.0] {
            let e = (-x / 2.0f64).exp() * (1.0 + x / 2.0);
            assert!((chi_squared_p_value(x, 4) - e).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_expected_counts_give_zero_statistic() {
        let z2 = ring(Ring::zm(2).unwrap());
        let emp = emp_from(&z2, 1, &[(&[0], 500), (&[1], 500)]);
        let chi = chi_squared_test(&emp, Reference::Uniform).unwrap();
        assert_eq!(chi.statistic, 0.0);
        assert_eq!(chi.df, 1);
        assert_eq!(chi.p_value, 1.0);
        assert_eq!(tv_estimate(&emp, Reference::Uniform).unwrap(), 0.0);
    }

    #[test]
    fn tv_of_concentrated_law() {
        let z2 = ring(Ring::zm(2).unwrap());
        let emp = emp_from(&z2, 2, &[(&[1, 0, 0, 1], 10)]);
        assert!((tv_estimate(&emp, Reference::Uniform).unwrap() - 15.0 / 16.0).abs() < 1e-12);
        let z4 = ring(Ring::zm(4).unwrap());
        let emp = emp_from(&z4, 1, &[(&[3], 10)]);
        assert!((tv_estimate(&emp, Reference::Uniform).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn tv_against_exact_reference() {
        let z2 = ring(Ring::zm(2).unwrap());
        let d = exact_corner_dist(&z2, 2, 1, DistMethod::Enumerate).unwrap();
        let emp = emp_from(&z2, 1, &[(&[0], 1), (&[1], 2)]);
        assert!(tv_estimate(&emp, Reference::Exact(&d)).unwrap().abs() < 1e-12);
        let emp = emp_from(&z2, 1, &[(&[1], 5)]);
        assert!((tv_estimate(&emp, Reference::Exact(&d)).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn merge_rule_pools_small_cells() {
        let z2 = ring(Ring::zm(2).unwrap());
        let keys: Vec<Vec<u64>> = (0..16u64)
            .map(|i| vec![i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1])
            .collect();
        let mut emp = emp_from(&z2, 2, &[]);
        for k in &keys {
            emp.counts.insert(k.clone(), 6);
        }
        emp.counts.insert(vec![1, 1, 1, 1], 10);
        emp.total = 100;
        // expected 6.25 per cell: no merging
        let chi = chi_squared_test(&emp, Reference::Uniform).unwrap();
        assert_eq!(chi.df, 15);
        let direct: f64 = emp
            .counts
            .values()
            .map(|&o| (o as f64 - 6.25).powi(2) / 6.25)
            .sum();
        assert!((chi.statistic - direct).abs() < 1e-9);

        // expected 2.5 per cell: pairs pooled into 8 cells of 5
        emp.counts.clear();
        for (i, k) in keys.iter().enumerate() {
            emp.counts.insert(k.clone(), if i % 2 == 0 { 1 } else { 4 });
        }
        emp.total = 40;
        let chi = chi_squared_test(&emp, Reference::Uniform).unwrap();
        assert_eq!(chi.df, 7);
        assert!(chi.statistic.abs() < 1e-12);
    }

    #[test]
    fn insufficient_data() {
        let z2 = ring(Ring::zm(2).unwrap());
        let emp = emp_from(&z2, 1, &[(&[0], 3), (&[1], 3)]);
        assert!(matches!(
            chi_squared_test(&emp, Reference::Uniform),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn draws_off_support_are_rejected() {
        let z2 = ring(Ring::zm(2).unwrap());
        let d = exact_corner_dist(&z2, 2, 2, DistMethod::Enumerate).unwrap();
        let emp = emp_from(&z2, 2, &[(&[0, 0, 0, 0], 1), (&[1, 0, 0, 1], 50)]);
        let chi = chi_squared_test(&emp, Reference::Exact(&d)).unwrap();
        assert_eq!(chi.p_value, 0.0);
    }

    #[test]
    fn mismatched_references() {
        let z2 = ring(Ring::zm(2).unwrap());
        let z3 = ring(Ring::zm(3).unwrap());
        let d = exact_corner_dist(&z3, 2, 1, DistMethod::Enumerate).unwrap();
        let emp = emp_from(&z2, 1, &[(&[0], 3)]);
        assert!(tv_estimate(&emp, Reference::Exact(&d)).is_err());
        let d2 = exact_corner_dist(&z2, 2, 2, DistMethod::Enumerate).unwrap();
        assert!(chi_squared_test(&emp, Reference::Exact(&d2)).is_err());
    }

    #[test]
    fn empirical_from_batch_validates() {
        let z2 = ring(Ring::zm(2).unwrap());
        let z3 = ring(Ring::zm(3).unwrap());
        let a = Matrix::identity(z2.clone(), 1);
        let b = Matrix::identity(z3, 1);
        assert!(EmpiricalDist::from_corners(&z2, 1, [&a, &b]).is_err());
        assert!(EmpiricalDist::from_corners(&z2, 2, [&a]).is_err());
        assert!(EmpiricalDist::from_corners(&z2, 1, []).is_err());
        let e = EmpiricalDist::from_corners(&z2, 1, [&a, &a]).unwrap();
        assert_eq!(e.count(&[1]), 2);
        assert_eq!(e.count(&[0]), 0);
    }

    #[test]
    fn exact_sweep_matches_closed_form() {
        let z2 = ring(Ring::zm(2).unwrap());
        let ns: Vec<usize> = (2..=10).collect();
        let sweep = convergence_sweep(&z2, 1, &ns, SweepMode::Exact, 0, 0, 1).unwrap();
        for row in &sweep.rows {
            assert_eq!(
                row.tv_exact.clone().unwrap(),
                tv_closed_form_f2_corner(row.n)
            );
        }
    }

    #[test]
    fn sweep_is_thread_independent() {
        let z6 = ring(Ring::zm(6).unwrap());
        let a = convergence_sweep(&z6, 1, &[2, 3, 4], SweepMode::MonteCarlo, 2000, 5, 1).unwrap();
        let b = convergence_sweep(&z6, 1, &[2, 3, 4], SweepMode::MonteCarlo, 2000, 5, 3).unwrap();
        assert_eq!(a, b);
        assert!(convergence_sweep(&z6, 2, &[1, 3], SweepMode::Exact, 0, 0, 1).is_err());
    }
}
