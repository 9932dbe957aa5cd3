//! Wire formats: ring and matrix JSON, sample batches as JSON lines, exact
//! laws, bound reports, sweep tables, and the dimension-list flag.
//!
//! Big integers and rationals are written as decimal strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::counting::{BoundsReport, ExactDist, ResidualMass};
use crate::error::{Error, Result};
use crate::matrices::{Matrix, MatrixRecord};
use crate::rings::{Ring, RingDescriptor};
use crate::sampling::SampleBatch;
use crate::stats::{ChiSquared, SweepMode, SweepResult};

/// Largest dimension accepted by [`parse_n_list`].
pub const MAX_DIMENSION: usize = 4096;
/// Longest list accepted by [`parse_n_list`].
pub const MAX_N_LIST: usize = 4096;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: String,
    pub den: String,
}

impl Fraction {
    pub fn from_rational(r: &BigRational) -> Self {
        Fraction {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }

    pub fn to_rational(&self) -> Result<BigRational> {
        let num: BigInt = self.num.parse().map_err(format_err)?;
        let den: BigInt = self.den.parse().map_err(format_err)?;
        if den.is_zero() {
            return Err(Error::Format("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    }
}

pub fn parse_ring_json(s: &str) -> Result<Ring> {
    let d: RingDescriptor = serde_json::from_str(s).map_err(format_err)?;
    Ring::from_descriptor(&d)
}

pub fn ring_to_json(ring: &Ring) -> String {
    serde_json::to_string(&ring.descriptor()).expect("descriptor serializes")
}

pub fn parse_matrix_json(s: &str) -> Result<Matrix> {
    let rec: MatrixRecord = serde_json::from_str(s).map_err(format_err)?;
    Matrix::from_record(&rec)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string(&m.to_record()).expect("matrix serializes")
}

/// `"2..10"` (inclusive), `"4,8,16,24"`, or a comma list mixing both.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let parse = |t: &str| -> Result<usize> {
            let n: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad dimension {t:?}")))?;
            if n == 0 || n > MAX_DIMENSION {
                return Err(Error::Format(format!(
                    "dimension {n} outside 1..={MAX_DIMENSION}"
                )));
            }
            Ok(n)
        };
        let (lo, hi) = match item.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let n = parse(item)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(Error::Format(format!("empty range {item:?}")));
        }
        if out.len() + (hi - lo + 1) > MAX_N_LIST {
            return Err(Error::Format(format!("more than {MAX_N_LIST} dimensions")));
        }
        out.extend(lo..=hi);
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchHeader {
    ring: RingDescriptor,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "S")]
    s: usize,
    seed: u64,
    rng_version: String,
    count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CornerRecord {
    entries: Vec<u64>,
}

/// Header line, then one `{"entries":[...]}` line per corner.
pub fn batch_to_jsonl(batch: &SampleBatch) -> String {
    let header = BatchHeader {
        ring: batch.ring.descriptor(),
        n: batch.n,
        s: batch.s,
        seed: batch.seed,
        rng_version: batch.rng_version.clone(),
        count: batch.corners.len() as u64,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for c in &batch.corners {
        out.push_str("{\"entries\":[");
        for (i, x) in c.entries().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{x}").unwrap();
        }
        out.push_str("]}\n");
    }
    out
}

pub fn parse_batch_jsonl(s: &str) -> Result<SampleBatch> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let header: BatchHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::Format("missing batch header".into()))?,
    )
    .map_err(format_err)?;
    if header.s == 0 || header.s > header.n {
        return Err(Error::Format(format!("S={} with N={}", header.s, header.n)));
    }
    let ring = Arc::new(Ring::from_descriptor(&header.ring)?);
    let width = header
        .s
        .checked_mul(header.s)
        .ok_or_else(|| Error::Format("corner size overflows".into()))?;
    let mut corners = Vec::new();
    for (i, line) in lines.enumerate() {
        let rec: CornerRecord = serde_json::from_str(line).map_err(format_err)?;
        if rec.entries.len() != width {
            return Err(Error::Format(format!(
                "record {i}: {} entries, expected {width}",
                rec.entries.len()
            )));
        }
        let m = Matrix::new(ring.clone(), header.s, header.s, rec.entries)
            .map_err(|e| Error::Format(format!("record {i}: {e}")))?;
        corners.push(m);
    }
    if corners.len() as u64 != header.count {
        return Err(Error::Format(format!(
            "header announces {} corners, found {}",
            header.count,
            corners.len()
        )));
    }
    Ok(SampleBatch {
        ring,
        n: header.n,
        s: header.s,
        seed: header.seed,
        rng_version: header.rng_version,
        corners,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistCell {
    corner: Vec<u64>,
    prob: Fraction,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidualRecord {
    mass: Fraction,
    cells: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistRecord {
    ring: RingDescriptor,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "S")]
    s: usize,
    probs: Vec<DistCell>,
    residual: Option<ResidualRecord>,
}

pub fn exact_dist_to_json(d: &ExactDist) -> String {
    let rec = DistRecord {
        ring: d.ring.descriptor(),
        n: d.n,
        s: d.s,
        probs: d
            .probs
            .iter()
            .map(|(k, p)| DistCell {
                corner: k.clone(),
                prob: Fraction::from_rational(p),
            })
            .collect(),
        residual: d.residual.as_ref().map(|r| ResidualRecord {
            mass: Fraction::from_rational(&r.mass),
            cells: r.cells.to_string(),
        }),
    };
    serde_json::to_string_pretty(&rec).expect("dist serializes")
}

/// Parses and validates an exact law: entries in range, positive masses, no
/// duplicate corners, total mass exactly one.
pub fn parse_exact_dist_json(s: &str) -> Result<ExactDist> {
    let rec: DistRecord = serde_json::from_str(s).map_err(format_err)?;
    if rec.s == 0 || rec.s > rec.n {
        return Err(Error::Format(format!("S={} with N={}", rec.s, rec.n)));
    }
    let ring = Arc::new(Ring::from_descriptor(&rec.ring)?);
    let width = rec
        .s
        .checked_mul(rec.s)
        .ok_or_else(|| Error::Format("corner size overflows".into()))?;
    let mut probs = BTreeMap::new();
    for cell in rec.probs {
        if cell.corner.len() != width {
            return Err(Error::Format(format!(
                "corner of length {}",
                cell.corner.len()
            )));
        }
        for &x in &cell.corner {
            ring.check(x).map_err(format_err)?;
        }
        let p = cell.prob.to_rational()?;
        if !p.is_positive() {
            return Err(Error::Format("non-positive probability".into()));
        }
        if probs.insert(cell.corner, p).is_some() {
            return Err(Error::Format("duplicate corner".into()));
        }
    }
    let residual = match rec.residual {
        None => None,
        Some(r) => {
            let mass = r.mass.to_rational()?;
            if mass.is_negative() {
                return Err(Error::Format("negative residual mass".into()));
            }
            let cells: BigUint = r.cells.parse().map_err(format_err)?;
            Some(ResidualMass { mass, cells })
        }
    };
    let dist = ExactDist {
        ring,
        n: rec.n,
        s: rec.s,
        probs,
        residual,
    };
    if dist.total_mass() != BigRational::from_integer(1.into()) {
        return Err(Error::Format("probabilities do not sum to 1".into()));
    }
    Ok(dist)
}

pub fn bounds_to_json(b: &BoundsReport) -> String {
    let v = serde_json::json!({
        "p": b.p,
        "r": b.r,
        "N": b.n,
        "S": b.s,
        "lower": b.lower.to_string(),
        "upper": b.upper.to_string(),
        "ratio_lower": Fraction::from_rational(&b.ratio_lower),
        "ratio_upper": b.ratio_upper.as_ref().map(Fraction::from_rational),
    });
    serde_json::to_string_pretty(&v).expect("bounds serialize")
}

pub fn order_to_json(ring: &Ring, n: usize, order: &BigUint) -> String {
    let v = serde_json::json!({
        "ring": ring.descriptor(),
        "N": n,
        "order": order.to_string(),
    });
    serde_json::to_string(&v).expect("order serializes")
}

pub fn chi_squared_to_json(chi: &ChiSquared, tv: f64, draws: u64) -> String {
    let v = serde_json::json!({
        "draws": draws,
        "tv": tv,
        "chi_squared": {
            "statistic": float_value(chi.statistic),
            "df": chi.df,
            "p_value": chi.p_value,
        },
    });
    serde_json::to_string_pretty(&v).expect("report serializes")
}

/// JSON has no infinity; the statistic for an impossible observation is
/// written as the string `"inf"`.
fn float_value(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from("inf")
    }
}

pub const SWEEP_CSV_HEADER: &str = "N,mode,tv_num,tv_den,tv_float,draws,seed";

pub fn sweep_to_csv(sweep: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &sweep.rows {
        let (num, den) = match &row.tv_exact {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let float = row.tv_float.map(|f| f.to_string()).unwrap_or_default();
        let (draws, seed) = match row.mode {
            SweepMode::Exact => (String::new(), String::new()),
            SweepMode::MonteCarlo => (
                row.draws.to_string(),
                row.seed.map(|s| s.to_string()).unwrap_or_default(),
            ),
        };
        writeln!(
            out,
            "{},{},{num},{den},{float},{draws},{seed}",
            row.n,
            row.mode.as_str()
        )
        .unwrap();
    }
    out
}

pub fn sweep_to_json(sweep: &SweepResult) -> String {
    let rows: Vec<Value> = sweep
        .rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "N": row.n,
                "mode": row.mode.as_str(),
                "tv_num": row.tv_exact.as_ref().map(|r| r.numer().to_string()),
                "tv_den": row.tv_exact.as_ref().map(|r| r.denom().to_string()),
                "tv_float": row.tv_float,
                "draws": (row.mode == SweepMode::MonteCarlo).then_some(row.draws),
                "seed": row.seed,
            })
        })
        .collect();
    let v = serde_json::json!({
        "ring": sweep.ring.descriptor(),
        "S": sweep.s,
        "rows": rows,
    });
    serde_json::to_string_pretty(&v).expect("sweep serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{corner_fiber_bounds, exact_corner_dist, DistMethod};
    use crate::rng::RngStream;
    use crate::sampling::sample_truncated;
    use crate::stats::convergence_sweep;

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("2..10").unwrap(), (2..=10).collect::<Vec<_>>());
        assert_eq!(parse_n_list("4,8,16,24").unwrap(), vec![4, 8, 16, 24]);
        assert_eq!(parse_n_list("2..3, 7").unwrap(), vec![2, 3, 7]);
        assert_eq!(parse_n_list("5").unwrap(), vec![5]);
        for bad in [
            "",
            "0",
            "3..2",
            "a",
            "1..",
            "..4",
            "2,,3",
            "99999999999999999999",
            "1..4097",
        ] {
            assert!(parse_n_list(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ring_and_matrix_round_trip() {
        let r = parse_ring_json(r#"{"kind":"fq","p":2,"n":2}"#).unwrap();
        assert_eq!(
            ring_to_json(&r),
            r#"{"kind":"fq","p":2,"n":2,"poly":[1,1,1]}"#
        );
        assert!(parse_ring_json(r#"{"kind":"zm","m":1}"#).is_err());
        assert!(parse_ring_json(r#"{"kind":"zz","m":4}"#).is_err());

        let m = parse_matrix_json(
            r#"{"ring":{"kind":"zm","m":6},"rows":2,"cols":2,"entries":[1,2,3,5]}"#,
        )
        .unwrap();
        assert_eq!(parse_matrix_json(&matrix_to_json(&m)).unwrap(), m);
        assert!(parse_matrix_json(
            r#"{"ring":{"kind":"zm","m":6},"rows":2,"cols":2,"entries":[1,2,3,6]}"#
        )
        .is_err());
        assert!(parse_matrix_json(
            r#"{"ring":{"kind":"zm","m":6},"rows":2,"cols":2,"entries":[1]}"#
        )
        .is_err());
    }

    #[test]
    fn batch_round_trip() {
        let ring = Arc::new(Ring::zm(12).unwrap());
        let batch = sample_truncated(&ring, 3, 2, 50, &RngStream::new(4)).unwrap();
        let text = batch_to_jsonl(&batch);
        assert!(
            text.starts_with(r#"{"ring":{"kind":"zm","m":12},"N":3,"S":2,"seed":4,"rng_version":"#)
        );
        assert_eq!(text.lines().count(), 51);
        assert_eq!(parse_batch_jsonl(&text).unwrap(), batch);

        let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(parse_batch_jsonl(&truncated).is_err());
        let header = text.lines().next().unwrap();
        assert!(parse_batch_jsonl(&format!("{header}\n{{\"entries\":[1,2,3]}}")).is_err());
        assert!(parse_batch_jsonl("").is_err());
    }

    #[test]
    fn dist_round_trip() {
        let ring = Arc::new(Ring::zm(2).unwrap());
        let d = exact_corner_dist(&ring, 2, 1, DistMethod::Enumerate).unwrap();
        let text = exact_dist_to_json(&d);
        assert!(text.contains(r#""num": "2""#) && text.contains(r#""den": "3""#));
        assert_eq!(parse_exact_dist_json(&text).unwrap(), d);

        let f4 = Arc::new(Ring::fq(2, 2).unwrap());
        let d = exact_corner_dist(&f4, 3, 2, DistMethod::Formula).unwrap();
        assert!(d.residual.is_some());
        assert_eq!(parse_exact_dist_json(&exact_dist_to_json(&d)).unwrap(), d);

        let broken = text.replace(r#""num": "2""#, r#""num": "1""#);
        assert!(parse_exact_dist_json(&broken).is_err());
    }

    #[test]
    fn bounds_and_sweep_formats() {
        let b = corner_fiber_bounds(2, 1, 3, 1).unwrap();
        let v: Value = serde_json::from_str(&bounds_to_json(&b)).unwrap();
        assert_eq!(v["ratio_lower"]["num"], "3");
        assert_eq!(v["ratio_lower"]["den"], "4");
        assert!(v["lower"].is_string());

        let z2 = Arc::new(Ring::zm(2).unwrap());
        let sweep = convergence_sweep(&z2, 1, &[2, 3], SweepMode::Exact, 0, 0, 1).unwrap();
        assert_eq!(
            sweep_to_csv(&sweep),
            "N,mode,tv_num,tv_den,tv_float,draws,seed\n2,exact,1,6,,,\n3,exact,1,14,,,\n"
        );
        let v: Value = serde_json::from_str(&sweep_to_json(&sweep)).unwrap();
        assert_eq!(v["rows"][1]["tv_den"], "14");

        let mc = convergence_sweep(&z2, 1, &[2], SweepMode::MonteCarlo, 100, 9, 1).unwrap();
        let csv = sweep_to_csv(&mc);
        let row = csv.lines().nth(1).unwrap();
        assert!(
            row.starts_with("2,mc,,,0.") && row.ends_with(",100,9"),
            "{row}"
        );
    }
}
