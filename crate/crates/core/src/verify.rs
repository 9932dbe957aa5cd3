//! Self-checks run by `haar-modular verify`: small exhaustive invariant
//! checks per module, each reported as one pass/fail line.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::counting::{
    corner_fiber_bounds, corner_fiber_count_invertible, corner_fiber_counts, corner_fiber_formula,
    enumerate_gl, exact_corner_dist, order_gl, tv_to_uniform, DistMethod,
};
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::rings::{factorize, Ring, ZmRing};
use crate::rng::RngStream;
use crate::sampling::{
    sample_gl, sample_truncated, sample_truncated_parallel, sample_uniform_matrix,
};
use crate::stats::{chi_squared_p_value, convergence_sweep, tv_closed_form_f2_corner, SweepMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Rings,
    Matrices,
    Sampling,
    Counting,
    Stats,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rings" => Suite::Rings,
            "matrices" => Suite::Matrices,
            "sampling" => Suite::Sampling,
            "counting" => Suite::Counting,
            "stats" => Suite::Stats,
            "all" => Suite::All,
            _ => return Err(Error::Format(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{}", self.suite, self.name)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

struct Report {
    suite: &'static str,
    lines: Vec<CheckResult>,
}

impl Report {
    fn new(suite: &'static str) -> Self {
        Report {
            suite,
            lines: Vec::new(),
        }
    }

    /// Errors count as failures.
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.lines.push(CheckResult {
            suite: self.suite,
            name: name.into(),
            passed,
            detail,
        });
    }
}

fn arc(r: Result<Ring>) -> Result<Arc<Ring>> {
    r.map(Arc::new)
}

pub fn run(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Rings => rings(),
        Suite::Matrices => matrices(),
        Suite::Sampling => sampling(),
        Suite::Counting => counting(),
        Suite::Stats => stats(),
        Suite::All => [rings(), matrices(), sampling(), counting(), stats()].concat(),
    }
}

fn rings() -> Vec<CheckResult> {
    let mut r = Report::new("rings");
    r.check("factorize_product", || {
        for m in 2..=2000u64 {
            let f = factorize(m)?;
            if f.factors.iter().map(|&(p, e)| p.pow(e)).product::<u64>() != m {
                return Ok((false, format!("m={m}")));
            }
        }
        Ok((true, "2..=2000".into()))
    });
    r.check("crt_round_trip", || {
        for m in [12u64, 30, 360] {
            let z = ZmRing::new(m)?;
            for x in 0..m {
                if z.crt_combine(&z.crt_split(x)?)? != x {
                    return Ok((false, format!("m={m} x={x}")));
                }
            }
        }
        Ok((true, "m in {12,30,360}".into()))
    });
    r.check("field_inverses", || {
        for (p, n) in [(2, 2), (2, 3), (3, 2), (5, 1), (2, 8)] {
            let f = Ring::fq(p, n)?;
            for a in 1..f.size() {
                let inv = f.inv(a).ok_or(Error::DivisionByZero)?;
                if f.mul(a, inv) != 1 {
                    return Ok((false, format!("{f} a={a}")));
                }
            }
        }
        Ok((true, String::new()))
    });
    r.check("local_unit_iff_residue_unit", || {
        for ring in [
            Ring::local_prime_power(2, 3)?,
            Ring::local_truncated(2, 1, 3)?,
            Ring::local_truncated(3, 2, 2)?,
        ] {
            let local = ring
                .as_local()
                .ok_or_else(|| Error::NotLocalRing(ring.size()))?;
            for x in 0..ring.size() {
                if ring.is_unit(x) != (local.residue(x) != 0) {
                    return Ok((false, format!("{ring} x={x}")));
                }
            }
        }
        Ok((true, String::new()))
    });
    r.check("distributivity_z12", || {
        let z = Ring::zm(12)?;
        let ok = (0..12).all(|a| {
            (0..12)
                .all(|b| (0..12).all(|c| z.mul(a, z.add(b, c)) == z.add(z.mul(a, b), z.mul(a, c))))
        });
        Ok((ok, String::new()))
    });
    r.lines
}

fn matrices() -> Vec<CheckResult> {
    let mut r = Report::new("matrices");
    r.check("det_multiplicative", || {
        let mut rng = RngStream::new(0).split("verify/det");
        for ring in [
            arc(Ring::zm(12))?,
            arc(Ring::fq(3, 2))?,
            arc(Ring::local_truncated(2, 1, 2))?,
        ] {
            for _ in 0..200 {
                let a = sample_uniform_matrix(&ring, 3, 3, &mut rng);
                let b = sample_uniform_matrix(&ring, 3, 3, &mut rng);
                if a.mul(&b)?.determinant()? != ring.mul(a.determinant()?, b.determinant()?) {
                    return Ok((false, format!("{ring}")));
                }
            }
        }
        Ok((true, "200 pairs per ring".into()))
    });
    r.check("invertible_iff_residue_invertible", || {
        let ring = arc(Ring::zm(4))?;
        for idx in 0..256u64 {
            let e: Vec<u64> = (0..4).map(|k| idx >> (2 * k) & 3).collect();
            let m = Matrix::new(ring.clone(), 2, 2, e)?;
            if m.is_invertible() != m.is_invertible_by_residue() {
                return Ok((false, format!("{:?}", m.entries())));
            }
        }
        Ok((true, "all of M_2(Z_4)".into()))
    });
    r.check("crt_matrix_round_trip", || {
        let ring = arc(Ring::zm(60))?;
        let mut rng = RngStream::new(0).split("verify/crt");
        for _ in 0..100 {
            let m = sample_uniform_matrix(&ring, 3, 2, &mut rng);
            if Matrix::crt_combine(ring.clone(), &m.crt_split()?)? != m {
                return Ok((false, format!("{:?}", m.entries())));
            }
        }
        Ok((true, String::new()))
    });
    r.lines
}

fn sampling() -> Vec<CheckResult> {
    let mut r = Report::new("sampling");
    r.check("samples_are_invertible", || {
        let mut rng = RngStream::new(0).split("verify/gl");
        for ring in [
            arc(Ring::zm(12))?,
            arc(Ring::fq(2, 2))?,
            arc(Ring::local_prime_power(3, 2))?,
            arc(Ring::local_truncated(2, 1, 2))?,
        ] {
            for _ in 0..100 {
                if !sample_gl(&ring, 4, &mut rng)?.is_invertible() {
                    return Ok((false, format!("{ring}")));
                }
            }
        }
        Ok((true, String::new()))
    });
    r.check("batch_thread_independent", || {
        let ring = arc(Ring::zm(6))?;
        let rng = RngStream::new(0);
        let a = sample_truncated(&ring, 4, 2, 9000, &rng)?;
        let b = sample_truncated_parallel(&ring, 4, 2, 9000, &rng, 4)?;
        Ok((a == b, "9000 corners, 1 vs 4 threads".into()))
    });
    r.check("full_group_support", || {
        // every element of GL_2(F_2) shows up in 600 draws
        let ring = arc(Ring::zm(2))?;
        let batch = sample_truncated(&ring, 2, 2, 600, &RngStream::new(0).split("verify/support"))?;
        let mut seen: Vec<Vec<u64>> = batch.corners.iter().map(|c| c.entries().to_vec()).collect();
        seen.sort();
        seen.dedup();
        Ok((seen.len() == 6, format!("{} distinct", seen.len())))
    });
    r.lines
}

fn counting() -> Vec<CheckResult> {
    let mut r = Report::new("counting");
    let cases: [(&str, Result<Ring>, usize, u64); 5] = [
        ("order_gl_f2_n2", Ring::zm(2), 2, 6),
        ("order_gl_f2_n3", Ring::zm(2), 3, 168),
        ("order_gl_f3_n2", Ring::zm(3), 2, 48),
        ("order_gl_z4_n2", Ring::zm(4), 2, 96),
        ("order_gl_z6_n2", Ring::zm(6), 2, 288),
    ];
    for (name, ring, n, expected) in cases {
        r.check(name, || {
            let ring = Arc::new(ring?);
            let formula = order_gl(&ring, n)?;
            let enumerated = enumerate_gl(&ring, n)?.count() as u64;
            Ok((
                formula == BigUint::from(expected) && enumerated == expected,
                format!("formula {formula}, enumerated {enumerated}"),
            ))
        });
    }
    r.check("fiber_formula_matches_enumeration", || {
        for p in [2u64, 3] {
            for n in 1..=3 {
                if p == 3 && n == 3 {
                    continue;
                }
                let ring = arc(Ring::zm(p))?;
                for s in 1..=n {
                    for (corner, count) in corner_fiber_counts(&ring, n, s)? {
                        let w = Matrix::new(ring.clone(), s, s, corner)?;
                        if w.is_invertible()
                            && corner_fiber_count_invertible(&w, n)? != BigUint::from(count)
                        {
                            return Ok((false, format!("p={p} n={n} s={s}")));
                        }
                        if w.is_invertible()
                            && corner_fiber_formula(p, n, s) != BigUint::from(count)
                        {
                            return Ok((false, format!("p={p} n={n} s={s}")));
                        }
                    }
                }
            }
        }
        Ok((true, String::new()))
    });
    r.check("fiber_counts_within_bounds", || {
        for (p, r_exp, n) in [(2u64, 1u32, 3usize), (3, 1, 2), (2, 2, 2)] {
            let m = p.pow(r_exp);
            let ring = arc(Ring::zm(m))?;
            for s in 1..=n {
                let b = corner_fiber_bounds(p, r_exp, n, s)?;
                for count in corner_fiber_counts(&ring, n, s)?.values() {
                    let c = BigUint::from(*count);
                    if c < b.lower || c > b.upper {
                        return Ok((false, format!("m={m} n={n} s={s}")));
                    }
                }
            }
        }
        Ok((true, String::new()))
    });
    r.check("tv_closed_form_f2", || {
        let ring = arc(Ring::zm(2))?;
        for n in 2..=8 {
            let tv = tv_to_uniform(&exact_corner_dist(&ring, n, 1, DistMethod::Formula)?)?;
            if tv != tv_closed_form_f2_corner(n) {
                return Ok((false, format!("n={n} tv={tv}")));
            }
        }
        Ok((true, "n=2..8".into()))
    });
    r.check("formula_matches_enumeration", || {
        let ring = arc(Ring::zm(3))?;
        let a = exact_corner_dist(&ring, 3, 1, DistMethod::Formula)?;
        let b = exact_corner_dist(&ring, 3, 1, DistMethod::Enumerate)?;
        Ok((a == b, "F_3, N=3, S=1".into()))
    });
    r.lines
}

fn stats() -> Vec<CheckResult> {
    let mut r = Report::new("stats");
    r.check("p_value_table", || {
        let table = [
            (3.841, 1, 0.05),
            (11.070, 5, 0.05),
            (24.996, 15, 0.05),
            (1.0, 1, 0.3173),
            (5.0, 5, 0.4159),
            (15.0, 15, 0.4514),
        ];
        for (x, df, p) in table {
            let got = chi_squared_p_value(x, df);
            if (got - p).abs() > 1e-3 {
                return Ok((false, format!("x={x} df={df} p={got}")));
            }
        }
        Ok((true, String::new()))
    });
    r.check("exact_sweep_decreasing", || {
        let ring = arc(Ring::zm(2))?;
        let ns: Vec<usize> = (2..=10).collect();
        let tv = convergence_sweep(&ring, 1, &ns, SweepMode::Exact, 0, 0, 1)?.tv_values();
        let ok = tv.windows(2).all(|w| w[1] < w[0]) && tv[tv.len() - 1] < 1e-3;
        Ok((ok, format!("final {:.3e}", tv[tv.len() - 1])))
    });
    r.check("sweep_thread_independent", || {
        let ring = arc(Ring::zm(12))?;
        let a = convergence_sweep(&ring, 1, &[2, 3, 4], SweepMode::MonteCarlo, 3000, 0, 1)?;
        let b = convergence_sweep(&ring, 1, &[2, 3, 4], SweepMode::MonteCarlo, 3000, 0, 3)?;
        Ok((a == b, String::new()))
    });
    r.lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let lines = run(Suite::All);
        for l in &lines {
            assert!(l.passed, "{l}");
        }
        assert!(lines.len() >= 20);
    }

    #[test]
    fn suite_names() {
        assert_eq!("counting".parse::<Suite>().unwrap(), Suite::Counting);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
