use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Serializable ring description.
///
/// JSON: `{"kind":"zm","m":12}`, `{"kind":"fq","p":2,"n":2,"poly":[1,1,1]}`,
/// `{"kind":"local_pp","p":2,"r":2}`, `{"kind":"local_tp","p":2,"n":1,"k":2}`.
///
/// Flag grammar: `zm:<m>`, `fq:<p>:<n>[:poly=c0,c1,...]`, `local_pp:<p>:<r>`,
/// `local_tp:<p>:<n>:<k>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingDescriptor {
    Zm {
        m: u64,
    },
    Fq {
        p: u64,
        n: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poly: Option<Vec<u64>>,
    },
    LocalPp {
        p: u64,
        r: u32,
    },
    LocalTp {
        p: u64,
        n: u32,
        k: u32,
    },
}

impl FromStr for RingDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Format(format!("invalid ring flag {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let small = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["zm", m] => Ok(RingDescriptor::Zm { m: int(m)? }),
            ["fq", p, n] => Ok(RingDescriptor::Fq {
                p: int(p)?,
                n: small(n)?,
                poly: None,
            }),
            ["fq", p, n, poly] => {
                let coeffs = poly.strip_prefix("poly=").ok_or_else(bad)?;
                let poly = coeffs.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
                Ok(RingDescriptor::Fq {
                    p: int(p)?,
                    n: small(n)?,
                    poly: Some(poly),
                })
            }
            ["local_pp", p, r] => Ok(RingDescriptor::LocalPp {
                p: int(p)?,
                r: small(r)?,
            }),
            ["local_tp", p, n, k] => Ok(RingDescriptor::LocalTp {
                p: int(p)?,
                n: small(n)?,
                k: small(k)?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Zm { m } => write!(f, "zm:{m}"),
            RingDescriptor::Fq { p, n, poly: None } => write!(f, "fq:{p}:{n}"),
            RingDescriptor::Fq {
                p,
                n,
                poly: Some(poly),
            } => {
                let c: Vec<String> = poly.iter().map(u64::to_string).collect();
                write!(f, "fq:{p}:{n}:poly={}", c.join(","))
            }
            RingDescriptor::LocalPp { p, r } => write!(f, "local_pp:{p}:{r}"),
            RingDescriptor::LocalTp { p, n, k } => write!(f, "local_tp:{p}:{n}:{k}"),
        }
    }
}
