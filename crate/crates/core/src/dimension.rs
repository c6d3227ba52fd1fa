//! Stable dimension of the degree `2m` invariants of `O(n_1) × … × O(n_r)`.

use std::fmt::Write as _;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::matchings::{enumerate_matchings_capped, n_of, Matching, Permutation};
use crate::partitions::{enumerate_partitions, factorial};

/// `r` tensor factors, degree `d = 2m`. Stability (`n_i ≥ 2m`) is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DimensionQuery {
    r: u32,
    m: u32,
}

impl DimensionQuery {
    pub fn new(r: u32, m: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        Ok(DimensionQuery { r, m })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

/// `Σ_{λ ⊢ 2m} N(λ)^r / z_λ`, accumulated as one exact rational.
pub fn stable_dimension(q: DimensionQuery) -> Result<BigUint> {
    let mut total = BigRational::zero();
    for lambda in enumerate_partitions(2 * q.m) {
        let n = n_of(&lambda);
        if n.is_zero() {
            continue;
        }
        let term = BigRational::new(BigInt::from(n.pow(q.r)), BigInt::from(lambda.z()));
        total += term;
    }
    into_integer(total, q)
}

fn into_integer(total: BigRational, q: DimensionQuery) -> Result<BigUint> {
    if !total.denom().is_one() {
        return Err(Error::NonIntegral(format!(
            "r={} m={}: {}",
            q.r, q.m, total
        )));
    }
    total
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::NonIntegral(format!("negative sum for r={} m={}", q.r, q.m)))
}

/// Dimension for a raw degree `d`; odd degrees carry no invariants.
pub fn stable_dimension_for_degree(r: u32, d: u32) -> Result<BigUint> {
    let q = DimensionQuery::new(r, d / 2)?;
    if d % 2 == 1 {
        return Ok(BigUint::zero());
    }
    stable_dimension(q)
}

/// How the Burnside oracle walks the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BurnsideMode {
    /// One representative per cycle type, weighted by the class size `(2m)!/z_λ`.
    #[default]
    ClassWeighted,
    /// Every permutation of `S_{2m}`; independent of the partition code.
    Naive,
}

/// Orbit count of `S_{2m}` on `r`-tuples of matchings via Burnside's lemma,
/// with fixed matchings counted by direct commutation tests.
pub fn burnside_dimension_brute(q: DimensionQuery) -> Result<BigUint> {
    burnside_dimension_with(q, BurnsideMode::ClassWeighted, &Limits::default())
}

pub fn burnside_dimension_with(
    q: DimensionQuery,
    mode: BurnsideMode,
    limits: &Limits,
) -> Result<BigUint> {
    let n = 2 * q.m as usize;
    let cap = match mode {
        BurnsideMode::ClassWeighted => limits.brute_points,
        BurnsideMode::Naive => limits.naive_points,
    };
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Burnside oracle points",
            requested: n as u128,
            cap: cap as u128,
        });
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    let matchings: Vec<Matching> = enumerate_matchings_capped(q.m as usize, n)?.collect();
    let fixed = |g: &Permutation| -> BigUint {
        BigUint::from(matchings.iter().filter(|t| t.commutes_with(g)).count())
    };
    let sum: BigUint = match mode {
        BurnsideMode::ClassWeighted => enumerate_partitions(n as u32)
            .iter()
            .map(|lambda| {
                let g = Permutation::of_cycle_type(lambda);
                fixed(&g).pow(q.r) * (factorial(n as u32) / lambda.z())
            })
            .sum(),
        BurnsideMode::Naive => (0..n)
            .permutations(n)
            .map(|image| fixed(&Permutation::new(image).expect("permutation")).pow(q.r))
            .sum(),
    };
    let order = factorial(n as u32);
    if !(&sum % &order).is_zero() {
        return Err(Error::NonIntegral(format!(
            "Burnside sum {sum} not divisible by {order}"
        )));
    }
    Ok(sum / order)
}

/// Grid of stable dimensions, rows `r = 1..=r_max`, columns `m = 1..=m_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionTable {
    pub r_max: u32,
    pub m_max: u32,
    /// `values[r - 1][m - 1]`
    pub values: Vec<Vec<BigUint>>,
}

#[derive(Serialize)]
struct CellJson {
    r: u32,
    m: u32,
    dim: String,
}

#[derive(Serialize)]
struct TableJson {
    rmax: u32,
    mmax: u32,
    cells: Vec<CellJson>,
}

impl DimensionTable {
    pub fn get(&self, r: u32, m: u32) -> Option<&BigUint> {
        self.values
            .get(r.checked_sub(1)? as usize)?
            .get(m.checked_sub(1)? as usize)
    }

    /// Right-aligned text grid with an `r\m` header row.
    pub fn to_text(&self) -> String {
        let header: Vec<String> = (1..=self.m_max).map(|m| m.to_string()).collect();
        let rows: Vec<Vec<String>> = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        let label_width = self.r_max.to_string().len().max(3);
        let widths: Vec<usize> = (0..self.m_max as usize)
            .map(|c| {
                rows.iter()
                    .map(|row| row[c].len())
                    .chain(std::iter::once(header[c].len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = String::new();
        let _ = write!(out, "{:>label_width$}", "r\\m");
        for (c, h) in header.iter().enumerate() {
            let _ = write!(out, "  {:>w$}", h, w = widths[c]);
        }
        out.push('\n');
        for (i, row) in rows.iter().enumerate() {
            let _ = write!(out, "{:>label_width$}", i + 1);
            for (c, v) in row.iter().enumerate() {
                let _ = write!(out, "  {:>w$}", v, w = widths[c]);
            }
            out.push('\n');
        }
        out
    }

    /// `{"rmax":…,"mmax":…,"cells":[{"r":…,"m":…,"dim":"…"}…]}`, row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let cells = self
            .values
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().map(move |(j, v)| CellJson {
                    r: i as u32 + 1,
                    m: j as u32 + 1,
                    dim: v.to_string(),
                })
            })
            .collect();
        serde_json::to_value(TableJson {
            rmax: self.r_max,
            mmax: self.m_max,
            cells,
        })
        .expect("table serialises")
    }
}

/// The single-query JSON object `{"r":…,"m":…,"dim":"…"}`.
pub fn dimension_json(q: DimensionQuery, dim: &BigUint) -> serde_json::Value {
    serde_json::to_value(CellJson {
        r: q.r,
        m: q.m,
        dim: dim.to_string(),
    })
    .expect("cell serialises")
}

pub fn dimension_table(r_max: u32, m_max: u32) -> Result<DimensionTable> {
    if r_max == 0 || m_max == 0 {
        return Err(Error::InvalidArgument(
            "table bounds must be at least 1".into(),
        ));
    }
    let values = (1..=r_max)
        .map(|r| {
            (1..=m_max)
                .map(|m| stable_dimension(DimensionQuery::new(r, m)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DimensionTable {
        r_max,
        m_max,
        values,
    })
}
