//! Explicit invariant polynomials of matching tuples, their evaluation on
//! tensors, and the harnesses that check invariance and linear independence.
//!
//! For a tuple `(τ_1, …, τ_r)` on `2m` points let `j_i(k)` be the cycle of
//! `τ_i` containing `k`. The associated invariant is
//!
//! ```text
//! Σ_{a^{(i)}_j ∈ 1..n_i}  ∏_{k=1}^{2m} x[a^{(1)}_{j_1(k)}, …, a^{(r)}_{j_r(k)}]
//! ```
//!
//! with one summation index per cycle of each `τ_i`.

pub mod orthogonal;
pub mod rank;
pub mod tensor;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::matchings::Matching;
use crate::orbits::MatchingTuple;

pub use orthogonal::{apply_group, random_orthogonal, OrthogonalKind, OrthogonalTuple};
pub use rank::evaluation_rank;
pub use tensor::{Complex64, Scalar, Tensor, TensorData};

/// Something homogeneous that can be evaluated on a tensor.
pub trait TensorPolynomial {
    fn dims(&self) -> &[usize];

    fn degree(&self) -> usize;

    fn evaluate_with<S: Scalar>(&self, x: &Tensor<S>, budget: u128) -> Result<S>;

    fn evaluate<S: Scalar>(&self, x: &Tensor<S>) -> Result<S> {
        self.evaluate_with(x, Limits::default().eval_budget)
    }
}

fn check_dims(expected: &[usize], x: &[usize]) -> Result<()> {
    if expected == x {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tensor dims {x:?} do not match polynomial dims {expected:?}"
        )))
    }
}

/// The invariant attached to a matching tuple, stored by its cycle indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InvariantPolynomial {
    r: usize,
    m: usize,
    dims: Vec<usize>,
    /// `cycle_index[i][k]`: 0-based cycle of point `k` in factor `i`.
    cycle_index: Vec<Vec<usize>>,
}

impl InvariantPolynomial {
    /// Validates that every factor's ids split the `2m` points into `m` pairs.
    pub fn from_cycle_index(dims: Vec<usize>, cycle_index: Vec<Vec<usize>>) -> Result<Self> {
        let r = cycle_index.len();
        if r == 0 {
            return Err(Error::InvalidArgument("need at least one factor".into()));
        }
        if dims.len() != r {
            return Err(Error::SizeMismatch {
                expected: r,
                found: dims.len(),
            });
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "dims must be positive: {dims:?}"
            )));
        }
        let points = cycle_index[0].len();
        if points % 2 == 1 {
            return Err(Error::InvalidArgument("odd number of points".into()));
        }
        let m = points / 2;
        for ids in &cycle_index {
            if ids.len() != points {
                return Err(Error::SizeMismatch {
                    expected: points,
                    found: ids.len(),
                });
            }
            let mut count = vec![0usize; m];
            for &j in ids {
                if j >= m {
                    return Err(Error::InvalidArgument(format!(
                        "cycle id {} outside 1..={m}",
                        j + 1
                    )));
                }
                count[j] += 1;
            }
            if count.iter().any(|&c| c != 2) {
                return Err(Error::InvalidArgument(format!(
                    "cycle ids {ids:?} are not a pairing"
                )));
            }
        }
        Ok(InvariantPolynomial {
            r,
            m,
            dims,
            cycle_index,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cycle_index(&self) -> &[Vec<usize>] {
        &self.cycle_index
    }

    /// The matching tuple the cycle indices came from.
    pub fn tuple(&self) -> MatchingTuple {
        let taus = self
            .cycle_index
            .iter()
            .map(|ids| {
                let mut first = vec![usize::MAX; self.m];
                let mut pair = vec![0; 2 * self.m];
                for (k, &j) in ids.iter().enumerate() {
                    if first[j] == usize::MAX {
                        first[j] = k;
                    } else {
                        pair[k] = first[j];
                        pair[first[j]] = k;
                    }
                }
                Matching::new(pair).expect("validated pairing")
            })
            .collect();
        MatchingTuple::new(taus).expect("uniform size")
    }

    /// Number of scalar multiplies a full evaluation needs.
    pub fn cost(&self) -> u128 {
        let terms = self.dims.iter().fold(1u128, |acc, &n| {
            acc.saturating_mul((n as u128).saturating_pow(self.m as u32))
        });
        terms.saturating_mul(2 * self.m as u128)
    }

    /// Expands into explicit monomials with integer coefficients.
    pub fn expand(&self) -> Result<ExplicitPolynomial> {
        self.expand_with(Limits::default().eval_budget)
    }

    pub fn expand_with(&self, budget: u128) -> Result<ExplicitPolynomial> {
        let mut terms: BTreeMap<Vec<Vec<usize>>, BigUint> = BTreeMap::new();
        self.for_each_assignment(budget, |digits| {
            let mut monomial: Vec<Vec<usize>> = (0..2 * self.m)
                .map(|k| {
                    (0..self.r)
                        .map(|i| digits[i * self.m + self.cycle_index[i][k]])
                        .collect()
                })
                .collect();
            monomial.sort();
            *terms.entry(monomial).or_insert_with(BigUint::zero) += 1u32;
        })?;
        Ok(ExplicitPolynomial {
            dims: self.dims.clone(),
            degree: 2 * self.m,
            terms,
        })
    }

    /// Odometer over every assignment of the `r·m` summation indices.
    fn for_each_assignment(&self, budget: u128, mut visit: impl FnMut(&[usize])) -> Result<()> {
        let cost = self.cost();
        if cost > budget {
            return Err(Error::BudgetExceeded {
                required: cost,
                budget,
            });
        }
        let radix: Vec<usize> = (0..self.r * self.m)
            .map(|d| self.dims[d / self.m.max(1)])
            .collect();
        let mut digits = vec![0usize; radix.len()];
        loop {
            visit(&digits);
            let mut d = 0;
            loop {
                if d == digits.len() {
                    return Ok(());
                }
                digits[d] += 1;
                if digits[d] < radix[d] {
                    break;
                }
                digits[d] = 0;
                d += 1;
            }
        }
    }

    /// Subscript notation, e.g.
    /// `\sum_{a_1^{(1)},a_2^{(1)}}^{n_1} x_{a_1^{(1)}}x_{a_1^{(1)}}x_{a_2^{(1)}}x_{a_2^{(1)}}`.
    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        for i in 0..self.r {
            let indices: Vec<String> = (1..=self.m)
                .map(|j| format!("a_{j}^{{({})}}", i + 1))
                .collect();
            out.push_str(&format!("\\sum_{{{}}}^{{n_{}}} ", indices.join(","), i + 1));
        }
        for k in 0..2 * self.m {
            out.push_str("x_{");
            for i in 0..self.r {
                out.push_str(&format!("a_{}^{{({})}}", self.cycle_index[i][k] + 1, i + 1));
            }
            out.push('}');
        }
        out
    }

    /// `{"r","m","dims","tuple","cycle_index"}`, all indices 1-based.
    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "m": self.m,
            "dims": self.dims,
            "tuple": self.tuple(),
            "cycle_index": self
                .cycle_index
                .iter()
                .map(|ids| ids.iter().map(|j| j + 1).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_latex())
    }
}

impl TensorPolynomial for InvariantPolynomial {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn degree(&self) -> usize {
        2 * self.m
    }

    fn evaluate_with<S: Scalar>(&self, x: &Tensor<S>, budget: u128) -> Result<S> {
        check_dims(&self.dims, x.dims())?;
        let strides = x.strides();
        let entries = x.entries();
        let mut total = S::zero();
        // offsets of the 2m factors are recomputed per term; r·2m adds is
        // small next to the 2m scalar multiplies
        self.for_each_assignment(budget, |digits| {
            let mut term = S::one();
            for k in 0..2 * self.m {
                let offset: usize = (0..self.r)
                    .map(|i| digits[i * self.m + self.cycle_index[i][k]] * strides[i])
                    .sum();
                term = term * entries[offset].clone();
            }
            total = total.clone() + term;
        })?;
        Ok(total)
    }
}

/// Builds the invariant of `t` with factor sizes `dims`. Cycles of each
/// `τ_i` are numbered by increasing smallest element.
pub fn build_invariant(t: &MatchingTuple, dims: &[usize]) -> Result<InvariantPolynomial> {
    if dims.len() != t.r() {
        return Err(Error::SizeMismatch {
            expected: t.r(),
            found: dims.len(),
        });
    }
    let cycle_index = t
        .taus()
        .iter()
        .map(|tau| {
            let mut ids = vec![0; tau.points()];
            for (j, (a, b)) in tau.pairs().into_iter().enumerate() {
                ids[a] = j;
                ids[b] = j;
            }
            ids
        })
        .collect();
    InvariantPolynomial::from_cycle_index(dims.to_vec(), cycle_index)
}

/// `Σ c_μ ∏ x[μ_k]` over explicit monomials (sorted coordinate multisets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitPolynomial {
    dims: Vec<usize>,
    degree: usize,
    terms: BTreeMap<Vec<Vec<usize>>, BigUint>,
}

impl ExplicitPolynomial {
    /// `x[coordinate]^power` for a 0-based coordinate.
    pub fn monomial_power(dims: Vec<usize>, coordinate: Vec<usize>, power: usize) -> Result<Self> {
        if coordinate.len() != dims.len() || coordinate.iter().zip(&dims).any(|(&c, &n)| c >= n) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {coordinate:?} outside dims {dims:?}"
            )));
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![coordinate; power], BigUint::one());
        Ok(ExplicitPolynomial {
            dims,
            degree: power,
            terms,
        })
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Vec<usize>>, BigUint> {
        &self.terms
    }
}

impl TensorPolynomial for ExplicitPolynomial {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn evaluate_with<S: Scalar>(&self, x: &Tensor<S>, budget: u128) -> Result<S> {
        check_dims(&self.dims, x.dims())?;
        let cost = (self.terms.len() as u128).saturating_mul(self.degree as u128 + 1);
        if cost > budget {
            return Err(Error::BudgetExceeded {
                required: cost,
                budget,
            });
        }
        let mut total = S::zero();
        for (monomial, coeff) in &self.terms {
            let c = S::from_i64(coeff.to_i64().expect("coefficient fits in i64"));
            let term = monomial
                .iter()
                .fold(c, |acc, coord| acc * x.get(coord).clone());
            total = total + term;
        }
        Ok(total)
    }
}

/// `|f(k·x) − f(x)| / max(1, |f(x)|)`.
pub fn verify_invariance<P: TensorPolynomial>(
    f: &P,
    x: &Tensor<Complex64>,
    k: &OrthogonalTuple,
) -> Result<f64> {
    let before = f.evaluate(x)?;
    let after = f.evaluate(&apply_group(k, x)?)?;
    Ok((after - before).norm() / before.norm().max(1.0))
}
