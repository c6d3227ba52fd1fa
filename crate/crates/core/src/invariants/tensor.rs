//! Dense tensors over exact or floating scalars, and their JSON file format.

use std::fmt::Debug;
use std::ops::{Add, Mul};

use nalgebra::Complex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Ring elements a polynomial can be evaluated over.
pub trait Scalar: Clone + Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    fn from_i64(v: i64) -> Self;
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

/// Row-major dense array indexed by `(i_1, …, i_r)`, `i_t ∈ 0..n_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S> {
    dims: Vec<usize>,
    entries: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn new(dims: Vec<usize>, entries: Vec<S>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "tensor dims must be positive: {dims:?}"
            )));
        }
        let count: usize = dims.iter().product();
        if entries.len() != count {
            return Err(Error::SizeMismatch {
                expected: count,
                found: entries.len(),
            });
        }
        Ok(Tensor { dims, entries })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let count = dims.iter().product();
        Tensor::new(dims, vec![S::zero(); count])
    }

    /// Builds a tensor by evaluating `f` at every 0-based multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        let count: usize = dims.iter().product();
        let mut index = vec![0; dims.len()];
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            entries.push(f(&index));
            for t in (0..dims.len()).rev() {
                index[t] += 1;
                if index[t] < dims[t] {
                    break;
                }
                index[t] = 0;
            }
        }
        Tensor::new(dims, entries)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index.iter().zip(self.strides()).map(|(&i, s)| i * s).sum()
    }

    pub fn get(&self, index: &[usize]) -> &S {
        &self.entries[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: S) {
        let o = self.offset(index);
        self.entries[o] = value;
    }

    pub fn scale(&self, c: &S) -> Self {
        Tensor {
            dims: self.dims.clone(),
            entries: self.entries.iter().map(|e| c.clone() * e.clone()).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor {
            dims: self.dims.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for t in (0..dims.len().saturating_sub(1)).rev() {
        strides[t] = strides[t + 1] * dims[t + 1];
    }
    strides
}

/// Entries are independent standard complex Gaussians.
pub fn random_complex_tensor(dims: &[usize], rng: &mut impl Rng) -> Result<Tensor<Complex64>> {
    Tensor::from_fn(dims.to_vec(), |_| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Entries drawn uniformly from `lo..=hi`.
pub fn random_integer_tensor(
    dims: &[usize],
    lo: i64,
    hi: i64,
    rng: &mut impl Rng,
) -> Result<Tensor<BigRational>> {
    Tensor::from_fn(dims.to_vec(), |_| {
        BigRational::from_i64(rng.random_range(lo..=hi))
    })
}

/// Entries `p/q` with `p ∈ -range..=range`, `q ∈ 1..=range`.
pub fn random_rational_tensor(
    dims: &[usize],
    range: i64,
    rng: &mut impl Rng,
) -> Result<Tensor<BigRational>> {
    Tensor::from_fn(dims.to_vec(), |_| {
        BigRational::new(
            BigInt::from(rng.random_range(-range..=range)),
            BigInt::from(rng.random_range(1..=range)),
        )
    })
}

/// A tensor read from the JSON file format.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    Rational(Tensor<BigRational>),
    Complex(Tensor<Complex64>),
}

impl TensorData {
    pub fn dims(&self) -> &[usize] {
        match self {
            TensorData::Rational(t) => t.dims(),
            TensorData::Complex(t) => t.dims(),
        }
    }

    pub fn to_complex(&self) -> Tensor<Complex64> {
        match self {
            TensorData::Rational(t) => t.map(rational_to_complex),
            TensorData::Complex(t) => t.clone(),
        }
    }

    /// `{"dims":[…],"entries":[…]}`, row-major. Entries are either all
    /// rational strings (`"p/q"` or `"p"`) or all `[re, im]` number pairs.
    pub fn from_json(value: &Value) -> Result<Self> {
        let dims: Vec<usize> =
            serde_json::from_value(value.get("dims").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Parse(format!("tensor dims: {e}")))?;
        let entries = value
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("tensor entries must be an array".into()))?;
        if entries.iter().all(Value::is_string) {
            let parsed = entries
                .iter()
                .map(|e| parse_rational(e.as_str().expect("checked string")))
                .collect::<Result<Vec<_>>>()?;
            Ok(TensorData::Rational(Tensor::new(dims, parsed)?))
        } else {
            let parsed = entries
                .iter()
                .map(|e| match e.as_array().map(Vec::as_slice) {
                    Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                        (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                        _ => Err(Error::Parse(format!("bad complex entry {e}"))),
                    },
                    _ => Err(Error::Parse(format!(
                        "entry {e} is neither a rational string nor [re, im]"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TensorData::Complex(Tensor::new(dims, parsed)?))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TensorData::Rational(t) => json!({
                "dims": t.dims(),
                "entries": t.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            }),
            TensorData::Complex(t) => json!({
                "dims": t.dims(),
                "entries": t.entries().iter().map(|e| [e.re, e.im]).collect::<Vec<_>>(),
            }),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_complex(q: &BigRational) -> Complex64 {
    use num_traits::ToPrimitive;
    Complex::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
}
