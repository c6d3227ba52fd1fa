//! Random complex orthogonal matrices (`gᵀg = I`, plain transpose) and the
//! action of `O(n_1) × … × O(n_r)` on tensors.

use std::str::FromStr;

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::tensor::{strides, Complex64, Tensor};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest `‖gᵀg − I‖_max` accepted as orthogonal.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// `I + A` with a 1-norm condition number above this is regenerated.
pub const CAYLEY_CONDITION_LIMIT: f64 = 1e8;

pub const CAYLEY_RETRIES: usize = 32;

// std of each real/imaginary part of the antisymmetric generator; keeps the
// entries of Q of order one so n-fold products stay well inside f64 range
const CAYLEY_SCALE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthogonalKind {
    /// Product of `n` random Householder reflections; real orthogonal.
    Real,
    /// `(I − A)(I + A)⁻¹` for random complex antisymmetric `A`.
    ComplexCayley,
}

impl FromStr for OrthogonalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(OrthogonalKind::Real),
            "cayley" | "complex_cayley" => Ok(OrthogonalKind::ComplexCayley),
            _ => Err(Error::Parse(format!("unknown orthogonal kind {s:?}"))),
        }
    }
}

/// `‖gᵀg − I‖_max`.
pub fn orthogonality_defect(g: &CMatrix) -> f64 {
    let n = g.nrows();
    let gram = g.transpose() * g;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Deterministic per `(n, kind, seed)`.
pub fn random_orthogonal(n: usize, kind: OrthogonalKind, seed: u64) -> Result<CMatrix> {
    random_orthogonal_with(n, kind, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_orthogonal_with(
    n: usize,
    kind: OrthogonalKind,
    rng: &mut impl Rng,
) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "orthogonal matrices need n ≥ 1".into(),
        ));
    }
    match kind {
        OrthogonalKind::Real => Ok(householder_product(n, rng)),
        OrthogonalKind::ComplexCayley => cayley(n, rng),
    }
}

fn householder_product(n: usize, rng: &mut impl Rng) -> CMatrix {
    let mut q = DMatrix::<f64>::identity(n, n);
    for _ in 0..n {
        let v = loop {
            let v = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
            if v.norm() > 1e-6 {
                break v;
            }
        };
        let h = DMatrix::<f64>::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared());
        q = h * q;
    }
    q.map(|x| Complex::new(x, 0.0))
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn cayley(n: usize, rng: &mut impl Rng) -> Result<CMatrix> {
    let identity = CMatrix::identity(n, n);
    for _ in 0..CAYLEY_RETRIES {
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let z = Complex::new(re, im) * CAYLEY_SCALE;
                a[(i, j)] = z;
                a[(j, i)] = -z;
            }
        }
        let plus = &identity + &a;
        let Some(inv) = plus.clone().try_inverse() else {
            continue;
        };
        if one_norm(&plus) * one_norm(&inv) > CAYLEY_CONDITION_LIMIT {
            continue;
        }
        let q = (&identity - &a) * inv;
        if orthogonality_defect(&q) <= ORTHOGONALITY_TOLERANCE {
            return Ok(q);
        }
    }
    Err(Error::Singular(CAYLEY_RETRIES))
}

/// `(g_1, …, g_r)` with each `g_i ∈ O(n_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalTuple {
    mats: Vec<CMatrix>,
}

impl OrthogonalTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        for (i, g) in mats.iter().enumerate() {
            if !g.is_square() {
                return Err(Error::InvalidArgument(format!(
                    "factor {} is not square",
                    i + 1
                )));
            }
            let defect = orthogonality_defect(g);
            if defect.is_nan() || defect > ORTHOGONALITY_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "factor {} is not orthogonal: ‖gᵀg − I‖ = {defect:e}",
                    i + 1
                )));
            }
        }
        Ok(OrthogonalTuple { mats })
    }

    pub fn identity(dims: &[usize]) -> Self {
        OrthogonalTuple {
            mats: dims.iter().map(|&n| CMatrix::identity(n, n)).collect(),
        }
    }

    pub fn random(dims: &[usize], kind: OrthogonalKind, rng: &mut impl Rng) -> Result<Self> {
        let mats = dims
            .iter()
            .map(|&n| random_orthogonal_with(n, kind, rng))
            .collect::<Result<Vec<_>>>()?;
        OrthogonalTuple::new(mats)
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn dims(&self) -> Vec<usize> {
        self.mats.iter().map(|g| g.nrows()).collect()
    }

    /// Componentwise product `(g_1 g'_1, …, g_r g'_r)`.
    pub fn compose(&self, other: &OrthogonalTuple) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::SizeMismatch {
                expected: self.mats.len(),
                found: other.mats.len(),
            });
        }
        OrthogonalTuple::new(
            self.mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }
}

/// `(g_1 ⊗ … ⊗ g_r) x`: contracts `g_t` against mode `t` for every `t`.
pub fn apply_group(k: &OrthogonalTuple, x: &Tensor<Complex64>) -> Result<Tensor<Complex64>> {
    if k.dims() != x.dims() {
        return Err(Error::InvalidArgument(format!(
            "group dims {:?} do not match tensor dims {:?}",
            k.dims(),
            x.dims()
        )));
    }
    let dims = x.dims().to_vec();
    let st = strides(&dims);
    let total: usize = dims.iter().product();
    let mut current = x.entries().to_vec();
    for (mode, g) in k.mats().iter().enumerate() {
        let n = dims[mode];
        let stride = st[mode];
        let mut next = vec![Complex64::zero(); total];
        // every offset with index 0 along `mode` starts one fibre
        for base in (0..total).filter(|o| (o / stride).is_multiple_of(n)) {
            for i in 0..n {
                let mut acc = Complex64::zero();
                for j in 0..n {
                    acc += g[(i, j)] * current[base + j * stride];
                }
                next[base + i * stride] = acc;
            }
        }
        current = next;
    }
    Tensor::new(dims, current)
}
