//! Exact rank of evaluation matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::tensor::Tensor;
use super::TensorPolynomial;
use crate::error::{Error, Result};

/// Rank of the matrix `M[j][s] = f_j(x_s)`, computed exactly over ℚ.
/// Integral samples are evaluated over ℤ directly.
pub fn evaluation_rank<P: TensorPolynomial>(
    fs: &[P],
    samples: &[Tensor<BigRational>],
) -> Result<usize> {
    if samples.len() < fs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot certify {} polynomials",
            samples.len(),
            fs.len()
        )));
    }
    if samples
        .iter()
        .all(|x| x.entries().iter().all(BigRational::is_integer))
    {
        let ints: Vec<Tensor<BigInt>> = samples
            .iter()
            .map(|x| x.map(BigRational::to_integer))
            .collect();
        let rows = fs
            .iter()
            .map(|f| {
                ints.iter()
                    .map(|x| f.evaluate(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(rank_fraction_free(&rows));
    }
    let rows = fs
        .iter()
        .map(|f| {
            samples
                .iter()
                .map(|x| f.evaluate(x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_fraction_free(&clear_denominators(&rows)))
}

/// Scales each row by the lcm of its denominators.
pub fn clear_denominators(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| (v * &l).to_integer()).collect()
        })
        .collect()
}

/// Bareiss elimination; every intermediate stays an integer.
pub fn rank_fraction_free(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..n_rows {
            for j in col + 1..n_cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}
