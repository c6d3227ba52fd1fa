//! Integer partitions, their multiplicity shape and the centraliser order `z_λ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
///
/// The multiplicity view `(1^{b_1} 2^{b_2} …)` is stored next to the parts;
/// the closed-form counts consume the shape, so it is built once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
    mults: BTreeMap<u32, u32>,
}

impl Partition {
    /// Builds a partition from weakly decreasing positive parts.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "partition parts must be positive: {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "partition parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self::from_sorted(parts))
    }

    /// Sorts arbitrary positive parts into a partition.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new())
    }

    fn from_sorted(parts: Vec<u32>) -> Self {
        let mut mults = BTreeMap::new();
        for &p in &parts {
            *mults.entry(p).or_insert(0) += 1;
        }
        Partition { parts, mults }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Part `a` ↦ multiplicity `b_a`, only for parts that occur.
    pub fn mults(&self) -> &BTreeMap<u32, u32> {
        &self.mults
    }

    /// The total `d = Σ parts`.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `z_λ = ∏_a a^{b_a} · b_a!`, the order of the centraliser of a
    /// permutation of cycle type `λ`.
    pub fn z(&self) -> BigUint {
        self.mults.iter().fold(BigUint::one(), |acc, (&a, &b)| {
            acc * BigUint::from(a).pow(b) * factorial(b)
        })
    }

    /// True iff every part is even. The empty partition is even.
    pub fn is_even(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 0)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub fn z_of(lambda: &Partition) -> BigUint {
    lambda.z()
}

pub fn is_even(lambda: &Partition) -> bool {
    lambda.is_even()
}

/// All partitions of `d` in decreasing lexicographic order, e.g. for 4:
/// `(4) (3,1) (2,2) (2,1,1) (1,1,1,1)`. `d = 0` yields the empty partition.
pub fn enumerate_partitions(d: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_partitions(d, d, &mut current, &mut out);
    out
}

fn extend_partitions(
    remaining: u32,
    max_part: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition::from_sorted(current.clone()));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        extend_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

pub fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// Euler's pentagonal recurrence for p(n), independent of the enumerator.
    fn euler_partition_counts(max: usize) -> Vec<u64> {
        let mut counts = vec![0i64; max + 1];
        counts[0] = 1;
        for n in 1..=max {
            let mut total = 0i64;
            for k in 1.. {
                let k = k as i64;
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * counts[n - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= n {
                    total += sign * counts[n - g2];
                }
            }
            counts[n] = total;
        }
        counts.into_iter().map(|c| c as u64).collect()
    }

    fn cycle_type(perm: &[usize]) -> Partition {
        let mut seen = vec![false; perm.len()];
        let mut lens = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            lens.push(len);
        }
        Partition::from_unsorted(lens).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        let four: Vec<_> = enumerate_partitions(4);
        assert_eq!(
            four,
            vec![
                p(&[4]),
                p(&[3, 1]),
                p(&[2, 2]),
                p(&[2, 1, 1]),
                p(&[1, 1, 1, 1])
            ]
        );
        assert_eq!(enumerate_partitions(12).len(), 77);
    }

    #[test]
    fn counts_match_euler_recurrence() {
        let expected = euler_partition_counts(40);
        for d in 0..=40u32 {
            let parts = enumerate_partitions(d);
            assert_eq!(parts.len() as u64, expected[d as usize], "p({d})");
        }
    }

    #[test]
    fn enumeration_is_distinct_and_sums_to_d() {
        for d in 0..=20 {
            let parts = enumerate_partitions(d);
            assert!(parts.iter().all(|l| l.size() == d));
            assert_eq!(parts.iter().unique().count(), parts.len());
            // strictly decreasing lexicographic order
            assert!(parts.windows(2).all(|w| w[0].parts() > w[1].parts()));
        }
    }

    #[test]
    fn z_values() {
        assert_eq!(p(&[1, 1, 1, 1]).z(), BigUint::from(24u32));
        assert_eq!(p(&[2, 1, 1]).z(), BigUint::from(4u32));
        assert_eq!(Partition::empty().z(), BigUint::one());
    }

    #[test]
    fn class_sizes_match_permutation_count() {
        for d in 0..=6usize {
            let mut buckets: BTreeMap<Partition, u64> = BTreeMap::new();
            for perm in (0..d).permutations(d) {
                *buckets.entry(cycle_type(&perm)).or_insert(0) += 1;
            }
            for lambda in enumerate_partitions(d as u32) {
                let size = factorial(d as u32) / lambda.z();
                assert_eq!(size, BigUint::from(buckets[&lambda]), "class {lambda}");
            }
        }
    }

    #[test]
    fn class_equation() {
        for d in 0..=12u32 {
            let total: BigUint = enumerate_partitions(d)
                .iter()
                .map(|l| factorial(d) / l.z())
                .sum();
            assert_eq!(total, factorial(d));
            for l in enumerate_partitions(d) {
                assert!((factorial(d) % l.z()) == BigUint::from(0u32));
            }
        }
    }

    #[test]
    fn evenness() {
        assert!(p(&[4, 2, 2]).is_even());
        assert!(!p(&[3, 1]).is_even());
        let even: Vec<_> = enumerate_partitions(4)
            .into_iter()
            .filter(|l| l.is_even())
            .collect();
        assert_eq!(even, vec![p(&[4]), p(&[2, 2])]);
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(serde_json::from_str::<Partition>("[1,3]").is_err());
    }

    #[test]
    fn json_is_array_of_parts() {
        assert_eq!(serde_json::to_string(&p(&[2, 1, 1])).unwrap(), "[2,1,1]");
    }

    proptest! {
        #[test]
        fn unsorted_parts_give_valid_partition(parts in proptest::collection::vec(1u32..9, 0..12)) {
            let lambda = Partition::from_unsorted(parts.clone()).unwrap();
            prop_assert_eq!(lambda.size(), parts.iter().sum::<u32>());
            prop_assert!(lambda.parts().windows(2).all(|w| w[0] >= w[1]));
            let weighted: u32 = lambda.mults().iter().map(|(a, b)| a * b).sum();
            prop_assert_eq!(weighted, lambda.size());
            let json = serde_json::to_string(&lambda).unwrap();
            prop_assert_eq!(serde_json::from_str::<Partition>(&json).unwrap(), lambda);
        }
    }
}
