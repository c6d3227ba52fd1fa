//! Permutations, fixed-point-free involutions and the count `N(λ)` of
//! matchings commuting with a permutation of cycle type `λ`.
//!
//! Points are `0..n` internally. Everything that is parsed or printed uses
//! `1..=n`, so `(1 4)(2 3)` is the matching pairing points 0↔3 and 1↔2.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partitions::{factorial, Partition};

/// A bijection of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Wraps a 0-based image array, checking that it is a bijection.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation of 0..{n}: {image:?}"
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds a permutation of `1..=n` from 1-based disjoint cycles.
    pub fn from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (k, &point) in cycle.iter().enumerate() {
                if point == 0 || point > n {
                    return Err(Error::InvalidArgument(format!(
                        "point {point} outside 1..={n}"
                    )));
                }
                if seen[point - 1] {
                    return Err(Error::InvalidArgument(format!(
                        "point {point} appears in two cycles"
                    )));
                }
                seen[point - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                if next == 0 || next > n {
                    return Err(Error::InvalidArgument(format!(
                        "point {next} outside 1..={n}"
                    )));
                }
                image[point - 1] = next - 1;
            }
        }
        Permutation::new(image)
    }

    /// Parses cycle notation such as `(1 3 5)(2 4)(6)`. When `n` is `None`
    /// the degree is the largest point mentioned.
    pub fn parse(s: &str, n: Option<usize>) -> Result<Self> {
        let cycles = parse_cycles(s)?;
        let largest = cycles.iter().flatten().copied().max().unwrap_or(0);
        let n = n.unwrap_or(largest);
        Permutation::from_cycles(&cycles, n)
    }

    /// Canonical permutation of cycle type `λ`: cycles are filled with
    /// consecutive points, longest cycle first.
    pub fn of_cycle_type(lambda: &Partition) -> Self {
        let n = lambda.size() as usize;
        let mut image = vec![0; n];
        let mut start = 0;
        for &len in lambda.parts() {
            let len = len as usize;
            for k in 0..len {
                image[start + k] = start + (k + 1) % len;
            }
            start += len;
        }
        Permutation { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        check_size(self.len(), other.len())?;
        Ok(Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.len()];
        for (i, &j) in self.image.iter().enumerate() {
            image[j] = i;
        }
        Permutation { image }
    }

    /// Disjoint cycles (0-based), each starting at its smallest point, ordered
    /// by that point. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.image[i];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_type(&self) -> Partition {
        let lens = self.cycles().iter().map(|c| c.len() as u32).collect();
        Partition::from_unsorted(lens).expect("cycle lengths are positive")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, 1-based, fixed points omitted; the identity prints `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write_cycle(f, &cycle)?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

fn write_cycle(f: &mut fmt::Formatter<'_>, cycle: &[usize]) -> fmt::Result {
    write!(f, "(")?;
    for (k, p) in cycle.iter().enumerate() {
        if k > 0 {
            write!(f, " ")?;
        }
        write!(f, "{}", p + 1)?;
    }
    write!(f, ")")
}

/// Parses `(a b c)(d e)…` into 1-based cycles. Whitespace and commas separate
/// points; `()` is an empty cycle and is dropped.
pub fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' in cycle notation {s:?}")))?;
        let close = open
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
        let body = &open[..close];
        let cycle = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad point {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn check_size(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, found })
    }
}

/// A fixed-point-free involution on `2m` points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<[usize; 2]>", into = "Vec<[usize; 2]>")]
pub struct Matching {
    pair: Vec<usize>,
}

impl Matching {
    /// Wraps a 0-based partner array.
    pub fn new(pair: Vec<usize>) -> Result<Self> {
        let n = pair.len();
        for (i, &j) in pair.iter().enumerate() {
            if j >= n || j == i || pair[j] != i {
                return Err(Error::InvalidArgument(format!(
                    "not a fixed-point-free involution: {pair:?}"
                )));
            }
        }
        Ok(Matching { pair })
    }

    /// Builds a matching from 1-based pairs covering `1..=2m`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let n = pairs.len() * 2;
        let mut pair = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::InvalidArgument(format!(
                    "pair ({a} {b}) outside 1..={n}"
                )));
            }
            if pair[a - 1] != usize::MAX || pair[b - 1] != usize::MAX {
                return Err(Error::InvalidArgument(format!(
                    "point repeated in pairs {pairs:?}"
                )));
            }
            pair[a - 1] = b - 1;
            pair[b - 1] = a - 1;
        }
        Matching::new(pair)
    }

    /// `(1 2)(3 4)…(2m−1 2m)`, the lexicographically least matching.
    pub fn adjacent(m: usize) -> Self {
        Matching {
            pair: (0..2 * m).map(|i| i ^ 1).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.pair.len() / 2
    }

    pub fn points(&self) -> usize {
        self.pair.len()
    }

    #[inline]
    pub fn partner(&self, i: usize) -> usize {
        self.pair[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pair
    }

    /// 0-based pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.pair
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| (i, j))
            .collect()
    }

    /// Appends the flattened sorted pair list to `out`; this is the
    /// serialisation order that canonical forms minimise.
    pub fn push_key(&self, out: &mut Vec<u8>) {
        for (i, &j) in self.pair.iter().enumerate() {
            if i < j {
                out.push(i as u8);
                out.push(j as u8);
            }
        }
    }

    pub fn as_permutation(&self) -> Permutation {
        Permutation {
            image: self.pair.clone(),
        }
    }

    /// `τ g = g τ`.
    pub fn commutes_with(&self, g: &Permutation) -> bool {
        self.pair.len() == g.len()
            && (0..self.pair.len()).all(|i| self.pair[g.apply(i)] == g.apply(self.pair[i]))
    }

    /// Number of matchings on `2m` points, `(2m − 1)!!`.
    pub fn count(m: usize) -> BigUint {
        (1..m).fold(BigUint::one(), |acc, k| acc * BigUint::from(2 * k + 1))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pair.is_empty() {
            return write!(f, "()");
        }
        for (a, b) in self.pairs() {
            write!(f, "({} {})", a + 1, b + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Matching {
    type Err = Error;

    /// Cycle notation, e.g. `(1 4)(2 3)(5 8)(6 7)`.
    fn from_str(s: &str) -> Result<Self> {
        let cycles = parse_cycles(s)?;
        let pairs = cycles
            .iter()
            .map(|c| match c.as_slice() {
                &[a, b] => Ok((a, b)),
                _ => Err(Error::Parse(format!(
                    "matching cycles must be pairs: {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Matching::from_pairs(&pairs)
    }
}

impl TryFrom<Vec<[usize; 2]>> for Matching {
    type Error = Error;

    fn try_from(pairs: Vec<[usize; 2]>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        Matching::from_pairs(&pairs)
    }
}

impl From<Matching> for Vec<[usize; 2]> {
    fn from(m: Matching) -> Self {
        m.pairs().into_iter().map(|(a, b)| [a + 1, b + 1]).collect()
    }
}

/// `σ τ σ⁻¹`: relabel every point of `τ` through `σ`.
pub fn conjugate(sigma: &Permutation, tau: &Matching) -> Result<Matching> {
    check_size(sigma.len(), tau.points())?;
    let mut pair = vec![0; tau.points()];
    for i in 0..tau.points() {
        pair[sigma.apply(i)] = sigma.apply(tau.partner(i));
    }
    Ok(Matching { pair })
}

/// Iterator over all matchings on `2m` points.
///
/// Order: the smallest unmatched point is paired with each larger unmatched
/// point in increasing order, recursively. This is increasing order of the
/// flattened pair list, so the first item is [`Matching::adjacent`].
#[derive(Debug, Clone)]
pub struct Matchings {
    pair: Vec<usize>,
    // (smallest point, partner) in the order they were fixed
    stack: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

const UNSET: usize = usize::MAX;

impl Matchings {
    fn new(m: usize) -> Self {
        Matchings {
            pair: vec![UNSET; 2 * m],
            stack: Vec::with_capacity(m),
            started: false,
            done: false,
        }
    }

    fn fill_greedy(&mut self) {
        let n = self.pair.len();
        let mut i = 0;
        while i < n {
            if self.pair[i] == UNSET {
                let j = (i + 1..n)
                    .find(|&j| self.pair[j] == UNSET)
                    .expect("even point count");
                self.pair[i] = j;
                self.pair[j] = i;
                self.stack.push((i, j));
            }
            i += 1;
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.pair.len();
        while let Some((i, j)) = self.stack.pop() {
            self.pair[i] = UNSET;
            self.pair[j] = UNSET;
            if let Some(next) = (j + 1..n).find(|&k| self.pair[k] == UNSET) {
                self.pair[i] = next;
                self.pair[next] = i;
                self.stack.push((i, next));
                self.fill_greedy();
                return true;
            }
        }
        false
    }
}

impl Iterator for Matchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_greedy();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(Matching {
            pair: self.pair.clone(),
        })
    }
}

/// All `(2m − 1)!!` matchings on `2m` points, with the default point cap.
pub fn enumerate_matchings(m: usize) -> Result<Matchings> {
    enumerate_matchings_capped(m, Limits::default().max_points)
}

pub fn enumerate_matchings_capped(m: usize, max_points: usize) -> Result<Matchings> {
    if m == 0 {
        return Err(Error::InvalidArgument("matchings need m ≥ 1".into()));
    }
    if 2 * m > max_points {
        return Err(Error::CapExceeded {
            what: "matching enumeration points",
            requested: 2 * m as u128,
            cap: max_points as u128,
        });
    }
    Ok(Matchings::new(m))
}

fn exact_div(num: BigUint, den: &BigUint) -> BigUint {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "inexact division in N((a^b)) formula");
    q
}

/// `N((a^b))`: matchings commuting with a product of `b` disjoint `a`-cycles.
///
/// Zero when `a` and `b` are both odd. Otherwise a sum over the number `i` of
/// cycles matched to themselves (by `g^{a/2}`, so only possible for even `a`),
/// `i ≡ b (mod 2)`, of `b!·a^{(b−i)/2} / (i!·((b−i)/2)!·2^{(b−i)/2})`.
pub fn n_brick(a: u32, b: u32) -> BigUint {
    assert!(a >= 1, "cycle length must be positive");
    if a % 2 == 1 && b % 2 == 1 {
        return BigUint::zero();
    }
    let b_fact = factorial(b);
    let a_big = BigUint::from(a);
    let two = BigUint::from(2u32);
    // odd a admits no self-matched cycles, so only i = 0 contributes
    let top_i = if a % 2 == 1 { 0 } else { b };
    (b % 2..=top_i)
        .step_by(2)
        .map(|i| {
            let half = (b - i) / 2;
            let num = &b_fact * a_big.pow(half);
            let den = factorial(i) * factorial(half) * two.pow(half);
            exact_div(num, &den)
        })
        .sum()
}

/// `N(λ) = ∏_a N((a^{b_a}))`. Odd totals give 0, the empty partition 1.
pub fn n_of(lambda: &Partition) -> BigUint {
    if lambda.size() % 2 == 1 {
        return BigUint::zero();
    }
    lambda
        .mults()
        .iter()
        .map(|(&a, &b)| n_brick(a, b))
        .product()
}

/// Counts matchings commuting with [`Permutation::of_cycle_type`] of `λ` by
/// testing every matching. Oracle for [`n_of`].
pub fn count_commuting_brute(lambda: &Partition) -> Result<BigUint> {
    count_commuting_brute_capped(lambda, Limits::default().max_points)
}

pub fn count_commuting_brute_capped(lambda: &Partition, max_points: usize) -> Result<BigUint> {
    let n = lambda.size() as usize;
    if n % 2 == 1 {
        return Ok(BigUint::zero());
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    let g = Permutation::of_cycle_type(lambda);
    let count = enumerate_matchings_capped(n / 2, max_points)?
        .filter(|tau| tau.commutes_with(&g))
        .count();
    Ok(BigUint::from(count))
}
