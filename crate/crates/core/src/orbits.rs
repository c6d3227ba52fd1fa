//! Orbits of `S_{2m}` acting by simultaneous conjugation on `r`-tuples of
//! matchings, and the edge-coloured `r`-regular graphs they correspond to.
//!
//! Tuples are compared by their serialisation: the sorted pair lists of
//! `τ_1, …, τ_r` flattened and concatenated. The canonical representative of
//! an orbit is its lexicographically least member. Because the least matching
//! is `(1 2)(3 4)…`, every canonical tuple starts with it, and the search only
//! ranges over relabelings that send `τ_1` there (a coset of the
//! hyperoctahedral group `H_m`).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::matchings::{conjugate, enumerate_matchings_capped, Matching, Permutation};
use crate::partitions::factorial;

/// An ordered `r`-tuple of matchings on a common point set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Matching>", into = "Vec<Matching>")]
pub struct MatchingTuple {
    taus: Vec<Matching>,
}

impl MatchingTuple {
    pub fn new(taus: Vec<Matching>) -> Result<Self> {
        let first = taus
            .first()
            .ok_or_else(|| Error::InvalidArgument("a tuple needs r ≥ 1 matchings".into()))?;
        let n = first.points();
        if let Some(bad) = taus.iter().find(|t| t.points() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: bad.points(),
            });
        }
        Ok(MatchingTuple { taus })
    }

    /// Parses matchings in cycle notation, e.g. `["(1 2)(3 4)", "(1 3)(2 4)"]`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let taus = items
            .iter()
            .map(|s| s.as_ref().parse::<Matching>())
            .collect::<Result<Vec<_>>>()?;
        MatchingTuple::new(taus)
    }

    pub fn taus(&self) -> &[Matching] {
        &self.taus
    }

    pub fn r(&self) -> usize {
        self.taus.len()
    }

    pub fn m(&self) -> usize {
        self.taus[0].m()
    }

    pub fn points(&self) -> usize {
        self.taus[0].points()
    }

    /// Concatenated flattened pair lists (0-based).
    pub fn key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.points() * self.r());
        for t in &self.taus {
            t.push_key(&mut key);
        }
        key
    }

    fn from_key(key: &[u8], r: usize, n: usize) -> Self {
        let taus = key
            .chunks(n.max(1))
            .take(r)
            .map(|chunk| {
                let mut pair = vec![0; n];
                for p in chunk.chunks(2) {
                    pair[p[0] as usize] = p[1] as usize;
                    pair[p[1] as usize] = p[0] as usize;
                }
                Matching::new(pair).expect("key encodes a matching")
            })
            .collect::<Vec<_>>();
        let taus = if n == 0 {
            vec![Matching::adjacent(0); r]
        } else {
            taus
        };
        MatchingTuple { taus }
    }
}

impl TryFrom<Vec<Matching>> for MatchingTuple {
    type Error = Error;

    fn try_from(taus: Vec<Matching>) -> Result<Self> {
        MatchingTuple::new(taus)
    }
}

impl From<MatchingTuple> for Vec<Matching> {
    fn from(t: MatchingTuple) -> Self {
        t.taus
    }
}

impl fmt::Display for MatchingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.taus.iter().join(", "))
    }
}

/// `σ·(τ_1, …, τ_r) = (στ_1σ⁻¹, …, στ_rσ⁻¹)`.
pub fn act(sigma: &Permutation, t: &MatchingTuple) -> Result<MatchingTuple> {
    let taus = t
        .taus
        .iter()
        .map(|tau| conjugate(sigma, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchingTuple { taus })
}

/// Canonical representative together with the size of its stabiliser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub tuple: MatchingTuple,
    /// Number of `σ ∈ S_{2m}` fixing the tuple.
    pub automorphisms: u64,
}

impl Canonical {
    pub fn orbit_size(&self) -> BigUint {
        factorial(self.tuple.points() as u32) / BigUint::from(self.automorphisms)
    }
}

/// The lexicographically least tuple in the orbit of `t`.
pub fn canonical_form(t: &MatchingTuple) -> Result<MatchingTuple> {
    Ok(canonicalize(t, &Limits::default())?.tuple)
}

/// `(2m)! / |Stab(t)|`.
pub fn orbit_size(t: &MatchingTuple) -> Result<BigUint> {
    Ok(canonicalize(t, &Limits::default())?.orbit_size())
}

pub fn canonicalize(t: &MatchingTuple, limits: &Limits) -> Result<Canonical> {
    let n = t.points();
    if n > limits.canonical_points {
        return Err(Error::CapExceeded {
            what: "canonicalisation points",
            requested: n as u128,
            cap: limits.canonical_points as u128,
        });
    }
    let m = n / 2;
    let r = t.r();
    if n == 0 {
        return Ok(Canonical {
            tuple: t.clone(),
            automorphisms: 1,
        });
    }
    if r == 1 {
        // H_m = (Z/2)^m ⋊ S_m
        let order = (1u64 << m) * (1..=m as u64).product::<u64>();
        return Ok(Canonical {
            tuple: MatchingTuple {
                taus: vec![Matching::adjacent(m)],
            },
            automorphisms: order,
        });
    }
    let mut search = Search::new(t);
    search.step(0, Ordering::Equal);
    let rest = search.best.expect("at least one labeling is explored");
    let mut key = Vec::with_capacity(n * r);
    Matching::adjacent(m).push_key(&mut key);
    key.extend_from_slice(&rest);
    Ok(Canonical {
        tuple: MatchingTuple::from_key(&key, r, n),
        automorphisms: search.automorphisms,
    })
}

const UNSET: usize = usize::MAX;

/// Branch-and-bound over labelings `new label ↦ old vertex` with labels
/// assigned in `τ_1`-pairs `(2k, 2k+1)`, so that `τ_1` becomes adjacent.
///
/// The second matching is serialised as labels are assigned. Its next entry
/// is the partner of the smallest unpaired label; if that partner has no
/// label yet it must take the next free one, otherwise the entry would be
/// larger. The only free choice is which vertex opens a new component of
/// `τ_1 ∪ τ_2`. Branches whose partial key exceeds the incumbent are cut.
struct Search<'a> {
    taus: &'a [Matching],
    n: usize,
    label: Vec<usize>,
    vertex_of: Vec<usize>,
    paired: Vec<bool>,
    next_label: usize,
    key: Vec<u8>,
    best: Option<Vec<u8>>,
    improvements: u64,
    automorphisms: u64,
}

impl<'a> Search<'a> {
    fn new(t: &'a MatchingTuple) -> Self {
        let n = t.points();
        Search {
            taus: &t.taus,
            n,
            label: vec![UNSET; n],
            vertex_of: vec![UNSET; n],
            paired: vec![false; n],
            next_label: 0,
            key: Vec::with_capacity(n * (t.r() - 1)),
            best: None,
            improvements: 0,
            automorphisms: 0,
        }
    }

    fn assign_pair(&mut self, v: usize) {
        let mate = self.taus[0].partner(v);
        let l = self.next_label;
        self.label[v] = l;
        self.label[mate] = l + 1;
        self.vertex_of[l] = v;
        self.vertex_of[l + 1] = mate;
        self.next_label += 2;
    }

    fn unassign_pair(&mut self, v: usize) {
        let mate = self.taus[0].partner(v);
        self.next_label -= 2;
        self.label[v] = UNSET;
        self.label[mate] = UNSET;
        self.vertex_of[self.next_label] = UNSET;
        self.vertex_of[self.next_label + 1] = UNSET;
    }

    fn step(&mut self, mut j: usize, cmp: Ordering) {
        while j < self.n && self.paired[j] {
            j += 1;
        }
        if j == self.n {
            self.leaf(cmp);
            return;
        }
        if j == self.next_label {
            let mut cmp = cmp;
            for u in 0..self.n {
                if self.label[u] == UNSET {
                    let seen = self.improvements;
                    self.assign_pair(u);
                    self.step(j, cmp);
                    self.unassign_pair(u);
                    // a new incumbent found below shares this prefix
                    if self.improvements != seen {
                        cmp = Ordering::Equal;
                    }
                }
            }
            return;
        }
        let v = self.vertex_of[j];
        let w = self.taus[1].partner(v);
        let fresh = self.label[w] == UNSET;
        if fresh {
            self.assign_pair(w);
        }
        let lw = self.label[w];
        let pos = self.key.len();
        self.key.push(j as u8);
        self.key.push(lw as u8);
        let cmp = match (cmp, &self.best) {
            (Ordering::Equal, Some(best)) => self.key[pos..].cmp(&best[pos..pos + 2]),
            (Ordering::Equal, None) => Ordering::Less,
            (c, _) => c,
        };
        if cmp != Ordering::Greater {
            self.paired[j] = true;
            self.paired[lw] = true;
            self.step(j + 1, cmp);
            self.paired[j] = false;
            self.paired[lw] = false;
        }
        self.key.truncate(pos);
        if fresh {
            self.unassign_pair(w);
        }
    }

    fn leaf(&mut self, cmp: Ordering) {
        let base = self.key.len();
        for tau in &self.taus[2..] {
            let mut pair = vec![0; self.n];
            for (v, &l) in self.label.iter().enumerate() {
                pair[l] = self.label[tau.partner(v)];
            }
            for (a, &b) in pair.iter().enumerate() {
                if a < b {
                    self.key.push(a as u8);
                    self.key.push(b as u8);
                }
            }
        }
        let cmp = match (cmp, &self.best) {
            (Ordering::Equal, Some(best)) => self.key[base..].cmp(&best[base..]),
            (Ordering::Equal, None) => Ordering::Less,
            (c, _) => c,
        };
        match cmp {
            Ordering::Less => {
                self.best = Some(self.key.clone());
                self.improvements += 1;
                self.automorphisms = 1;
            }
            Ordering::Equal => self.automorphisms += 1,
            Ordering::Greater => {}
        }
        self.key.truncate(base);
    }
}

/// Canonical form by minimising over every permutation of `S_{2m}`. Oracle
/// for [`canonical_form`]; only usable for `2m ≤ limits.naive_points`.
pub fn canonical_form_naive(t: &MatchingTuple, limits: &Limits) -> Result<Canonical> {
    let n = t.points();
    if n > limits.naive_points {
        return Err(Error::CapExceeded {
            what: "naive canonicalisation points",
            requested: n as u128,
            cap: limits.naive_points as u128,
        });
    }
    let mut best: Option<Vec<u8>> = None;
    let mut automorphisms = 0u64;
    for image in (0..n).permutations(n) {
        let sigma = Permutation::new(image).expect("permutation");
        let key = act(&sigma, t)?.key();
        match best.as_ref().map(|b| key.cmp(b)) {
            None | Some(Ordering::Less) => {
                best = Some(key);
                automorphisms = 1;
            }
            Some(Ordering::Equal) => automorphisms += 1,
            Some(Ordering::Greater) => {}
        }
    }
    Ok(Canonical {
        tuple: MatchingTuple::from_key(&best.unwrap_or_default(), t.r(), n),
        automorphisms,
    })
}

/// One canonical representative per orbit, sorted by serialisation.
pub fn enumerate_orbits(r: usize, m: usize) -> Result<Vec<MatchingTuple>> {
    Ok(enumerate_orbits_with(r, m, &Limits::default())?
        .into_iter()
        .map(|c| c.tuple)
        .collect())
}

/// Orbit enumeration with `τ_1` fixed to `(1 2)(3 4)…`: every orbit meets
/// that slice, so only the `((2m−1)!!)^{r−1}` tuples behind it are
/// canonicalised.
pub fn enumerate_orbits_with(r: usize, m: usize, limits: &Limits) -> Result<Vec<Canonical>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let first = Matching::adjacent(m);
    if m == 0 || r == 1 {
        let t = MatchingTuple::new(vec![first; r])?;
        return Ok(vec![canonicalize(&t, limits)?]);
    }
    if 2 * m > limits.canonical_points {
        return Err(Error::CapExceeded {
            what: "canonicalisation points",
            requested: 2 * m as u128,
            cap: limits.canonical_points as u128,
        });
    }
    let matchings: Vec<Matching> = enumerate_matchings_capped(m, limits.max_points)?.collect();
    let per = matchings.len() as u128;
    let total = per.checked_pow(r as u32 - 1).unwrap_or(u128::MAX);
    if total > limits.max_tuples {
        return Err(Error::CapExceeded {
            what: "orbit enumeration tuples",
            requested: total,
            cap: limits.max_tuples,
        });
    }
    let tail = r - 2;
    let tail_count = (matchings.len() as u64).pow(tail as u32);
    let keys: BTreeSet<Vec<u8>> = (0..matchings.len())
        .into_par_iter()
        .map(|second| {
            let mut local = BTreeSet::new();
            let mut taus = Vec::with_capacity(r);
            for mut index in 0..tail_count {
                taus.clear();
                taus.push(first.clone());
                taus.push(matchings[second].clone());
                for _ in 0..tail {
                    taus.push(matchings[(index % per as u64) as usize].clone());
                    index /= per as u64;
                }
                let t = MatchingTuple { taus: taus.clone() };
                let c = canonicalize(&t, limits).expect("size checked above");
                local.insert(c.tuple.key());
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    keys.into_iter()
        .map(|k| canonicalize(&MatchingTuple::from_key(&k, r, 2 * m), limits))
        .collect()
}

/// Enumerates every `r`-tuple and deduplicates by [`canonical_form_naive`].
/// Oracle for [`enumerate_orbits`] at tiny sizes.
pub fn enumerate_orbits_naive(r: usize, m: usize, limits: &Limits) -> Result<Vec<MatchingTuple>> {
    if r == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "naive enumeration needs r, m ≥ 1".into(),
        ));
    }
    let matchings: Vec<Matching> = enumerate_matchings_capped(m, limits.naive_points)?.collect();
    let mut keys = BTreeSet::new();
    for taus in (0..r)
        .map(|_| matchings.iter().cloned())
        .multi_cartesian_product()
    {
        let t = MatchingTuple::new(taus)?;
        keys.insert(canonical_form_naive(&t, limits)?.tuple.key());
    }
    Ok(keys
        .into_iter()
        .map(|k| MatchingTuple::from_key(&k, r, 2 * m))
        .collect())
}

/// Graph on `2m` vertices whose edges of colour `i` are the pairs of `τ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    num_vertices: usize,
    /// `classes[i]` holds the 0-based edges of colour `i + 1`, sorted.
    classes: Vec<Vec<(usize, usize)>>,
}

/// DOT colours for colours 1, 2, 3, …; cycles past the end.
pub const PALETTE: [&str; 12] = [
    "black", "red", "blue", "green", "#ff7f00", "#984ea3", "#a65628", "#f781bf", "#999999",
    "#17becf", "#bcbd22", "#8c564b",
];

pub fn palette_color(color: usize) -> &'static str {
    PALETTE[(color - 1) % PALETTE.len()]
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    r: usize,
    colors: Vec<Vec<[usize; 2]>>,
}

impl ColoredGraph {
    /// From 1-based `(u, v, color)` triples. Each colour class must be a
    /// perfect matching of `1..=num_vertices`.
    pub fn new(num_vertices: usize, r: usize, edges: &[(usize, usize, usize)]) -> Result<Self> {
        let mut classes = vec![Vec::new(); r];
        for &(u, v, c) in edges {
            if c == 0 || c > r {
                return Err(Error::InvalidArgument(format!(
                    "colour {c} outside 1..={r}"
                )));
            }
            if u == 0 || v == 0 || u > num_vertices || v > num_vertices || u == v {
                return Err(Error::InvalidArgument(format!("bad edge {u}--{v}")));
            }
            classes[c - 1].push((u.min(v), u.max(v)));
        }
        let taus = classes
            .iter()
            .map(|pairs| {
                if pairs.len() * 2 != num_vertices {
                    return Err(Error::InvalidArgument(format!(
                        "colour class is not a perfect matching on {num_vertices} vertices"
                    )));
                }
                Matching::from_pairs(pairs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(to_colored_graph(&MatchingTuple::new(taus)?))
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn r(&self) -> usize {
        self.classes.len()
    }

    /// 1-based `(u, v, color)` with `u < v`, grouped by colour.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(c, pairs)| pairs.iter().map(move |&(u, v)| (u + 1, v + 1, c + 1)))
            .collect()
    }

    pub fn to_tuple(&self) -> MatchingTuple {
        let taus = self
            .classes
            .iter()
            .map(|pairs| {
                let mut pair = vec![0; self.num_vertices];
                for &(u, v) in pairs {
                    pair[u] = v;
                    pair[v] = u;
                }
                Matching::new(pair).expect("colour classes are perfect matchings")
            })
            .collect();
        MatchingTuple { taus }
    }

    /// Every vertex meets exactly one edge of each colour.
    pub fn is_properly_colored(&self) -> bool {
        self.classes.iter().all(|pairs| {
            let mut seen = vec![0u8; self.num_vertices];
            for &(u, v) in pairs {
                seen[u] += 1;
                seen[v] += 1;
            }
            seen.iter().all(|&s| s == 1)
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson {
            n: self.num_vertices,
            r: self.r(),
            colors: self
                .classes
                .iter()
                .map(|pairs| pairs.iter().map(|&(u, v)| [u + 1, v + 1]).collect())
                .collect(),
        })
        .expect("graph serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let g: GraphJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if g.colors.len() != g.r {
            return Err(Error::SizeMismatch {
                expected: g.r,
                found: g.colors.len(),
            });
        }
        let edges: Vec<_> = g
            .colors
            .iter()
            .enumerate()
            .flat_map(|(c, pairs)| pairs.iter().map(move |&[u, v]| (u, v, c + 1)))
            .collect();
        ColoredGraph::new(g.n, g.r, &edges)
    }

    /// Undirected DOT with unlabeled circular vertices `v1 … v2m`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n  node [shape=circle, label=\"\", width=0.25];\n");
        for v in 1..=self.num_vertices {
            out.push_str(&format!("  v{v};\n"));
        }
        for (u, v, c) in self.edges() {
            out.push_str(&format!(
                "  v{u} -- v{v} [color=\"{}\", penwidth=2];\n",
                palette_color(c)
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Reads back the dialect written by [`ColoredGraph::to_dot`]. Colours
    /// are mapped through [`PALETTE`]; `r` disambiguates wrapped colours.
    pub fn from_dot(dot: &str, r: usize) -> Result<Self> {
        let mut num_vertices = 0;
        let mut edges = Vec::new();
        let vertex = |tok: &str| -> Result<usize> {
            tok.trim()
                .strip_prefix('v')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad DOT vertex {tok:?}")))
        };
        for line in dot.lines().map(str::trim) {
            let line = line.trim_end_matches(';');
            if let Some((lhs, rest)) = line.split_once("--") {
                let (rhs, attrs) = rest.split_once('[').unwrap_or((rest, ""));
                let color = attrs
                    .split_once("color=\"")
                    .and_then(|(_, s)| s.split_once('"'))
                    .map(|(c, _)| c)
                    .ok_or_else(|| Error::Parse(format!("edge without colour: {line:?}")))?;
                let c = (1..=r)
                    .find(|&c| palette_color(c) == color)
                    .ok_or_else(|| Error::Parse(format!("unknown colour {color:?}")))?;
                edges.push((vertex(lhs)?, vertex(rhs)?, c));
            } else if line.starts_with('v') && !line.contains(' ') {
                num_vertices = num_vertices.max(vertex(line)?);
            }
        }
        ColoredGraph::new(num_vertices, r, &edges)
    }
}

/// Draws an edge of colour `i` between `j` and `k` whenever `(j k)` is in `τ_i`.
pub fn to_colored_graph(t: &MatchingTuple) -> ColoredGraph {
    ColoredGraph {
        num_vertices: t.points(),
        classes: t.taus.iter().map(|tau| tau.pairs()).collect(),
    }
}

/// Colour-preserving isomorphism: some vertex bijection carries colour class
/// `i` of `g1` onto colour class `i` of `g2` for every `i`. Colours are never
/// permuted; each colour is a distinct tensor factor.
pub fn graphs_isomorphic(g1: &ColoredGraph, g2: &ColoredGraph) -> Result<bool> {
    if g1.num_vertices != g2.num_vertices || g1.r() != g2.r() {
        return Ok(false);
    }
    Ok(canonical_form(&g1.to_tuple())? == canonical_form(&g2.to_tuple())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::enumerate_matchings;
    use proptest::prelude::*;

    fn tuple(items: &[&str]) -> MatchingTuple {
        MatchingTuple::parse(items).unwrap()
    }

    #[test]
    fn action_example() {
        let sigma = Permutation::parse("(1 3 5)(2 4)", Some(6)).unwrap();
        let t = tuple(&["(1 3)(2 5)(4 6)", "(1 3)(2 4)(5 6)", "(1 6)(2 4)(3 5)"]);
        let expected = tuple(&["(1 4)(2 6)(3 5)", "(1 6)(2 4)(3 5)", "(1 5)(2 4)(3 6)"]);
        assert_eq!(act(&sigma, &t).unwrap(), expected);
        assert_eq!(act(&Permutation::identity(6), &t).unwrap(), t);
        assert!(act(&Permutation::identity(4), &t).is_err());
    }

    #[test]
    fn single_matching_canonicalises_to_adjacent() {
        for m in 1..=5 {
            for tau in enumerate_matchings(m).unwrap() {
                let c = canonical_form(&MatchingTuple::new(vec![tau]).unwrap()).unwrap();
                assert_eq!(c.taus()[0], Matching::adjacent(m));
            }
        }
    }

    #[test]
    fn search_agrees_with_naive_minimum() {
        let limits = Limits::default();
        for m in 1..=3 {
            let all: Vec<_> = enumerate_matchings(m).unwrap().collect();
            for a in &all {
                for b in &all {
                    let t = MatchingTuple::new(vec![a.clone(), b.clone()]).unwrap();
                    assert_eq!(
                        canonicalize(&t, &limits).unwrap(),
                        canonical_form_naive(&t, &limits).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn orbit_counts_small() {
        assert_eq!(enumerate_orbits(3, 2).unwrap().len(), 5);
        assert_eq!(enumerate_orbits(2, 2).unwrap().len(), 2);
        for m in 0..=4 {
            assert_eq!(enumerate_orbits(1, m).unwrap().len(), 1);
        }
        let limits = Limits::default();
        for (r, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
            assert_eq!(
                enumerate_orbits(r, m).unwrap(),
                enumerate_orbits_naive(r, m, &limits).unwrap(),
                "r={r} m={m}"
            );
        }
    }

    #[test]
    fn orbit_sizes_sum_to_tuple_count() {
        for r in 1..=3usize {
            for m in 1..=3usize {
                let total: BigUint = enumerate_orbits_with(r, m, &Limits::default())
                    .unwrap()
                    .iter()
                    .map(Canonical::orbit_size)
                    .sum();
                assert_eq!(total, Matching::count(m).pow(r as u32), "r={r} m={m}");
            }
        }
    }

    #[test]
    fn distinct_orbits_are_not_isomorphic() {
        // all 9 tuples for r = 2, m = 2, partitioned by brute-force orbit
        let all: Vec<_> = enumerate_matchings(2).unwrap().collect();
        let limits = Limits::default();
        let tuples: Vec<_> = all
            .iter()
            .cartesian_product(all.iter())
            .map(|(a, b)| MatchingTuple::new(vec![a.clone(), b.clone()]).unwrap())
            .collect();
        for s in &tuples {
            for t in &tuples {
                let same = canonical_form_naive(s, &limits).unwrap().tuple
                    == canonical_form_naive(t, &limits).unwrap().tuple;
                let iso = graphs_isomorphic(&to_colored_graph(s), &to_colored_graph(t)).unwrap();
                assert_eq!(same, iso, "{s} vs {t}");
            }
        }
    }

    #[test]
    fn k4_graph() {
        let t = tuple(&["(1 2)(3 4)", "(1 3)(2 4)", "(1 4)(2 3)"]);
        let g = to_colored_graph(&t);
        assert_eq!(
            g.edges(),
            vec![
                (1, 2, 1),
                (3, 4, 1),
                (1, 3, 2),
                (2, 4, 2),
                (1, 4, 3),
                (2, 3, 3)
            ]
        );
        assert!(g.is_properly_colored());
        assert_eq!(g.to_tuple(), t);
        let dot = g.to_dot("k4");
        assert!(dot.contains("v1 -- v2 [color=\"black\""));
        assert!(dot.contains("v1 -- v3 [color=\"red\""));
        assert!(dot.contains("v1 -- v4 [color=\"blue\""));
        assert_eq!(ColoredGraph::from_dot(&dot, 3).unwrap(), g);
        assert_eq!(ColoredGraph::from_json(&g.to_json()).unwrap(), g);
        assert_eq!(
            g.to_json(),
            serde_json::json!({"n": 4, "r": 3, "colors": [[[1,2],[3,4]],[[1,3],[2,4]],[[1,4],[2,3]]]})
        );
    }

    #[test]
    fn rejects_improper_colouring() {
        assert!(ColoredGraph::new(4, 1, &[(1, 2, 1), (2, 3, 1)]).is_err());
        assert!(ColoredGraph::new(4, 1, &[(1, 2, 1)]).is_err());
        assert!(ColoredGraph::new(4, 1, &[(1, 2, 2), (3, 4, 1)]).is_err());
    }

    #[test]
    fn single_colour_graph() {
        let g = to_colored_graph(&tuple(&["(1 4)(2 3)"]));
        assert_eq!(g.r(), 1);
        assert_eq!(g.edges(), vec![(1, 4, 1), (2, 3, 1)]);
    }

    #[test]
    fn caps() {
        let t = MatchingTuple::new(vec![Matching::adjacent(7), Matching::adjacent(7)]).unwrap();
        assert!(matches!(canonical_form(&t), Err(Error::CapExceeded { .. })));
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    fn arb_tuple(r: usize, m: usize) -> impl Strategy<Value = MatchingTuple> {
        proptest::collection::vec(arb_perm(2 * m), r).prop_map(move |ps| {
            let taus = ps
                .iter()
                .map(|p| conjugate(p, &Matching::adjacent(m)).unwrap())
                .collect();
            MatchingTuple::new(taus).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn canonical_form_is_an_orbit_invariant(
            (t, sigma) in (1usize..=4, 1usize..=6).prop_flat_map(|(r, m)| (arb_tuple(r, m), arb_perm(2 * m)))
        ) {
            let c = canonical_form(&t).unwrap();
            prop_assert_eq!(&canonical_form(&act(&sigma, &t).unwrap()).unwrap(), &c);
            prop_assert_eq!(&canonical_form(&c).unwrap(), &c);
            prop_assert!(c.key() <= t.key());
            let g = to_colored_graph(&t);
            prop_assert!(g.is_properly_colored());
            let h = to_colored_graph(&act(&sigma, &t).unwrap());
            prop_assert!(graphs_isomorphic(&g, &h).unwrap());
            prop_assert!(graphs_isomorphic(&h, &g).unwrap());
        }

        #[test]
        fn search_matches_naive_on_random_tuples(t in (1usize..=4, 1usize..=3).prop_flat_map(|(r, m)| arb_tuple(r, m))) {
            let limits = Limits::default();
            prop_assert_eq!(canonicalize(&t, &limits).unwrap(), canonical_form_naive(&t, &limits).unwrap());
        }
    }
}
