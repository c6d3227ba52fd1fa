//! Matchings on `2n` points as rooted binary trees with `n + 1` labelled
//! leaves, and tuples of matchings as forests.
//!
//! Building a tree: leaves `1..=n+1` exist from the start. Among the pairs
//! of the matching whose endpoints both exist, join the one with the
//! smallest element under a new node labelled `n+2`, then `n+3`, and so on.
//! The last join is the root. Reading a tree back repeats the same
//! labelling over sibling pairs.
//!
//! Newick grammar used here (no whitespace, no internal labels):
//!
//! ```text
//! tree    := subtree ";"
//! subtree := leaf | "(" subtree "," subtree ")"
//! leaf    := positive decimal integer
//! ```

use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::invariants::{build_invariant, InvariantPolynomial};
use crate::matchings::{conjugate, Matching, Permutation};
use crate::orbits::MatchingTuple;

/// A full rooted binary tree. Children are kept ordered by smallest leaf,
/// so derived equality is equality of leaf-labelled trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PhyloTree {
    Leaf(usize),
    Join(Box<PhyloTree>, Box<PhyloTree>),
}

impl PhyloTree {
    pub fn join(a: PhyloTree, b: PhyloTree) -> PhyloTree {
        if a.min_leaf() <= b.min_leaf() {
            PhyloTree::Join(Box::new(a), Box::new(b))
        } else {
            PhyloTree::Join(Box::new(b), Box::new(a))
        }
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            PhyloTree::Leaf(l) => *l,
            PhyloTree::Join(a, _) => a.min_leaf(),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            PhyloTree::Leaf(_) => 1,
            PhyloTree::Join(a, b) => a.n_leaves() + b.n_leaves(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            PhyloTree::Leaf(l) => out.push(*l),
            PhyloTree::Join(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// At least two leaves, labelled exactly `1..=L`.
    pub fn validate(&self) -> Result<()> {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        if leaves.len() < 2 || leaves.iter().enumerate().any(|(i, &l)| l != i + 1) {
            return Err(Error::Malformed(format!(
                "tree leaves must be 1..=L with L >= 2, found {leaves:?}"
            )));
        }
        Ok(())
    }

    pub fn to_newick(&self) -> String {
        format!("{self};")
    }

    pub fn from_newick(s: &str) -> Result<PhyloTree> {
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let tree = parse_subtree(&bytes, &mut pos)?;
        if bytes.get(pos) != Some(&b';') || pos + 1 != bytes.len() {
            return Err(Error::Parse(format!(
                "expected a single ';' at the end of {s:?}"
            )));
        }
        tree.validate()?;
        Ok(tree)
    }
}

fn parse_subtree(s: &[u8], pos: &mut usize) -> Result<PhyloTree> {
    match s.get(*pos) {
        Some(b'(') => {
            *pos += 1;
            let a = parse_subtree(s, pos)?;
            expect(s, pos, b',')?;
            let b = parse_subtree(s, pos)?;
            expect(s, pos, b')')?;
            Ok(PhyloTree::join(a, b))
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while s.get(*pos).is_some_and(u8::is_ascii_digit) {
                *pos += 1;
            }
            let text = std::str::from_utf8(&s[start..*pos]).expect("ascii digits");
            let label: usize = text
                .parse()
                .map_err(|_| Error::Parse(format!("bad leaf label {text:?}")))?;
            if label == 0 {
                return Err(Error::Parse("leaf labels start at 1".into()));
            }
            Ok(PhyloTree::Leaf(label))
        }
        other => Err(Error::Parse(format!(
            "unexpected {:?} at offset {}",
            other.map(|&c| c as char),
            *pos
        ))),
    }
}

fn expect(s: &[u8], pos: &mut usize, c: u8) -> Result<()> {
    if s.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "expected {:?} at offset {}",
            c as char, *pos
        )))
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhyloTree::Leaf(l) => write!(f, "{l}"),
            PhyloTree::Join(a, b) => write!(f, "({a},{b})"),
        }
    }
}

pub fn matching_to_tree(tau: &Matching) -> Result<PhyloTree> {
    let n = tau.m();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    // nodes[label - 1], for labels 1..=2n
    let mut nodes: Vec<Option<PhyloTree>> = (1..=2 * n)
        .map(|l| (l <= n + 1).then_some(PhyloTree::Leaf(l)))
        .collect();
    let mut pairs = tau.pairs();
    let mut next = n + 2;
    loop {
        let pick = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| nodes[a].is_some() && nodes[b].is_some())
            .min_by_key(|(_, &(a, _))| a)
            .map(|(i, _)| i);
        let Some(i) = pick else {
            return Err(Error::Malformed(format!(
                "matching {tau} stalls during tree building"
            )));
        };
        let (a, b) = pairs.remove(i);
        let parent = PhyloTree::join(
            nodes[a].take().expect("eligible"),
            nodes[b].take().expect("eligible"),
        );
        if pairs.is_empty() {
            return Ok(parent);
        }
        nodes[next - 1] = Some(parent);
        next += 1;
    }
}

/// The matching of a tree together with the labels it assigns internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReading {
    pub matching: Matching,
    /// 1-based sibling pairs in the order they were labelled; the root's
    /// children come last.
    pub sibling_pairs: Vec<(usize, usize)>,
}

pub fn tree_to_matching(tree: &PhyloTree) -> Result<Matching> {
    Ok(read_tree(tree)?.matching)
}

pub fn read_tree(tree: &PhyloTree) -> Result<TreeReading> {
    tree.validate()?;
    let n = tree.n_leaves() - 1;
    let mut arena = Vec::with_capacity(2 * n + 1);
    flatten(tree, &mut arena);
    let mut label: Vec<Option<usize>> = arena
        .iter()
        .map(|node| match node {
            Node::Leaf(l) => Some(*l),
            Node::Join(..) => None,
        })
        .collect();
    let mut sibling_pairs = Vec::with_capacity(n);
    for next in n + 2..=2 * n + 1 {
        let (parent, lo, hi) = arena
            .iter()
            .enumerate()
            .filter_map(|(i, node)| match *node {
                Node::Join(a, b) if label[i].is_none() => {
                    let (la, lb) = (label[a]?, label[b]?);
                    Some((i, la.min(lb), la.max(lb)))
                }
                _ => None,
            })
            .min_by_key(|&(_, lo, _)| lo)
            .expect("a full binary tree always has a labelled cherry");
        label[parent] = Some(next);
        sibling_pairs.push((lo, hi));
    }
    let matching = Matching::from_pairs(&sibling_pairs)?;
    Ok(TreeReading {
        matching,
        sibling_pairs,
    })
}

enum Node {
    Leaf(usize),
    Join(usize, usize),
}

fn flatten(tree: &PhyloTree, arena: &mut Vec<Node>) -> usize {
    let node = match tree {
        PhyloTree::Leaf(l) => Node::Leaf(*l),
        PhyloTree::Join(a, b) => {
            let a = flatten(a, arena);
            let b = flatten(b, arena);
            Node::Join(a, b)
        }
    };
    arena.push(node);
    arena.len() - 1
}

/// An ordered list of trees with a common leaf count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhyloForest {
    trees: Vec<PhyloTree>,
}

impl PhyloForest {
    pub fn new(trees: Vec<PhyloTree>) -> Result<Self> {
        let Some(first) = trees.first() else {
            return Err(Error::InvalidArgument(
                "a forest needs at least one tree".into(),
            ));
        };
        let leaves = first.n_leaves();
        for t in &trees {
            t.validate()?;
            if t.n_leaves() != leaves {
                return Err(Error::SizeMismatch {
                    expected: leaves,
                    found: t.n_leaves(),
                });
            }
        }
        Ok(PhyloForest { trees })
    }

    pub fn trees(&self) -> &[PhyloTree] {
        &self.trees
    }

    pub fn n_leaves(&self) -> usize {
        self.trees[0].n_leaves()
    }

    pub fn to_tuple(&self) -> Result<MatchingTuple> {
        MatchingTuple::new(
            self.trees
                .iter()
                .map(tree_to_matching)
                .collect::<Result<_>>()?,
        )
    }

    /// A JSON array of Newick strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.trees
                .iter()
                .map(|t| Value::String(t.to_newick()))
                .collect(),
        )
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("forest must be a JSON array of Newick strings".into()))?;
        let trees = items
            .iter()
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| Error::Parse("forest entries must be strings".into()))
                    .and_then(PhyloTree::from_newick)
            })
            .collect::<Result<Vec<_>>>()?;
        PhyloForest::new(trees)
    }
}

pub fn forest_of(t: &MatchingTuple) -> Result<PhyloForest> {
    PhyloForest::new(
        t.taus()
            .iter()
            .map(matching_to_tree)
            .collect::<Result<_>>()?,
    )
}

/// Simultaneous conjugation of the underlying matchings.
pub fn forest_act(sigma: &Permutation, forest: &PhyloForest) -> Result<PhyloForest> {
    let taus = forest
        .trees
        .iter()
        .map(|tree| conjugate(sigma, &tree_to_matching(tree)?))
        .collect::<Result<Vec<_>>>()?;
    forest_of(&MatchingTuple::new(taus)?)
}

/// Reads the invariant straight off the forest: points `s` and `t` share
/// a summation index in factor `i` when they are siblings in tree `i`.
pub fn invariant_of_forest(forest: &PhyloForest, dims: &[usize]) -> Result<InvariantPolynomial> {
    let points = 2 * (forest.n_leaves() - 1);
    let cycle_index = forest
        .trees
        .iter()
        .map(|tree| {
            let reading = read_tree(tree)?;
            let mut order = reading.sibling_pairs.clone();
            order.sort_unstable();
            let mut ids = vec![0; points];
            for (j, (a, b)) in order.into_iter().enumerate() {
                ids[a - 1] = j;
                ids[b - 1] = j;
            }
            Ok(ids)
        })
        .collect::<Result<Vec<_>>>()?;
    InvariantPolynomial::from_cycle_index(dims.to_vec(), cycle_index)
}

/// Same polynomial via the tuple, for cross-checking.
pub fn invariant_of_forest_via_tuple(
    forest: &PhyloForest,
    dims: &[usize],
) -> Result<InvariantPolynomial> {
    build_invariant(&forest.to_tuple()?, dims)
}
