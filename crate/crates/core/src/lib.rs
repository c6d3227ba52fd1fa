//! Exact computation of orthogonal-group tensor invariants.
//!
//! For `V = C^{n_1} ⊗ … ⊗ C^{n_r}` under `O(n_1) × … × O(n_r)`, the degree `2m`
//! invariants stabilise once every `n_i ≥ 2m`. This crate computes that stable
//! dimension through a closed-form class sum and through a Burnside oracle,
//! enumerates a basis indexed by orbits of `S_{2m}` acting on `r`-tuples of
//! matchings, and renders each basis element as a polynomial, an edge-coloured
//! `r`-regular graph and a forest of phylogenetic trees.
//!
//! All counting is exact (`num-bigint` / `num-rational`). Floating point only
//! appears in the numerical invariance harness in [`invariants`].

pub mod cli;
pub mod dimension;
pub mod error;
pub mod invariants;
pub mod limits;
pub mod matchings;
pub mod orbits;
pub mod partitions;
pub mod phylo;

pub use dimension::{burnside_dimension_brute, dimension_table, stable_dimension, DimensionQuery};
pub use error::{Error, Result};
pub use limits::Limits;
pub use matchings::{conjugate, enumerate_matchings, n_brick, n_of, Matching, Permutation};
pub use orbits::{act, canonical_form, enumerate_orbits, ColoredGraph, MatchingTuple};
pub use partitions::{enumerate_partitions, Partition};
