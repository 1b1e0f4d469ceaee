//! The combo-graph over k-node subsets.
//!
//! Two k-subsets are adjacent when they differ in exactly one element and
//! the two differing elements are adjacent in the underlying graph.

mod brute;
mod sampler;

pub use brute::{binomial, brute_force_combo_graph, combo_hop_distance, BruteComboGraph, DEFAULT_BRUTE_CAP};
pub use sampler::{sample_combo_subgraph, ComboSubgraph};

use std::fmt;

use crate::graph::{Graph, NeighborOracle};
use crate::{Error, Result};

/// A k-subset of node ids, stored strictly ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComboNode(Box<[usize]>);

impl ComboNode {
    /// Sorts `elements`; fails on repeated ids or an empty list.
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameters("a combo-node needs at least one element".into()));
        }
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters(format!("repeated node id in {elements:?}")));
        }
        Ok(Self(elements.into_boxed_slice()))
    }

    /// Like [`ComboNode::new`] but also checks every id against `num_nodes`.
    pub fn in_graph(elements: Vec<usize>, num_nodes: usize) -> Result<Self> {
        let node = Self::new(elements)?;
        match node.0.last() {
            Some(&max) if max >= num_nodes => Err(Error::IndexOutOfRange {
                index: max,
                len: num_nodes,
            }),
            _ => Ok(node),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Replaces `out` (a member) with `inn` (a non-member).
    pub fn substitute(&self, out: usize, inn: usize) -> Self {
        debug_assert!(self.contains(out) && !self.contains(inn));
        let mut next: Vec<usize> = self.0.iter().copied().filter(|&x| x != out).collect();
        let at = next.partition_point(|&x| x < inn);
        next.insert(at, inn);
        Self(next.into_boxed_slice())
    }
}

impl fmt::Debug for ComboNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

fn check_same_k(a: &ComboNode, b: &ComboNode) -> Result<()> {
    if a.k() == b.k() {
        Ok(())
    } else {
        Err(Error::SizeMismatch(a.k(), b.k()))
    }
}

/// Elements of `a` missing from `b` and of `b` missing from `a`.
fn differences(a: &ComboNode, b: &ComboNode) -> (Vec<usize>, Vec<usize>) {
    let (x, y) = (a.elements(), b.elements());
    let (mut i, mut j) = (0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                only_a.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                only_b.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    only_a.extend_from_slice(&x[i..]);
    only_b.extend_from_slice(&y[j..]);
    (only_a, only_b)
}

pub fn is_combo_edge(a: &ComboNode, b: &ComboNode, g: &Graph) -> Result<bool> {
    check_same_k(a, b)?;
    let (only_a, only_b) = differences(a, b);
    Ok(only_a.len() == 1 && only_b.len() == 1 && g.has_edge(only_a[0], only_b[0]))
}

/// `|a \ b|`, a lower bound on the combo-graph hop distance between them.
pub fn set_difference_distance(a: &ComboNode, b: &ComboNode) -> Result<usize> {
    check_same_k(a, b)?;
    Ok(differences(a, b).0.len())
}

/// All one-element substitutions of `v` along edges of the underlying
/// graph, sorted. Only the neighborhoods of `v`'s own elements are revealed.
pub fn combo_neighbors(v: &ComboNode, oracle: &mut NeighborOracle<'_>) -> Vec<ComboNode> {
    let mut out = Vec::new();
    for &x in v.elements() {
        for &y in oracle.reveal(x) {
            if !v.contains(y) {
                out.push(v.substitute(x, y));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `Σ_j |N(v_j) \ v|`.
pub fn combo_degree(v: &ComboNode, g: &Graph) -> usize {
    v.elements()
        .iter()
        .map(|&x| g.neighbors(x).iter().filter(|&&y| !v.contains(y)).count())
        .sum()
}
