//! Exhaustive combo-graph construction for small instances.

use std::collections::HashMap;

use super::{combo_neighbors, ComboNode};
use crate::graph::{shortest_path_hops, Graph, NeighborOracle, UNREACHABLE};
use crate::{Error, Result};

pub const DEFAULT_BRUTE_CAP: usize = 200_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Every k-subset of a graph, in lexicographic order, with its combo-edges.
#[derive(Clone, Debug)]
pub struct BruteComboGraph {
    pub nodes: Vec<ComboNode>,
    pub graph: Graph,
    index: HashMap<ComboNode, usize>,
}

impl BruteComboGraph {
    pub fn index_of(&self, v: &ComboNode) -> Option<usize> {
        self.index.get(v).copied()
    }
}

pub fn brute_force_combo_graph(g: &Graph, k: usize, cap: usize) -> Result<BruteComboGraph> {
    let n = g.num_nodes();
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!("k = {k} with {n} nodes")));
    }
    let count = binomial(n, k);
    if count > cap as u128 {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut nodes = Vec::with_capacity(count as usize);
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        nodes.push(ComboNode::new(current.clone())?);
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
    }
    let index: HashMap<ComboNode, usize> =
        nodes.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut oracle = NeighborOracle::new(g);
    let mut adjacency = Vec::with_capacity(nodes.len());
    for v in &nodes {
        adjacency.push(
            combo_neighbors(v, &mut oracle)
                .iter()
                .map(|u| index[u])
                .collect(),
        );
    }
    Ok(BruteComboGraph {
        nodes,
        graph: Graph::from_raw_adjacency(adjacency),
        index,
    })
}

/// BFS hop distance between local indices `a` and `b`, or `None` when they
/// lie in different components.
pub fn combo_hop_distance(edges: &Graph, a: usize, b: usize) -> Result<Option<usize>> {
    let d = *shortest_path_hops(edges, a)?
        .get(b)
        .ok_or(Error::IndexOutOfRange {
            index: b,
            len: edges.num_nodes(),
        })?;
    Ok((d != UNREACHABLE).then_some(d))
}
