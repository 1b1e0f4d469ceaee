//! Undirected, unweighted graphs and the operators built on them.

mod generators;
mod io;
mod measures;
mod spectral;

pub use generators::{generate_ba, generate_grid2d, generate_sbm, generate_ws};
pub use io::{load_edge_list, write_edge_list, EdgeList};
pub use measures::{
    degree_centrality, diameter_capped, eigenvector_centrality, line_graph, pagerank,
    shortest_path_hops, transitivity, UNREACHABLE,
};
pub use spectral::{eigendecompose, normalized_laplacian, BasisCache, SpectralBasis};

use crate::{Error, Result};

/// Immutable simple graph on nodes `0..num_nodes` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Graph {
    /// Builds a graph from an edge iterator. Self-loops and duplicate edges
    /// are dropped; endpoints must be below `num_nodes`.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); num_nodes];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= num_nodes {
                    return Err(Error::IndexOutOfRange {
                        index: x,
                        len: num_nodes,
                    });
                }
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        Ok(Self::from_raw_adjacency(adjacency))
    }

    /// Sorts and deduplicates raw (already symmetric) adjacency lists.
    pub(crate) fn from_raw_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Self {
            adjacency,
            num_edges: twice / 2,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Connected components as lists of node ids, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() > 0 && self.components().len() == 1
    }

    /// Copy of the graph without the listed edges.
    pub fn without_edges(&self, removed: &[(usize, usize)]) -> Graph {
        let mut adjacency = self.adjacency.clone();
        for &(u, v) in removed {
            if let Ok(p) = adjacency[u].binary_search(&v) {
                adjacency[u].remove(p);
            }
            if let Ok(p) = adjacency[v].binary_search(&u) {
                adjacency[v].remove(p);
            }
        }
        Self::from_raw_adjacency(adjacency)
    }

    /// Checks symmetry, absence of self-loops and duplicates.
    pub fn validate(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(u, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list
                    .iter()
                    .all(|&v| v != u && v < self.num_nodes() && self.adjacency[v].binary_search(&u).is_ok())
        })
    }
}

/// On-demand access to neighbor lists, tracking which nodes have been
/// revealed. Models a graph whose structure is only discovered locally.
#[derive(Clone, Debug)]
pub struct NeighborOracle<'g> {
    graph: &'g Graph,
    revealed: Vec<bool>,
    reveal_count: usize,
}

impl<'g> NeighborOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self {
            graph,
            revealed: vec![false; graph.num_nodes()],
            reveal_count: 0,
        }
    }

    pub fn reveal(&mut self, v: usize) -> &'g [usize] {
        if !self.revealed[v] {
            self.revealed[v] = true;
            self.reveal_count += 1;
        }
        self.graph.neighbors(v)
    }

    pub fn is_revealed(&self, v: usize) -> bool {
        self.revealed[v]
    }

    pub fn reveal_count(&self) -> usize {
        self.reveal_count
    }

    /// Revealed nodes in ascending order.
    pub fn revealed_nodes(&self) -> Vec<usize> {
        (0..self.revealed.len()).filter(|&v| self.revealed[v]).collect()
    }

    /// Size of the node universe; node ids are known even when their
    /// neighborhoods are not.
    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_loops_and_duplicates() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 1), (1, 2)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert!(g.validate());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn reveal_is_idempotent() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let first = oracle.reveal(1).to_vec();
        let second = oracle.reveal(1).to_vec();
        assert_eq!(first, second);
        assert_eq!(oracle.reveal_count(), 1);
        oracle.reveal(0);
        assert_eq!(oracle.revealed_nodes(), vec![0, 1]);
    }

    #[test]
    fn removes_edges() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = g.without_edges(&[(2, 0)]);
        assert_eq!(h.num_edges(), 2);
        assert!(!h.has_edge(0, 2));
        assert!(h.validate());
    }
}
