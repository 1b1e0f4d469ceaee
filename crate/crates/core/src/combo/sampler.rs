//! Recursive ego-sampling of a combo-subgraph around a focal combo-node.

use std::collections::HashMap;
use std::io::Write;
use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::Rng;

use super::{combo_neighbors, ComboNode};
use crate::graph::{diameter_capped, eigendecompose, normalized_laplacian, Graph, NeighborOracle, SpectralBasis};
use crate::Result;

/// A connected, locally sampled piece of the combo-graph. The center is
/// always local index 0.
#[derive(Debug)]
pub struct ComboSubgraph {
    nodes: Vec<ComboNode>,
    index: HashMap<ComboNode, usize>,
    hop_of: Vec<usize>,
    graph: Graph,
    basis: OnceLock<SpectralBasis>,
}

impl ComboSubgraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn center(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[ComboNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ComboNode {
        &self.nodes[i]
    }

    pub fn index_of(&self, v: &ComboNode) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn hop_of(&self, i: usize) -> usize {
        self.hop_of[i]
    }

    /// Adjacency over local indices.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Eigenbasis of the subgraph's normalized Laplacian, computed on first use.
    pub fn basis(&self) -> Result<&SpectralBasis> {
        if let Some(b) = self.basis.get() {
            return Ok(b);
        }
        let b = eigendecompose(&normalized_laplacian(&self.graph))?;
        Ok(self.basis.get_or_init(|| b))
    }

    /// Polynomial kernel order: `min(5, diameter)`, at least 2.
    pub fn kernel_order(&self) -> usize {
        diameter_capped(&self.graph, 5).max(2)
    }

    /// Writes one `node <i> <hop> <elements...>` line per node followed by
    /// one `edge <i> <j>` line per edge.
    pub fn dump<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        for (i, v) in self.nodes.iter().enumerate() {
            write!(sink, "node {i} {}", self.hop_of[i])?;
            for x in v.elements() {
                write!(sink, " {x}")?;
            }
            writeln!(sink)?;
        }
        for (a, b) in self.graph.edges() {
            writeln!(sink, "edge {a} {b}")?;
        }
        Ok(())
    }
}

/// Expands hop by hop from `center` until `q` nodes are collected, `max_hops`
/// is reached, or the component is exhausted. Overflow in the newest hop is
/// trimmed uniformly at random. The returned subgraph is the induced
/// subgraph on the kept nodes.
pub fn sample_combo_subgraph<R: Rng + ?Sized>(
    center: &ComboNode,
    q: usize,
    max_hops: Option<usize>,
    oracle: &mut NeighborOracle<'_>,
    rng: &mut R,
) -> ComboSubgraph {
    let q = q.max(1);
    let mut nodes = vec![center.clone()];
    let mut index = HashMap::from([(center.clone(), 0usize)]);
    let mut hop_of = vec![0usize];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    let mut hop = 0usize;

    while !frontier.is_empty() {
        let may_grow = nodes.len() < q && max_hops.is_none_or(|m| hop < m);
        let mut fresh: Vec<ComboNode> = Vec::new();
        let mut fresh_index: HashMap<ComboNode, usize> = HashMap::new();
        let mut fresh_parents: Vec<Vec<usize>> = Vec::new();
        for &f in &frontier {
            for nb in combo_neighbors(&nodes[f], oracle) {
                if let Some(&j) = index.get(&nb) {
                    if j != f && !adjacency[f].contains(&j) {
                        adjacency[f].push(j);
                        adjacency[j].push(f);
                    }
                } else if may_grow {
                    let slot = *fresh_index.entry(nb.clone()).or_insert_with(|| {
                        fresh.push(nb);
                        fresh_parents.push(Vec::new());
                        fresh.len() - 1
                    });
                    fresh_parents[slot].push(f);
                }
            }
        }
        if !may_grow {
            break;
        }
        let room = q - nodes.len();
        let kept: Vec<usize> = if fresh.len() > room {
            let mut picked = sample(rng, fresh.len(), room).into_vec();
            picked.sort_unstable();
            picked
        } else {
            (0..fresh.len()).collect()
        };
        hop += 1;
        frontier.clear();
        for slot in kept {
            let id = nodes.len();
            let v = std::mem::replace(&mut fresh[slot], ComboNode(Box::new([])));
            index.insert(v.clone(), id);
            nodes.push(v);
            hop_of.push(hop);
            adjacency.push(fresh_parents[slot].clone());
            for &p in &fresh_parents[slot] {
                adjacency[p].push(id);
            }
            frontier.push(id);
        }
    }

    ComboSubgraph {
        nodes,
        index,
        hop_of,
        graph: Graph::from_raw_adjacency(adjacency),
        basis: OnceLock::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combo::{brute_force_combo_graph, is_combo_edge, DEFAULT_BRUTE_CAP};
    use crate::graph::generate_ba;
    use crate::rng::stream;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn c(e: &[usize]) -> ComboNode {
        ComboNode::new(e.to_vec()).unwrap()
    }

    #[test]
    fn singleton_when_q_is_one() {
        let g = generate_ba(10, 2, 1).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let s = sample_combo_subgraph(&c(&[0, 1]), 1, None, &mut oracle, &mut stream(0, "t"));
        assert_eq!(s.len(), 1);
        assert_eq!(s.graph().num_edges(), 0);
    }

    #[test]
    fn six_node_graph_q6() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let s = sample_combo_subgraph(&c(&[0, 3]), 6, None, &mut oracle, &mut stream(3, "t"));
        assert_eq!(s.len(), 6);
        assert!(s.graph().is_connected());
        assert_eq!(s.node(0), &c(&[0, 3]));
    }

    #[test]
    fn isolated_center() {
        let g = Graph::from_edges(4, [(2, 3)]).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let s = sample_combo_subgraph(&c(&[0, 1]), 50, None, &mut oracle, &mut stream(0, "t"));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn hop_cap_respected() {
        let g = generate_ba(30, 2, 5).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let s = sample_combo_subgraph(&c(&[0, 1, 2]), 100_000, Some(1), &mut oracle, &mut stream(0, "t"));
        let mut o2 = NeighborOracle::new(&g);
        assert_eq!(s.len(), 1 + combo_neighbors(&c(&[0, 1, 2]), &mut o2).len());
        assert!((0..s.len()).all(|i| s.hop_of(i) <= 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sampled_subgraph_contract(n in 6usize..14, k in 1usize..4, q in 1usize..80, seed in any::<u64>()) {
            let g = generate_ba(n, 2, seed).unwrap();
            let center = ComboNode::new((0..k).collect()).unwrap();
            let mut oracle = NeighborOracle::new(&g);
            let s = sample_combo_subgraph(&center, q, None, &mut oracle, &mut stream(seed, "s"));
            prop_assert!(s.len() <= q);
            prop_assert_eq!(s.hop_of(0), 0);
            prop_assert!(s.graph().is_connected());
            for (a, b) in s.graph().edges() {
                prop_assert!(is_combo_edge(s.node(a), s.node(b), &g).unwrap());
            }
            // Induced: every combo-edge among kept nodes is present.
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    prop_assert_eq!(is_combo_edge(s.node(a), s.node(b), &g).unwrap(), s.graph().has_edge(a, b));
                }
            }
            let touched: BTreeSet<usize> = s.nodes().iter().flat_map(|v| v.elements().iter().copied()).collect();
            for v in oracle.revealed_nodes() {
                prop_assert!(touched.contains(&v));
            }
            let brute = brute_force_combo_graph(&g, k, DEFAULT_BRUTE_CAP).unwrap();
            let comp = crate::graph::shortest_path_hops(&brute.graph, brute.index_of(&center).unwrap()).unwrap();
            let reachable = comp.iter().filter(|&&d| d != crate::graph::UNREACHABLE).count();
            prop_assert_eq!(s.len(), reachable.min(q));

            let mut again = NeighborOracle::new(&g);
            let t = sample_combo_subgraph(&center, q, None, &mut again, &mut stream(seed, "s"));
            prop_assert_eq!(s.nodes(), t.nodes());
            prop_assert_eq!(s.graph(), t.graph());
        }
    }
}
