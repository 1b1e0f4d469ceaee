//! Centralities, clustering and hop distances.

use std::collections::VecDeque;

use super::Graph;
use crate::{Error, Result};

/// Distance reported for nodes that `shortest_path_hops` cannot reach.
pub const UNREACHABLE: usize = usize::MAX;

const POWER_ITERATION_CAP: usize = 100_000;

/// Normalized eigenvector centrality. On a disconnected graph the power
/// iteration runs on the largest component and every other node scores 0.
pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>> {
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::EmptyGraph("nodes"));
    }
    let comps = g.components();
    let largest = comps.iter().max_by_key(|c| c.len()).unwrap();
    let mut x = vec![0.0; n];
    let seed = 1.0 / (largest.len() as f64).sqrt();
    for &v in largest {
        x[v] = seed;
    }
    let mut next = vec![0.0; n];
    // Iterating with A + I shares eigenvectors with A and removes the
    // oscillation that bipartite components would otherwise cause.
    for _ in 0..POWER_ITERATION_CAP {
        for &v in largest {
            next[v] = x[v] + g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
        }
        let norm = largest.iter().map(|&v| next[v] * next[v]).sum::<f64>().sqrt();
        let mut delta = 0.0f64;
        for &v in largest {
            let y = next[v] / norm;
            delta = delta.max((y - x[v]).abs());
            x[v] = y;
        }
        if delta < 1e-13 {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        algorithm: "eigenvector centrality",
        iterations: POWER_ITERATION_CAP,
    })
}

pub fn degree_centrality(g: &Graph) -> Result<Vec<f64>> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(Error::InvalidParameters(
            "degree centrality needs at least 2 nodes".into(),
        ));
    }
    let scale = 1.0 / (n - 1) as f64;
    Ok((0..n).map(|v| g.degree(v) as f64 * scale).collect())
}

/// PageRank with uniform teleportation. Mass on dangling nodes is spread
/// uniformly.
pub fn pagerank(g: &Graph, damping: f64, tol: f64) -> Result<Vec<f64>> {
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::EmptyGraph("nodes"));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    let uniform = 1.0 / n as f64;
    let mut x = vec![uniform; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_ITERATION_CAP {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0).map(|v| x[v]).sum();
        let base = (1.0 - damping) * uniform + damping * dangling * uniform;
        for v in 0..n {
            next[v] = base
                + damping
                    * g.neighbors(v)
                        .iter()
                        .map(|&u| x[u] / g.degree(u) as f64)
                        .sum::<f64>();
        }
        let total: f64 = next.iter().sum();
        let mut residual = 0.0;
        for v in 0..n {
            let y = next[v] / total;
            residual += (y - x[v]).abs();
            x[v] = y;
        }
        if residual < tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        algorithm: "pagerank",
        iterations: POWER_ITERATION_CAP,
    })
}

/// `3 · triangles / connected triples`, or 0 when the graph has no triples.
pub fn transitivity(g: &Graph) -> f64 {
    let mut closed = 0u64;
    let mut triads = 0u64;
    for v in 0..g.num_nodes() {
        let nbrs = g.neighbors(v);
        let d = nbrs.len() as u64;
        triads += d * d.saturating_sub(1) / 2;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if g.has_edge(a, b) {
                    closed += 1;
                }
            }
        }
    }
    if triads == 0 {
        0.0
    } else {
        closed as f64 / triads as f64
    }
}

pub fn shortest_path_hops(g: &Graph, src: usize) -> Result<Vec<usize>> {
    let n = g.num_nodes();
    if src >= n {
        return Err(Error::IndexOutOfRange { index: src, len: n });
    }
    let mut dist = vec![UNREACHABLE; n];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == UNREACHABLE {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Ok(dist)
}

/// Largest finite eccentricity, stopping early once it reaches `cap`.
pub fn diameter_capped(g: &Graph, cap: usize) -> usize {
    let mut best = 0;
    for v in 0..g.num_nodes() {
        let ecc = shortest_path_hops(g, v)
            .unwrap()
            .into_iter()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0);
        best = best.max(ecc);
        if best >= cap {
            return cap;
        }
    }
    best
}

/// Line graph of `g` together with the original edge behind each of its nodes.
pub fn line_graph(g: &Graph) -> Result<(Graph, Vec<(usize, usize)>)> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return Err(Error::EmptyGraph("edges"));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.num_nodes()];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(id);
        incident[v].push(id);
    }
    let mut adjacency = vec![Vec::new(); edges.len()];
    for ids in &incident {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    Ok((Graph::from_raw_adjacency(adjacency), edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn eigenvector_centrality_examples() {
        let x = eigenvector_centrality(&complete(4)).unwrap();
        assert!(x.iter().all(|&v| (v - 0.5).abs() < 1e-9));

        let x = eigenvector_centrality(&star(4)).unwrap();
        assert!(x[0] > x[1]);

        let p3 = g(3, &[(0, 1), (1, 2)]);
        let x = eigenvector_centrality(&p3).unwrap();
        assert!((x[1] - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((x[0] - 0.5).abs() < 1e-6 && (x[2] - 0.5).abs() < 1e-6);
        // A x = sqrt(2) x for the path.
        assert!((x[0] + x[2] - 2f64.sqrt() * x[1]).abs() < 1e-6);
    }

    #[test]
    fn eigenvector_centrality_disconnected() {
        let graph = g(6, &[(0, 1), (1, 2), (2, 0), (3, 4)]);
        let x = eigenvector_centrality(&graph).unwrap();
        assert_eq!(&x[3..], &[0.0, 0.0, 0.0]);
        let norm: f64 = x.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degree_centrality_examples() {
        assert!(degree_centrality(&complete(5)).unwrap().iter().all(|&v| v == 1.0));
        let s = degree_centrality(&star(4)).unwrap();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.25);
        let c4 = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(degree_centrality(&c4).unwrap().iter().all(|&v| (v - 2.0 / 3.0).abs() < 1e-15));
        assert!(degree_centrality(&g(1, &[])).is_err());
    }

    #[test]
    fn pagerank_examples() {
        let x = pagerank(&complete(4), 0.85, 1e-10).unwrap();
        assert!(x.iter().all(|&v| (v - 0.25).abs() < 1e-9));

        let p3 = g(3, &[(0, 1), (1, 2)]);
        let x = pagerank(&p3, 0.85, 1e-10).unwrap();
        assert!(x[1] > x[0] && x[1] > x[2]);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let x = pagerank(&star(5), 1e-9, 1e-12).unwrap();
        assert!(x.iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-6));

        let with_isolated = g(4, &[(0, 1), (1, 2)]);
        let x = pagerank(&with_isolated, 0.85, 1e-10).unwrap();
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pagerank(&p3, 1.0, 1e-10).is_err());
    }

    #[test]
    fn transitivity_examples() {
        assert_eq!(transitivity(&complete(3)), 1.0);
        assert_eq!(transitivity(&star(4)), 0.0);
        let k4_minus = complete(4).without_edges(&[(0, 1)]);
        assert!((transitivity(&k4_minus) - 0.75).abs() < 1e-15);
        assert_eq!(transitivity(&g(2, &[(0, 1)])), 0.0);
    }

    #[test]
    fn hops_examples() {
        let p3 = g(3, &[(0, 1), (1, 2)]);
        assert_eq!(shortest_path_hops(&p3, 0).unwrap(), vec![0, 1, 2]);
        let c6 = g(6, &(0..6).map(|i| (i, (i + 1) % 6)).collect::<Vec<_>>());
        assert_eq!(shortest_path_hops(&c6, 0).unwrap()[3], 3);
        let split = g(3, &[(0, 1)]);
        assert_eq!(shortest_path_hops(&split, 0).unwrap()[2], UNREACHABLE);
        assert_eq!(diameter_capped(&c6, 10), 3);
        assert_eq!(diameter_capped(&c6, 2), 2);
    }

    #[test]
    fn line_graph_examples() {
        let (l, map) = line_graph(&complete(3)).unwrap();
        assert_eq!((l.num_nodes(), l.num_edges()), (3, 3));
        assert_eq!(map.len(), 3);

        let (l, _) = line_graph(&g(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!((l.num_nodes(), l.num_edges()), (2, 1));

        let (l, _) = line_graph(&star(4)).unwrap();
        assert_eq!((l.num_nodes(), l.num_edges()), (4, 6));

        assert!(matches!(line_graph(&g(3, &[])), Err(Error::EmptyGraph(_))));
    }

    #[test]
    fn line_graph_degrees() {
        let graph = crate::graph::generate_ba(40, 2, 11).unwrap();
        let (l, map) = line_graph(&graph).unwrap();
        assert_eq!(l.num_nodes(), graph.num_edges());
        for (id, &(u, v)) in map.iter().enumerate() {
            assert_eq!(l.degree(id), graph.degree(u) + graph.degree(v) - 2);
        }
    }
}
