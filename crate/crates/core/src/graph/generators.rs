//! Seeded random graph generators.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;

use super::Graph;
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Barabási–Albert preferential attachment. Starts from `m` isolated seed
/// nodes; each new node attaches to `m` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameters(format!(
            "BA needs n > m >= 1 (got n={n}, m={m})"
        )));
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity((n - m) * m);
    // Each node appears once per incident edge end.
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * (n - m) * m);
    let mut targets: Vec<usize> = (0..m).collect();
    for source in m..n {
        for &t in &targets {
            edges.push((source, t));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, m));
        let mut chosen = BTreeSet::new();
        while chosen.len() < m {
            chosen.insert(*repeated.choose(&mut rng).expect("nonempty"));
        }
        targets = chosen.into_iter().collect();
    }
    Graph::from_edges(n, edges)
}

/// Watts–Strogatz small world: a ring lattice where each node links to its
/// `k_ring / 2` nearest neighbors on either side, then every lattice edge is
/// rewired with probability `p` to a uniform endpoint, avoiding self-loops
/// and duplicates.
pub fn generate_ws(n: usize, k_ring: usize, p: f64, seed: u64) -> Result<Graph> {
    if k_ring % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "WS ring degree must be even (got {k_ring})"
        )));
    }
    if n <= k_ring {
        return Err(Error::InvalidParameters(format!(
            "WS needs n > k_ring (got n={n}, k_ring={k_ring})"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("rewiring probability {p} not in [0,1]")));
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k_ring / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k_ring / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.random::<f64>() >= p {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    Ok(Graph::from_raw_adjacency(
        adj.into_iter().map(|s| s.into_iter().collect()).collect(),
    ))
}

/// Stochastic block model with consecutive clusters; the pair (u, v) is an
/// edge with probability `p_within` inside a cluster and `p_between` across.
pub fn generate_sbm(cluster_sizes: &[usize], p_within: f64, p_between: f64, seed: u64) -> Result<Graph> {
    if cluster_sizes.is_empty() || cluster_sizes.contains(&0) {
        return Err(Error::InvalidParameters("SBM clusters must be nonempty".into()));
    }
    for p in [p_within, p_between] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameters(format!("probability {p} not in [0,1]")));
        }
    }
    let membership: Vec<usize> = cluster_sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &size)| std::iter::repeat_n(c, size))
        .collect();
    let n = membership.len();
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if membership[u] == membership[v] { p_within } else { p_between };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// 4-neighbor lattice; node `(i, j)` has id `i * cols + j`.
pub fn generate_grid2d(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameters("grid dimensions must be >= 1".into()));
    }
    let id = |i: usize, j: usize| i * cols + j;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < rows {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}
