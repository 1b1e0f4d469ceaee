//! Whitespace-separated edge-list files.
//!
//! Each non-blank line holds two nonnegative integer node ids; `#` starts a
//! comment. Ids are compacted to `0..N` in order of first appearance and the
//! original ids are kept so results can be reported in them.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub graph: Graph,
    /// `original_ids[v]` is the id used in the source file for node `v`.
    pub original_ids: Vec<u64>,
}

pub fn load_edge_list<R: BufRead>(source: R) -> Result<EdgeList> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |raw: u64| -> usize {
        *ids.entry(raw).or_insert_with(|| {
            original_ids.push(raw);
            original_ids.len() - 1
        })
    };
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 2 node ids, found {}", tokens.len()),
            });
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&tokens) {
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid node id {tok:?}"),
            })?;
            *slot = intern(raw);
        }
        edges.push((pair[0], pair[1]));
    }
    let graph = Graph::from_edges(original_ids.len(), edges)?;
    Ok(EdgeList { graph, original_ids })
}

/// Writes `u v` lines (compact ids) for every edge.
pub fn write_edge_list<W: Write>(graph: &Graph, mut sink: W) -> Result<()> {
    writeln!(sink, "# nodes {} edges {}", graph.num_nodes(), graph.num_edges())?;
    for (u, v) in graph.edges() {
        writeln!(sink, "{u} {v}")?;
    }
    Ok(())
}
