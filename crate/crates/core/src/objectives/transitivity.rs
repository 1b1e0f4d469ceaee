//! Transitivity drop from removing a subset of edges.

use super::Objective;
use crate::graph::{line_graph, transitivity, Graph};
use crate::{Error, Result};

/// Subsets are node ids of the line graph, i.e. indices into
/// [`TransitivityDropObjective::edges`].
pub struct TransitivityDropObjective {
    graph: Graph,
    line: Graph,
    edges: Vec<(usize, usize)>,
    baseline: f64,
}

impl TransitivityDropObjective {
    pub fn new(graph: Graph) -> Result<Self> {
        let (line, edges) = line_graph(&graph)?;
        let baseline = transitivity(&graph);
        Ok(Self { graph, line, edges, baseline })
    }

    /// The graph the search runs on.
    pub fn line_graph(&self) -> &Graph {
        &self.line
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

impl Objective for TransitivityDropObjective {
    fn name(&self) -> String {
        "transitivity_drop".into()
    }

    fn universe(&self) -> usize {
        self.edges.len()
    }

    fn value(&self, subset: &[usize]) -> Result<f64> {
        let mut removed = Vec::with_capacity(subset.len());
        for &e in subset {
            removed.push(*self.edges.get(e).ok_or(Error::IndexOutOfRange {
                index: e,
                len: self.edges.len(),
            })?);
        }
        Ok(self.baseline - transitivity(&self.graph.without_edges(&removed)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn examples() {
        let tri = TransitivityDropObjective::new(complete(3)).unwrap();
        assert_eq!(tri.value(&[0]).unwrap(), 1.0);
        let star = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(TransitivityDropObjective::new(star).unwrap().value(&[2]).unwrap(), 0.0);
        let k4 = TransitivityDropObjective::new(complete(4)).unwrap();
        assert!((k4.value(&[3]).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(k4.line_graph().num_nodes(), 6);
    }
}
