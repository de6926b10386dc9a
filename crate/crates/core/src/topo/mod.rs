//! Topology ingestion and serialization: GraphML (Topology Zoo flavor),
//! a JSON graph+metrics schema, the two paper-style example fixtures, and
//! a seeded generator for small test topologies.

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::metrics::MetricError;

mod fixtures;
mod graphml;
mod json;
mod synthetic;

pub use fixtures::{fig1, fig1_csp, fig2, fixture};
pub use graphml::{parse_graphml, write_graphml};
pub use json::{read_graph, write_graph, write_provenance, GRAPH_SCHEMA_VERSION};
pub use synthetic::random_connected;

#[derive(Debug, Error)]
pub enum TopoError {
    #[error("malformed GraphML: {0}")]
    Xml(String),
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("edge references unknown node {0:?}")]
    UnknownNodeRef(String),
    #[error("node element without id attribute")]
    MissingNodeId,
    #[error("unknown fixture {0:?}; known: fig1, fig2")]
    UnknownFixture(String),
    #[error("unsupported graph schema version {found} (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },
    #[error("bad graph file: {0}")]
    BadGraphFile(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A parsed topology: the directed expansion plus the native link count
/// (undirected inputs double their edge count on expansion, size filters
/// apply to the native count).
#[derive(Debug, Clone)]
pub struct TopologyRecord {
    pub name: String,
    pub graph: Graph,
    /// Edge elements as present in the source file, before any
    /// undirected-to-directed expansion.
    pub links: usize,
    pub connected: bool,
}

impl TopologyRecord {
    pub fn new(name: impl Into<String>, graph: Graph, links: usize) -> Self {
        let connected = is_connected(&graph);
        TopologyRecord {
            name: name.into(),
            graph,
            links,
            connected,
        }
    }
}

/// Weak connectivity: BFS treating every directed edge as undirected.
pub fn is_connected(graph: &Graph) -> bool {
    let n = graph.node_count();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(crate::graph::NodeId::from_index(0));
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        let neighbors = graph
            .out(v)
            .iter()
            .map(|&e| graph.ends(e).1)
            .chain(graph.inn(v).iter().map(|&e| graph.ends(e).0));
        for w in neighbors {
            if !seen[w.index()] {
                seen[w.index()] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// Conjunctive size/connectivity filter with inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TopologyFilter {
    pub min_nodes: Option<usize>,
    pub max_nodes: Option<usize>,
    pub max_links: Option<usize>,
    pub require_connected: bool,
}

impl TopologyFilter {
    /// The shortest-path experiment filter: connected, more than 10 nodes,
    /// at most 100 nodes and 200 links.
    pub fn sp_default() -> Self {
        TopologyFilter {
            min_nodes: Some(11),
            max_nodes: Some(100),
            max_links: Some(200),
            require_connected: true,
        }
    }

    /// The tighter constrained-shortest-path filter: fewer than 50 nodes
    /// and 100 links.
    pub fn csp_default() -> Self {
        TopologyFilter {
            min_nodes: Some(11),
            max_nodes: Some(49),
            max_links: Some(99),
            require_connected: true,
        }
    }

    pub fn accepts(&self, record: &TopologyRecord) -> bool {
        let n = record.graph.node_count();
        if let Some(min) = self.min_nodes {
            if n < min {
                return false;
            }
        }
        if let Some(max) = self.max_nodes {
            if n > max {
                return false;
            }
        }
        if let Some(max) = self.max_links {
            if record.links > max {
                return false;
            }
        }
        !self.require_connected || record.connected
    }
}

/// Stable-order subset of `records` accepted by `filter`.
pub fn apply_filter(records: Vec<TopologyRecord>, filter: &TopologyFilter) -> Vec<TopologyRecord> {
    records.into_iter().filter(|r| filter.accepts(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Graph {
        let mut g = Graph::new();
        let ids: Vec<_> = (0..n).map(|_| g.add_node(None).unwrap()).collect();
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        g
    }

    #[test]
    fn connectivity_detects_islands() {
        let g = line(3);
        assert!(is_connected(&g));
        let mut g2 = line(3);
        g2.add_node(None).unwrap();
        assert!(!is_connected(&g2));
    }

    #[test]
    fn empty_input_filters_to_empty() {
        assert!(apply_filter(Vec::new(), &TopologyFilter::sp_default()).is_empty());
    }

    #[test]
    fn filter_tightening_never_adds() {
        let records = vec![
            TopologyRecord::new("a", line(12), 11),
            TopologyRecord::new("b", line(60), 59),
            TopologyRecord::new("c", line(5), 4),
        ];
        let sp = apply_filter(records.clone(), &TopologyFilter::sp_default());
        let csp = apply_filter(records, &TopologyFilter::csp_default());
        let sp_names: Vec<_> = sp.iter().map(|r| r.name.clone()).collect();
        for r in &csp {
            assert!(sp_names.contains(&r.name));
        }
    }
}
