//! JSON graph schema with bundled metric tables, plus the provenance
//! sidecar for transformed graphs. Maps are kept in sorted containers so
//! identical inputs serialize to identical bytes.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::gta::{EdgeKind, TransformedGraph};
use crate::metrics::{MetricConfig, MetricSet};

use super::TopoError;

pub const GRAPH_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    version: u64,
    nodes: Vec<NodeEntry>,
    edges: Vec<EdgeEntry>,
    #[serde(default)]
    metrics: Vec<MetricConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeEntry {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeEntry {
    id: usize,
    src: usize,
    dst: usize,
}

pub fn write_graph(graph: &Graph, metrics: &MetricSet) -> Result<String, TopoError> {
    let file = GraphFile {
        version: GRAPH_SCHEMA_VERSION,
        nodes: graph
            .node_ids()
            .map(|v| NodeEntry {
                id: v.index(),
                label: graph.label(v).map(str::to_owned),
            })
            .collect(),
        edges: graph
            .edge_ids()
            .map(|e| {
                let (s, t) = graph.endpoints(e).expect("own edge");
                EdgeEntry {
                    id: e.index(),
                    src: s.index(),
                    dst: t.index(),
                }
            })
            .collect(),
        metrics: metrics.to_configs()?,
    };
    serde_json::to_string_pretty(&file).map_err(|e| TopoError::Json(e.to_string()))
}

pub fn read_graph(text: &str) -> Result<(Graph, MetricSet), TopoError> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| TopoError::Json(e.to_string()))?;
    if file.version != GRAPH_SCHEMA_VERSION {
        return Err(TopoError::SchemaVersion {
            found: file.version,
            expected: GRAPH_SCHEMA_VERSION,
        });
    }
    let mut graph = Graph::new();
    for (i, n) in file.nodes.iter().enumerate() {
        if n.id != i {
            return Err(TopoError::BadGraphFile(format!(
                "node ids must be dense and ordered; found {} at position {i}",
                n.id
            )));
        }
        graph.add_node(n.label.as_deref())?;
    }
    for (i, e) in file.edges.iter().enumerate() {
        if e.id != i {
            return Err(TopoError::BadGraphFile(format!(
                "edge ids must be dense and ordered; found {} at position {i}",
                e.id
            )));
        }
        let src = crate::graph::NodeId::from_index(e.src);
        let dst = crate::graph::NodeId::from_index(e.dst);
        graph.add_edge(src, dst)?;
    }
    let metrics = MetricSet::from_configs(&file.metrics)?;
    Ok((graph, metrics))
}

#[derive(Debug, Serialize, Deserialize)]
struct ProvenanceFile {
    version: u64,
    applications: u32,
    edges: Vec<ProvenanceEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProvenanceEntry {
    id: usize,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    original_edge: Option<usize>,
    /// Recoverable ingress tuple at the edge's source (original edge ids,
    /// oldest first).
    context: Vec<usize>,
}

/// Sidecar mapping each transformed edge to its original edge and ingress
/// tuple.
pub fn write_provenance(tg: &TransformedGraph) -> Result<String, TopoError> {
    let edges = tg
        .graph()
        .edge_ids()
        .map(|e| {
            let (kind, original_edge) = match tg.edge_kind(e) {
                EdgeKind::Copy(o) => ("copy", Some(o.index())),
                EdgeKind::Sink => ("sink", None),
                EdgeKind::Shared(o) => ("shared", Some(o.index())),
            };
            ProvenanceEntry {
                id: e.index(),
                kind: kind.to_owned(),
                original_edge,
                context: tg.edge_context(e).iter().map(|c| c.index()).collect(),
            }
        })
        .collect();
    let file = ProvenanceFile {
        version: GRAPH_SCHEMA_VERSION,
        applications: tg.applications(),
        edges,
    };
    serde_json::to_string_pretty(&file).map_err(|e| TopoError::Json(e.to_string()))
}
