//! Directed multigraph with stable dense identifiers.
//!
//! Nodes and edges are identified by dense integer indices assigned in
//! insertion order. Parallel edges and self-loops are allowed; adjacency
//! lists preserve insertion order so that searches tie-break the same way
//! on every run. A [`Graph`] is immutable once construction is finished
//! and can be shared freely between concurrent searches.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {edge} does not chain: expected source {expected}, found {found}")]
    BrokenChain {
        edge: EdgeId,
        expected: NodeId,
        found: NodeId,
    },
}

/// Identifier of a node, dense within its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub(crate) u32);

/// Identifier of an edge, dense within its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        EdgeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    labels: Vec<Option<String>>,
    endpoints: Vec<(NodeId, NodeId)>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    by_label: HashMap<String, NodeId>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node, optionally labeled. Labels must be unique.
    pub fn add_node(&mut self, label: Option<&str>) -> Result<NodeId, GraphError> {
        if let Some(l) = label {
            if self.by_label.contains_key(l) {
                return Err(GraphError::DuplicateLabel(l.to_owned()));
            }
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.map(str::to_owned));
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        if let Some(l) = label {
            self.by_label.insert(l.to_owned(), id);
        }
        Ok(id)
    }

    /// Adds a directed edge. Parallel edges and self-loops are permitted.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId) -> Result<EdgeId, GraphError> {
        self.check_node(src)?;
        self.check_node(dst)?;
        let id = EdgeId(self.endpoints.len() as u32);
        self.endpoints.push((src, dst));
        self.out_adj[src.index()].push(id);
        self.in_adj[dst.index()].push(id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(|i| NodeId(i as u32))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.endpoints.len()).map(|i| EdgeId(i as u32))
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v.index() < self.labels.len()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        e.index() < self.endpoints.len()
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels.get(v.index()).and_then(|l| l.as_deref())
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.by_label.get(label).copied()
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(NodeId, NodeId), GraphError> {
        self.endpoints
            .get(e.index())
            .copied()
            .ok_or(GraphError::UnknownEdge(e))
    }

    pub fn source(&self, e: EdgeId) -> Result<NodeId, GraphError> {
        Ok(self.endpoints(e)?.0)
    }

    pub fn target(&self, e: EdgeId) -> Result<NodeId, GraphError> {
        Ok(self.endpoints(e)?.1)
    }

    /// Outgoing edges of `v` in insertion order.
    pub fn out_edges(&self, v: NodeId) -> Result<&[EdgeId], GraphError> {
        self.check_node(v)?;
        Ok(&self.out_adj[v.index()])
    }

    /// Incoming edges of `v` in insertion order.
    pub fn in_edges(&self, v: NodeId) -> Result<&[EdgeId], GraphError> {
        self.check_node(v)?;
        Ok(&self.in_adj[v.index()])
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains_node(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(v))
        }
    }

    // Infallible accessors for search inner loops; ids are trusted to come
    // from this graph.
    pub(crate) fn out(&self, v: NodeId) -> &[EdgeId] {
        &self.out_adj[v.index()]
    }

    pub(crate) fn inn(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v.index()]
    }

    pub(crate) fn ends(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.endpoints[e.index()]
    }

    /// Label if present, otherwise the dense index.
    pub fn node_name(&self, v: NodeId) -> String {
        match self.label(v) {
            Some(l) => l.to_owned(),
            None => v.to_string(),
        }
    }

    pub fn edge_name(&self, e: EdgeId) -> String {
        match self.endpoints(e) {
            Ok((s, t)) => format!("{}-{}", self.node_name(s), self.node_name(t)),
            Err(_) => e.to_string(),
        }
    }

    /// Looks up an edge by endpoint labels, e.g. `("C", "E")`. Returns the
    /// first matching edge in insertion order.
    pub fn edge_between_labels(&self, src: &str, dst: &str) -> Option<EdgeId> {
        let s = self.node_by_label(src)?;
        let d = self.node_by_label(dst)?;
        self.out_adj[s.index()]
            .iter()
            .copied()
            .find(|&e| self.ends(e).1 == d)
    }
}

/// A walk through a graph: an ordered edge sequence in which consecutive
/// edges chain, or an empty sequence standing for the trivial path at
/// `start`. Node or edge revisits are not rejected here; callers that need
/// simple paths check [`Path::is_simple`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    start: NodeId,
    edges: Vec<EdgeId>,
}

impl Path {
    /// Builds a path and validates chaining against `graph`.
    pub fn new(graph: &Graph, start: NodeId, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        if !graph.contains_node(start) {
            return Err(GraphError::UnknownNode(start));
        }
        let mut at = start;
        for &e in &edges {
            let (src, dst) = graph.endpoints(e)?;
            if src != at {
                return Err(GraphError::BrokenChain {
                    edge: e,
                    expected: at,
                    found: src,
                });
            }
            at = dst;
        }
        Ok(Path { start, edges })
    }

    /// The length-zero path at `node`.
    pub fn trivial(graph: &Graph, node: NodeId) -> Result<Self, GraphError> {
        Self::new(graph, node, Vec::new())
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn end(&self, graph: &Graph) -> NodeId {
        match self.edges.last() {
            Some(&e) => graph.ends(e).1,
            None => self.start,
        }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Node sequence, including both endpoints.
    pub fn nodes(&self, graph: &Graph) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(self.start);
        for &e in &self.edges {
            out.push(graph.ends(e).1);
        }
        out
    }

    /// True when no node is visited twice.
    pub fn is_simple(&self, graph: &Graph) -> bool {
        let nodes = self.nodes(graph);
        let mut seen = vec![false; graph.node_count()];
        for v in nodes {
            if seen[v.index()] {
                return false;
            }
            seen[v.index()] = true;
        }
        true
    }

    /// Human-readable form, e.g. `A-B-C-E`.
    pub fn display(&self, graph: &Graph) -> String {
        self.nodes(graph)
            .iter()
            .map(|&v| graph.node_name(v))
            .collect::<Vec<_>>()
            .join("-")
    }
}
