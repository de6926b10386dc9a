//! Graph transformation algorithm (GTA).
//!
//! Rewrites a graph whose metrics depend on previously traversed edges
//! into one whose metrics depend on one edge less, by encoding that edge
//! into the node identity: each node is copied once per ingress edge plus
//! once for the "null" ingress (paths starting there), and each edge is
//! duplicated per ingress of its source. Applied n times, an order-n
//! metric becomes static and any classical algorithm solves the original
//! problem exactly on the transformed graph.
//!
//! Requests map by sending the source to its null-ingress copy and the
//! destination to a per-node *sink* aggregating all of its copies through
//! identity-valued edges. Results map back by projecting every copied
//! edge to its original, dropping structural edges.
//!
//! For multipath use, [`TransformedGraph::add_sink_edges`] routes all
//! copies of one original edge through a shared gadget edge so that
//! edge-disjointness on the transformed graph implies disjointness on the
//! original one.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algo::{AlgoError, Outcome, RoutingRequest, RoutingResult};
use crate::graph::{EdgeId, Graph, GraphError, NodeId, Path};
use crate::metrics::{CombinationOperator, LiftedValuation, MetricSet, MetricSpec};

/// Default ceiling on transformed graph size; growth is roughly an order
/// of magnitude per application.
pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GtaError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] crate::metrics::MetricError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error("transformed graph would exceed the size cap of {cap} (nodes {nodes}, edges {edges})")]
    ResourceCap { nodes: usize, edges: usize, cap: usize },
    #[error("sinks have not been added; call add_sinks first")]
    SinksMissing,
    #[error("sinks already added")]
    SinksAlreadyAdded,
    #[error("combination operator {0:?} has no identity element for sink edges")]
    NoIdentity(CombinationOperator),
    #[error("result path does not end at a sink node")]
    NotASinkPath,
    #[error("node {0} does not exist in the original graph")]
    UnknownEndpoint(NodeId),
    #[error("no transformed counterpart for edge {0} at the current walk position")]
    NoCounterpart(EdgeId),
    #[error("applications must be at least 1")]
    ZeroApplications,
}

/// Role of a transformed node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// A copy of `original` reachable via the ingress tuple (original edge
    /// ids, oldest first; empty = the null-ingress copy).
    Copy {
        original: NodeId,
        ingress: Vec<EdgeId>,
    },
    /// Aggregation point for all copies of `original`.
    Sink { original: NodeId },
    /// Shared gadget node for all copies of `original_edge`.
    Gadget { original_edge: EdgeId },
}

/// Role of a transformed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Carries the context-dependent value of `original` and projects back
    /// to it.
    Copy(EdgeId),
    /// Identity-valued edge into a sink node.
    Sink,
    /// Identity-valued shared edge leaving a gadget node; the disjointness
    /// witness for all copies of `original`.
    Shared(EdgeId),
}

/// The transformed graph plus everything needed to move requests and
/// results across the transformation.
#[derive(Debug, Clone)]
pub struct TransformedGraph {
    graph: Graph,
    applications: u32,
    node_kind: Vec<NodeKind>,
    edge_kind: Vec<EdgeKind>,
    /// (original node, ingress tuple) -> copy node.
    copy_lookup: HashMap<(NodeId, Vec<EdgeId>), NodeId>,
    /// original node -> sink node, once sinks are added.
    sink_of: Vec<Option<NodeId>>,
    lifted: MetricSet,
    original_nodes: usize,
    original_edges: usize,
    pre_sink_nodes: usize,
    pre_sink_edges: usize,
    has_sinks: bool,
    has_sink_edges: bool,
}

/// A request moved onto the transformed graph: null-ingress source copy,
/// destination sink, and the lifted metric set.
#[derive(Debug, Clone)]
pub struct MappedRequest {
    pub source: NodeId,
    pub destination: NodeId,
    pub metrics: MetricSet,
}

impl MappedRequest {
    pub fn routing_request(&self, tg: &TransformedGraph) -> Result<RoutingRequest, AlgoError> {
        RoutingRequest::new(
            tg.graph(),
            self.source,
            self.destination,
            self.metrics.clone(),
        )
    }
}

/// One application of the transformation, without sinks.
pub fn gta_once(graph: &Graph, metrics: &MetricSet) -> Result<TransformedGraph, GtaError> {
    expand(graph, metrics, 1, DEFAULT_SIZE_CAP)
}

/// `n` applications followed by a single sink pass, ready for request
/// mapping.
pub fn gta_n(graph: &Graph, metrics: &MetricSet, n: u32) -> Result<TransformedGraph, GtaError> {
    gta_n_with_cap(graph, metrics, n, DEFAULT_SIZE_CAP)
}

pub fn gta_n_with_cap(
    graph: &Graph,
    metrics: &MetricSet,
    n: u32,
    cap: usize,
) -> Result<TransformedGraph, GtaError> {
    if n == 0 {
        return Err(GtaError::ZeroApplications);
    }
    expand(graph, metrics, n, cap)?.add_sinks()
}

/// Core expansion: applies the node/edge duplication `applications` times,
/// keeping provenance against the *original* graph throughout.
fn expand(
    original: &Graph,
    metrics: &MetricSet,
    applications: u32,
    cap: usize,
) -> Result<TransformedGraph, GtaError> {
    // State of the current expansion level. Level 0 is the original graph
    // itself: every node is its own null-ingress copy.
    let mut graph = original.clone();
    let mut node_origin: Vec<NodeId> = original.node_ids().collect();
    let mut node_ingress: Vec<Vec<EdgeId>> = vec![Vec::new(); original.node_count()];
    let mut edge_origin: Vec<EdgeId> = original.edge_ids().collect();

    for _ in 0..applications {
        let prev = &graph;
        let nodes_next = prev.node_count() + prev.edge_count();
        if nodes_next > cap {
            return Err(GtaError::ResourceCap {
                nodes: nodes_next,
                edges: 0,
                cap,
            });
        }

        let mut next = Graph::new();
        let mut next_origin = Vec::with_capacity(nodes_next);
        let mut next_ingress: Vec<Vec<EdgeId>> = Vec::with_capacity(nodes_next);
        // Copy node of the previous level's node v reached via previous
        // edge e (or the null ingress).
        let mut copy_of: HashMap<(NodeId, Option<EdgeId>), NodeId> = HashMap::new();

        for v in prev.node_ids() {
            let null_copy = next.add_node(None)?;
            copy_of.insert((v, None), null_copy);
            next_origin.push(node_origin[v.index()]);
            next_ingress.push(node_ingress[v.index()].clone());
            for &e in prev.inn(v) {
                let c = next.add_node(None)?;
                copy_of.insert((v, Some(e)), c);
                next_origin.push(node_origin[v.index()]);
                let (src, _) = prev.ends(e);
                let mut tuple = node_ingress[src.index()].clone();
                tuple.push(edge_origin[e.index()]);
                next_ingress.push(tuple);
            }
        }

        let mut next_edge_origin = Vec::new();
        for e in prev.edge_ids() {
            let (u, v) = prev.ends(e);
            let head = copy_of[&(v, Some(e))];
            // Tail copies: the null ingress of u plus each ingress edge.
            let tail_null = copy_of[&(u, None)];
            next.add_edge(tail_null, head)?;
            next_edge_origin.push(edge_origin[e.index()]);
            for &e_in in prev.inn(u) {
                let tail = copy_of[&(u, Some(e_in))];
                next.add_edge(tail, head)?;
                next_edge_origin.push(edge_origin[e.index()]);
            }
            if next.edge_count() > cap {
                return Err(GtaError::ResourceCap {
                    nodes: next.node_count(),
                    edges: next.edge_count(),
                    cap,
                });
            }
        }

        graph = next;
        node_origin = next_origin;
        node_ingress = next_ingress;
        edge_origin = next_edge_origin;
    }

    let node_kind: Vec<NodeKind> = (0..graph.node_count())
        .map(|i| NodeKind::Copy {
            original: node_origin[i],
            ingress: node_ingress[i].clone(),
        })
        .collect();
    let edge_kind: Vec<EdgeKind> = edge_origin.iter().map(|&e| EdgeKind::Copy(e)).collect();
    let copy_lookup = node_kind
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            NodeKind::Copy { original, ingress } => {
                ((*original, ingress.clone()), NodeId::from_index(i))
            }
            _ => unreachable!(),
        })
        .collect();

    let mut tg = TransformedGraph {
        pre_sink_nodes: graph.node_count(),
        pre_sink_edges: graph.edge_count(),
        graph,
        applications,
        node_kind,
        edge_kind,
        copy_lookup,
        sink_of: vec![None; original.node_count()],
        lifted: MetricSet::default(),
        original_nodes: original.node_count(),
        original_edges: original.edge_count(),
        has_sinks: false,
        has_sink_edges: false,
    };
    tg.rebuild_lifted(metrics);
    Ok(tg)
}

impl TransformedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Metric set carried across the transformation: finite orders reduced
    /// by the number of applications, infinite orders recovered through
    /// provenance.
    pub fn lifted_metrics(&self) -> &MetricSet {
        &self.lifted
    }

    pub fn applications(&self) -> u32 {
        self.applications
    }

    pub fn node_kind(&self, v: NodeId) -> &NodeKind {
        &self.node_kind[v.index()]
    }

    pub fn edge_kind(&self, e: EdgeId) -> EdgeKind {
        self.edge_kind[e.index()]
    }

    /// Original edge behind a transformed edge (copies only).
    pub fn edge_origin(&self, e: EdgeId) -> Option<EdgeId> {
        match self.edge_kind[e.index()] {
            EdgeKind::Copy(o) => Some(o),
            _ => None,
        }
    }

    /// Ingress tuple recoverable at the source of transformed edge `e`.
    pub fn edge_context(&self, e: EdgeId) -> &[EdgeId] {
        let (src, _) = self.graph.ends(e);
        match &self.node_kind[src.index()] {
            NodeKind::Copy { ingress, .. } => ingress,
            _ => &[],
        }
    }

    pub fn copy_node(&self, original: NodeId, ingress: &[EdgeId]) -> Option<NodeId> {
        self.copy_lookup.get(&(original, ingress.to_vec())).copied()
    }

    pub fn sink_node(&self, original: NodeId) -> Option<NodeId> {
        self.sink_of.get(original.index()).copied().flatten()
    }

    pub fn has_sinks(&self) -> bool {
        self.has_sinks
    }

    pub fn has_sink_edges(&self) -> bool {
        self.has_sink_edges
    }

    /// Node count before sinks and gadgets, equal to |V| + |E| of the
    /// previous level per application.
    pub fn pre_sink_node_count(&self) -> usize {
        self.pre_sink_nodes
    }

    pub fn pre_sink_edge_count(&self) -> usize {
        self.pre_sink_edges
    }

    fn rebuild_lifted(&mut self, source_metrics: &MetricSet) {
        let edge_origin: Arc<Vec<Option<EdgeId>>> = Arc::new(
            self.edge_kind
                .iter()
                .map(|k| match k {
                    EdgeKind::Copy(o) => Some(*o),
                    _ => None,
                })
                .collect(),
        );
        let edge_prepend: Arc<Vec<Vec<EdgeId>>> = Arc::new(
            self.graph
                .edge_ids()
                .map(|e| self.edge_context(e).to_vec())
                .collect(),
        );
        let mut lifted = Vec::with_capacity(source_metrics.len());
        for m in source_metrics.metrics() {
            let mut order = m.order();
            for _ in 0..self.applications {
                order = order.reduced();
            }
            lifted.push(MetricSpec::lifted(
                order,
                m.role(),
                m.combiner(),
                Arc::new(LiftedValuation {
                    source: m.clone(),
                    edge_origin: Arc::clone(&edge_origin),
                    edge_prepend: Arc::clone(&edge_prepend),
                }),
            ));
        }
        self.lifted = MetricSet::new(lifted).expect("roles preserved");
    }

    fn source_metrics(&self) -> MetricSet {
        MetricSet::new(
            self.lifted
                .metrics()
                .iter()
                .map(|m| m.source_metric().expect("lifted metric").clone())
                .collect(),
        )
        .expect("roles preserved")
    }

    /// Adds one sink node per original node, connected from each of its
    /// copies by an identity-valued edge.
    pub fn add_sinks(mut self) -> Result<Self, GtaError> {
        if self.has_sinks {
            return Err(GtaError::SinksAlreadyAdded);
        }
        for m in self.lifted.metrics() {
            if identity_element(m.combiner()).is_none() {
                return Err(GtaError::NoIdentity(m.combiner()));
            }
        }
        let sources = self.source_metrics();
        let copy_count = self.graph.node_count();
        for orig in 0..self.original_nodes {
            let sink = self.graph.add_node(None)?;
            self.node_kind.push(NodeKind::Sink {
                original: NodeId::from_index(orig),
            });
            self.sink_of[orig] = Some(sink);
        }
        for i in 0..copy_count {
            let v = NodeId::from_index(i);
            let origin = match &self.node_kind[i] {
                NodeKind::Copy { original, .. } => *original,
                _ => continue,
            };
            let sink = self.sink_of[origin.index()].expect("just added");
            self.graph.add_edge(v, sink)?;
            self.edge_kind.push(EdgeKind::Sink);
        }
        self.has_sinks = true;
        self.rebuild_lifted(&sources);
        Ok(self)
    }

    /// Multipath variant: inserts one gadget node per original edge and
    /// routes every copy of that edge through a single shared edge per
    /// copy target. Two transformed paths that use copies of the same
    /// original edge then collide on the shared edge.
    pub fn add_sink_edges(self) -> Result<Self, GtaError> {
        if self.has_sink_edges {
            return Ok(self);
        }
        let sources = self.source_metrics();
        let old = &self.graph;
        let mut next = Graph::new();
        let mut node_kind = self.node_kind.clone();
        // Node ids of the existing graph stay stable; gadget nodes go at
        // the end.
        for v in old.node_ids() {
            next.add_node(old.label(v))?;
        }
        let mut gadget_of: Vec<Option<NodeId>> = vec![None; self.original_edges];
        for orig in 0..self.original_edges {
            let used = self
                .edge_kind
                .iter()
                .any(|k| matches!(k, EdgeKind::Copy(o) if o.index() == orig));
            if used {
                let g = next.add_node(None)?;
                node_kind.push(NodeKind::Gadget {
                    original_edge: EdgeId::from_index(orig),
                });
                gadget_of[orig] = Some(g);
            }
        }

        let mut edge_kind: Vec<EdgeKind> = Vec::new();
        // Split every copy edge at its gadget; remember which shared
        // (gadget -> head) edges exist already so each is added once.
        let mut shared_seen: HashMap<(NodeId, NodeId), EdgeId> = HashMap::new();
        for e in old.edge_ids() {
            let (u, v) = old.ends(e);
            match self.edge_kind[e.index()] {
                EdgeKind::Copy(orig) => {
                    let g = gadget_of[orig.index()].expect("gadget exists for used edge");
                    next.add_edge(u, g)?;
                    edge_kind.push(EdgeKind::Copy(orig));
                    if !shared_seen.contains_key(&(g, v)) {
                        let shared = next.add_edge(g, v)?;
                        shared_seen.insert((g, v), shared);
                        edge_kind.push(EdgeKind::Shared(orig));
                    }
                }
                other => {
                    next.add_edge(u, v)?;
                    edge_kind.push(other);
                }
            }
        }

        let mut tg = TransformedGraph {
            graph: next,
            node_kind,
            edge_kind,
            has_sink_edges: true,
            ..self
        };
        tg.rebuild_lifted(&sources);
        Ok(tg)
    }

    /// Runs a solver on the transformed graph: maps the request, searches,
    /// and maps the result back. The transformation itself is reused
    /// across calls, so building it is a one-time cost per graph.
    pub fn solve(
        &self,
        original_graph: &Graph,
        request: &RoutingRequest,
        solver: impl FnOnce(&Graph, &RoutingRequest) -> Result<RoutingResult, AlgoError>,
    ) -> Result<RoutingResult, GtaError> {
        let mapped = self.map_request(request)?;
        let transformed_request = mapped.routing_request(self)?;
        let transformed_result = solver(self.graph(), &transformed_request)?;
        self.unmap_result(original_graph, request, &transformed_result)
    }

    /// Maps a request onto the transformed graph: source to its
    /// null-ingress copy, destination to its sink, metrics to their lifted
    /// form.
    pub fn map_request(&self, request: &RoutingRequest) -> Result<MappedRequest, GtaError> {
        if !self.has_sinks {
            return Err(GtaError::SinksMissing);
        }
        let source = self
            .copy_node(request.source(), &[])
            .ok_or(GtaError::UnknownEndpoint(request.source()))?;
        let destination = self
            .sink_node(request.destination())
            .ok_or(GtaError::UnknownEndpoint(request.destination()))?;
        Ok(MappedRequest {
            source,
            destination,
            metrics: self.lifted.clone(),
        })
    }

    /// Maps a result found on the transformed graph back to the original
    /// graph: copies project to their original edges, structural edges are
    /// dropped, and the path must terminate through a sink edge. Combined
    /// values are recomputed with the original metrics.
    pub fn unmap_result(
        &self,
        original_graph: &Graph,
        original_request: &RoutingRequest,
        result: &RoutingResult,
    ) -> Result<RoutingResult, GtaError> {
        let path = match &result.outcome {
            Outcome::Infeasible => {
                return Ok(RoutingResult {
                    outcome: Outcome::Infeasible,
                    stats: result.stats,
                })
            }
            Outcome::Found { path, .. } => path,
        };
        match path.edges().last() {
            Some(&e) if self.edge_kind[e.index()] == EdgeKind::Sink => {}
            _ => return Err(GtaError::NotASinkPath),
        }
        let mut edges = Vec::new();
        for &e in path.edges() {
            if let EdgeKind::Copy(orig) = self.edge_kind[e.index()] {
                edges.push(orig);
            }
        }
        let unmapped = Path::new(original_graph, original_request.source(), edges)?;
        let report = original_request
            .metrics()
            .feasible(original_graph, &unmapped)?;
        let outcome = if report.feasible {
            Outcome::Found {
                path: unmapped,
                combined: report.combined,
            }
        } else {
            Outcome::Infeasible
        };
        Ok(RoutingResult {
            outcome,
            stats: result.stats,
        })
    }

    /// The transformed twin of an original path, starting at the
    /// null-ingress copy of its start node. Gadget nodes, when present,
    /// are traversed through their shared edges. The twin does not include
    /// a trailing sink edge.
    pub fn map_path(&self, original: &Path) -> Result<Path, GtaError> {
        let mut at = self
            .copy_node(original.start(), &[])
            .ok_or(GtaError::UnknownEndpoint(original.start()))?;
        let mut edges = Vec::new();
        for &orig in original.edges() {
            // The copy of `orig` leaving the current node.
            let step = self
                .graph
                .out(at)
                .iter()
                .copied()
                .find(|&t| self.edge_kind[t.index()] == EdgeKind::Copy(orig))
                .ok_or(GtaError::NoCounterpart(orig))?;
            edges.push(step);
            at = self.graph.ends(step).1;
            if matches!(self.node_kind[at.index()], NodeKind::Gadget { .. }) {
                // Continue through the shared edge consistent with the
                // walk's context so far.
                let shared = self
                    .graph
                    .out(at)
                    .iter()
                    .copied()
                    .find(|&s| {
                        matches!(self.edge_kind[s.index()], EdgeKind::Shared(o) if o == orig)
                            && self.walk_target_matches(s, &edges)
                    })
                    .ok_or(GtaError::NoCounterpart(orig))?;
                edges.push(shared);
                at = self.graph.ends(shared).1;
            }
        }
        let start = self
            .copy_node(original.start(), &[])
            .ok_or(GtaError::UnknownEndpoint(original.start()))?;
        Ok(Path::new(&self.graph, start, edges)?)
    }

    /// Whether the shared edge `s` leads to the copy encoding the original
    /// edges walked so far.
    fn walk_target_matches(&self, s: EdgeId, walked: &[EdgeId]) -> bool {
        let (_, head) = self.graph.ends(s);
        match &self.node_kind[head.index()] {
            NodeKind::Copy { ingress, .. } => {
                let orig_walk: Vec<EdgeId> = walked
                    .iter()
                    .filter_map(|&e| self.edge_origin(e))
                    .collect();
                let k = ingress.len();
                orig_walk.len() >= k && ingress[..] == orig_walk[orig_walk.len() - k..]
            }
            _ => false,
        }
    }
}

/// Identity element of a combiner, when it has one; sink edges require it.
fn identity_element(c: CombinationOperator) -> Option<f64> {
    match c {
        CombinationOperator::Additive => Some(0.0),
    }
}
