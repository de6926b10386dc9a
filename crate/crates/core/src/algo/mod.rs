//! Routing algorithms.
//!
//! Two families live here. The node-label family (Dijkstra, A*, CBF,
//! LARAC) assumes that the best way to reach an intermediate node is
//! independent of how the search continues — which fails for
//! context-dependent metrics, so those algorithms are kept *faithfully*
//! wrong for order ≥ 1: they evaluate each relaxed edge under the context
//! of the current best-known prefix, exactly reproducing the loss of
//! optimality or completeness. The second family (edge-based Dijkstra,
//! A*Prune, the exhaustive oracle) does not rely on that assumption.

use std::time::Duration;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, NodeId, Path};
use crate::metrics::{MetricError, MetricSet};

mod aprune;
mod cbf;
mod dijkstra;
mod ebd;
mod larac;
mod node_search;
mod oracle;

pub use aprune::a_star_prune;
pub use cbf::cbf;
pub use dijkstra::{a_star, dijkstra, Heuristic};
pub use ebd::edge_based_dijkstra;
pub use larac::larac;
pub use oracle::{oracle, OracleLimits};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("request needs exactly one optimization metric")]
    NoOptimizationMetric,
    #[error("{algo} does not support metric order {detail}")]
    UnsupportedOrder { algo: &'static str, detail: String },
    #[error("{algo} expects a CSP request: one optimization metric and one global constraint")]
    NotCsp { algo: &'static str },
    #[error("graph too large for exhaustive search: {nodes} nodes exceeds limit {max_nodes}")]
    OracleTooLarge { nodes: usize, max_nodes: usize },
    #[error("exhaustive search enumerated more than {max_paths} paths")]
    OracleLimitExceeded { max_paths: usize },
}

/// A routing problem instance: route from `source` to `destination`
/// subject to the metric set.
#[derive(Debug, Clone)]
pub struct RoutingRequest {
    source: NodeId,
    destination: NodeId,
    metrics: MetricSet,
}

impl RoutingRequest {
    pub fn new(
        graph: &Graph,
        source: NodeId,
        destination: NodeId,
        metrics: MetricSet,
    ) -> Result<Self, AlgoError> {
        if !graph.contains_node(source) {
            return Err(GraphError::UnknownNode(source).into());
        }
        if !graph.contains_node(destination) {
            return Err(GraphError::UnknownNode(destination).into());
        }
        if metrics.optimization().is_none() {
            return Err(AlgoError::NoOptimizationMetric);
        }
        Ok(RoutingRequest {
            source,
            destination,
            metrics,
        })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn metrics(&self) -> &MetricSet {
        &self.metrics
    }

    /// Index of the optimization metric within the set.
    pub fn optimization_index(&self) -> usize {
        self.metrics.optimization().expect("validated").0
    }

    /// True when the set is exactly one optimization metric plus one
    /// global constraint (local constraints permitted alongside).
    pub fn is_csp(&self) -> bool {
        self.metrics.global_constraints().count() == 1
    }
}

/// Search effort counters plus wall time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SearchStats {
    /// Labels settled (popped and accepted).
    pub settled: usize,
    /// Queue insertions.
    pub pushes: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Found {
        path: Path,
        /// Combined value per metric, in metric-set order, recomputed from
        /// the returned path.
        combined: Vec<f64>,
    },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl RoutingResult {
    pub fn found(&self) -> bool {
        matches!(self.outcome, Outcome::Found { .. })
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.outcome {
            Outcome::Found { path, .. } => Some(path),
            Outcome::Infeasible => None,
        }
    }

    /// Combined value of the optimization metric, when a path was found.
    pub fn cost(&self, request: &RoutingRequest) -> Option<f64> {
        match &self.outcome {
            Outcome::Found { combined, .. } => Some(combined[request.optimization_index()]),
            Outcome::Infeasible => None,
        }
    }
}

/// Builds the final result from a candidate path: combined values are
/// recomputed from scratch and the path is re-verified against the full
/// metric set, so search bookkeeping can never drift from the reported
/// numbers. A candidate that fails verification becomes `Infeasible`.
pub(crate) fn finish(
    graph: &Graph,
    request: &RoutingRequest,
    candidate: Option<Path>,
    stats: SearchStats,
) -> Result<RoutingResult, AlgoError> {
    let outcome = match candidate {
        Some(path) => {
            let report = request.metrics().feasible(graph, &path)?;
            if report.feasible {
                Outcome::Found {
                    path,
                    combined: report.combined,
                }
            } else {
                Outcome::Infeasible
            }
        }
        None => Outcome::Infeasible,
    };
    Ok(RoutingResult { outcome, stats })
}

/// Hop distance from every node to `dst` (reverse BFS); `u32::MAX` marks
/// unreachable nodes.
pub(crate) fn hop_distances_to(graph: &Graph, dst: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.node_count()];
    dist[dst.index()] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(dst);
    while let Some(v) = queue.pop_front() {
        let d = dist[v.index()];
        for &e in graph.inn(v) {
            let (u, _) = graph.ends(e);
            if dist[u.index()] == u32::MAX {
                dist[u.index()] = d + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Shortest distance from every node to `dst` over static per-edge
/// weights (reverse Dijkstra). Used as an admissible projection of the
/// remaining value of a metric, with `weights[e]` a lower bound of the
/// metric's value on edge `e` over all contexts.
pub(crate) fn static_lower_bounds(graph: &Graph, weights: &[f64], dst: NodeId) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Item(f64, NodeId);
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0
                .total_cmp(&other.0)
                .then(self.1.index().cmp(&other.1.index()))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[dst.index()] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Item(0.0, dst)));
    while let Some(Reverse(Item(d, v))) = heap.pop() {
        if d > dist[v.index()] {
            continue;
        }
        for &e in graph.inn(v) {
            let (u, _) = graph.ends(e);
            let nd = d + weights[e.index()];
            if nd < dist[u.index()] {
                dist[u.index()] = nd;
                heap.push(Reverse(Item(nd, u)));
            }
        }
    }
    dist
}

/// Compares labels by (cost, hop count, edge-id sequence): the shared
/// deterministic tie-breaking rule.
pub(crate) fn label_cmp(
    a_cost: f64,
    a_edges: &[EdgeId],
    b_cost: f64,
    b_edges: &[EdgeId],
) -> std::cmp::Ordering {
    a_cost
        .total_cmp(&b_cost)
        .then(a_edges.len().cmp(&b_edges.len()))
        .then_with(|| a_edges.cmp(b_edges))
}

/// Per-edge evaluation of the request's metrics during a search: the
/// optimization value plus the local-constraint admission check, both
/// under a caller-supplied context.
pub(crate) struct RequestEval<'a> {
    metrics: &'a MetricSet,
    opt_index: usize,
}

impl<'a> RequestEval<'a> {
    pub(crate) fn new(_graph: &'a Graph, request: &'a RoutingRequest) -> Self {
        RequestEval {
            metrics: request.metrics(),
            opt_index: request.optimization_index(),
        }
    }

    pub(crate) fn optimization(&self, edge: EdgeId, ctx: &[EdgeId]) -> f64 {
        self.metrics.metrics()[self.opt_index].value_with(edge, ctx)
    }

    /// True when `edge` passes every local-constraint predicate under `ctx`.
    pub(crate) fn admits(&self, edge: EdgeId, ctx: &[EdgeId]) -> bool {
        for (_, m, threshold) in self.metrics.local_constraints() {
            if m.value_with(edge, ctx) > threshold {
                return false;
            }
        }
        true
    }
}

/// Rejects metric roles or orders an algorithm cannot carry; shared by the
/// algorithms that are only defined for bounded orders.
pub(crate) fn max_order_guard(
    algo: &'static str,
    metrics: &MetricSet,
    max: u32,
) -> Result<(), AlgoError> {
    for m in metrics.metrics() {
        match m.order() {
            crate::metrics::MetricOrder::Finite(n) if n <= max => {}
            other => {
                return Err(AlgoError::UnsupportedOrder {
                    algo,
                    detail: format!("{other:?} (max supported {max})"),
                })
            }
        }
    }
    Ok(())
}

pub(crate) fn single_global_constraint(
    algo: &'static str,
    request: &RoutingRequest,
) -> Result<(usize, f64), AlgoError> {
    let mut it = request.metrics().global_constraints();
    let first = it.next();
    let second = it.next();
    match (first, second) {
        (Some((i, _, bound)), None) => Ok((i, bound)),
        _ => Err(AlgoError::NotCsp { algo }),
    }
}
