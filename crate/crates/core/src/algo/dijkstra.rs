//! Dijkstra and A*: the classical node-label algorithms.
//!
//! Exact for static optimization metrics. For higher orders they evaluate
//! each relaxed edge under the best-known prefix to its tail, which can
//! return sub-optimal paths; that behavior is part of their contract here.
//! Global constraints, if any, are checked on the returned path after the
//! search; local constraints prune relaxations.

use std::time::Instant;

use crate::graph::{Graph, NodeId, Path};
use crate::metrics::MetricSpec;

use super::node_search::node_label_search;
use super::{finish, hop_distances_to, AlgoError, RequestEval, RoutingRequest, RoutingResult, SearchStats};

/// Estimate of the remaining cost used by A*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// No guidance; A* degenerates to Dijkstra.
    Zero,
    /// Hop distance to the destination scaled by the global minimum edge
    /// value of the optimization metric. Admissible for every metric
    /// order, since any context value is at least that minimum.
    HopCountScaled,
}

pub fn dijkstra(graph: &Graph, request: &RoutingRequest) -> Result<RoutingResult, AlgoError> {
    run(graph, request, None)
}

pub fn a_star(
    graph: &Graph,
    request: &RoutingRequest,
    heuristic: Heuristic,
) -> Result<RoutingResult, AlgoError> {
    let h = match heuristic {
        Heuristic::Zero => None,
        Heuristic::HopCountScaled => {
            let (_, opt) = request.metrics().optimization().expect("validated");
            Some(hop_count_heuristic(graph, request.destination(), opt))
        }
    };
    run(graph, request, h)
}

pub(crate) fn hop_count_heuristic(graph: &Graph, dst: NodeId, metric: &MetricSpec) -> Vec<f64> {
    let scale = metric.min_value(graph).max(0.0);
    hop_distances_to(graph, dst)
        .into_iter()
        .map(|d| {
            if d == u32::MAX {
                f64::INFINITY
            } else {
                d as f64 * scale
            }
        })
        .collect()
}

fn run(
    graph: &Graph,
    request: &RoutingRequest,
    heuristic: Option<Vec<f64>>,
) -> Result<RoutingResult, AlgoError> {
    let start = Instant::now();
    let eval = RequestEval::new(graph, request);
    let outcome = node_label_search(
        graph,
        request.source(),
        request.destination(),
        &mut |e, ctx| eval.optimization(e, ctx),
        &mut |e, ctx| eval.admits(e, ctx),
        heuristic.as_deref(),
    );
    let path = match outcome.edges {
        Some(edges) => Some(Path::new(graph, request.source(), edges)?),
        None => None,
    };
    let stats = SearchStats {
        settled: outcome.settled,
        pushes: outcome.pushes,
        elapsed: start.elapsed(),
    };
    finish(graph, request, path, stats)
}
