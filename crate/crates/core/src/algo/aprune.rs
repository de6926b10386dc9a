//! A*Prune: best-first search over whole partial paths.
//!
//! Every queue entry carries its full path, so each extension is evaluated
//! with exact context regardless of metric order — this is the complete
//! and optimal reference algorithm for SP and MCSP requests. Partial paths
//! are pruned when an admissible projection shows they cannot meet a
//! global constraint, when they revisit a node, or when even an optimistic
//! completion cannot beat the incumbent solution. The search stops once
//! the next path to extend already projects worse than the incumbent.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::graph::{EdgeId, Graph, NodeId, Path};

use super::dijkstra::hop_count_heuristic;
use super::{
    finish, label_cmp, static_lower_bounds, AlgoError, RequestEval, RoutingRequest, RoutingResult,
    SearchStats,
};

/// Slack for lower-bound pruning so float rounding can only cause extra
/// work, never an unsound prune.
const PRUNE_EPS: f64 = 1e-9;

struct Entry {
    f: f64,
    cost: f64,
    cons: Vec<f64>,
    edges: Vec<EdgeId>,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then(self.edges.len().cmp(&other.edges.len()))
            .then_with(|| self.edges.cmp(&other.edges))
            .then(self.node.index().cmp(&other.node.index()))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn a_star_prune(graph: &Graph, request: &RoutingRequest) -> Result<RoutingResult, AlgoError> {
    let start = Instant::now();
    let eval = RequestEval::new(graph, request);
    let metrics = request.metrics().metrics();
    let (_, opt_metric) = request.metrics().optimization().expect("validated");
    let h_opt = hop_count_heuristic(graph, request.destination(), opt_metric);

    // Admissible per-node projections of each global constraint's
    // remaining value: reverse Dijkstra over per-edge minima.
    let constraints: Vec<(usize, f64)> = request
        .metrics()
        .global_constraints()
        .map(|(i, _, b)| (i, b))
        .collect();
    let projections: Vec<Vec<f64>> = constraints
        .iter()
        .map(|&(i, _)| {
            let weights: Vec<f64> = graph
                .edge_ids()
                .map(|e| metrics[i].min_edge_value(e))
                .collect();
            static_lower_bounds(graph, &weights, request.destination())
        })
        .collect();

    let mut stats = SearchStats::default();
    let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
    let mut incumbent: Option<(f64, Vec<EdgeId>)> = None;

    let source_ok = h_opt[request.source().index()].is_finite()
        && constraints.iter().enumerate().all(|(k, &(_, bound))| {
            projections[k][request.source().index()] <= bound + PRUNE_EPS
        });
    if source_ok {
        heap.push(Reverse(Entry {
            f: h_opt[request.source().index()],
            cost: 0.0,
            cons: vec![0.0; constraints.len()],
            edges: Vec::new(),
            node: request.source(),
        }));
        stats.pushes += 1;
    }

    while let Some(Reverse(entry)) = heap.pop() {
        if let Some((best_cost, _)) = &incumbent {
            if entry.f > *best_cost {
                break;
            }
        }
        stats.settled += 1;

        if entry.node == request.destination() {
            // Accumulated constraint values are exact here (full context,
            // same fold order as recomputation).
            let feasible = constraints
                .iter()
                .enumerate()
                .all(|(k, &(_, bound))| entry.cons[k] <= bound);
            if feasible {
                let better = match &incumbent {
                    None => true,
                    Some((c, edges)) => label_cmp(entry.cost, &entry.edges, *c, edges).is_lt(),
                };
                if better {
                    incumbent = Some((entry.cost, entry.edges));
                }
            }
            continue;
        }

        let mut on_path = vec![false; graph.node_count()];
        on_path[request.source().index()] = true;
        for &e in &entry.edges {
            on_path[graph.ends(e).1.index()] = true;
        }

        'extend: for &e in graph.out(entry.node) {
            let (_, w) = graph.ends(e);
            if on_path[w.index()] || !h_opt[w.index()].is_finite() {
                continue;
            }
            let ctx = &entry.edges;
            if !eval.admits(e, ctx) {
                continue;
            }
            let cost = entry.cost + eval.optimization(e, ctx);
            let mut cons = entry.cons.clone();
            for (k, &(i, bound)) in constraints.iter().enumerate() {
                cons[k] += metrics[i].value_with(e, ctx);
                if cons[k] + projections[k][w.index()] > bound + PRUNE_EPS {
                    continue 'extend;
                }
            }
            let f = cost + h_opt[w.index()];
            if let Some((best_cost, _)) = &incumbent {
                if f > *best_cost {
                    continue;
                }
            }
            let mut edges = entry.edges.clone();
            edges.push(e);
            heap.push(Reverse(Entry {
                f,
                cost,
                cons,
                edges,
                node: w,
            }));
            stats.pushes += 1;
        }
    }

    let path = match incumbent {
        Some((_, edges)) => Some(Path::new(graph, request.source(), edges)?),
        None => None,
    };
    stats.elapsed = start.elapsed();
    finish(graph, request, path, stats)
}
