//! Constrained breadth-first search for CSP requests.
//!
//! Labels are explored in order of the constraint metric and cut off at
//! the bound. At each node only labels that are not dominated — no settled
//! label is at least as good on both the constraint and the optimization
//! value — survive. That dominance step assumes sub-paths can be compared
//! by their two numbers alone, which holds for static metrics (making the
//! search exact) and fails for higher orders, where the search becomes
//! incomplete and sub-optimal.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::graph::{EdgeId, Graph, Path};

use super::{
    finish, label_cmp, single_global_constraint, AlgoError, RequestEval, RoutingRequest,
    RoutingResult, SearchStats,
};

struct Entry {
    cons: f64,
    cost: f64,
    edges: Vec<EdgeId>,
    node: crate::graph::NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cons
            .total_cmp(&other.cons)
            .then(self.cost.total_cmp(&other.cost))
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

pub fn cbf(graph: &Graph, request: &RoutingRequest) -> Result<RoutingResult, AlgoError> {
    let (cons_index, bound) = single_global_constraint("cbf", request)?;
    let start = Instant::now();
    let eval = RequestEval::new(graph, request);
    let cons_metric = &request.metrics().metrics()[cons_index];

    let mut stats = SearchStats::default();
    // Settled (constraint, cost) pairs per node; a new label dominated by
    // any of them is discarded.
    let mut frontier: Vec<Vec<(f64, f64)>> = vec![Vec::new(); graph.node_count()];
    let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
    let mut best: Option<(f64, Vec<EdgeId>)> = None;

    if 0.0 <= bound {
        heap.push(Reverse(Entry {
            cons: 0.0,
            cost: 0.0,
            edges: Vec::new(),
            node: request.source(),
        }));
        stats.pushes += 1;
    }

    while let Some(Reverse(entry)) = heap.pop() {
        if dominated(&frontier[entry.node.index()], entry.cons, entry.cost) {
            continue;
        }
        frontier[entry.node.index()].push((entry.cons, entry.cost));
        stats.settled += 1;

        if entry.node == request.destination() {
            let better = match &best {
                None => true,
                Some((c, edges)) => label_cmp(entry.cost, &entry.edges, *c, edges).is_lt(),
            };
            if better {
                best = Some((entry.cost, entry.edges));
            }
            continue;
        }

        let mut on_path = vec![false; graph.node_count()];
        on_path[request.source().index()] = true;
        for &e in &entry.edges {
            on_path[graph.ends(e).1.index()] = true;
        }

        for &e in graph.out(entry.node) {
            let (_, w) = graph.ends(e);
            if on_path[w.index()] {
                continue;
            }
            let ctx = &entry.edges;
            if !eval.admits(e, ctx) {
                continue;
            }
            let cons = entry.cons + cons_metric.value_with(e, ctx);
            if cons > bound {
                continue;
            }
            let cost = entry.cost + eval.optimization(e, ctx);
            if dominated(&frontier[w.index()], cons, cost) {
                continue;
            }
            let mut edges = entry.edges.clone();
            edges.push(e);
            heap.push(Reverse(Entry {
                cons,
                cost,
                edges,
                node: w,
            }));
            stats.pushes += 1;
        }
    }

    let path = match best {
        Some((_, edges)) => Some(Path::new(graph, request.source(), edges)?),
        None => None,
    };
    stats.elapsed = start.elapsed();
    finish(graph, request, path, stats)
}

fn dominated(frontier: &[(f64, f64)], cons: f64, cost: f64) -> bool {
    frontier.iter().any(|&(c, o)| c <= cons && o <= cost)
}
