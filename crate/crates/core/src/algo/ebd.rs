//! Edge-based Dijkstra: one best label per *edge* instead of per node.
//!
//! Knowing the edge a path arrived through is exactly the context an
//! order-1 metric needs, so the search is optimal for order ≤ 1
//! optimization metrics. Paths starting at the source get virtual
//! null-ingress labels on all of its outgoing edges; the answer is the
//! best settled label among the destination's incoming edges. Metrics of
//! order above 1 are rejected.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::graph::{EdgeId, Graph, Path};

use super::{
    finish, max_order_guard, AlgoError, RequestEval, RoutingRequest, RoutingResult, SearchStats,
};

struct Entry {
    g: f64,
    edge: EdgeId,
    edges: Vec<EdgeId>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.g
            .total_cmp(&other.g)
            .then(self.edges.len().cmp(&other.edges.len()))
            .then_with(|| self.edges.cmp(&other.edges))
            .then(self.edge.index().cmp(&other.edge.index()))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Label {
    g: f64,
}

pub fn edge_based_dijkstra(
    graph: &Graph,
    request: &RoutingRequest,
) -> Result<RoutingResult, AlgoError> {
    max_order_guard("edge_based_dijkstra", request.metrics(), 1)?;
    let start = Instant::now();
    let eval = RequestEval::new(graph, request);

    if request.source() == request.destination() {
        let path = Path::trivial(graph, request.source())?;
        let stats = SearchStats {
            elapsed: start.elapsed(),
            ..Default::default()
        };
        return finish(graph, request, Some(path), stats);
    }

    let m = graph.edge_count();
    let mut labels: Vec<Option<Label>> = (0..m).map(|_| None).collect();
    let mut settled = vec![false; m];
    let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
    let mut stats = SearchStats::default();

    // Virtual null-ingress labels for every edge leaving the source.
    for &e in graph.out(request.source()) {
        if !eval.admits(e, &[]) {
            continue;
        }
        let g = eval.optimization(e, &[]);
        improve(&mut labels, &mut heap, &mut stats, e, g, vec![e]);
    }

    let mut found: Option<Vec<EdgeId>> = None;
    while let Some(Reverse(entry)) = heap.pop() {
        let e = entry.edge;
        if settled[e.index()] {
            continue;
        }
        match &labels[e.index()] {
            Some(l) if l.g == entry.g => {}
            _ => continue,
        }
        settled[e.index()] = true;
        stats.settled += 1;
        let (_, v) = graph.ends(e);
        if v == request.destination() {
            // Labels settle in nondecreasing cost, so the first settled
            // ingress edge of the destination carries the best path.
            found = Some(entry.edges);
            break;
        }
        for &e2 in graph.out(v) {
            if settled[e2.index()] {
                continue;
            }
            let ctx = &entry.edges;
            if !eval.admits(e2, ctx) {
                continue;
            }
            let g2 = entry.g + eval.optimization(e2, ctx);
            let mut edges = entry.edges.clone();
            edges.push(e2);
            improve(&mut labels, &mut heap, &mut stats, e2, g2, edges);
        }
    }

    let path = match found {
        Some(edges) => Some(Path::new(graph, request.source(), edges)?),
        None => None,
    };
    stats.elapsed = start.elapsed();
    finish(graph, request, path, stats)
}

fn improve(
    labels: &mut [Option<Label>],
    heap: &mut BinaryHeap<Reverse<Entry>>,
    stats: &mut SearchStats,
    edge: EdgeId,
    g: f64,
    edges: Vec<EdgeId>,
) {
    let improves = match &labels[edge.index()] {
        None => true,
        Some(l) => g < l.g,
    };
    if !improves {
        return;
    }
    labels[edge.index()] = Some(Label { g });
    heap.push(Reverse(Entry { g, edge, edges }));
    stats.pushes += 1;
}
