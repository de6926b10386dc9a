//! Best-first search keeping one label per node.
//!
//! This is the shared engine behind Dijkstra, A* and LARAC's inner runs.
//! Each relaxed edge is evaluated under the context of the current
//! best-known prefix to its tail node. For static metrics that is exact;
//! for higher orders it is the assumption that makes the node-label
//! family lose optimality or completeness, and it is kept on purpose.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::graph::{EdgeId, Graph, NodeId};

pub(crate) struct NodeSearchResult {
    /// Edge sequence of the found path, `None` when the destination was
    /// never settled.
    pub edges: Option<Vec<EdgeId>>,
    pub settled: usize,
    pub pushes: usize,
}

struct Entry {
    f: f64,
    g: f64,
    node: NodeId,
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

struct Label {
    g: f64,
}

/// Runs the search. `eval` yields the edge's optimization value under a
/// context, `admit` the local-constraint verdict. `heuristic`, when given,
/// holds a per-node admissible estimate of the remaining cost; entries
/// whose estimate is infinite are never queued.
pub(crate) fn node_label_search(
    graph: &Graph,
    source: NodeId,
    destination: NodeId,
    eval: &mut dyn FnMut(EdgeId, &[EdgeId]) -> f64,
    admit: &mut dyn FnMut(EdgeId, &[EdgeId]) -> bool,
    heuristic: Option<&[f64]>,
) -> NodeSearchResult {
    let h = |v: NodeId| heuristic.map_or(0.0, |h| h[v.index()]);
    let n = graph.node_count();
    let mut labels: Vec<Option<Label>> = (0..n).map(|_| None).collect();
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
    let mut stats_settled = 0usize;
    let mut stats_pushes = 0usize;

    labels[source.index()] = Some(Label { g: 0.0 });
    if h(source).is_finite() {
        heap.push(Reverse(Entry {
            f: h(source),
            g: 0.0,
            node: source,
            edges: Vec::new(),
        }));
        stats_pushes += 1;
    }

    while let Some(Reverse(entry)) = heap.pop() {
        let v = entry.node;
        if settled[v.index()] {
            continue;
        }
        match &labels[v.index()] {
            Some(l) if l.g == entry.g => {}
            _ => continue, // superseded by a cheaper label
        }
        settled[v.index()] = true;
        stats_settled += 1;
        if v == destination {
            return NodeSearchResult {
                edges: Some(entry.edges),
                settled: stats_settled,
                pushes: stats_pushes,
            };
        }

        for &e in graph.out(v) {
            let (_, w) = graph.ends(e);
            if settled[w.index()] {
                continue;
            }
            let ctx = &entry.edges;
            if !admit(e, ctx) {
                continue;
            }
            let value = eval(e, ctx);
            debug_assert!(value >= 0.0, "negative metric value on {e}");
            let g = entry.g + value;
            let improves = match &labels[w.index()] {
                None => true,
                Some(l) => g < l.g,
            };
            if !improves {
                continue;
            }
            let hw = h(w);
            let mut edges = entry.edges.clone();
            edges.push(e);
            labels[w.index()] = Some(Label { g });
            if hw.is_finite() {
                heap.push(Reverse(Entry {
                    f: g + hw,
                    g,
                    node: w,
                    edges,
                }));
                stats_pushes += 1;
            }
        }
    }

    NodeSearchResult {
        edges: None,
        settled: stats_settled,
        pushes: stats_pushes,
    }
}
