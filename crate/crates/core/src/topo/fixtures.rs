//! The two hand-built example scenarios used throughout the tests.
//!
//! `fig1`: six nodes A..F, seven directed edges. The delay of C-E depends
//! on the edge used to reach C: 5 after A-C, 1 after B-C or at the start
//! of a path, 1 everywhere else. The least-delay path A→E is A-B-C-E
//! (delay 3) while a node-label search settles C via A-C and ends up with
//! A-C-D-F-E (delay 4).
//!
//! `fig2`: same topology, hop-count optimization, and a local admission
//! predicate rejecting any edge whose prefix path has accumulated more
//! than 4 units of base delay (A-C carries 5, every other edge 1). Via
//! A-C the accumulated 5 blocks both C-E and C-D; via A-B-C everything
//! passes, so the only feasible path is A-B-C-E.

use std::collections::HashMap;

use crate::graph::Graph;
use crate::metrics::{MetricOrder, MetricRole, MetricSet, MetricSpec};

use super::TopoError;

fn fig_topology() -> Graph {
    let mut g = Graph::new();
    let a = g.add_node(Some("A")).unwrap();
    let b = g.add_node(Some("B")).unwrap();
    let c = g.add_node(Some("C")).unwrap();
    let d = g.add_node(Some("D")).unwrap();
    let e = g.add_node(Some("E")).unwrap();
    let f = g.add_node(Some("F")).unwrap();
    g.add_edge(a, b).unwrap();
    g.add_edge(b, c).unwrap();
    g.add_edge(a, c).unwrap();
    g.add_edge(c, e).unwrap();
    g.add_edge(c, d).unwrap();
    g.add_edge(d, f).unwrap();
    g.add_edge(f, e).unwrap();
    g
}

fn fig1_delay(g: &Graph, role: MetricRole) -> MetricSpec {
    let ce = g.edge_between_labels("C", "E").unwrap();
    let ac = g.edge_between_labels("A", "C").unwrap();
    let mut values = HashMap::new();
    values.insert((ce, vec![ac]), 5.0);
    MetricSpec::table(MetricOrder::Finite(1), role, 1.0, values).unwrap()
}

/// The order-1 delay scenario, with the delay as optimization metric.
pub fn fig1() -> (Graph, MetricSet) {
    let g = fig_topology();
    let delay = fig1_delay(&g, MetricRole::GlobalOptimization);
    let metrics = MetricSet::new(vec![delay]).unwrap();
    (g, metrics)
}

/// The same scenario as a CSP: hop-count optimization under a delay bound.
pub fn fig1_csp(bound: f64) -> (Graph, MetricSet) {
    let g = fig_topology();
    let delay = fig1_delay(&g, MetricRole::GlobalConstraint { bound });
    let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
    let metrics = MetricSet::new(vec![hops, delay]).unwrap();
    (g, metrics)
}

/// The accumulated-delay admission scenario: hop-count optimization, and
/// each edge only admits flows whose prefix accumulated at most 4.
pub fn fig2() -> (Graph, MetricSet) {
    let g = fig_topology();
    let ac = g.edge_between_labels("A", "C").unwrap();
    let mut base = HashMap::new();
    base.insert(ac, 5.0);
    let admission =
        MetricSpec::accumulated(MetricRole::LocalConstraint { threshold: 4.0 }, 1.0, base)
            .unwrap();
    let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
    let metrics = MetricSet::new(vec![hops, admission]).unwrap();
    (g, metrics)
}

/// Fixture lookup by name.
pub fn fixture(name: &str) -> Result<(Graph, MetricSet), TopoError> {
    match name {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        other => Err(TopoError::UnknownFixture(other.to_owned())),
    }
}
