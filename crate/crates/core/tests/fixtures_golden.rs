//! Golden behavior of every algorithm on the two example scenarios.
//!
//! The first scenario's numbers are fixed by construction: the least-delay
//! path A→E is A-B-C-E with delay 3, the node-label searches settle C via
//! A-C and return A-C-D-F-E with delay 4, and under a delay bound of 3.5
//! the constraint-ordered search concludes no path exists. The exhaustive
//! oracle double-checks each expected optimum.

use ctxroute_core::algo::{
    a_star, a_star_prune, cbf, dijkstra, edge_based_dijkstra, larac, oracle, AlgoError, Heuristic,
    OracleLimits, RoutingRequest,
};
use ctxroute_core::graph::{Graph, Path};
use ctxroute_core::metrics::{MetricOrder, MetricRole, MetricSet, MetricSpec};
use ctxroute_core::topo::{fig1, fig1_csp, fig2};

fn request(g: &Graph, metrics: &MetricSet, src: &str, dst: &str) -> RoutingRequest {
    RoutingRequest::new(
        g,
        g.node_by_label(src).unwrap(),
        g.node_by_label(dst).unwrap(),
        metrics.clone(),
    )
    .unwrap()
}

fn found_display(g: &Graph, result: &ctxroute_core::RoutingResult) -> String {
    result.path().expect("expected a path").display(g)
}

#[test]
fn fig1_sp_dijkstra_misses_the_optimum() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let res = dijkstra(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-C-D-F-E");
    assert_eq!(res.cost(&req), Some(4.0));
}

#[test]
fn fig1_sp_a_star_matches_dijkstra() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let res = a_star(&g, &req, Heuristic::HopCountScaled).unwrap();
    assert_eq!(found_display(&g, &res), "A-C-D-F-E");
    assert_eq!(res.cost(&req), Some(4.0));
}

#[test]
fn fig1_sp_zero_heuristic_degenerates_to_dijkstra() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let plain = dijkstra(&g, &req).unwrap();
    let zero = a_star(&g, &req, Heuristic::Zero).unwrap();
    assert_eq!(plain.outcome, zero.outcome);
}

#[test]
fn fig1_sp_edge_based_dijkstra_finds_the_optimum() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let res = edge_based_dijkstra(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-B-C-E");
    assert_eq!(res.cost(&req), Some(3.0));
    // Hand-traced run: the two virtual source labels plus B-C, C-E (twice,
    // improved once) and C-D and D-F queued before the destination ingress
    // settles; five labels settle.
    assert_eq!(res.stats.settled, 5);
    assert_eq!(res.stats.pushes, 7);
    let out_deg_src = g.out_edges(g.node_by_label("A").unwrap()).unwrap().len();
    assert!(res.stats.settled <= g.edge_count() + out_deg_src);
}

#[test]
fn fig1_sp_a_star_prune_finds_the_optimum() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let res = a_star_prune(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-B-C-E");
    assert_eq!(res.cost(&req), Some(3.0));
}

#[test]
fn fig1_sp_oracle_confirms_the_optimum() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    let res = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &res), "A-B-C-E");
    assert_eq!(res.cost(&req), Some(3.0));
}

#[test]
fn fig1_static_variant_restores_dijkstra() {
    // Same topology with the context dependence removed: C-E is 1 in every
    // context, so all edges are a uniform static 1, and the exhaustive
    // optimum (A-C-E, cost 2) is found by Dijkstra as well.
    let (g, _) = fig1();
    let metrics = MetricSet::new(vec![MetricSpec::uniform(
        MetricRole::GlobalOptimization,
        1.0,
    )
    .unwrap()])
    .unwrap();
    let req = request(&g, &metrics, "A", "E");
    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    let greedy = dijkstra(&g, &req).unwrap();
    assert_eq!(exact.cost(&req), Some(2.0));
    assert_eq!(greedy.cost(&req), Some(2.0));
    assert_eq!(found_display(&g, &greedy), "A-C-E");
}

#[test]
fn equal_cost_ties_break_deterministically() {
    // Two cost-equal routes; the lexicographically smaller edge sequence
    // must win on every run.
    let mut g = Graph::new();
    let s = g.add_node(Some("s")).unwrap();
    let x = g.add_node(Some("x")).unwrap();
    let y = g.add_node(Some("y")).unwrap();
    let t = g.add_node(Some("t")).unwrap();
    let sx = g.add_edge(s, x).unwrap();
    let xt = g.add_edge(x, t).unwrap();
    g.add_edge(s, y).unwrap();
    g.add_edge(y, t).unwrap();
    let metrics = MetricSet::new(vec![MetricSpec::uniform(
        MetricRole::GlobalOptimization,
        1.0,
    )
    .unwrap()])
    .unwrap();
    let req = RoutingRequest::new(&g, s, t, metrics).unwrap();
    for _ in 0..5 {
        let res = dijkstra(&g, &req).unwrap();
        assert_eq!(res.path().unwrap().edges(), &[sx, xt]);
        let res = a_star_prune(&g, &req).unwrap();
        assert_eq!(res.path().unwrap().edges(), &[sx, xt]);
    }
}

#[test]
fn trivial_request_returns_empty_path() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "A");
    for res in [
        dijkstra(&g, &req).unwrap(),
        a_star(&g, &req, Heuristic::HopCountScaled).unwrap(),
        edge_based_dijkstra(&g, &req).unwrap(),
        a_star_prune(&g, &req).unwrap(),
        oracle(&g, &req, OracleLimits::default()).unwrap(),
    ] {
        assert_eq!(res.cost(&req), Some(0.0));
        assert!(res.path().unwrap().is_empty());
    }
}

#[test]
fn unreachable_destination_is_infeasible() {
    let mut g = Graph::new();
    let a = g.add_node(Some("a")).unwrap();
    let b = g.add_node(Some("b")).unwrap();
    let island = g.add_node(Some("island")).unwrap();
    g.add_edge(a, b).unwrap();
    let metrics = MetricSet::new(vec![MetricSpec::hop_count(MetricRole::GlobalOptimization)
        .unwrap()])
    .unwrap();
    let req = RoutingRequest::new(&g, a, island, metrics).unwrap();
    assert!(!dijkstra(&g, &req).unwrap().found());
    assert!(!a_star(&g, &req, Heuristic::HopCountScaled).unwrap().found());
    assert!(!edge_based_dijkstra(&g, &req).unwrap().found());
    assert!(!a_star_prune(&g, &req).unwrap().found());
    assert!(!oracle(&g, &req, OracleLimits::default()).unwrap().found());
}

#[test]
fn ebd_rejects_orders_above_one() {
    let (g, _) = fig1();
    for order in [MetricOrder::Finite(2), MetricOrder::Infinite] {
        let metrics = MetricSet::new(vec![MetricSpec::random(
            order,
            MetricRole::GlobalOptimization,
            1,
        )
        .unwrap()])
        .unwrap();
        let req = request(&g, &metrics, "A", "E");
        assert!(matches!(
            edge_based_dijkstra(&g, &req),
            Err(AlgoError::UnsupportedOrder { .. })
        ));
    }
}

// --- CSP: hop-count optimization under the order-1 delay bound ---

#[test]
fn fig1_csp_tight_bound_cbf_incomplete_aprune_complete() {
    let (g, m) = fig1_csp(3.5);
    let req = request(&g, &m, "A", "E");
    let blocked = cbf(&g, &req).unwrap();
    assert!(!blocked.found(), "constraint-ordered search must give up");
    let res = a_star_prune(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-B-C-E");
}

#[test]
fn fig1_csp_loose_bound_cbf_suboptimal() {
    let (g, m) = fig1_csp(4.5);
    let req = request(&g, &m, "A", "E");

    let res = cbf(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-C-D-F-E");
    let delay_index = 1;
    match &res.outcome {
        ctxroute_core::Outcome::Found { combined, .. } => {
            assert_eq!(combined[delay_index], 4.0)
        }
        _ => panic!("expected a path"),
    }

    let best = a_star_prune(&g, &req).unwrap();
    assert_eq!(found_display(&g, &best), "A-B-C-E");
    match &best.outcome {
        ctxroute_core::Outcome::Found { combined, .. } => {
            assert_eq!(combined[delay_index], 3.0)
        }
        _ => panic!("expected a path"),
    }

    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &exact), "A-B-C-E");
}

#[test]
fn fig1_csp_larac_misses_the_feasible_path() {
    let (g, m) = fig1_csp(3.5);
    let req = request(&g, &m, "A", "E");
    let res = larac(&g, &req).unwrap();
    assert!(
        !res.found(),
        "both inner searches land on infeasible paths, so LARAC gives up \
         even though A-B-C-E is valid"
    );

    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert!(exact.found(), "a feasible path exists");
}

#[test]
fn fig1_csp_larac_loose_bound_returns_feasible_suboptimal() {
    let (g, m) = fig1_csp(4.5);
    let req = request(&g, &m, "A", "E");
    let res = larac(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-C-D-F-E");
}

#[test]
fn larac_with_vacuous_bound_returns_unconstrained_optimum() {
    let (g, m) = fig1_csp(f64::INFINITY);
    let req = request(&g, &m, "A", "E");
    let res = larac(&g, &req).unwrap();
    // Unconstrained hop-count optimum.
    assert_eq!(found_display(&g, &res), "A-C-E");
    assert_eq!(res.cost(&req), Some(2.0));
}

#[test]
fn cbf_requires_a_csp_request() {
    let (g, m) = fig1();
    let req = request(&g, &m, "A", "E");
    assert!(matches!(cbf(&g, &req), Err(AlgoError::NotCsp { .. })));
    assert!(matches!(larac(&g, &req), Err(AlgoError::NotCsp { .. })));
}

// --- The accumulated-delay admission scenario ---

#[test]
fn fig2_dijkstra_loses_completeness() {
    let (g, m) = fig2();
    let req = request(&g, &m, "A", "E");
    let res = dijkstra(&g, &req).unwrap();
    assert!(
        !res.found(),
        "settling C via A-C poisons both of its outgoing edges"
    );
}

#[test]
fn fig2_exact_searches_find_the_admissible_path() {
    let (g, m) = fig2();
    let req = request(&g, &m, "A", "E");
    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &exact), "A-B-C-E");
    assert_eq!(exact.cost(&req), Some(3.0));
    let res = a_star_prune(&g, &req).unwrap();
    assert_eq!(found_display(&g, &res), "A-B-C-E");
    assert_eq!(res.cost(&req), Some(3.0));
}

// --- Local-constraint witnesses used by the impact matrix ---

/// Order-1 admission predicate that only blocks C-E after A-C: the greedy
/// search detours to the feasible but longer A-C-D-F-E.
#[test]
fn order1_local_constraint_makes_dijkstra_suboptimal() {
    let (g, _) = fig1();
    let ce = g.edge_between_labels("C", "E").unwrap();
    let ac = g.edge_between_labels("A", "C").unwrap();
    let mut values = std::collections::HashMap::new();
    values.insert((ce, vec![ac]), 5.0);
    let admission = MetricSpec::table(
        MetricOrder::Finite(1),
        MetricRole::LocalConstraint { threshold: 4.0 },
        1.0,
        values,
    )
    .unwrap();
    let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
    let metrics = MetricSet::new(vec![hops, admission]).unwrap();
    let req = request(&g, &metrics, "A", "E");

    let greedy = dijkstra(&g, &req).unwrap();
    assert_eq!(found_display(&g, &greedy), "A-C-D-F-E");
    assert_eq!(greedy.cost(&req), Some(4.0));

    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &exact), "A-B-C-E");
    assert_eq!(exact.cost(&req), Some(3.0));
}

/// Same predicate also poisoning C-D: the greedy search finds nothing at
/// all while A-B-C-E stays admissible.
#[test]
fn order1_local_constraint_makes_dijkstra_incomplete() {
    let (g, _) = fig1();
    let ce = g.edge_between_labels("C", "E").unwrap();
    let cd = g.edge_between_labels("C", "D").unwrap();
    let ac = g.edge_between_labels("A", "C").unwrap();
    let mut values = std::collections::HashMap::new();
    values.insert((ce, vec![ac]), 5.0);
    values.insert((cd, vec![ac]), 5.0);
    let admission = MetricSpec::table(
        MetricOrder::Finite(1),
        MetricRole::LocalConstraint { threshold: 4.0 },
        1.0,
        values,
    )
    .unwrap();
    let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
    let metrics = MetricSet::new(vec![hops, admission]).unwrap();
    let req = request(&g, &metrics, "A", "E");

    assert!(!dijkstra(&g, &req).unwrap().found());
    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &exact), "A-B-C-E");
}

/// Accumulated-delay admission with a long clean detour: the greedy
/// search returns a feasible path one hop longer than the optimum.
#[test]
fn accumulated_local_constraint_detour_witness() {
    let mut g = Graph::new();
    let s = g.add_node(Some("S")).unwrap();
    let b = g.add_node(Some("B")).unwrap();
    let c = g.add_node(Some("C")).unwrap();
    let e = g.add_node(Some("E")).unwrap();
    let d1 = g.add_node(Some("D1")).unwrap();
    let d2 = g.add_node(Some("D2")).unwrap();
    let d3 = g.add_node(Some("D3")).unwrap();
    g.add_edge(s, b).unwrap();
    let sc = g.add_edge(s, c).unwrap();
    g.add_edge(b, c).unwrap();
    g.add_edge(c, e).unwrap();
    g.add_edge(s, d1).unwrap();
    g.add_edge(d1, d2).unwrap();
    g.add_edge(d2, d3).unwrap();
    g.add_edge(d3, e).unwrap();

    let mut base = std::collections::HashMap::new();
    base.insert(sc, 5.0);
    let admission =
        MetricSpec::accumulated(MetricRole::LocalConstraint { threshold: 4.0 }, 1.0, base)
            .unwrap();
    let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
    let metrics = MetricSet::new(vec![hops, admission]).unwrap();
    let req = RoutingRequest::new(&g, s, e, metrics).unwrap();

    let greedy = dijkstra(&g, &req).unwrap();
    assert_eq!(found_display(&g, &greedy), "S-D1-D2-D3-E");
    assert_eq!(greedy.cost(&req), Some(4.0));

    let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
    assert_eq!(found_display(&g, &exact), "S-B-C-E");
    assert_eq!(exact.cost(&req), Some(3.0));
}

#[test]
fn found_results_reverify_under_the_metric_set() {
    let (g, m) = fig1_csp(4.5);
    let req = request(&g, &m, "A", "E");
    for res in [
        cbf(&g, &req).unwrap(),
        larac(&g, &req).unwrap(),
        a_star_prune(&g, &req).unwrap(),
    ] {
        if let ctxroute_core::Outcome::Found { path, combined } = &res.outcome {
            let report = req.metrics().feasible(&g, path).unwrap();
            assert!(report.feasible);
            assert_eq!(&report.combined, combined);
        }
    }
}

#[test]
fn oracle_rejects_nonchaining_paths_upstream() {
    // A nonsense edge sequence cannot even be constructed as a Path.
    let (g, _) = fig1();
    let ab = g.edge_between_labels("A", "B").unwrap();
    let cd = g.edge_between_labels("C", "D").unwrap();
    assert!(Path::new(&g, g.node_by_label("A").unwrap(), vec![ab, cd]).is_err());
}
