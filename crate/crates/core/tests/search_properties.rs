//! Property tests: structural graph invariants, metric-model laws, and
//! the agreement matrix between the search algorithms and the exhaustive
//! oracle on seeded random instances.

use proptest::prelude::*;

use ctxroute_core::algo::{
    a_star, a_star_prune, cbf, dijkstra, edge_based_dijkstra, larac, oracle, Heuristic,
    OracleLimits, RoutingRequest,
};
use ctxroute_core::graph::{EdgeId, Graph, NodeId, Path};
use ctxroute_core::metrics::{MetricOrder, MetricRole, MetricSet, MetricSpec};
use ctxroute_core::topo::{
    apply_filter, random_connected, read_graph, write_graph, TopologyFilter, TopologyRecord,
};

const TOL: f64 = 1e-9;

fn topology(nodes: usize, extra: usize, seed: u64) -> Graph {
    random_connected("p", nodes, extra, seed).graph
}

/// A random walk of at most `len` edges starting anywhere, with its start
/// node; used to build valid contexts.
fn random_walk(g: &Graph, len: usize, seed: u64) -> (NodeId, Vec<EdgeId>) {
    let mut state = seed | 1;
    let mut next = move |m: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize % m.max(1)
    };
    let start = NodeId::from_index(next(g.node_count()));
    let mut at = start;
    let mut walk = Vec::new();
    for _ in 0..len {
        let out = g.out_edges(at).unwrap();
        if out.is_empty() {
            break;
        }
        let e = out[next(out.len())];
        walk.push(e);
        at = g.endpoints(e).unwrap().1;
    }
    (start, walk)
}

// --- graph invariants ---

proptest! {
    #[test]
    fn handshake_and_adjacency_consistency(nodes in 2usize..12, extra in 0usize..6, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let in_sum: usize = g.node_ids().map(|v| g.in_edges(v).unwrap().len()).sum();
        let out_sum: usize = g.node_ids().map(|v| g.out_edges(v).unwrap().len()).sum();
        prop_assert_eq!(in_sum, g.edge_count());
        prop_assert_eq!(out_sum, g.edge_count());
        for e in g.edge_ids() {
            let (s, t) = g.endpoints(e).unwrap();
            prop_assert!(g.out_edges(s).unwrap().contains(&e));
            prop_assert!(g.in_edges(t).unwrap().contains(&e));
        }
    }

    #[test]
    fn nonchaining_edge_sequences_are_rejected(seed in any::<u64>(), k in 2usize..6) {
        let g = topology(8, 4, seed);
        // Pick k edges round-robin; sequences that happen to chain must
        // build, anything else must be rejected.
        let edges: Vec<EdgeId> = (0..k)
            .map(|i| EdgeId::from_index((seed as usize + i * 7) % g.edge_count()))
            .collect();
        let start = g.endpoints(edges[0]).unwrap().0;
        let chains = edges.windows(2).all(|w| {
            g.endpoints(w[0]).unwrap().1 == g.endpoints(w[1]).unwrap().0
        });
        prop_assert_eq!(Path::new(&g, start, edges).is_ok(), chains);
    }
}

// --- metric model ---

#[test]
fn order_truncation_over_a_thousand_samples() {
    let g = topology(10, 6, 99);
    for order_n in [0u32, 1, 2, 3] {
        let m = MetricSpec::random(
            MetricOrder::Finite(order_n),
            MetricRole::GlobalOptimization,
            17,
        )
        .unwrap();
        for i in 0..1000u64 {
            let (_, walk) = random_walk(&g, 7, i.wrapping_mul(0x9e37) + 3);
            if walk.is_empty() {
                continue;
            }
            let (ctx, edge) = walk.split_at(walk.len() - 1);
            let full = m.evaluate(&g, edge[0], ctx).unwrap();
            let n = order_n as usize;
            let truncated = &ctx[ctx.len().saturating_sub(n)..];
            let short = m.evaluate(&g, edge[0], truncated).unwrap();
            assert_eq!(full, short);
        }
    }
}

proptest! {
    #[test]
    fn combine_splits_around_any_point(seed in any::<u64>(), split in 0usize..8) {
        let g = topology(9, 5, seed);
        let m = MetricSpec::random(MetricOrder::Infinite, MetricRole::GlobalOptimization, seed ^ 0xabc).unwrap();
        let (_, walk) = random_walk(&g, 8, seed);
        let split = split.min(walk.len());
        let (p1, p2) = walk.split_at(split);
        let whole = m.combine_with_context(&[], &walk);
        let parts = m.combine_with_context(&[], p1) + m.combine_with_context(p1, p2);
        prop_assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn static_combine_is_the_plain_sum(seed in any::<u64>()) {
        let g = topology(9, 5, seed);
        let m = MetricSpec::random(MetricOrder::Finite(0), MetricRole::GlobalOptimization, seed).unwrap();
        let (_, walk) = random_walk(&g, 8, seed ^ 5);
        let combined = m.combine_with_context(&[], &walk);
        let plain: f64 = walk.iter().map(|&e| m.value_with(e, &[])).sum();
        prop_assert!((combined - plain).abs() < 1e-12);
    }

    #[test]
    fn feasibility_is_monotone_in_the_bound(seed in any::<u64>(), b1 in 0.0f64..20.0, delta in 0.0f64..20.0) {
        let g = topology(9, 5, seed);
        let (start, walk) = random_walk(&g, 8, seed ^ 0xf00d);
        let path = Path::new(&g, start, walk).unwrap();
        let verdict = |bound: f64| {
            let m = MetricSet::new(vec![
                MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap(),
                MetricSpec::random(MetricOrder::Finite(1), MetricRole::GlobalConstraint { bound }, seed).unwrap(),
            ])
            .unwrap();
            m.feasible(&g, &path).unwrap().feasible
        };
        if verdict(b1) {
            prop_assert!(verdict(b1 + delta), "raising the bound flipped feasibility");
        }
    }
}

// --- algorithm agreement ---

fn sp_request(g: &Graph, order: MetricOrder, seed: u64) -> RoutingRequest {
    let metric = MetricSpec::random(order, MetricRole::GlobalOptimization, seed).unwrap();
    let metrics = MetricSet::new(vec![metric]).unwrap();
    let n = g.node_count();
    let src = NodeId::from_index(seed as usize % n);
    let dst = NodeId::from_index((seed as usize / 7 + 1) % n);
    RoutingRequest::new(g, src, dst, metrics).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn static_metrics_make_every_algorithm_agree(nodes in 4usize..11, extra in 0usize..4, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let req = sp_request(&g, MetricOrder::Finite(0), seed ^ 0x51);
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let reference = exact.cost(&req);
        for res in [
            dijkstra(&g, &req).unwrap(),
            a_star(&g, &req, Heuristic::HopCountScaled).unwrap(),
            edge_based_dijkstra(&g, &req).unwrap(),
            a_star_prune(&g, &req).unwrap(),
        ] {
            match (reference, res.cost(&req)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < TOL, "{a} vs {b}"),
                (None, None) => {}
                other => prop_assert!(false, "disagreement: {other:?}"),
            }
        }
    }

    #[test]
    fn order_one_exact_searches_match_the_oracle(nodes in 4usize..11, extra in 0usize..4, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let req = sp_request(&g, MetricOrder::Finite(1), seed ^ 0x52);
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let best = exact.cost(&req).unwrap();

        let ebd = edge_based_dijkstra(&g, &req).unwrap();
        prop_assert!((ebd.cost(&req).unwrap() - best).abs() < TOL);
        let out_deg = g.out_edges(req.source()).unwrap().len();
        prop_assert!(ebd.stats.settled <= g.edge_count() + out_deg);

        let ap = a_star_prune(&g, &req).unwrap();
        prop_assert!((ap.cost(&req).unwrap() - best).abs() < TOL);

        // The node-label search may be wrong but never better, and its
        // reported cost always equals a recomputation over its own path.
        let dj = dijkstra(&g, &req).unwrap();
        let dj_cost = dj.cost(&req).unwrap();
        prop_assert!(dj_cost >= best - TOL);
        let opt = &req.metrics().metrics()[0];
        let recomputed = opt.combine(&g, dj.path().unwrap()).unwrap();
        prop_assert!((dj_cost - recomputed).abs() < TOL);
    }

    #[test]
    fn a_star_prune_is_optimal_for_infinite_order(nodes in 4usize..10, extra in 0usize..4, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let req = sp_request(&g, MetricOrder::Infinite, seed ^ 0x53);
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let ap = a_star_prune(&g, &req).unwrap();
        match (exact.cost(&req), ap.cost(&req)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < TOL, "{a} vs {b}"),
            (None, None) => {}
            other => prop_assert!(false, "completeness violated: {other:?}"),
        }
    }
}

fn csp_request(
    g: &Graph,
    cons_order: MetricOrder,
    seed: u64,
    bound_slack: f64,
) -> Option<(RoutingRequest, f64)> {
    let opt = MetricSpec::random(MetricOrder::Finite(0), MetricRole::GlobalOptimization, seed)
        .unwrap();
    let n = g.node_count();
    let src = NodeId::from_index(seed as usize % n);
    let dst = NodeId::from_index((seed as usize / 3 + 2) % n);
    if src == dst {
        return None;
    }
    // Tightest meaningful bound: the constraint value of the
    // constraint-shortest path, computed exhaustively.
    let cons_as_opt = MetricSpec::random(cons_order, MetricRole::GlobalOptimization, seed ^ 0x77)
        .unwrap();
    let probe = RoutingRequest::new(g, src, dst, MetricSet::new(vec![cons_as_opt]).unwrap()).ok()?;
    let min_d = oracle(g, &probe, OracleLimits::default())
        .ok()?
        .cost(&probe)?;
    let bound = min_d * (1.0 + bound_slack);
    let cons = MetricSpec::random(
        cons_order,
        MetricRole::GlobalConstraint { bound },
        seed ^ 0x77,
    )
    .unwrap();
    let metrics = MetricSet::new(vec![opt, cons]).unwrap();
    Some((RoutingRequest::new(g, src, dst, metrics).unwrap(), bound))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cbf_finds_the_constrained_optimum_for_static_metrics(
        nodes in 4usize..11, extra in 0usize..4, seed in any::<u64>(), slack in 0.0f64..0.5
    ) {
        let g = topology(nodes, extra, seed);
        let Some((req, _)) = csp_request(&g, MetricOrder::Finite(0), seed ^ 0x61, slack) else {
            return Ok(());
        };
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let res = cbf(&g, &req).unwrap();
        prop_assert!(exact.found(), "bound at least min makes the instance feasible");
        prop_assert!(res.found(), "cbf is complete for static metrics");
        let (a, b) = (exact.cost(&req).unwrap(), res.cost(&req).unwrap());
        prop_assert!((a - b).abs() < TOL, "{a} vs {b}");
    }

    #[test]
    fn larac_is_complete_for_static_metrics(
        nodes in 4usize..11, extra in 0usize..4, seed in any::<u64>(), slack in 0.0f64..0.5
    ) {
        let g = topology(nodes, extra, seed);
        let Some((req, _)) = csp_request(&g, MetricOrder::Finite(0), seed ^ 0x62, slack) else {
            return Ok(());
        };
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let res = larac(&g, &req).unwrap();
        prop_assert_eq!(exact.found(), res.found());
        // Found solutions are feasible but not necessarily optimal.
        if let Some(cost) = res.cost(&req) {
            prop_assert!(cost >= exact.cost(&req).unwrap() - TOL);
        }
    }

    #[test]
    fn a_star_prune_is_complete_whenever_the_oracle_finds_a_path(
        nodes in 4usize..10, extra in 0usize..4, seed in any::<u64>(), slack in 0.0f64..0.5
    ) {
        let g = topology(nodes, extra, seed);
        let Some((req, _)) = csp_request(&g, MetricOrder::Finite(1), seed ^ 0x63, slack) else {
            return Ok(());
        };
        let exact = oracle(&g, &req, OracleLimits::default()).unwrap();
        let res = a_star_prune(&g, &req).unwrap();
        prop_assert_eq!(exact.found(), res.found());
        if let (Some(a), Some(b)) = (exact.cost(&req), res.cost(&req)) {
            prop_assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn lowering_the_bound_never_helps(
        nodes in 4usize..10, extra in 0usize..4, seed in any::<u64>(), slack in 0.0f64..0.4
    ) {
        let g = topology(nodes, extra, seed);
        let Some((req_low, bound)) = csp_request(&g, MetricOrder::Finite(1), seed ^ 0x64, slack) else {
            return Ok(());
        };
        // Same request with a raised bound.
        let raise = |r: &RoutingRequest, new_bound: f64| {
            let mut ms = Vec::new();
            for m in r.metrics().metrics() {
                match m.role() {
                    MetricRole::GlobalConstraint { .. } => ms.push(
                        m.with_role(MetricRole::GlobalConstraint { bound: new_bound }).unwrap(),
                    ),
                    _ => ms.push(m.clone()),
                }
            }
            RoutingRequest::new(&g, r.source(), r.destination(), MetricSet::new(ms).unwrap())
                .unwrap()
        };
        let req_high = raise(&req_low, bound * 1.5);
        for algo in [cbf, larac, a_star_prune] {
            let low = algo(&g, &req_low).unwrap();
            let high = algo(&g, &req_high).unwrap();
            if low.found() {
                prop_assert!(high.found(), "found at tight bound but lost at loose bound");
            }
        }
    }
}

// --- determinism and serialization ---

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn searches_are_deterministic(nodes in 4usize..10, extra in 0usize..4, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let req = sp_request(&g, MetricOrder::Finite(1), seed);
        for algo in [dijkstra, edge_based_dijkstra, a_star_prune] {
            let a = algo(&g, &req).unwrap();
            let b = algo(&g, &req).unwrap();
            prop_assert_eq!(&a.outcome, &b.outcome);
            prop_assert_eq!(a.stats.settled, b.stats.settled);
            prop_assert_eq!(a.stats.pushes, b.stats.pushes);
        }
    }

    #[test]
    fn json_round_trip_preserves_structure(nodes in 2usize..12, extra in 0usize..6, seed in any::<u64>()) {
        let g = topology(nodes, extra, seed);
        let metrics = MetricSet::new(vec![
            MetricSpec::random(MetricOrder::Finite(1), MetricRole::GlobalOptimization, seed).unwrap(),
            MetricSpec::random(MetricOrder::Finite(0), MetricRole::GlobalConstraint { bound: 4.0 }, seed ^ 1).unwrap(),
        ]).unwrap();
        let text = write_graph(&g, &metrics).unwrap();
        let (g2, m2) = read_graph(&text).unwrap();
        prop_assert_eq!(g2.node_count(), g.node_count());
        prop_assert_eq!(g2.edge_count(), g.edge_count());
        let text2 = write_graph(&g2, &m2).unwrap();
        prop_assert_eq!(text, text2);
    }

    #[test]
    fn filter_tightening_is_monotone(seeds in prop::collection::vec(any::<u64>(), 1..8)) {
        let records: Vec<TopologyRecord> = seeds
            .iter()
            .enumerate()
            .map(|(i, &s)| random_connected(format!("t{i}"), 4 + (s % 20) as usize, (s % 7) as usize, s))
            .collect();
        let loose = TopologyFilter { min_nodes: Some(5), max_nodes: Some(30), max_links: Some(60), require_connected: true };
        let tight = TopologyFilter { min_nodes: Some(8), max_nodes: Some(20), max_links: Some(30), require_connected: true };
        let loose_names: Vec<String> = apply_filter(records.clone(), &loose).into_iter().map(|r| r.name).collect();
        let tight_names: Vec<String> = apply_filter(records, &tight).into_iter().map(|r| r.name).collect();
        for n in &tight_names {
            prop_assert!(loose_names.contains(n));
        }
    }
}
