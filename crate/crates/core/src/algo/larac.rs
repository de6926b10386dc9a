//! LARAC: Lagrangian relaxation for CSP requests.
//!
//! Repeated shortest-path searches on the aggregated cost c + λ·d close in
//! on the constrained optimum from both sides. Fast and complete when the
//! inner searches are exact (static metrics), not optimal even then; for
//! higher orders the inner node-label searches misjudge contexts and the
//! algorithm can miss feasible paths.
//!
//! The λ update uses the standard closed form
//! λ = (c(p_c) − c(p_d)) / (d(p_d) − d(p_c)) and stops when the aggregated
//! costs of the two candidates meet, when candidates repeat, or after 64
//! iterations. Candidate paths are concrete, so their c and d values are
//! always true recomputations — only the searches that *find* the
//! candidates are approximate.

use std::time::Instant;

use crate::graph::{EdgeId, Graph, Path};

use super::node_search::node_label_search;
use super::{
    finish, single_global_constraint, AlgoError, RequestEval, RoutingRequest, RoutingResult,
    SearchStats,
};

const MAX_ITERATIONS: usize = 64;

pub fn larac(graph: &Graph, request: &RoutingRequest) -> Result<RoutingResult, AlgoError> {
    let (cons_index, bound) = single_global_constraint("larac", request)?;
    let start = Instant::now();
    let eval = RequestEval::new(graph, request);
    let metrics = request.metrics().metrics();
    let cost_metric = &metrics[request.optimization_index()];
    let cons_metric = &metrics[cons_index];

    let mut stats = SearchStats::default();
    let search = |wc: f64, wd: f64, stats: &mut SearchStats| -> Option<Vec<EdgeId>> {
        let out = node_label_search(
            graph,
            request.source(),
            request.destination(),
            &mut |e, ctx| wc * cost_metric.value_with(e, ctx) + wd * cons_metric.value_with(e, ctx),
            &mut |e, ctx| eval.admits(e, ctx),
            None,
        );
        stats.settled += out.settled;
        stats.pushes += out.pushes;
        out.edges
    };
    let true_c = |edges: &[EdgeId]| cost_metric.combine_with_context(&[], edges);
    let true_d = |edges: &[EdgeId]| cons_metric.combine_with_context(&[], edges);

    let result = |candidate: Option<Vec<EdgeId>>, mut stats: SearchStats| {
        let path = match candidate {
            Some(edges) => Some(Path::new(graph, request.source(), edges)?),
            None => None,
        };
        stats.elapsed = start.elapsed();
        finish(graph, request, path, stats)
    };

    // Cost-shortest path: feasible means optimal, done.
    let p_c = match search(1.0, 0.0, &mut stats) {
        Some(p) => p,
        None => return result(None, stats),
    };
    if true_d(&p_c) <= bound {
        return result(Some(p_c), stats);
    }

    // Constraint-shortest path: if even this one (as judged by the inner
    // search) misses the bound, report infeasible.
    let p_d = match search(0.0, 1.0, &mut stats) {
        Some(p) => p,
        None => return result(None, stats),
    };
    if true_d(&p_d) > bound {
        return result(None, stats);
    }

    let mut p_c = p_c;
    let mut p_d = p_d;
    for _ in 0..MAX_ITERATIONS {
        let (c_pc, d_pc) = (true_c(&p_c), true_d(&p_c));
        let (c_pd, d_pd) = (true_c(&p_d), true_d(&p_d));
        let denom = d_pd - d_pc;
        if denom == 0.0 {
            break;
        }
        let lambda = (c_pc - c_pd) / denom;
        if !lambda.is_finite() || lambda <= 0.0 {
            break;
        }
        let p_r = match search(1.0, lambda, &mut stats) {
            Some(p) => p,
            None => break,
        };
        if p_r == p_c || p_r == p_d {
            break;
        }
        let (c_r, d_r) = (true_c(&p_r), true_d(&p_r));
        // Aggregated costs met: the relaxation cannot improve further.
        if c_r + lambda * d_r >= c_pc + lambda * d_pc - 1e-12 {
            break;
        }
        if d_r <= bound {
            p_d = p_r;
        } else {
            p_c = p_r;
        }
    }

    result(Some(p_d), stats)
}
