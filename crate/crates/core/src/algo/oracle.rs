//! Exhaustive ground truth: enumerate every simple path and keep the best
//! feasible one. Evaluates each candidate with its full context, so the
//! verdict is exact for metrics of any order. Only usable at small scale;
//! the limits make that explicit.

use std::time::Instant;

use crate::graph::{EdgeId, Graph, NodeId, Path};

use super::{finish, label_cmp, AlgoError, RoutingRequest, RoutingResult, SearchStats};

#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_paths: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 15,
            max_paths: 1_000_000,
        }
    }
}

/// Depth-first enumeration of all simple source→destination paths,
/// returning the feasible one with the least optimization value
/// (ties broken by hop count, then edge-id sequence).
pub fn oracle(
    graph: &Graph,
    request: &RoutingRequest,
    limits: OracleLimits,
) -> Result<RoutingResult, AlgoError> {
    let start = Instant::now();
    if graph.node_count() > limits.max_nodes {
        return Err(AlgoError::OracleTooLarge {
            nodes: graph.node_count(),
            max_nodes: limits.max_nodes,
        });
    }

    let mut state = Enumeration {
        graph,
        request,
        destination: request.destination(),
        limits,
        enumerated: 0,
        on_path: vec![false; graph.node_count()],
        edges: Vec::new(),
        best: None,
    };
    state.on_path[request.source().index()] = true;
    state.visit(request.source())?;

    let best_path = match state.best {
        Some((_, edges)) => Some(Path::new(graph, request.source(), edges)?),
        None => None,
    };
    let enumerated = state.enumerated;
    let stats = SearchStats {
        settled: enumerated,
        pushes: enumerated,
        elapsed: start.elapsed(),
    };
    finish(graph, request, best_path, stats)
}

struct Enumeration<'a> {
    graph: &'a Graph,
    request: &'a RoutingRequest,
    destination: NodeId,
    limits: OracleLimits,
    enumerated: usize,
    on_path: Vec<bool>,
    edges: Vec<EdgeId>,
    best: Option<(f64, Vec<EdgeId>)>,
}

impl Enumeration<'_> {
    fn visit(&mut self, at: NodeId) -> Result<(), AlgoError> {
        if at == self.destination {
            self.enumerated += 1;
            if self.enumerated > self.limits.max_paths {
                return Err(AlgoError::OracleLimitExceeded {
                    max_paths: self.limits.max_paths,
                });
            }
            self.consider()?;
            // The destination may still be an interior node of a longer
            // simple path only when it is revisited, which simple paths
            // forbid; stop here.
            return Ok(());
        }
        for &e in self.graph.out(at) {
            let (_, w) = self.graph.ends(e);
            if self.on_path[w.index()] {
                continue;
            }
            self.on_path[w.index()] = true;
            self.edges.push(e);
            self.visit(w)?;
            self.edges.pop();
            self.on_path[w.index()] = false;
        }
        Ok(())
    }

    fn consider(&mut self) -> Result<(), AlgoError> {
        let path = Path::new(self.graph, self.request.source(), self.edges.clone())?;
        let report = self.request.metrics().feasible(self.graph, &path)?;
        if !report.feasible {
            return Ok(());
        }
        let cost = report.combined[self.request.optimization_index()];
        let better = match &self.best {
            None => true,
            Some((best_cost, best_edges)) => {
                label_cmp(cost, &self.edges, *best_cost, best_edges).is_lt()
            }
        };
        if better {
            self.best = Some((cost, self.edges.clone()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::metrics::{MetricRole, MetricSet, MetricSpec};

    #[test]
    fn single_edge_graph_returns_that_edge() {
        let mut g = Graph::new();
        let a = g.add_node(Some("a")).unwrap();
        let b = g.add_node(Some("b")).unwrap();
        let e = g.add_edge(a, b).unwrap();
        let metrics = MetricSet::new(vec![
            MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap()
        ])
        .unwrap();
        let req = RoutingRequest::new(&g, a, b, metrics).unwrap();
        let res = oracle(&g, &req, OracleLimits::default()).unwrap();
        assert_eq!(res.path().unwrap().edges(), &[e]);
        assert_eq!(res.cost(&req), Some(1.0));
    }

    #[test]
    fn trivial_request_costs_identity() {
        let mut g = Graph::new();
        let a = g.add_node(Some("a")).unwrap();
        let metrics = MetricSet::new(vec![
            MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap()
        ])
        .unwrap();
        let req = RoutingRequest::new(&g, a, a, metrics).unwrap();
        let res = oracle(&g, &req, OracleLimits::default()).unwrap();
        assert_eq!(res.cost(&req), Some(0.0));
        assert!(res.path().unwrap().is_empty());
    }

    #[test]
    fn node_limit_is_enforced() {
        let mut g = Graph::new();
        let nodes: Vec<_> = (0..5).map(|_| g.add_node(None).unwrap()).collect();
        let metrics = MetricSet::new(vec![
            MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap()
        ])
        .unwrap();
        let req = RoutingRequest::new(&g, nodes[0], nodes[4], metrics).unwrap();
        let limits = OracleLimits {
            max_nodes: 4,
            max_paths: 10,
        };
        assert!(matches!(
            oracle(&g, &req, limits),
            Err(AlgoError::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn constrained_optimum_respects_bound() {
        // Two routes: short expensive vs long cheap on the constraint.
        let mut g = Graph::new();
        let a = g.add_node(Some("a")).unwrap();
        let b = g.add_node(Some("b")).unwrap();
        let c = g.add_node(Some("c")).unwrap();
        let ab = g.add_edge(a, b).unwrap();
        let bc = g.add_edge(b, c).unwrap();
        let ac = g.add_edge(a, c).unwrap();
        let mut delay = HashMap::new();
        delay.insert((ac, vec![]), 10.0);
        let delay_metric = MetricSpec::table(
            crate::metrics::MetricOrder::Finite(0),
            MetricRole::GlobalConstraint { bound: 5.0 },
            1.0,
            delay,
        )
        .unwrap();
        let hops = MetricSpec::hop_count(MetricRole::GlobalOptimization).unwrap();
        let metrics = MetricSet::new(vec![hops, delay_metric]).unwrap();
        let req = RoutingRequest::new(&g, a, c, metrics).unwrap();
        let res = oracle(&g, &req, OracleLimits::default()).unwrap();
        // Direct edge violates the bound; the two-hop route is optimal.
        assert_eq!(res.path().unwrap().edges(), &[ab, bc]);
    }
}
