//! QoS routing with context-dependent edge metrics.
//!
//! Classical routing algorithms assume that an optimal path is made of
//! optimal sub-paths. Metrics such as queuing delay or buffer consumption
//! break that assumption: their value at an edge depends on the edges
//! traversed before it. This crate models such metrics by their *order*
//! (how many previous edges matter), provides the baseline algorithms
//! that silently mis-handle them alongside algorithms that stay exact,
//! and implements a graph transformation that encodes edge context into
//! node identity so that any classical algorithm becomes exact again.
//!
//! Module map:
//! - [`graph`]: directed multigraph with dense ids and deterministic
//!   adjacency order.
//! - [`metrics`]: context-dependent valuations, metric roles, combination
//!   and feasibility checking.
//! - [`algo`]: Dijkstra, A*, CBF and LARAC (node-label family), the
//!   edge-label Dijkstra variant, A*Prune, and an exhaustive oracle.
//! - [`gta`]: the graph transformation, request/result mapping, and the
//!   multipath sink-edge gadget.
//! - [`topo`]: GraphML and JSON ingestion/serialization, example
//!   fixtures, and a seeded topology generator.

pub mod algo;
pub mod graph;
pub mod gta;
pub mod metrics;
pub mod topo;

pub use algo::{
    a_star, a_star_prune, cbf, dijkstra, edge_based_dijkstra, larac, oracle, AlgoError, Heuristic,
    OracleLimits, Outcome, RoutingRequest, RoutingResult, SearchStats,
};
pub use graph::{EdgeId, Graph, GraphError, NodeId, Path};
pub use gta::{gta_n, gta_once, GtaError, MappedRequest, TransformedGraph};
pub use metrics::{
    CombinationOperator, MetricConfig, MetricError, MetricOrder, MetricRole, MetricSet, MetricSpec,
};
pub use topo::{apply_filter, TopoError, TopologyFilter, TopologyRecord};
