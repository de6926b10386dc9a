//! Context-dependent edge metrics.
//!
//! A metric assigns a value to an edge given the *context* in which the
//! edge is traversed: the sequence of previously traversed edges. The
//! metric's **order** bounds how much of that context matters — an order-0
//! metric is a classical static metric, an order-n metric sees the last n
//! edges, and an infinite-order metric sees the whole prefix path. The
//! empty context stands for a path that starts at the evaluated edge.
//!
//! Metrics are used in three roles: per-edge admission predicates (local
//! constraints), bounded combined values (global constraints), and the
//! combined value to minimize (global optimization).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, Path};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("context does not chain with evaluated edge {edge}: {detail}")]
    NonChainingContext { edge: EdgeId, detail: String },
    #[error("global constraint bound must not be NaN")]
    InvalidBound,
    #[error("metric set holds more than one optimization metric")]
    MultipleOptimization,
    #[error("combination operator {0:?} has no identity element")]
    NoIdentity(CombinationOperator),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("metric cannot be serialized: {0}")]
    NotSerializable(String),
    #[error("bad metric config: {0}")]
    BadConfig(String),
}

/// How many previously traversed edges a metric's value may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricOrder {
    Finite(u32),
    Infinite,
}

impl MetricOrder {
    pub fn is_static(self) -> bool {
        self == MetricOrder::Finite(0)
    }

    /// Order after one graph transformation: finite orders drop by one,
    /// infinite stays infinite.
    pub fn reduced(self) -> Self {
        match self {
            MetricOrder::Finite(n) => MetricOrder::Finite(n.saturating_sub(1)),
            MetricOrder::Infinite => MetricOrder::Infinite,
        }
    }
}

/// How a metric participates in solution selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricRole {
    /// Every edge of a solution must satisfy `value <= threshold` under the
    /// context in which the solution traverses it.
    LocalConstraint { threshold: f64 },
    /// The combined value over the whole solution must satisfy
    /// `combined <= bound`.
    GlobalConstraint { bound: f64 },
    /// The combined value over the whole solution is minimized.
    GlobalOptimization,
}

/// Operator folding per-edge values into a path value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinationOperator {
    Additive,
}

impl CombinationOperator {
    /// Identity element: combining it changes nothing. Required by sink
    /// edges, whose values must not alter a solution's combined value.
    pub fn identity(self) -> f64 {
        match self {
            CombinationOperator::Additive => 0.0,
        }
    }

    pub fn apply(self, acc: f64, value: f64) -> f64 {
        match self {
            CombinationOperator::Additive => acc + value,
        }
    }
}

/// Key of an explicit value table entry: the edge plus the significant
/// context (exactly the last `order` traversed edges, oldest first).
pub type TableKey = (EdgeId, Vec<EdgeId>);

#[derive(Debug, Clone)]
enum Valuation {
    /// Explicit per-(edge, context) values with a fallback default.
    Table {
        default: f64,
        values: HashMap<TableKey, f64>,
    },
    /// Deterministic pseudo-random value in `[lo, hi)` derived from
    /// (seed, edge, significant context). O(1) memory regardless of order.
    Seeded { seed: u64, lo: f64, hi: f64 },
    /// Sum of static per-edge base values over the context edges. Models
    /// quantities accumulated along the prefix path, e.g. total experienced
    /// delay driving buffer consumption.
    Accumulated {
        default: f64,
        base: HashMap<EdgeId, f64>,
    },
    /// A metric carried across a graph transformation: values are looked up
    /// on the source metric after recovering the original context from
    /// transformation provenance.
    Lifted(Arc<LiftedValuation>),
}

/// Provenance-backed valuation over a transformed graph.
#[derive(Debug)]
pub struct LiftedValuation {
    /// The metric being carried, expressed over the original graph.
    pub source: MetricSpec,
    /// Original edge behind each transformed edge; `None` marks structural
    /// edges (sinks, shared gadget edges) that combine as the identity.
    pub edge_origin: Arc<Vec<Option<EdgeId>>>,
    /// Ingress tuple (original edge ids, oldest first) encoded by each
    /// transformed edge's source node.
    pub edge_prepend: Arc<Vec<Vec<EdgeId>>>,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic hash of (seed, edge, context) mapped uniformly into
/// `[lo, hi)`. Stable across runs and platforms.
fn seeded_value(seed: u64, edge: EdgeId, ctx: &[EdgeId], lo: f64, hi: f64) -> f64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ (edge.index() as u64).wrapping_add(1));
    for &c in ctx {
        h = mix64(h ^ (c.index() as u64).wrapping_add(0x100));
    }
    let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
    lo + unit * (hi - lo)
}

fn truncate(ctx: &[EdgeId], order: MetricOrder) -> &[EdgeId] {
    match order {
        MetricOrder::Finite(n) => {
            let n = n as usize;
            if ctx.len() > n {
                &ctx[ctx.len() - n..]
            } else {
                ctx
            }
        }
        MetricOrder::Infinite => ctx,
    }
}

/// One metric: order, role, combination operator, and the valuation that
/// produces per-edge values.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    order: MetricOrder,
    role: MetricRole,
    combiner: CombinationOperator,
    valuation: Valuation,
}

impl MetricSpec {
    /// Explicit value table. Keys hold exactly the significant context for
    /// this metric's order; anything absent falls back to `default`.
    pub fn table(
        order: MetricOrder,
        role: MetricRole,
        default: f64,
        values: HashMap<TableKey, f64>,
    ) -> Result<Self, MetricError> {
        check_role(&role)?;
        Ok(MetricSpec {
            order,
            role,
            combiner: CombinationOperator::Additive,
            valuation: Valuation::Table { default, values },
        })
    }

    /// Uniform static metric: every edge has `value` in every context.
    pub fn uniform(role: MetricRole, value: f64) -> Result<Self, MetricError> {
        Self::table(MetricOrder::Finite(0), role, value, HashMap::new())
    }

    /// Hop count: static metric valued 1 on every edge.
    pub fn hop_count(role: MetricRole) -> Result<Self, MetricError> {
        Self::uniform(role, 1.0)
    }

    /// Seeded pseudo-random metric with values in `[1, 2)`, the experiment
    /// setup's value range. Deterministic given the seed: repeated queries
    /// with the same (edge, context) yield the identical value.
    pub fn random(order: MetricOrder, role: MetricRole, seed: u64) -> Result<Self, MetricError> {
        check_role(&role)?;
        Ok(MetricSpec {
            order,
            role,
            combiner: CombinationOperator::Additive,
            valuation: Valuation::Seeded {
                seed,
                lo: 1.0,
                hi: 2.0,
            },
        })
    }

    /// Infinite-order metric whose value at an edge is the sum of static
    /// per-edge base values over the prefix path.
    pub fn accumulated(
        role: MetricRole,
        default: f64,
        base: HashMap<EdgeId, f64>,
    ) -> Result<Self, MetricError> {
        check_role(&role)?;
        Ok(MetricSpec {
            order: MetricOrder::Infinite,
            role,
            combiner: CombinationOperator::Additive,
            valuation: Valuation::Accumulated { default, base },
        })
    }

    pub(crate) fn lifted(
        order: MetricOrder,
        role: MetricRole,
        combiner: CombinationOperator,
        lifted: Arc<LiftedValuation>,
    ) -> Self {
        MetricSpec {
            order,
            role,
            combiner,
            valuation: Valuation::Lifted(lifted),
        }
    }

    pub fn order(&self) -> MetricOrder {
        self.order
    }

    pub fn role(&self) -> MetricRole {
        self.role
    }

    pub fn combiner(&self) -> CombinationOperator {
        self.combiner
    }

    /// For transformation-lifted metrics, the metric they carry; `None`
    /// otherwise.
    pub fn source_metric(&self) -> Option<&MetricSpec> {
        match &self.valuation {
            Valuation::Lifted(l) => Some(&l.source),
            _ => None,
        }
    }

    /// Same metric under a different role.
    pub fn with_role(&self, role: MetricRole) -> Result<Self, MetricError> {
        check_role(&role)?;
        let mut m = self.clone();
        m.role = role;
        Ok(m)
    }

    /// Evaluates the metric on `edge` traversed after `ctx`. The context
    /// must chain: consecutive context edges connect, and the last context
    /// edge ends where `edge` starts. Only the last `order` context entries
    /// influence the value.
    pub fn evaluate(&self, graph: &Graph, edge: EdgeId, ctx: &[EdgeId]) -> Result<f64, MetricError> {
        let (edge_src, _) = graph.endpoints(edge)?;
        let mut prev_dst: Option<crate::graph::NodeId> = None;
        for &c in ctx {
            let (src, dst) = graph.endpoints(c)?;
            if let Some(p) = prev_dst {
                if src != p {
                    return Err(MetricError::NonChainingContext {
                        edge,
                        detail: format!("context edge {c} starts at {src}, previous ends at {p}"),
                    });
                }
            }
            prev_dst = Some(dst);
        }
        if let Some(p) = prev_dst {
            if p != edge_src {
                return Err(MetricError::NonChainingContext {
                    edge,
                    detail: format!("last context edge ends at {p}, edge starts at {edge_src}"),
                });
            }
        }
        Ok(self.value_with(edge, ctx))
    }

    /// Valuation without chaining checks; `ctx` is trusted to chain.
    pub fn value_with(&self, edge: EdgeId, ctx: &[EdgeId]) -> f64 {
        let sig = truncate(ctx, self.order);
        match &self.valuation {
            Valuation::Table { default, values } => values
                .get(&(edge, sig.to_vec()))
                .copied()
                .unwrap_or(*default),
            Valuation::Seeded { seed, lo, hi } => seeded_value(*seed, edge, sig, *lo, *hi),
            Valuation::Accumulated { default, base } => sig
                .iter()
                .map(|c| base.get(c).copied().unwrap_or(*default))
                .sum(),
            Valuation::Lifted(l) => {
                // Recover the original context: map transformed edges to
                // their originals and prepend the ingress tuple encoded by
                // the earliest node we can still see.
                let origin = match l.edge_origin[edge.index()] {
                    Some(o) => o,
                    None => return self.combiner.identity(),
                };
                let mut orig_ctx: Vec<EdgeId> = Vec::with_capacity(sig.len() + 4);
                let anchor = sig.first().copied().unwrap_or(edge);
                orig_ctx.extend_from_slice(&l.edge_prepend[anchor.index()]);
                for &c in sig {
                    if let Some(o) = l.edge_origin[c.index()] {
                        orig_ctx.push(o);
                    }
                }
                l.source.value_with(origin, &orig_ctx)
            }
        }
    }

    /// Folds the metric over a path: edge i is evaluated under the context
    /// of edges 0..i.
    pub fn combine(&self, graph: &Graph, path: &Path) -> Result<f64, MetricError> {
        // Path construction already validated chaining.
        let _ = graph;
        Ok(self.combine_with_context(&[], path.edges()))
    }

    /// Folds over `edges` as if they followed the already-traversed
    /// `carried` prefix: edge i sees carried ++ edges[0..i] as context.
    pub fn combine_with_context(&self, carried: &[EdgeId], edges: &[EdgeId]) -> f64 {
        let mut acc = self.combiner.identity();
        let mut ctx: Vec<EdgeId> = carried.to_vec();
        for &e in edges {
            acc = self.combiner.apply(acc, self.value_with(e, &ctx));
            ctx.push(e);
        }
        acc
    }

    /// Lower bound of the metric's value on `edge` over every possible
    /// context. Used for admissible search heuristics.
    pub fn min_edge_value(&self, edge: EdgeId) -> f64 {
        match &self.valuation {
            Valuation::Table { default, values } => {
                let mut m = *default;
                for ((e, _), v) in values {
                    if *e == edge && *v < m {
                        m = *v;
                    }
                }
                m
            }
            Valuation::Seeded { lo, .. } => *lo,
            // The empty context sums to zero.
            Valuation::Accumulated { .. } => 0.0,
            Valuation::Lifted(l) => match l.edge_origin[edge.index()] {
                Some(o) => l.source.min_edge_value(o),
                None => self.combiner.identity(),
            },
        }
    }

    /// Global lower bound over all edges of `graph`; zero on edgeless graphs.
    pub fn min_value(&self, graph: &Graph) -> f64 {
        if graph.edge_count() == 0 {
            return 0.0;
        }
        graph
            .edge_ids()
            .map(|e| self.min_edge_value(e))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_role(role: &MetricRole) -> Result<(), MetricError> {
    match role {
        MetricRole::GlobalConstraint { bound } if bound.is_nan() => Err(MetricError::InvalidBound),
        MetricRole::LocalConstraint { threshold } if threshold.is_nan() => {
            Err(MetricError::InvalidBound)
        }
        _ => Ok(()),
    }
}

/// Verdict of checking a path against a metric set, with the combined
/// value of every metric for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Combined value per metric, in metric-set order.
    pub combined: Vec<f64>,
}

/// The metrics of one routing problem: at most one optimization metric,
/// any number of global and local constraints.
#[derive(Debug, Clone, Default)]
pub struct MetricSet {
    metrics: Vec<MetricSpec>,
}

impl MetricSet {
    pub fn new(metrics: Vec<MetricSpec>) -> Result<Self, MetricError> {
        let opt = metrics
            .iter()
            .filter(|m| m.role() == MetricRole::GlobalOptimization)
            .count();
        if opt > 1 {
            return Err(MetricError::MultipleOptimization);
        }
        Ok(MetricSet { metrics })
    }

    pub fn metrics(&self) -> &[MetricSpec] {
        &self.metrics
    }

    pub fn len(&self) -> usize {
        self.metrics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metrics.is_empty()
    }

    pub fn optimization(&self) -> Option<(usize, &MetricSpec)> {
        self.metrics
            .iter()
            .enumerate()
            .find(|(_, m)| m.role() == MetricRole::GlobalOptimization)
    }

    pub fn global_constraints(&self) -> impl Iterator<Item = (usize, &MetricSpec, f64)> {
        self.metrics.iter().enumerate().filter_map(|(i, m)| {
            if let MetricRole::GlobalConstraint { bound } = m.role() {
                Some((i, m, bound))
            } else {
                None
            }
        })
    }

    pub fn local_constraints(&self) -> impl Iterator<Item = (usize, &MetricSpec, f64)> {
        self.metrics.iter().enumerate().filter_map(|(i, m)| {
            if let MetricRole::LocalConstraint { threshold } = m.role() {
                Some((i, m, threshold))
            } else {
                None
            }
        })
    }

    /// Largest finite order in the set, or `None` if any metric is
    /// infinite-order.
    pub fn max_finite_order(&self) -> Option<u32> {
        let mut max = 0;
        for m in &self.metrics {
            match m.order() {
                MetricOrder::Finite(n) => max = max.max(n),
                MetricOrder::Infinite => return None,
            }
        }
        Some(max)
    }

    /// Checks a path: every local-constraint predicate must hold at every
    /// edge under the path's own context, and every global constraint's
    /// combined value must stay within its bound.
    pub fn feasible(&self, graph: &Graph, path: &Path) -> Result<FeasibilityReport, MetricError> {
        let _ = graph; // chaining was validated when the path was built
        let mut feasible = true;
        for (_, m, threshold) in self.local_constraints() {
            let mut ctx: Vec<EdgeId> = Vec::new();
            for &e in path.edges() {
                if m.value_with(e, &ctx) > threshold {
                    feasible = false;
                    break;
                }
                ctx.push(e);
            }
            if !feasible {
                break;
            }
        }
        let mut combined = Vec::with_capacity(self.metrics.len());
        for m in &self.metrics {
            combined.push(m.combine(graph, path)?);
        }
        if feasible {
            for (i, _, bound) in self.global_constraints() {
                if combined[i] > bound {
                    feasible = false;
                    break;
                }
            }
        }
        Ok(FeasibilityReport { feasible, combined })
    }
}

// ---------------------------------------------------------------------------
// Serialized form
// ---------------------------------------------------------------------------

/// Serialized metric description. Explicit value tables key entries as
/// `"<edge>|<ctx,...>"` with dense edge indices, e.g. `"3|2"` for edge 3
/// reached via edge 2 and `"3|"` for edge 3 at the start of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub order: OrderConfig,
    pub role: RoleConfig,
    #[serde(default = "default_combiner")]
    pub combiner: CombinationOperator,
    pub kind: ValuationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit_values: Option<std::collections::BTreeMap<String, f64>>,
}

fn default_combiner() -> CombinationOperator {
    CombinationOperator::Additive
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderConfig {
    Finite(u32),
    Named(InfName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfName {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleConfig {
    Optimization,
    GlobalConstraint { bound: f64 },
    LocalConstraint { threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuationKind {
    Table,
    Seeded,
    Accumulated,
}

impl From<MetricOrder> for OrderConfig {
    fn from(o: MetricOrder) -> Self {
        match o {
            MetricOrder::Finite(n) => OrderConfig::Finite(n),
            MetricOrder::Infinite => OrderConfig::Named(InfName::Inf),
        }
    }
}

impl From<OrderConfig> for MetricOrder {
    fn from(o: OrderConfig) -> Self {
        match o {
            OrderConfig::Finite(n) => MetricOrder::Finite(n),
            OrderConfig::Named(_) => MetricOrder::Infinite,
        }
    }
}

impl From<MetricRole> for RoleConfig {
    fn from(r: MetricRole) -> Self {
        match r {
            MetricRole::GlobalOptimization => RoleConfig::Optimization,
            MetricRole::GlobalConstraint { bound } => RoleConfig::GlobalConstraint { bound },
            MetricRole::LocalConstraint { threshold } => RoleConfig::LocalConstraint { threshold },
        }
    }
}

impl From<RoleConfig> for MetricRole {
    fn from(r: RoleConfig) -> Self {
        match r {
            RoleConfig::Optimization => MetricRole::GlobalOptimization,
            RoleConfig::GlobalConstraint { bound } => MetricRole::GlobalConstraint { bound },
            RoleConfig::LocalConstraint { threshold } => MetricRole::LocalConstraint { threshold },
        }
    }
}

fn format_key(edge: EdgeId, ctx: &[EdgeId]) -> String {
    let ctx_part = ctx
        .iter()
        .map(|c| c.index().to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("{}|{}", edge.index(), ctx_part)
}

fn parse_key(key: &str) -> Result<TableKey, MetricError> {
    let (edge_part, ctx_part) = key
        .split_once('|')
        .ok_or_else(|| MetricError::BadConfig(format!("key {key:?} lacks '|'")))?;
    let edge: usize = edge_part
        .parse()
        .map_err(|_| MetricError::BadConfig(format!("bad edge index in key {key:?}")))?;
    let mut ctx = Vec::new();
    if !ctx_part.is_empty() {
        for part in ctx_part.split(',') {
            let i: usize = part
                .parse()
                .map_err(|_| MetricError::BadConfig(format!("bad context index in key {key:?}")))?;
            ctx.push(EdgeId::from_index(i));
        }
    }
    Ok((EdgeId::from_index(edge), ctx))
}

impl MetricSpec {
    pub fn to_config(&self) -> Result<MetricConfig, MetricError> {
        let (kind, seed, default, explicit_values) = match &self.valuation {
            Valuation::Table { default, values } => {
                let map = values
                    .iter()
                    .map(|((e, ctx), v)| (format_key(*e, ctx), *v))
                    .collect();
                (ValuationKind::Table, None, Some(*default), Some(map))
            }
            Valuation::Seeded { seed, .. } => (ValuationKind::Seeded, Some(*seed), None, None),
            Valuation::Accumulated { default, base } => {
                let map = base
                    .iter()
                    .map(|(e, v)| (format_key(*e, &[]), *v))
                    .collect();
                (
                    ValuationKind::Accumulated,
                    None,
                    Some(*default),
                    Some(map),
                )
            }
            Valuation::Lifted(_) => {
                return Err(MetricError::NotSerializable(
                    "transformation-lifted metric; materialize it first".into(),
                ))
            }
        };
        Ok(MetricConfig {
            order: self.order.into(),
            role: self.role.into(),
            combiner: self.combiner,
            kind,
            seed,
            default,
            explicit_values,
        })
    }

    pub fn from_config(config: &MetricConfig) -> Result<Self, MetricError> {
        let order: MetricOrder = config.order.into();
        let role: MetricRole = config.role.into();
        check_role(&role)?;
        let valuation = match config.kind {
            ValuationKind::Table => {
                let mut values = HashMap::new();
                if let Some(map) = &config.explicit_values {
                    for (k, v) in map {
                        values.insert(parse_key(k)?, *v);
                    }
                }
                Valuation::Table {
                    default: config.default.unwrap_or(0.0),
                    values,
                }
            }
            ValuationKind::Seeded => Valuation::Seeded {
                seed: config
                    .seed
                    .ok_or_else(|| MetricError::BadConfig("seeded metric needs a seed".into()))?,
                lo: 1.0,
                hi: 2.0,
            },
            ValuationKind::Accumulated => {
                let mut base = HashMap::new();
                if let Some(map) = &config.explicit_values {
                    for (k, v) in map {
                        let (e, ctx) = parse_key(k)?;
                        if !ctx.is_empty() {
                            return Err(MetricError::BadConfig(
                                "accumulated metric keys must have empty context".into(),
                            ));
                        }
                        base.insert(e, *v);
                    }
                }
                Valuation::Accumulated {
                    default: config.default.unwrap_or(0.0),
                    base,
                }
            }
        };
        Ok(MetricSpec {
            order,
            role,
            combiner: config.combiner,
            valuation,
        })
    }
}

impl MetricSet {
    pub fn to_configs(&self) -> Result<Vec<MetricConfig>, MetricError> {
        self.metrics.iter().map(MetricSpec::to_config).collect()
    }

    pub fn from_configs(configs: &[MetricConfig]) -> Result<Self, MetricError> {
        let metrics = configs
            .iter()
            .map(MetricSpec::from_config)
            .collect::<Result<Vec<_>, _>>()?;
        MetricSet::new(metrics)
    }
}
