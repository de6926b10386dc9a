//! Command line for routing with context-dependent metrics.
//!
//! Exit codes: 0 when a path was found (or the experiment completed),
//! 2 when the request is infeasible, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ctxroute_cli::experiment::{
    run_csp_experiment, run_impact_experiment, run_sp_experiment, AlgoKind, ExperimentConfig,
    Problem,
};
use ctxroute_cli::report::{emit_report, impact_csv, ReportFormat};
use ctxroute_core::algo::{OracleLimits, RoutingRequest, RoutingResult};
use ctxroute_core::graph::{Graph, NodeId};
use ctxroute_core::gta::gta_n;
use ctxroute_core::metrics::{MetricConfig, MetricOrder, MetricRole, MetricSet, MetricSpec};
use ctxroute_core::topo::{
    fixture, parse_graphml, random_connected, read_graph, write_graph, write_graphml,
    write_provenance, TopologyRecord,
};

#[derive(Parser)]
#[command(
    name = "ctxroute",
    version,
    about = "QoS routing with context-dependent edge metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Dijkstra,
    Astar,
    Ebd,
    Cbf,
    Larac,
    Aprune,
}

impl From<AlgoArg> for AlgoKind {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Dijkstra => AlgoKind::Dijkstra,
            AlgoArg::Astar => AlgoKind::Astar,
            AlgoArg::Ebd => AlgoKind::Ebd,
            AlgoArg::Cbf => AlgoKind::Cbf,
            AlgoArg::Larac => AlgoKind::Larac,
            AlgoArg::Aprune => AlgoKind::Aprune,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Graphml,
}

#[derive(Subcommand)]
enum Command {
    /// Route one request with a chosen algorithm.
    Route {
        /// Graph file (.json or .graphml), or fixture:fig1 / fixture:fig2.
        #[arg(long)]
        graph: String,
        /// Metric file (JSON array); optional when the graph embeds metrics.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        /// Apply the graph transformation this many times before routing.
        #[arg(long, default_value_t = 0)]
        gta: u32,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        /// Override the bound of every global constraint.
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Transform a graph so its metrics drop one context order per
    /// application, and write it with a provenance sidecar.
    Transform {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Number of applications.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Insert the shared-edge gadget for multipath disjointness.
        #[arg(long)]
        multipath: bool,
    },
    /// Run an experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive search: exact constrained optimum on small graphs.
    Oracle {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long, default_value_t = 15)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_paths: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Route {
            graph,
            metrics,
            algo,
            gta,
            src,
            dst,
            bound,
        } => {
            let (g, base_metrics) = load_graph_and_metrics(&graph, metrics.as_deref())?;
            let metrics = apply_bound_override(base_metrics, bound)?;
            let request = build_request(&g, &metrics, &src, &dst)?;
            let kind: AlgoKind = algo.into();
            let result = if gta == 0 {
                kind.run(&g, &request)?
            } else {
                let tg = gta_n(&g, &metrics, gta)?;
                tg.solve(&g, &request, |tg_graph, treq| kind.run(tg_graph, treq))?
            };
            print_result(&g, &request, &result);
            Ok(exit_for(&result))
        }
        Command::Transform {
            graph,
            metrics,
            n,
            out,
            format,
            multipath,
        } => {
            let (g, metric_set) = load_graph_and_metrics(&graph, metrics.as_deref())?;
            let mut tg = gta_n(&g, &metric_set, n)?;
            if multipath {
                tg = tg.add_sink_edges()?;
            }
            match format {
                OutputFormat::Json => {
                    let materialized = materialize_static_metrics(&tg)?;
                    let text = write_graph(tg.graph(), &materialized)?;
                    std::fs::write(&out, text)
                        .with_context(|| format!("writing {}", out.display()))?;
                }
                OutputFormat::Graphml => {
                    std::fs::write(&out, write_graphml(tg.graph()))
                        .with_context(|| format!("writing {}", out.display()))?;
                }
            }
            let sidecar = out.with_extension("provenance.json");
            std::fs::write(&sidecar, write_provenance(&tg)?)
                .with_context(|| format!("writing {}", sidecar.display()))?;
            println!(
                "transformed: {} nodes, {} edges ({} applications{}); wrote {} and {}",
                tg.graph().node_count(),
                tg.graph().edge_count(),
                tg.applications(),
                if multipath { ", multipath gadget" } else { "" },
                out.display(),
                sidecar.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text).context("parsing config")?;
            let base_dir = config.parent().unwrap_or(Path::new("."));
            let topologies = load_topologies(&cfg, base_dir)?;
            let report = match cfg.problem {
                Problem::Sp => run_sp_experiment(&cfg, &topologies)?,
                Problem::Csp => run_csp_experiment(&cfg, &topologies)?,
            };
            let mut written = emit_report(&report, ReportFormat::Csv, &out)?;
            written.extend(emit_report(&report, ReportFormat::Json, &out)?);
            if cfg.impact {
                let small: Vec<TopologyRecord> = topologies
                    .iter()
                    .filter(|t| t.graph.node_count() <= cfg.oracle_max_nodes)
                    .cloned()
                    .collect();
                let matrix = run_impact_experiment(
                    &small,
                    cfg.requests_per_topology.min(20),
                    cfg.master_seed,
                )?;
                let path = out.join("impact_matrix.csv");
                std::fs::write(&path, impact_csv(&matrix))?;
                written.push(path);
            }
            for p in &written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            graph,
            metrics,
            src,
            dst,
            bound,
            max_nodes,
            max_paths,
        } => {
            let (g, base_metrics) = load_graph_and_metrics(&graph, metrics.as_deref())?;
            let metrics = apply_bound_override(base_metrics, bound)?;
            let request = build_request(&g, &metrics, &src, &dst)?;
            let limits = OracleLimits {
                max_nodes,
                max_paths,
            };
            let result = ctxroute_core::algo::oracle(&g, &request, limits)?;
            print_result(&g, &request, &result);
            Ok(exit_for(&result))
        }
    }
}

fn exit_for(result: &RoutingResult) -> ExitCode {
    if result.found() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn load_graph_and_metrics(
    graph_arg: &str,
    metrics_path: Option<&Path>,
) -> Result<(Graph, MetricSet)> {
    let (graph, embedded) = if let Some(name) = graph_arg.strip_prefix("fixture:") {
        let (g, m) = fixture(name)?;
        (g, Some(m))
    } else {
        let path = Path::new(graph_arg);
        let bytes = std::fs::read(path).with_context(|| format!("reading {graph_arg}"))?;
        if graph_arg.ends_with(".graphml") {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".to_owned());
            (parse_graphml(&name, &bytes)?.graph, None)
        } else {
            let text = String::from_utf8(bytes).context("graph file is not UTF-8")?;
            let (g, m) = read_graph(&text)?;
            let embedded = if m.is_empty() { None } else { Some(m) };
            (g, embedded)
        }
    };

    let metrics = match metrics_path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let configs: Vec<MetricConfig> =
                serde_json::from_str(&text).context("parsing metric file")?;
            MetricSet::from_configs(&configs)?
        }
        None => {
            embedded.ok_or_else(|| anyhow!("the graph file embeds no metrics; pass --metrics"))?
        }
    };
    Ok((graph, metrics))
}

fn apply_bound_override(metrics: MetricSet, bound: Option<f64>) -> Result<MetricSet> {
    let Some(bound) = bound else {
        return Ok(metrics);
    };
    if metrics.global_constraints().count() == 0 {
        bail!("--bound given but the metric set has no global constraint");
    }
    let adjusted = metrics
        .metrics()
        .iter()
        .map(|m| match m.role() {
            MetricRole::GlobalConstraint { .. } => {
                m.with_role(MetricRole::GlobalConstraint { bound })
            }
            _ => Ok(m.clone()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricSet::new(adjusted)?)
}

fn resolve_node(graph: &Graph, name: &str) -> Result<NodeId> {
    if let Some(v) = graph.node_by_label(name) {
        return Ok(v);
    }
    if let Ok(index) = name.parse::<usize>() {
        let v = NodeId::from_index(index);
        if graph.contains_node(v) {
            return Ok(v);
        }
    }
    bail!("unknown node {name:?}")
}

fn build_request(
    graph: &Graph,
    metrics: &MetricSet,
    src: &str,
    dst: &str,
) -> Result<RoutingRequest> {
    let src = resolve_node(graph, src)?;
    let dst = resolve_node(graph, dst)?;
    Ok(RoutingRequest::new(graph, src, dst, metrics.clone())?)
}

fn print_result(graph: &Graph, request: &RoutingRequest, result: &RoutingResult) {
    match &result.outcome {
        ctxroute_core::Outcome::Found { path, combined } => {
            println!("outcome: found");
            println!("path: {}", path.display(graph));
            println!("hops: {}", path.len());
            for (i, (m, v)) in request
                .metrics()
                .metrics()
                .iter()
                .zip(combined)
                .enumerate()
            {
                println!(
                    "metric[{i}]: order={} role={} combined={v}",
                    order_str(m.order()),
                    role_str(m.role()),
                );
            }
        }
        ctxroute_core::Outcome::Infeasible => println!("outcome: infeasible"),
    }
    println!(
        "stats: settled={} pushes={} elapsed={:?}",
        result.stats.settled, result.stats.pushes, result.stats.elapsed
    );
}

fn order_str(order: MetricOrder) -> String {
    match order {
        MetricOrder::Finite(n) => n.to_string(),
        MetricOrder::Infinite => "inf".to_owned(),
    }
}

fn role_str(role: MetricRole) -> String {
    match role {
        MetricRole::GlobalOptimization => "optimization".to_owned(),
        MetricRole::GlobalConstraint { bound } => format!("global_constraint(bound={bound})"),
        MetricRole::LocalConstraint { threshold } => {
            format!("local_constraint(threshold={threshold})")
        }
    }
}

/// Static tables for fully reduced metrics on a transformed graph; metrics
/// that still depend on context are dropped with a note.
fn materialize_static_metrics(tg: &ctxroute_core::TransformedGraph) -> Result<MetricSet> {
    let mut out = Vec::new();
    for (i, m) in tg.lifted_metrics().metrics().iter().enumerate() {
        if m.order() != MetricOrder::Finite(0) {
            eprintln!(
                "note: metric[{i}] still has order {} after {} applications; \
                 omitted from the emitted file",
                order_str(m.order()),
                tg.applications()
            );
            continue;
        }
        let mut values = std::collections::HashMap::new();
        for e in tg.graph().edge_ids() {
            values.insert((e, Vec::new()), m.value_with(e, &[]));
        }
        out.push(MetricSpec::table(
            MetricOrder::Finite(0),
            m.role(),
            0.0,
            values,
        )?);
    }
    Ok(MetricSet::new(out)?)
}

fn load_topologies(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Vec<TopologyRecord>> {
    let mut out = Vec::new();
    for file in &cfg.topology_files {
        let path = if Path::new(file).is_absolute() {
            PathBuf::from(file)
        } else {
            base_dir.join(file)
        };
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.clone());
        if file.ends_with(".graphml") {
            out.push(parse_graphml(&name, &bytes)?);
        } else {
            let text = String::from_utf8(bytes).context("topology file is not UTF-8")?;
            let (g, _) = read_graph(&text)?;
            let links = g.edge_count();
            out.push(TopologyRecord::new(name, g, links));
        }
    }
    if let Some(spec) = &cfg.synthetic {
        for i in 0..spec.count {
            out.push(random_connected(
                format!("synthetic{i:03}"),
                spec.nodes,
                spec.extra_links,
                cfg.master_seed.wrapping_add(i as u64),
            ));
        }
    }
    if out.is_empty() {
        bail!("no topologies: config lists no files and no synthetic block");
    }
    Ok(out)
}
