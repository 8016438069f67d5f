//! Command-line interface: `layout`, `metrics`, `dynamic`, and `bench`.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors (missing or
//! malformed files, invalid graphs).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coarsen::CoarseningParams;
use crate::dynamic::{perturb, update_layout, PerturbationParams};
use crate::error::Result;
use crate::graph::{Graph, Layout};
use crate::io::{read_coords, read_edge_list, read_metis, write_coords, ParseStats};
use crate::layout::{layout_multilevel_run, OptimizerParams};
use crate::metrics::{apsp_unit_with_limit, full_stress, jitter_coincident, maxent_stress, optimal_scale};
use crate::report::{Mode, RunReport, CSV_HEADER};
use crate::svg::{render_svg, SvgOptions};

#[derive(Debug, Parser)]
#[command(
    name = "maxent-layout",
    about = "Multilevel maxent-stress layout for large undirected graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a layout and optionally write coordinates, an SVG, and metrics.
    Layout(LayoutArgs),
    /// Evaluate full stress, maxent-stress, and the optimal scale of a layout.
    Metrics(MetricsArgs),
    /// Perturb a graph and lay it out from prior coordinates or from scratch.
    Dynamic(DynamicArgs),
    /// Run a list of (graph, h) configurations and emit CSV rows.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Metis,
    Edgelist,
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Input graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value_t = Format::Metis)]
    format: Format,
}

#[derive(Debug, Args)]
struct OptimizerArgs {
    /// Approximation depth; 0 evaluates repulsion exactly.
    #[arg(long = "h", default_value_t = 0)]
    h: usize,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Cluster-size divisor f.
    #[arg(long, default_value_t = 20.0)]
    f: f64,
    /// Cluster-size base b.
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Label propagation rounds per level.
    #[arg(long = "lp-rounds", default_value_t = 3)]
    lp_rounds: usize,
    #[arg(long = "alpha-min", default_value_t = 0.008)]
    alpha_min: f64,
    #[arg(long = "alpha-factor", default_value_t = 0.3)]
    alpha_factor: f64,
    #[arg(long = "iters-per-round", default_value_t = 2)]
    iters_per_round: usize,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
}

impl OptimizerArgs {
    fn optimizer(&self) -> OptimizerParams {
        OptimizerParams {
            alpha_min: self.alpha_min,
            alpha_factor: self.alpha_factor,
            iters_per_round: self.iters_per_round,
            epsilon: self.epsilon,
            approx_depth: self.h,
            ..OptimizerParams::default()
        }
    }

    fn coarsening(&self) -> CoarseningParams {
        CoarseningParams {
            f0: self.f,
            b: self.b,
            rounds: self.lp_rounds,
            ..CoarseningParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct MetricsGate {
    /// Evaluate quality metrics (on by default; see --metrics-limit).
    #[arg(long, overrides_with = "no_metrics")]
    metrics: bool,
    /// Skip quality metrics.
    #[arg(long = "no-metrics")]
    no_metrics: bool,
    /// Node-count ceiling for metric evaluation (quadratic cost).
    #[arg(long = "metrics-limit", default_value_t = crate::metrics::DEFAULT_APSP_LIMIT)]
    metrics_limit: usize,
}

impl MetricsGate {
    fn enabled(&self) -> bool {
        !self.no_metrics
    }
}

#[derive(Debug, Args)]
struct LayoutArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    opt: OptimizerArgs,
    /// Write coordinates here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG rendering here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    gate: MetricsGate,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Coordinate file to evaluate.
    #[arg(long)]
    coords: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "metrics-limit", default_value_t = crate::metrics::DEFAULT_APSP_LIMIT)]
    metrics_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DynamicMode {
    Update,
    Scratch,
}

#[derive(Debug, Args)]
struct DynamicArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    opt: OptimizerArgs,
    /// Percentage of edges to remove and insert.
    #[arg(long)]
    x: f64,
    /// Maximum original-graph distance for inserted edges.
    #[arg(long = "D")]
    max_distance: usize,
    /// Prior coordinates of the unperturbed graph (update mode).
    #[arg(long = "prior-coords")]
    prior_coords: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: DynamicMode,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    gate: MetricsGate,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Graph files; one CSV row is emitted per (graph, h) pair.
    #[arg(long, required = true, num_args = 1..)]
    graph: Vec<PathBuf>,
    /// Comma-separated approximation depths.
    #[arg(long = "h", value_delimiter = ',', default_value = "0")]
    h: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Metis)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    gate: MetricsGate,
}

/// Entry point used by `main`; parses real process arguments.
pub fn run_main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout();
    run(&args, &mut stdout)
}

/// Parse `argv` and execute; test harnesses capture `out`.
pub fn run(argv: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = write!(std::io::stderr(), "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Layout(args) => cmd_layout(&args, out),
        Command::Metrics(args) => cmd_metrics(&args, out),
        Command::Dynamic(args) => cmd_dynamic(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(f)
    }
}

fn report_parse_stats(path: &Path, stats: &ParseStats) {
    if stats.self_loops_dropped > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop(s)",
            path.display(),
            stats.self_loops_dropped
        );
    }
    if stats.duplicates_merged > 0 {
        eprintln!(
            "warning: {}: merged {} duplicate edge(s)",
            path.display(),
            stats.duplicates_merged
        );
    }
    if let Some((declared, actual)) = stats.declared_edge_mismatch {
        eprintln!(
            "warning: {}: header declares {} edges, file contains {}",
            path.display(),
            declared,
            actual
        );
    }
}

/// Load a graph and reduce it to its largest connected component if needed.
fn load_graph(input: &GraphInput) -> Result<Graph> {
    let (graph, stats) = match input.format {
        Format::Metis => read_metis(&input.graph)?,
        Format::Edgelist => read_edge_list(&input.graph)?,
    };
    report_parse_stats(&input.graph, &stats);
    if graph.is_connected() {
        return Ok(graph);
    }
    let (lcc, _) = graph.largest_connected_component();
    eprintln!(
        "note: {}: graph is disconnected; drawing the largest connected component \
         ({} of {} nodes)",
        input.graph.display(),
        lcc.node_count(),
        graph.node_count()
    );
    Ok(lcc)
}

fn graph_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Evaluation protocol: jitter coincident points, fit the optimal scale
/// against shortest-path targets, then measure full stress and maxent-stress
/// on the scaled layout. Gated by the quadratic-cost size limit.
fn gated_metrics(
    g: &Graph,
    layout: &Layout,
    enabled: bool,
    limit: usize,
    seed: u64,
    alpha: f64,
) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    if !enabled {
        return Ok((None, None, None));
    }
    if g.node_count() > limit {
        eprintln!(
            "note: skipping metrics (n = {} exceeds limit {}; raise --metrics-limit to override)",
            g.node_count(),
            limit
        );
        return Ok((None, None, None));
    }
    let jittered = jitter_coincident(layout, seed)?;
    let dm = apsp_unit_with_limit(g, limit)?;
    let s = optimal_scale(g, &dm, &jittered)?;
    let scaled = jittered.scaled(s);
    let f = full_stress(g, &dm, &scaled);
    let m = maxent_stress(g, &scaled, alpha)?;
    Ok((Some(f), Some(m), Some(s)))
}

fn cmd_layout(args: &LayoutArgs, out: &mut dyn Write) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let p = args.opt.optimizer();
    let cp = args.opt.coarsening();
    let run = with_pool(args.opt.threads, || {
        layout_multilevel_run(&graph, &p, &cp, args.opt.seed)
    })?;

    if let Some(path) = &args.out {
        write_coords(path, &run.layout)?;
    }
    if let Some(path) = &args.svg {
        std::fs::write(path, render_svg(&graph, &run.layout, &SvgOptions::default()))?;
    }

    let (f, m, s) = gated_metrics(
        &graph,
        &run.layout,
        args.gate.enabled(),
        args.gate.metrics_limit,
        args.opt.seed,
        p.alpha_min,
    )?;

    writeln!(
        out,
        "graph {} n {} m {} levels {}",
        graph_stem(&args.input.graph),
        graph.node_count(),
        graph.edge_count(),
        run.hierarchy_depth
    )?;
    writeln!(
        out,
        "time coarsen {:.3}s optimize {:.3}s total {:.3}s",
        run.coarsen_seconds,
        run.optimize_seconds,
        run.coarsen_seconds + run.optimize_seconds
    )?;
    if let (Some(f), Some(m), Some(s)) = (f, m, s) {
        writeln!(out, "F(x) = {f:?}")?;
        writeln!(out, "M(x) = {m:?}")?;
        writeln!(out, "s = {s:?}")?;
    }
    Ok(())
}

fn cmd_metrics(args: &MetricsArgs, out: &mut dyn Write) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let layout = read_coords(&args.coords)?;
    layout.check_matches(&graph)?;
    layout.check_finite()?;

    let jittered = jitter_coincident(&layout, args.seed)?;
    let dm = apsp_unit_with_limit(&graph, args.metrics_limit)?;
    let s = optimal_scale(&graph, &dm, &jittered)?;
    let scaled = jittered.scaled(s);
    let f = full_stress(&graph, &dm, &scaled);
    let m = maxent_stress(&graph, &scaled, 0.008)?;
    writeln!(out, "F(x) = {f:?}")?;
    writeln!(out, "M(x) = {m:?}")?;
    writeln!(out, "s = {s:?}")?;
    Ok(())
}

fn cmd_dynamic(args: &DynamicArgs, out: &mut dyn Write) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let p = args.opt.optimizer();
    let cp = args.opt.coarsening();
    let params = PerturbationParams {
        x_percent: args.x,
        max_insert_distance: args.max_distance,
        seed: args.opt.seed,
    };
    let (q, stats) = perturb(&graph, &params)?;
    if stats.removal_capped {
        eprintln!("warning: fewer non-tree edges than requested removals; removed all of them");
    }
    if stats.failed_insertions > 0 {
        eprintln!(
            "warning: {} insertion(s) found no admissible endpoint and were skipped",
            stats.failed_insertions
        );
    }

    let (mode, layout, t_coarsen, t_optimize) = match args.mode {
        DynamicMode::Update => {
            let prior_path = args.prior_coords.as_ref().ok_or_else(|| {
                crate::error::Error::InvalidParameter(
                    "--prior-coords is required in update mode".into(),
                )
            })?;
            let prior = read_coords(prior_path)?;
            let t = Instant::now();
            let layout = with_pool(args.opt.threads, || {
                update_layout(&q, &prior, &p, &cp, args.opt.seed)
            })?;
            (Mode::Update, layout, 0.0, t.elapsed().as_secs_f64())
        }
        DynamicMode::Scratch => {
            let run = with_pool(args.opt.threads, || {
                layout_multilevel_run(&q, &p, &cp, args.opt.seed)
            })?;
            (
                Mode::Scratch,
                run.layout,
                run.coarsen_seconds,
                run.optimize_seconds,
            )
        }
    };

    if let Some(path) = &args.out {
        write_coords(path, &layout)?;
    }
    let (f, m, s) = gated_metrics(
        &q,
        &layout,
        args.gate.enabled(),
        args.gate.metrics_limit,
        args.opt.seed,
        p.alpha_min,
    )?;
    let report = RunReport {
        graph: graph_stem(&args.input.graph),
        n: q.node_count(),
        m: q.edge_count(),
        h: args.opt.h,
        threads: args.opt.threads,
        mode,
        seed: args.opt.seed,
        t_coarsen_s: t_coarsen,
        t_optimize_s: t_optimize,
        t_total_s: t_coarsen + t_optimize,
        full_stress: f,
        maxent_stress: m,
        scale: s,
    };
    writeln!(out, "{CSV_HEADER}")?;
    writeln!(out, "{}", report.csv_row())?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut rows = Vec::new();
    for path in &args.graph {
        let input = GraphInput {
            graph: path.clone(),
            format: args.format,
        };
        let graph = load_graph(&input)?;
        for &h in &args.h {
            let p = OptimizerParams {
                approx_depth: h,
                ..OptimizerParams::default()
            };
            let cp = CoarseningParams::default();
            let run = with_pool(args.threads, || {
                layout_multilevel_run(&graph, &p, &cp, args.seed)
            })?;
            let (f, m, s) = gated_metrics(
                &graph,
                &run.layout,
                args.gate.enabled(),
                args.gate.metrics_limit,
                args.seed,
                p.alpha_min,
            )?;
            rows.push(RunReport {
                graph: graph_stem(path),
                n: graph.node_count(),
                m: graph.edge_count(),
                h,
                threads: args.threads,
                mode: Mode::Static,
                seed: args.seed,
                t_coarsen_s: run.coarsen_seconds,
                t_optimize_s: run.optimize_seconds,
                t_total_s: run.coarsen_seconds + run.optimize_seconds,
                full_stress: f,
                maxent_stress: m,
                scale: s,
            });
        }
    }

    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}
