use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rcc::census::{census_csv, estimate_counts, exact_counts, CensusConfig, DEFAULT_ENUMERATION_BUDGET};
use rcc::complex::{complex_from_json, complex_to_json, summarize, ComplexMeta};
use rcc::cycle::Cycle;
use rcc::exec::with_threads;
use rcc::graph::{load_edge_list, mle_edge_probability, save_edge_list, Graph, GraphModel};
use rcc::lifting::{sample_lifting, SamplingConfig, SamplingMode};
use rcc::occurrence::{rho_exact_lrw, Approximation};
use rcc::oracles;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_UNDERSAMPLED: u8 = 3;

#[derive(Parser, Serialize)]
#[command(name = "rcc", version, about = "Random 2-dimensional cell complexes from graphs")]
struct Cli {
    /// Worker threads; 0 uses every core. Never changes output bytes.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate a graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Lift a graph to a cell complex.
    Sample(SampleArgs),
    /// Estimate the number of cycles per length.
    Count(CountArgs),
    /// Betti numbers and orientability of a complex.
    Analyze(AnalyzeArgs),
    /// Exact and brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Time the sampler over graph sizes and fit the log-log slope.
    Bench(BenchArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelKind {
    Er,
    Complete,
    Bipartite,
    Sbm,
}

#[derive(Args, Serialize)]
struct GenGraphArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Block sizes, e.g. 10,10.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    p_in: Option<f64>,
    #[arg(long)]
    p_out: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GraphSource {
    /// Edge-list file.
    #[arg(long, conflicts_with = "er")]
    graph: Option<PathBuf>,
    /// Erdős–Rényi graph "N,P" drawn with --graph-seed.
    #[arg(long)]
    er: Option<String>,
    /// Seed for --er; defaults to --seed.
    #[arg(long)]
    graph_seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ApproxArg {
    Fast,
    Estimated,
}

impl From<ApproxArg> for Approximation {
    fn from(a: ApproxArg) -> Self {
        match a {
            ApproxArg::Fast => Approximation::Fast,
            ApproxArg::Estimated => Approximation::Estimated,
        }
    }
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 1000)]
    trees: usize,
    /// Target probability per length, "L:P,L:P,..."; unlisted lengths get 0.
    #[arg(long, conflicts_with = "cells")]
    uniform_pl: Option<String>,
    /// Expected number of cells, spread evenly over occurring lengths.
    #[arg(long)]
    cells: Option<f64>,
    /// Lengths need more than this many occurrences in the census pass.
    #[arg(long, default_value_t = 4)]
    threshold: u64,
    #[arg(long, value_enum, default_value_t = ApproxArg::Fast)]
    approx: ApproxArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Complex JSON; the report goes to <out>.report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CountArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 1000)]
    trees: usize,
    #[arg(long, value_enum, default_value_t = ApproxArg::Fast)]
    approx: ApproxArg,
    /// Add exact counts by enumeration when within --budget.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    #[arg(long)]
    cc: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RhoMethod {
    MatrixTree,
    Lrw,
    MonteCarlo,
    Enumerate,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OracleCommand {
    /// Occurrence probability of one cycle.
    Rho {
        #[command(flatten)]
        source: GraphSource,
        /// Cycle nodes in traversal order, e.g. 0,1,2.
        #[arg(long)]
        cycle: String,
        #[arg(long, value_enum, default_value_t = RhoMethod::MatrixTree)]
        method: RhoMethod,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spanning tree counts, optionally of trees inducing a cycle.
    Trees {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        cycle: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform l-cycles by rejection sampling of node permutations.
    Reject {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_attempts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Serialize)]
struct BenchArgs {
    #[arg(long, default_value = "100,200,400,800")]
    sizes: String,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 1000)]
    trees: usize,
    #[arg(long, default_value_t = 10.0)]
    cells_per_node: f64,
    #[arg(long, default_value_t = 4)]
    threshold: u64,
    #[arg(long, value_enum, default_value_t = ApproxArg::Fast)]
    approx: ApproxArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad flag values not caught by the parser.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Outcome {
    exit: u8,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
}

impl Outcome {
    fn ok(outputs: Vec<PathBuf>, seed: Option<u64>) -> Self {
        Outcome { exit: 0, outputs, seed }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    run_argv(argv)
}

fn run_argv(argv: Vec<String>) -> ExitCode {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Command::Replay { manifest } = &cli.command {
        return match replay_argv(manifest) {
            Ok(argv) => run_argv(argv),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_VALIDATION)
            }
        };
    }
    let started = Instant::now();
    let result = with_threads(cli.threads, || dispatch(&cli.command));
    match result {
        Ok(outcome) => {
            if let Err(e) = write_manifest(&cli, &argv, &outcome, started) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
    }
}

fn dispatch(command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::GenGraph(a) => cmd_gen_graph(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Count(a) => cmd_count(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Oracle(o) => cmd_oracle(o),
        Command::Bench(a) => cmd_bench(a),
        Command::Replay { .. } => unreachable!("handled before dispatch"),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::GenGraph(_) => "gen-graph",
        Command::Sample(_) => "sample",
        Command::Count(_) => "count",
        Command::Analyze(_) => "analyze",
        Command::Oracle(OracleCommand::Rho { .. }) => "oracle rho",
        Command::Oracle(OracleCommand::Trees { .. }) => "oracle trees",
        Command::Oracle(OracleCommand::Reject { .. }) => "oracle reject",
        Command::Bench(_) => "bench",
        Command::Replay { .. } => "replay",
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Written next to the first output; serde_json maps keep keys sorted.
fn write_manifest(cli: &Cli, argv: &[String], outcome: &Outcome, started: Instant) -> anyhow::Result<()> {
    let Some(primary) = outcome.outputs.first() else {
        return Ok(());
    };
    let manifest = json!({
        "subcommand": command_name(&cli.command),
        "parameters": serde_json::to_value(cli)?,
        "argv": argv.get(1..).unwrap_or_default(),
        "seed": outcome.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "outputs": outcome.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "exit_code": outcome.exit,
    });
    let path = manifest_path(primary);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn replay_argv(manifest: &Path) -> anyhow::Result<Vec<String>> {
    let text = fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let value: Value = serde_json::from_str(&text)?;
    let args = value["argv"]
        .as_array()
        .ok_or_else(|| anyhow!("manifest has no argv"))?
        .iter()
        .map(|a| a.as_str().map(str::to_owned).ok_or_else(|| anyhow!("non-string argument")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(std::iter::once("rcc".to_owned()).chain(args).collect())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<Vec<PathBuf>> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            Ok(vec![path.to_owned()])
        }
        None => {
            print!("{text}");
            Ok(Vec::new())
        }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> anyhow::Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("bad {what} {s:?} in {text:?}"))))
        .collect()
}

/// "L:P,L:P,...".
fn parse_pl(text: &str) -> anyhow::Result<BTreeMap<usize, f64>> {
    let mut map = BTreeMap::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (l, p) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("expected L:P, got {item:?}")))?;
        let l: usize = l.trim().parse().map_err(|_| usage(format!("bad length {l:?}")))?;
        let p: f64 = p.trim().parse().map_err(|_| usage(format!("bad probability {p:?}")))?;
        if map.insert(l, p).is_some() {
            return Err(usage(format!("length {l} listed twice")));
        }
    }
    Ok(map)
}

fn parse_cycle(text: &str) -> anyhow::Result<Cycle> {
    Ok(Cycle::new(parse_list(text, "node")?)?)
}

/// The graph and, when generated, its model edge probability.
fn load_graph(src: &GraphSource, seed: u64) -> anyhow::Result<(Graph, Option<f64>)> {
    match (&src.graph, &src.er) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok((load_edge_list(&text)?, None))
        }
        (None, Some(spec)) => {
            let (n, p) = spec
                .split_once(',')
                .ok_or_else(|| usage(format!("--er expects N,P, got {spec:?}")))?;
            let n: usize = n.trim().parse().map_err(|_| usage(format!("bad node count {n:?}")))?;
            let p: f64 = p.trim().parse().map_err(|_| usage(format!("bad probability {p:?}")))?;
            let g = GraphModel::ErdosRenyi { n, p }.sample(src.graph_seed.unwrap_or(seed))?;
            Ok((g, Some(p)))
        }
        _ => Err(usage("exactly one of --graph or --er is required")),
    }
}

fn cmd_gen_graph(a: &GenGraphArgs) -> anyhow::Result<Outcome> {
    let need_n = || a.n.ok_or_else(|| usage("--n is required for this model"));
    let model = match a.model {
        ModelKind::Er => GraphModel::ErdosRenyi {
            n: need_n()?,
            p: a.p.ok_or_else(|| usage("--p is required for --model er"))?,
        },
        ModelKind::Complete => GraphModel::Complete { n: need_n()? },
        ModelKind::Bipartite => GraphModel::CompleteBipartite {
            a: a.a.ok_or_else(|| usage("--a is required for --model bipartite"))?,
            b: a.b.ok_or_else(|| usage("--b is required for --model bipartite"))?,
        },
        ModelKind::Sbm => {
            let blocks: Vec<usize> =
                parse_list(a.blocks.as_deref().ok_or_else(|| usage("--blocks is required"))?, "block size")?;
            let p_in = a.p_in.ok_or_else(|| usage("--p-in is required for --model sbm"))?;
            let p_out = a.p_out.ok_or_else(|| usage("--p-out is required for --model sbm"))?;
            let k = blocks.len();
            let probabilities =
                (0..k).map(|i| (0..k).map(|j| if i == j { p_in } else { p_out }).collect()).collect();
            GraphModel::StochasticBlock { block_sizes: blocks, probabilities }
        }
    };
    model.validate().map_err(|e| usage(e.to_string()))?;
    let g = model.sample(a.seed)?;
    let stats = format!(
        "n={} m={} p_mle={}",
        g.node_count(),
        g.edge_count(),
        mle_edge_probability(&g).map(|p| p.to_string()).unwrap_or_else(|_| "nan".into())
    );
    let outputs = emit(a.out.as_deref(), &save_edge_list(&g))?;
    if a.out.is_some() {
        println!("{stats}");
    } else {
        eprintln!("{stats}");
    }
    Ok(Outcome::ok(outputs, Some(a.seed)))
}

fn cmd_sample(a: &SampleArgs) -> anyhow::Result<Outcome> {
    let (g, p) = load_graph(&a.source, a.seed)?;
    let mode = match (&a.uniform_pl, a.cells) {
        (Some(spec), None) => SamplingMode::UniformProbability(parse_pl(spec)?),
        (None, Some(nu)) => SamplingMode::ExpectedCells { nu, threshold: a.threshold },
        _ => return Err(usage("exactly one of --uniform-pl or --cells is required")),
    };
    let approximation: Approximation = a.approx.into();
    let mut cfg = SamplingConfig::new(a.trees, mode.clone(), approximation, a.seed);
    cfg.edge_probability = p;
    let (complex, report) = sample_lifting(&g, &cfg)?;
    let meta = ComplexMeta {
        seed: a.seed,
        s: a.trees,
        mode: serde_json::to_value(&mode)?,
        approximation: approximation.to_string(),
        undersampled_lengths: report.undersampled_lengths.iter().copied().collect(),
    };
    let text = complex_to_json(&complex, Some(&meta));
    let report_text = serde_json::to_string_pretty(&report)? + "\n";
    let outputs = match &a.out {
        Some(path) => {
            let mut outputs = emit(Some(path), &text)?;
            outputs.extend(emit(Some(&sidecar_path(path, ".report.json")), &report_text)?);
            outputs
        }
        None => emit(None, &text)?,
    };
    eprintln!(
        "cells={} duplicates={} undersampled_lengths={:?}",
        complex.cell_count(),
        report.duplicate_hits,
        report.undersampled_lengths
    );
    let exit = if report.undersampled_lengths.is_empty() { 0 } else { EXIT_UNDERSAMPLED };
    Ok(Outcome { exit, outputs, seed: Some(a.seed) })
}

fn cmd_count(a: &CountArgs) -> anyhow::Result<Outcome> {
    let (g, p) = load_graph(&a.source, a.seed)?;
    let mut cfg = CensusConfig::new(a.trees, a.approx.into(), a.seed);
    cfg.edge_probability = p;
    let census = estimate_counts(&g, &cfg)?;
    let exact = if a.exact {
        match exact_counts(&g, a.budget) {
            Ok(e) => Some(e),
            Err(rcc::Error::BudgetExceeded { budget }) => {
                eprintln!("warning: exact enumeration exceeded budget {budget}; column omitted");
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let apriori_p = match p {
        Some(p) => p,
        None => mle_edge_probability(&g)?,
    };
    let csv = census_csv(&census, apriori_p, exact.as_ref())?;
    Ok(Outcome::ok(emit(a.out.as_deref(), &csv)?, Some(a.seed)))
}

fn cmd_analyze(a: &AnalyzeArgs) -> anyhow::Result<Outcome> {
    let text = fs::read_to_string(&a.cc).with_context(|| format!("reading {}", a.cc.display()))?;
    let (complex, _) = complex_from_json(&text)?;
    let summary = summarize(&complex)?;
    let out = serde_json::to_string(&summary)? + "\n";
    Ok(Outcome::ok(emit(a.out.as_deref(), &out)?, None))
}

fn cmd_oracle(o: &OracleCommand) -> anyhow::Result<Outcome> {
    match o {
        OracleCommand::Rho { source, cycle, method, trials, budget, seed, out } => {
            let (g, _) = load_graph(source, *seed)?;
            let c = parse_cycle(cycle)?;
            let value = match method {
                RhoMethod::MatrixTree => {
                    let r = oracles::rho_exact_matrix_tree(&g, &c)?;
                    json!({"method": "matrix-tree", "rho": r.to_string(), "value": ratio_f64(&r)})
                }
                RhoMethod::Enumerate => {
                    let trees = oracles::enumerate_spanning_trees(&g, *budget)?;
                    let hits = trees.iter().filter(|t| oracles::tree_induces(t, &c)).count();
                    let r = num_rational::BigRational::new(hits.into(), trees.len().into());
                    json!({"method": "enumerate", "rho": r.to_string(), "value": ratio_f64(&r),
                           "hits": hits, "trees": trees.len()})
                }
                RhoMethod::Lrw => {
                    let r = rho_exact_lrw(&c, &g)?;
                    json!({"method": "lrw", "value": r})
                }
                RhoMethod::MonteCarlo => {
                    let est = oracles::rho_monte_carlo(&g, &c, *trials, *seed, Default::default())?;
                    json!({"method": "monte-carlo", "value": est.rho, "std_error": est.std_error,
                           "hits": est.hits, "trials": est.trials})
                }
            };
            let text = serde_json::to_string(&value)? + "\n";
            Ok(Outcome::ok(emit(out.as_deref(), &text)?, Some(*seed)))
        }
        OracleCommand::Trees { source, cycle, seed, out } => {
            let (g, _) = load_graph(source, *seed)?;
            let mut value = json!({"total_trees": oracles::spanning_tree_count(&g).to_string()});
            if let Some(cycle) = cycle {
                let report = oracles::tree_count_report(&g, &parse_cycle(cycle)?)?;
                value["trees_containing"] = json!(report.trees_containing.to_string());
            }
            let text = serde_json::to_string(&value)? + "\n";
            Ok(Outcome::ok(emit(out.as_deref(), &text)?, Some(*seed)))
        }
        OracleCommand::Reject { source, length, count, max_attempts, seed, out } => {
            let (g, _) = load_graph(source, *seed)?;
            let sample = oracles::rejection_sample_cells(&g, *length, *count, *seed, *max_attempts)?;
            let text = serde_json::to_string(&sample)? + "\n";
            let outputs = emit(out.as_deref(), &text)?;
            if sample.shortfall {
                eprintln!("warning: accepted {} of {count} cells", sample.cells.len());
            }
            Ok(Outcome::ok(outputs, Some(*seed)))
        }
    }
}

fn ratio_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least-squares slope of `ln y` on `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<Outcome> {
    let sizes: Vec<usize> = parse_list(&a.sizes, "size")?;
    if sizes.len() < 2 {
        bail!(usage("--sizes needs at least two values"));
    }
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let g = connected_er(n, a.p, a.seed.wrapping_add(i as u64))?;
        let mode = SamplingMode::ExpectedCells { nu: a.cells_per_node * n as f64, threshold: a.threshold };
        let mut cfg = SamplingConfig::new(a.trees, mode, a.approx.into(), a.seed);
        cfg.edge_probability = Some(a.p);
        let start = Instant::now();
        let (complex, report) = sample_lifting(&g, &cfg)?;
        let seconds = start.elapsed().as_secs_f64();
        points.push((n as f64, seconds));
        rows.push(json!({
            "n": n,
            "m": g.edge_count(),
            "cells": complex.cell_count(),
            "undersampled_lengths": report.undersampled_lengths,
            "seconds": seconds,
        }));
        eprintln!("n={n} m={} cells={} seconds={seconds:.3}", g.edge_count(), complex.cell_count());
    }
    let value = json!({
        "p": a.p,
        "trees": a.trees,
        "cells_per_node": a.cells_per_node,
        "approximation": Approximation::from(a.approx).to_string(),
        "runs": rows,
        "slope": log_log_slope(&points),
    });
    let text = serde_json::to_string_pretty(&value)? + "\n";
    Ok(Outcome::ok(emit(a.out.as_deref(), &text)?, Some(a.seed)))
}

/// First connected draw of `G(n, p)` over consecutive seeds.
fn connected_er(n: usize, p: f64, seed: u64) -> anyhow::Result<Graph> {
    for attempt in 0..1000u64 {
        let g = GraphModel::ErdosRenyi { n, p }.sample(seed.wrapping_add(attempt << 32))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    bail!("no connected G({n}, {p}) in 1000 draws")
}
