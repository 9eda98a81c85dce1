//! `bfs-sieve`: run distributed BFS experiments on the simulated fabric.
//!
//! Exit status: 0 when every BFS tree validates, 2 when any validation
//! fails, 1 for usage and I/O errors.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use bfs_sieve::experiment::{run, Experiment, GraphInput, RunSpec, SourcePolicy};
use bfs_sieve::graphgen::generate_kronecker;
use bfs_sieve::report::format_bytes;
use bfs_sieve::{Codec, CostModelParams, EdgeList, GraphConfig, Variant};

const THREADS_ENV: &str = "BFS_SIEVE_THREADS";

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "bfs-sieve",
    version,
    about = "Distributed BFS with compressed and sieved frontier exchange"
)]
struct Args {
    /// Kronecker graph scale (2^scale vertices).
    #[arg(long, default_value_t = 14, conflicts_with = "graph")]
    scale: u32,

    /// Edge tuples per vertex.
    #[arg(long, default_value_t = 16)]
    edgefactor: u64,

    /// Seed for graph generation and source sampling.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Relabel generated vertices with a seeded permutation.
    #[arg(long)]
    permute: bool,

    /// Read the graph from an edge-list file instead of generating one.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,

    /// Rank counts to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ranks: Vec<usize>,

    /// Algorithms: bit, wah, dir-wah.
    #[arg(long = "alg", value_delimiter = ',', default_value = "bit,wah,dir-wah")]
    algorithms: Vec<Variant>,

    /// Frontier codec for wah and dir-wah: raw, wah, wah:W, sparse, rle.
    #[arg(long, default_value = "wah:64")]
    codec: Codec,

    /// Source vertices: `<id>[,<id>...]` or `random:<k>`.
    #[arg(long, default_value = "random:64")]
    source: String,

    /// Cost model latency, seconds per message.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,

    /// Cost model inverse bandwidth, seconds per byte.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,

    /// Report destination; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Repetitions of every run.
    #[arg(long, default_value_t = 1)]
    reps: usize,

    /// Weak scaling: use scale S + log2(p) for each rank count p.
    #[arg(long, value_name = "S", conflicts_with = "graph")]
    scale_per_rank: Option<u32>,

    /// Zero wall-clock fields so that reports are byte-stable.
    #[arg(long)]
    stable: bool,

    /// Write the generated edge list to PATH and exit.
    #[arg(long, value_name = "PATH", conflicts_with = "graph")]
    export_edges: Option<PathBuf>,

    /// Do not print summary tables to stderr.
    #[arg(long, short)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn execute(args: Args) -> Result<bool> {
    configure_threads()?;
    let cfg = GraphConfig::new(args.scale, args.edgefactor, args.seed).with_permutation(args.permute);

    if let Some(path) = &args.export_edges {
        let edges = generate_kronecker(&cfg)?;
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        edges.write_to(BufWriter::new(file))?;
        if !args.quiet {
            eprintln!(
                "wrote {} edge tuples over {} vertices to {}",
                edges.len(),
                edges.vertex_count(),
                path.display()
            );
        }
        return Ok(true);
    }

    let graph = match &args.graph {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let edges =
                EdgeList::read_from(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
            GraphInput::Edges {
                label: path.display().to_string(),
                edges,
            }
        }
        None => GraphInput::Kronecker(cfg),
    };
    if args.algorithms.is_empty() {
        bail!("at least one algorithm is required");
    }
    let sources = SourcePolicy::parse(&args.source, args.seed).map_err(anyhow::Error::msg)?;
    let cost = CostModelParams::new(args.alpha, args.beta).map_err(anyhow::Error::msg)?;
    let spec = RunSpec {
        graph,
        ranks: args.ranks.clone(),
        variants: args.algorithms.clone(),
        codec: args.codec,
        sources,
        cost,
        reps: args.reps,
        scale_per_rank: args.scale_per_rank,
        stable: args.stable,
    };
    let experiment = run(&spec)?;

    let body = match args.format {
        Format::Json => experiment.to_json(),
        Format::Csv => experiment.to_csv(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    if !args.quiet {
        print_summary(&experiment);
    }
    let ok = experiment.all_valid();
    if !ok {
        for r in experiment.reports.iter().filter(|r| !r.validation.passed) {
            eprintln!(
                "validation failed: {} p={} source={}: {}",
                r.config.algorithm,
                r.config.ranks,
                r.config.source,
                r.validation.violations.join("; ")
            );
        }
    }
    Ok(ok)
}

fn print_summary(experiment: &Experiment) {
    let Some(first) = experiment.reports.first() else {
        return;
    };
    let mut err = io::stderr().lock();
    let _ = writeln!(
        err,
        "frontier sizes ({} p={} source={}):",
        first.config.algorithm, first.config.ranks, first.config.source
    );
    let _ = writeln!(
        err,
        "{:>6} {:>12} {:>10} {:>10} {:>10}",
        "level", "vertices", "bitmap", "sparse", "wah"
    );
    let (mut raw, mut sparse, mut wah, mut count) = (0, 0, 0, 0);
    for l in &first.per_level {
        let _ = writeln!(
            err,
            "{:>6} {:>12} {:>10} {:>10} {:>10}",
            l.level,
            l.frontier_count,
            format_bytes(l.bytes.raw),
            format_bytes(l.bytes.sparse),
            format_bytes(l.bytes.wah)
        );
        raw += l.bytes.raw;
        sparse += l.bytes.sparse;
        wah += l.bytes.wah;
        count += l.frontier_count;
    }
    let _ = writeln!(
        err,
        "{:>6} {:>12} {:>10} {:>10} {:>10}",
        "total",
        count,
        format_bytes(raw),
        format_bytes(sparse),
        format_bytes(wah)
    );
    let _ = writeln!(err);
    let _ = writeln!(
        err,
        "{:>6} {:>8} {:>12} {:>5} {:>14} {:>14} {:>12} {:>14}",
        "ranks", "alg", "n", "runs", "level bytes", "volume", "sim s", "TEPS"
    );
    for row in experiment.scaling_table() {
        let teps = row.teps.map_or_else(|| "-".to_string(), |t| format!("{t:.3e}"));
        let _ = writeln!(
            err,
            "{:>6} {:>8} {:>12} {:>5} {:>14} {:>14} {:>12.4e} {:>14}",
            row.ranks,
            row.algorithm.to_string(),
            row.n,
            row.runs,
            row.level_bytes_total,
            row.volume_max_rank,
            row.sim_time_s,
            teps
        );
    }
}
