//! Experiment orchestration: graphs, rank sweeps, sources and repetitions,
//! with JSON and CSV output.
//!
//! Each BFS run yields one [`ReportDoc`]:
//!
//! ```text
//! { config, per_level: [...], totals: {...}, validation: {...} }
//! ```

use std::fmt::Write as _;

use serde::Serialize;

use crate::bitvec::Codec;
use crate::directory::init_cross_directories;
use crate::engine::{
    bfs_baseline, bfs_compressed, bfs_sieve_compressed, compute_teps, traversed_edge_count, validate, BfsResult,
    EngineError, Variant,
};
use crate::fabric::{CostModelParams, Fabric};
use crate::graphgen::rng::SplitMix64;
use crate::graphgen::{build_csr, generate_kronecker, partition_rows, CsrMatrix, EdgeList, GraphConfig, VertexId};
use crate::report::{LevelRecord, Totals};

const SOURCE_DOMAIN: u64 = 0x736f_7572_6365;

#[derive(Debug, Clone)]
pub enum GraphInput {
    Kronecker(GraphConfig),
    Edges { label: String, edges: EdgeList },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourcePolicy {
    Fixed(Vec<VertexId>),
    /// `count` distinct vertices with nonzero degree, drawn from `seed`.
    Random {
        count: usize,
        seed: u64,
    },
}

impl SourcePolicy {
    /// Parses `<id>[,<id>...]` or `random:<k>`.
    pub fn parse(s: &str, seed: u64) -> Result<Self, String> {
        if let Some(k) = s.strip_prefix("random:") {
            let count: usize = k.parse().map_err(|_| format!("invalid source count {k:?}"))?;
            if count == 0 {
                return Err("random source count must be at least 1".into());
            }
            return Ok(SourcePolicy::Random { count, seed });
        }
        let ids = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| format!("invalid source vertex {t:?}")))
            .collect::<Result<Vec<VertexId>, _>>()?;
        Ok(SourcePolicy::Fixed(ids))
    }

    pub fn resolve(&self, csr: &CsrMatrix) -> Result<Vec<VertexId>, EngineError> {
        let n = csr.n() as u64;
        match self {
            SourcePolicy::Fixed(ids) => {
                if let Some(&bad) = ids.iter().find(|&&s| s >= n) {
                    return Err(EngineError::Input(format!(
                        "source {bad} out of range for {n} vertices"
                    )));
                }
                Ok(ids.clone())
            }
            SourcePolicy::Random { count, seed } => Ok(sample_sources(csr, *count, *seed)),
        }
    }
}

/// Distinct vertices with nonzero degree. Falls back to every such vertex
/// when there are fewer than `count`, and to vertex 0 for an edgeless graph.
pub fn sample_sources(csr: &CsrMatrix, count: usize, seed: u64) -> Vec<VertexId> {
    let n = csr.n() as u64;
    let candidates = (0..csr.n()).filter(|&v| csr.degree(v) > 0).count();
    if candidates == 0 {
        return vec![0];
    }
    let want = count.min(candidates);
    let rng = SplitMix64::new(seed).derive(SOURCE_DOMAIN);
    let mut chosen = Vec::with_capacity(want);
    let mut seen = std::collections::HashSet::new();
    let mut counter = 0u64;
    while chosen.len() < want && counter < 64 * n.max(64) {
        let v = rng.below_at(counter, n);
        counter += 1;
        if csr.degree(v as usize) > 0 && seen.insert(v) {
            chosen.push(v);
        }
    }
    if chosen.len() < want {
        chosen.extend(
            (0..n)
                .filter(|&v| csr.degree(v as usize) > 0 && !seen.contains(&v))
                .take(want - chosen.len()),
        );
    }
    chosen
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub graph: GraphInput,
    pub ranks: Vec<usize>,
    pub variants: Vec<Variant>,
    pub codec: Codec,
    pub sources: SourcePolicy,
    pub cost: CostModelParams,
    pub reps: usize,
    /// Weak scaling: generate a graph of scale `s + log2(p)` for each `p`.
    pub scale_per_rank: Option<u32>,
    /// Zero wall-clock fields so that output is byte-stable.
    pub stable: bool,
}

impl RunSpec {
    pub fn new(graph: GraphInput) -> Self {
        RunSpec {
            graph,
            ranks: vec![1],
            variants: Variant::ALL.to_vec(),
            codec: Codec::default(),
            sources: SourcePolicy::Random { count: 64, seed: 1 },
            cost: CostModelParams::default(),
            reps: 1,
            scale_per_rank: None,
            stable: false,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: &str| Err(EngineError::Input(m.to_string()));
        if self.variants.is_empty() {
            return bad("at least one algorithm is required");
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return bad("rank counts must be at least 1");
        }
        if self.reps == 0 {
            return bad("repetitions must be at least 1");
        }
        if let SourcePolicy::Fixed(ids) = &self.sources {
            if ids.is_empty() {
                return bad("no source vertices given");
            }
        }
        self.codec.validate().map_err(EngineError::Input)?;
        if let Some(s) = self.scale_per_rank {
            let GraphInput::Kronecker(_) = self.graph else {
                return bad("weak scaling needs a generated graph");
            };
            for &p in &self.ranks {
                if !p.is_power_of_two() {
                    return bad("weak scaling needs power-of-two rank counts");
                }
                GraphConfig::new(s + p.trailing_zeros(), 1, 0).validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphDoc {
    pub kind: &'static str,
    pub label: String,
    pub scale: Option<u32>,
    pub edgefactor: Option<u64>,
    pub seed: Option<u64>,
    pub permute: Option<bool>,
    pub n: u64,
    pub edge_tuples: u64,
    pub nnz: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigDoc {
    pub graph: GraphDoc,
    pub algorithm: Variant,
    pub codec: String,
    pub ranks: usize,
    pub source: VertexId,
    pub rep: usize,
    pub alpha: f64,
    pub beta: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationDoc {
    pub passed: bool,
    pub visited: u64,
    pub edges_checked: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
    pub config: ConfigDoc,
    pub per_level: Vec<LevelRecord>,
    pub totals: Totals,
    pub validation: ValidationDoc,
}

/// One weak- or strong-scaling row: all sources of one `(p, algorithm)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub ranks: usize,
    pub algorithm: Variant,
    pub n: u64,
    pub runs: usize,
    pub level_bytes_total: u64,
    pub volume_max_rank: u64,
    pub per_rank_sent: Vec<u64>,
    pub sim_time_s: f64,
    /// Harmonic mean over runs, absent in stable mode.
    pub teps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub reports: Vec<ReportDoc>,
}

impl Experiment {
    pub fn all_valid(&self) -> bool {
        self.reports.iter().all(|r| r.validation.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.reports).expect("reports serialize") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "algorithm,codec,ranks,source,rep,level,frontier_count,exchanged,shipped_vertices,\
             bytes_raw,bytes_sparse,bytes_wah,sent_total,sent_payload,sent_preamble,max_rank_sent,\
             reducing_bytes,compression_ratio,wall_traversing_s,wall_reducing_s,wall_communication_s,\
             wall_compression_sieve_s,sim_communication_s,sim_reducing_s\n",
        );
        for r in &self.reports {
            let c = &r.config;
            for l in &r.per_level {
                let b = &l.bytes;
                let w = &l.phase_wall_s;
                let ratio = l.compression_ratio.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    c.algorithm.to_string().to_uppercase(),
                    c.codec,
                    c.ranks,
                    c.source,
                    c.rep,
                    l.level,
                    l.frontier_count,
                    l.exchanged,
                    l.shipped_vertices,
                    b.raw,
                    b.sparse,
                    b.wah,
                    b.sent_total,
                    b.sent_payload,
                    b.sent_preamble,
                    b.max_rank_sent,
                    b.reducing,
                    ratio,
                    w.traversing,
                    w.reducing,
                    w.communication,
                    w.compression_sieve,
                    l.phase_sim_s.communication,
                    l.phase_sim_s.reducing,
                );
            }
        }
        out
    }

    /// Rows in first-seen `(ranks, algorithm)` order.
    pub fn scaling_table(&self) -> Vec<ScalingRow> {
        let mut rows: Vec<ScalingRow> = Vec::new();
        let mut inverse_teps: Vec<(f64, usize)> = Vec::new();
        for r in &self.reports {
            let key = (r.config.ranks, r.config.algorithm);
            let idx = match rows.iter().position(|x| (x.ranks, x.algorithm) == key) {
                Some(i) => i,
                None => {
                    rows.push(ScalingRow {
                        ranks: key.0,
                        algorithm: key.1,
                        n: r.config.graph.n,
                        runs: 0,
                        level_bytes_total: 0,
                        volume_max_rank: 0,
                        per_rank_sent: vec![0; key.0],
                        sim_time_s: 0.0,
                        teps: None,
                    });
                    inverse_teps.push((0.0, 0));
                    rows.len() - 1
                }
            };
            let row = &mut rows[idx];
            row.runs += 1;
            row.level_bytes_total += r.totals.level_bytes_total;
            row.volume_max_rank = row.volume_max_rank.max(r.totals.volume_max_rank);
            for (acc, s) in row.per_rank_sent.iter_mut().zip(&r.totals.per_rank_sent) {
                *acc += s;
            }
            row.sim_time_s += r.totals.sim_time_s;
            if let Some(t) = r.totals.teps.filter(|&t| t > 0.0) {
                inverse_teps[idx].0 += 1.0 / t;
                inverse_teps[idx].1 += 1;
            }
        }
        for (row, (inv, k)) in rows.iter_mut().zip(inverse_teps) {
            if k > 0 {
                row.teps = Some(k as f64 / inv);
            }
        }
        rows
    }
}

struct Prepared {
    doc: GraphDoc,
    edges: EdgeList,
    csr: CsrMatrix,
}

fn prepare(input: &GraphInput, scale_override: Option<u32>) -> Result<Prepared, EngineError> {
    let (doc, edges) = match input {
        GraphInput::Kronecker(cfg) => {
            let mut cfg = *cfg;
            if let Some(s) = scale_override {
                cfg.scale = s;
            }
            let edges = generate_kronecker(&cfg)?;
            let doc = GraphDoc {
                kind: "kronecker",
                label: format!("kronecker-s{}-e{}-seed{}", cfg.scale, cfg.edgefactor, cfg.seed),
                scale: Some(cfg.scale),
                edgefactor: Some(cfg.edgefactor),
                seed: Some(cfg.seed),
                permute: Some(cfg.permute),
                n: 0,
                edge_tuples: 0,
                nnz: 0,
            };
            (doc, edges)
        }
        GraphInput::Edges { label, edges } => {
            let doc = GraphDoc {
                kind: "edge_list",
                label: label.clone(),
                scale: None,
                edgefactor: None,
                seed: None,
                permute: None,
                n: 0,
                edge_tuples: 0,
                nnz: 0,
            };
            (doc, edges.clone())
        }
    };
    let csr = build_csr(&edges)?;
    let doc = GraphDoc {
        n: csr.n() as u64,
        edge_tuples: edges.len() as u64,
        nnz: csr.nnz() as u64,
        ..doc
    };
    Ok(Prepared { doc, edges, csr })
}

/// Runs every `(p, algorithm, repetition, source)` combination of `spec`.
pub fn run(spec: &RunSpec) -> Result<Experiment, EngineError> {
    spec.validate()?;
    let mut reports = Vec::new();
    let shared = match spec.scale_per_rank {
        None => Some(prepare(&spec.graph, None)?),
        Some(_) => None,
    };
    for &p in &spec.ranks {
        let owned;
        let graph = match (&shared, spec.scale_per_rank) {
            (Some(g), _) => g,
            (None, Some(s)) => {
                owned = prepare(&spec.graph, Some(s + p.trailing_zeros()))?;
                &owned
            }
            (None, None) => unreachable!("graph prepared above"),
        };
        if p > graph.csr.n() {
            return Err(EngineError::Input(format!(
                "{p} ranks for a graph with {} vertices",
                graph.csr.n()
            )));
        }
        let sources = spec.sources.resolve(&graph.csr)?;
        let parts = partition_rows(&graph.csr, p)?;
        let fabric = Fabric::new(p).with_cost_model(spec.cost);
        let dirs = if spec.variants.contains(&Variant::DirWah) {
            let mark = fabric.ledger_len();
            let dirs = init_cross_directories(&parts, &fabric)?;
            let init_bytes: u64 = fabric.ledger_since(mark).iter().map(|e| e.sent_bytes()).sum();
            Some((dirs, init_bytes))
        } else {
            None
        };
        for rep in 0..spec.reps {
            for &source in &sources {
                for &variant in &spec.variants {
                    let (result, mut report) = match variant {
                        Variant::Bit => bfs_baseline(&parts, &fabric, source)?,
                        Variant::Wah => bfs_compressed(&parts, &fabric, source, &spec.codec)?,
                        Variant::DirWah => {
                            let (dirs, init) = dirs.as_ref().expect("directories built for DIR-WAH");
                            let mut out = bfs_sieve_compressed(&parts, &fabric, source, &spec.codec, dirs)?;
                            out.1.totals.init_bytes_total = *init;
                            out
                        }
                    };
                    let m = traversed_edge_count(&graph.edges, &result);
                    report.totals.m = Some(m);
                    report.totals.teps = if report.totals.wall_time_s > 0.0 {
                        Some(compute_teps(m, report.totals.wall_time_s)?)
                    } else {
                        None
                    };
                    if spec.stable {
                        report.strip_wall_times();
                    }
                    let validation = validation_doc(&result, &graph.csr);
                    reports.push(ReportDoc {
                        config: ConfigDoc {
                            graph: graph.doc.clone(),
                            algorithm: variant,
                            codec: report.codec.clone(),
                            ranks: p,
                            source,
                            rep,
                            alpha: spec.cost.alpha,
                            beta: spec.cost.beta,
                            stable: spec.stable,
                        },
                        per_level: report.per_level,
                        totals: report.totals,
                        validation,
                    });
                }
            }
        }
    }
    Ok(Experiment { reports })
}

fn validation_doc(result: &BfsResult, csr: &CsrMatrix) -> ValidationDoc {
    match validate(result, csr) {
        Ok(v) => ValidationDoc {
            passed: true,
            visited: v.visited,
            edges_checked: v.edges_checked,
            violations: Vec::new(),
        },
        Err(e) => ValidationDoc {
            passed: false,
            visited: result.visited_count() as u64,
            edges_checked: 0,
            violations: e.violations.iter().map(|v| v.to_string()).collect(),
        },
    }
}
