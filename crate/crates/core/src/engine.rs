//! Level-synchronous distributed BFS in three exchange variants.
//!
//! Every variant runs the same loop on each rank: expand the frontier over
//! local rows, mask with the visited set, agree on termination with a sum
//! reduction, then exchange the new frontier. They differ only in that last
//! step:
//!
//! * [`Variant::Bit`] all-gathers raw frontier bitmaps.
//! * [`Variant::Wah`] all-gathers compressed frontiers.
//! * [`Variant::DirWah`] sieves the frontier separately for each destination
//!   with the cross directory, compresses each piece and uses an all-to-all.
//!
//! Parents follow the highest-label rule of [`crate::spmv`], so all variants
//! and all rank counts return the same tree.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bitvec::{Bitmap, BitmapCodec, DecodeError};
use crate::directory::{sieve_encode, CrossDirectory};
use crate::fabric::{estimate_time, run_ranks, CommStats, CommTag, Fabric, FabricError, LedgerEntry, Phase, RankError};
use crate::graphgen::{CsrMatrix, CsrPartition, EdgeList, GraphError, VertexId};
use crate::report::{frontier_table, LevelBytes, LevelRecord, PhaseTimes, RunReport, Totals};
use crate::spmv::{expand, expand_blocked, LevelState, NO_PARENT, UNREACHED};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fabric(#[from] FabricError),
    #[error("rank {rank} received a corrupt message from rank {from}: {source}")]
    Corrupt {
        rank: usize,
        from: usize,
        source: DecodeError,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl RankError for EngineError {
    fn is_abort(&self) -> bool {
        matches!(self, EngineError::Fabric(FabricError::Aborted(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    #[serde(rename = "BIT")]
    Bit,
    #[serde(rename = "WAH")]
    Wah,
    #[serde(rename = "DIR-WAH")]
    DirWah,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Bit, Variant::Wah, Variant::DirWah];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Bit => "bit",
            Variant::Wah => "wah",
            Variant::DirWah => "dir-wah",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bit" => Ok(Variant::Bit),
            "wah" => Ok(Variant::Wah),
            "dir-wah" | "dirwah" | "dir_wah" => Ok(Variant::DirWah),
            _ => Err(format!("unknown algorithm {s:?} (expected bit, wah or dir-wah)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsResult {
    pub source: VertexId,
    /// Parent of every vertex; [`NO_PARENT`] when unreached, the source
    /// itself for the source.
    pub parents: Vec<VertexId>,
    /// Depth of every vertex; [`UNREACHED`] when unreached.
    pub levels: Vec<u32>,
    /// Number of non-empty frontier levels.
    pub depth: u32,
}

impl BfsResult {
    pub fn visited_count(&self) -> usize {
        self.levels.iter().filter(|&&l| l != UNREACHED).count()
    }

    pub fn is_reached(&self, v: VertexId) -> bool {
        self.levels[v as usize] != UNREACHED
    }
}

/// Algorithm 1 style exchange: raw bitmaps over an all-gather.
pub fn bfs_baseline(
    parts: &[CsrPartition],
    fabric: &Fabric,
    source: VertexId,
) -> Result<(BfsResult, RunReport), EngineError> {
    run(parts, fabric, source, Exchange::Bit)
}

/// Compressed frontiers over an all-gather.
pub fn bfs_compressed(
    parts: &[CsrPartition],
    fabric: &Fabric,
    source: VertexId,
    codec: &dyn BitmapCodec,
) -> Result<(BfsResult, RunReport), EngineError> {
    run(parts, fabric, source, Exchange::Wah(codec))
}

/// Sieved, compressed pieces over an all-to-all. `dirs[i]` must be rank
/// `i`'s cross directory for the same partitioning.
pub fn bfs_sieve_compressed(
    parts: &[CsrPartition],
    fabric: &Fabric,
    source: VertexId,
    codec: &dyn BitmapCodec,
    dirs: &[CrossDirectory],
) -> Result<(BfsResult, RunReport), EngineError> {
    if dirs.len() != parts.len() || dirs.iter().enumerate().any(|(i, d)| d.rank() != i) {
        return Err(EngineError::Input(
            "cross directories do not match the partitions".into(),
        ));
    }
    for (d, part) in dirs.iter().zip(parts) {
        let ok = d.columns().len() == part.ranks() && d.columns().iter().all(|v| v.len() == part.local_rows());
        if !ok {
            return Err(EngineError::Input(
                "cross directories do not match the partitions".into(),
            ));
        }
    }
    run(parts, fabric, source, Exchange::DirWah(codec, dirs))
}

#[derive(Clone, Copy)]
enum Exchange<'a> {
    Bit,
    Wah(&'a dyn BitmapCodec),
    DirWah(&'a dyn BitmapCodec, &'a [CrossDirectory]),
}

impl Exchange<'_> {
    fn variant(&self) -> Variant {
        match self {
            Exchange::Bit => Variant::Bit,
            Exchange::Wah(_) => Variant::Wah,
            Exchange::DirWah(..) => Variant::DirWah,
        }
    }

    fn label(&self) -> String {
        match self {
            Exchange::Bit => "raw".into(),
            Exchange::Wah(c) | Exchange::DirWah(c, _) => c.label(),
        }
    }
}

/// What the frontier looks like to the next expansion.
enum Incoming {
    Global(Bitmap),
    Pieces(Vec<Bitmap>),
}

#[derive(Default, Clone, Copy)]
struct LevelTrace {
    times: PhaseTimes,
    shipped: u64,
    /// Baseline-equivalent bytes for this rank's shipments.
    raw_bytes: u64,
    wire_bytes: u64,
}

struct RankTrace {
    parents: Vec<VertexId>,
    levels: Vec<u32>,
    depth: u32,
    /// Indexed by level; entry 0 is unused.
    per_level: Vec<LevelTrace>,
}

fn check_inputs(parts: &[CsrPartition], fabric: &Fabric, source: VertexId) -> Result<usize, EngineError> {
    if parts.is_empty() {
        return Err(EngineError::Input("no partitions".into()));
    }
    if parts.len() != fabric.ranks() {
        return Err(EngineError::Input(format!(
            "{} partitions for a {}-rank fabric",
            parts.len(),
            fabric.ranks()
        )));
    }
    let layout = parts[0].layout();
    if parts
        .iter()
        .enumerate()
        .any(|(i, p)| p.rank() != i || p.layout() != layout)
    {
        return Err(EngineError::Input("partitions are not one consistent row split".into()));
    }
    let n = layout.n();
    if source as u128 >= n as u128 {
        return Err(EngineError::Input(format!(
            "source {source} out of range for {n} vertices"
        )));
    }
    Ok(n)
}

fn run(
    parts: &[CsrPartition],
    fabric: &Fabric,
    source: VertexId,
    exchange: Exchange<'_>,
) -> Result<(BfsResult, RunReport), EngineError> {
    let n = check_inputs(parts, fabric, source)?;
    let mark = fabric.ledger_len();
    let start = Instant::now();
    let traces = run_ranks(fabric, |rank| run_rank(&parts[rank], fabric, source, exchange))?;
    let wall = start.elapsed().as_secs_f64();
    let entries = fabric.ledger_since(mark);

    let depth = traces[0].depth;
    let mut parents = Vec::with_capacity(n);
    let mut levels = Vec::with_capacity(n);
    for t in &traces {
        if t.depth != depth {
            return Err(EngineError::Internal("ranks disagree on the depth".into()));
        }
        parents.extend_from_slice(&t.parents);
        levels.extend_from_slice(&t.levels);
    }
    let result = BfsResult {
        source,
        parents,
        levels,
        depth,
    };
    let report = assemble_report(&result, &traces, &entries, fabric, exchange, wall);
    Ok((result, report))
}

fn run_rank(
    part: &CsrPartition,
    fabric: &Fabric,
    source: VertexId,
    exchange: Exchange<'_>,
) -> Result<RankTrace, EngineError> {
    let rank = part.rank();
    let layout = *part.layout();
    let p = layout.ranks();
    let n = layout.n();
    let mut state = LevelState::new(part, source);
    let mut per_level = vec![LevelTrace::default()];

    let mut incoming = match exchange {
        Exchange::Bit | Exchange::Wah(_) => Incoming::Global(Bitmap::from_indices(n, [source as usize])),
        Exchange::DirWah(..) => {
            let (owner, local) = layout.locate(source);
            let mut pieces: Vec<Bitmap> = (0..p).map(|j| Bitmap::new(layout.len(j))).collect();
            pieces[owner].set(local);
            Incoming::Pieces(pieces)
        }
    };

    loop {
        let mut trace = LevelTrace::default();
        let t0 = Instant::now();
        let expansion = match &incoming {
            Incoming::Global(f) => expand(part, f, &state.visited),
            Incoming::Pieces(pieces) => expand_blocked(part, pieces, &state.visited),
        };
        state.apply(expansion);
        trace.times.traversing = t0.elapsed().as_secs_f64();
        let level = state.level;

        let t0 = Instant::now();
        let count = fabric.allreduce_sum(
            rank,
            CommTag::new(Phase::Reducing, level),
            state.frontier.popcount() as u64,
        )?;
        trace.times.reducing = t0.elapsed().as_secs_f64();
        if count == 0 {
            per_level.push(trace);
            break;
        }

        let tag = CommTag::new(Phase::Communication, level);
        let local_count = state.frontier.popcount() as u64;
        let raw_local = state.frontier.len().div_ceil(8) as u64;
        incoming = match exchange {
            Exchange::Bit => {
                trace.shipped = (p as u64 - 1) * local_count;
                let t0 = Instant::now();
                let all = fabric.allgatherv(rank, tag, state.frontier.to_bytes())?;
                trace.times.communication = t0.elapsed().as_secs_f64();
                let mut global = Bitmap::new(n);
                for (j, bytes) in all.iter().enumerate() {
                    let piece = Bitmap::from_bytes(layout.len(j), bytes).ok_or(EngineError::Corrupt {
                        rank,
                        from: j,
                        source: DecodeError::Length {
                            expected: layout.len(j).div_ceil(8) as u64,
                            found: bytes.len() as u64,
                        },
                    })?;
                    global.or_at(layout.range(j).start, &piece);
                }
                Incoming::Global(global)
            }
            Exchange::Wah(codec) => {
                trace.shipped = (p as u64 - 1) * local_count;
                let t0 = Instant::now();
                let msg = codec.encode_source(&state.frontier);
                let mut compress = t0.elapsed().as_secs_f64();
                trace.raw_bytes = raw_local;
                trace.wire_bytes = msg.len() as u64;
                let t0 = Instant::now();
                let all = fabric.allgatherv(rank, tag, msg)?;
                trace.times.communication = t0.elapsed().as_secs_f64();
                let t0 = Instant::now();
                let pieces = decode_pieces(codec, &all, rank, &layout, None)?;
                let mut global = Bitmap::new(n);
                for (j, piece) in pieces.iter().enumerate() {
                    global.or_at(layout.range(j).start, piece);
                }
                compress += t0.elapsed().as_secs_f64();
                trace.times.compression_sieve = compress;
                Incoming::Global(global)
            }
            Exchange::DirWah(codec, dirs) => {
                let dir = &dirs[rank];
                let t0 = Instant::now();
                let frontier = &state.frontier;
                let outgoing: Vec<Vec<u8>> = (0..p)
                    .into_par_iter()
                    .map(|j| {
                        if j == rank {
                            Vec::new()
                        } else {
                            sieve_encode(frontier, dir.column(j), codec)
                        }
                    })
                    .collect();
                let mut compress = t0.elapsed().as_secs_f64();
                trace.shipped = (0..p)
                    .filter(|&j| j != rank)
                    .map(|j| frontier.and(dir.column(j).bits()).popcount() as u64)
                    .sum();
                trace.raw_bytes = (p as u64 - 1) * raw_local;
                trace.wire_bytes = outgoing.iter().map(|m| m.len() as u64).sum();
                let t0 = Instant::now();
                let received = fabric.alltoallv(rank, tag, outgoing)?;
                trace.times.communication = t0.elapsed().as_secs_f64();
                let t0 = Instant::now();
                let pieces = decode_pieces(codec, &received, rank, &layout, Some(&state.frontier))?;
                compress += t0.elapsed().as_secs_f64();
                trace.times.compression_sieve = compress;
                Incoming::Pieces(pieces)
            }
        };
        per_level.push(trace);
    }

    Ok(RankTrace {
        parents: state.parents,
        levels: state.levels,
        depth: state.level,
        per_level,
    })
}

/// Decodes one message per source rank. With `own`, the local slot is not a
/// message and `own` is used instead.
fn decode_pieces(
    codec: &dyn BitmapCodec,
    messages: &[Vec<u8>],
    rank: usize,
    layout: &crate::graphgen::BlockLayout,
    own: Option<&Bitmap>,
) -> Result<Vec<Bitmap>, EngineError> {
    messages
        .par_iter()
        .enumerate()
        .map(|(j, msg)| {
            let piece = match own {
                Some(own) if j == rank => own.clone(),
                _ => codec
                    .decode(msg)
                    .map_err(|source| EngineError::Corrupt { rank, from: j, source })?,
            };
            if piece.len() != layout.len(j) {
                return Err(EngineError::Corrupt {
                    rank,
                    from: j,
                    source: DecodeError::Length {
                        expected: layout.len(j) as u64,
                        found: piece.len() as u64,
                    },
                });
            }
            Ok(piece)
        })
        .collect()
}

fn assemble_report(
    result: &BfsResult,
    traces: &[RankTrace],
    entries: &[LedgerEntry],
    fabric: &Fabric,
    exchange: Exchange<'_>,
    wall: f64,
) -> RunReport {
    let p = fabric.ranks();
    let cost = fabric.cost_model();
    let d = result.depth;
    let table = frontier_table(&result.levels, crate::bitvec::wah::DEFAULT_WORD_WIDTH);
    let compressed = !matches!(exchange, Exchange::Bit);

    let mut per_level = Vec::with_capacity(d as usize + 1);
    for row in &table {
        let k = row.level;
        let at = |phase: Phase| entries.iter().filter(move |e| e.level == k && e.phase == phase);
        let comm = CommStats::from_entries(p, at(Phase::Communication));
        let reduce = CommStats::from_entries(p, at(Phase::Reducing));
        let exchanged = k >= 1 && k < d;

        let mut wall_times = PhaseTimes::default();
        let (mut shipped, mut raw, mut wire) = (0, 0, 0);
        if k >= 1 {
            for t in traces {
                let lt = &t.per_level[k as usize];
                wall_times.max_assign(&lt.times);
                shipped += lt.shipped;
                raw += lt.raw_bytes;
                wire += lt.wire_bytes;
            }
        }
        let compression_ratio = (compressed && exchanged && wire > 0 && raw > 0).then(|| raw as f64 / wire as f64);

        per_level.push(LevelRecord {
            level: k,
            frontier_count: row.count,
            exchanged,
            shipped_vertices: shipped,
            bytes: LevelBytes {
                raw: row.raw,
                sparse: row.sparse,
                wah: row.wah,
                sent_total: comm.total_sent(),
                sent_payload: at(Phase::Communication).map(|e| e.payload_bytes).sum(),
                sent_preamble: at(Phase::Communication).map(|e| e.preamble_bytes).sum(),
                max_rank_sent: comm.volume(),
                reducing: reduce.total_sent(),
            },
            compression_ratio,
            phase_wall_s: wall_times,
            phase_sim_s: PhaseTimes {
                communication: estimate_time(&comm, &cost).max,
                reducing: estimate_time(&reduce, &cost).max,
                ..PhaseTimes::default()
            },
        });
    }

    let level_stats = CommStats::from_entries(p, entries.iter().filter(|e| e.phase == Phase::Communication));
    let reduce_stats = CommStats::from_entries(p, entries.iter().filter(|e| e.phase == Phase::Reducing));
    let init_stats = CommStats::from_entries(p, entries.iter().filter(|e| e.phase == Phase::Init));
    let all_stats = CommStats::from_entries(p, entries.iter().filter(|e| e.phase != Phase::Init));

    let mut report = RunReport {
        variant: exchange.variant(),
        codec: exchange.label(),
        ranks: p,
        n: result.levels.len() as u64,
        source: result.source,
        alpha: cost.alpha,
        beta: cost.beta,
        totals: Totals {
            d,
            visited: result.visited_count() as u64,
            level_bytes_total: level_stats.total_sent(),
            volume_max_rank: level_stats.volume(),
            per_rank_sent: level_stats.sent.clone(),
            reducing_bytes_total: reduce_stats.total_sent(),
            init_bytes_total: init_stats.total_sent(),
            shipped_vertices: per_level.iter().map(|l| l.shipped_vertices).sum(),
            c: None,
            c_prime: None,
            sim_time_s: estimate_time(&all_stats, &cost).max,
            wall_time_s: wall,
            m: None,
            teps: None,
        },
        per_level,
    };
    let mean = report.mean_inverse_ratio();
    match exchange {
        Exchange::Wah(_) => report.totals.c = mean,
        Exchange::DirWah(..) => report.totals.c_prime = mean,
        Exchange::Bit => {}
    }
    report
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape { parents: usize, levels: usize, n: usize },
    SourceOutOfRange(VertexId),
    SourceNotRoot { parent: VertexId, level: u32 },
    ExtraRoot(VertexId),
    MissingEdge { v: VertexId, parent: VertexId },
    UnreachedParent { v: VertexId, parent: VertexId },
    LevelMismatch { v: VertexId, level: u32, parent_level: u32 },
    LevelGap { u: VertexId, v: VertexId },
    CrossingEdge { visited: VertexId, unvisited: VertexId },
    StrayParent(VertexId),
    Depth { reported: u32, expected: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { parents, levels, n } => {
                write!(f, "{parents} parents and {levels} levels for {n} vertices")
            }
            Violation::SourceOutOfRange(s) => write!(f, "source {s} out of range"),
            Violation::SourceNotRoot { parent, level } => {
                write!(f, "source has parent {parent} and level {level}")
            }
            Violation::ExtraRoot(v) => write!(f, "vertex {v} is its own parent"),
            Violation::MissingEdge { v, parent } => write!(f, "tree edge {parent}-{v} is not in the graph"),
            Violation::UnreachedParent { v, parent } => {
                write!(f, "vertex {v} has unreached parent {parent}")
            }
            Violation::LevelMismatch { v, level, parent_level } => write!(
                f,
                "vertex {v} at level {level} but its parent is at level {parent_level}"
            ),
            Violation::LevelGap { u, v } => write!(f, "edge {u}-{v} spans more than one level"),
            Violation::CrossingEdge { visited, unvisited } => {
                write!(f, "visited {visited} has unvisited neighbor {unvisited}")
            }
            Violation::StrayParent(v) => write!(f, "unreached vertex {v} has a parent"),
            Violation::Depth { reported, expected } => {
                write!(f, "reported depth {reported}, levels imply {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} BFS tree violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(20) {
            write!(f, "\n  {v}")?;
        }
        if self.violations.len() > 20 {
            write!(f, "\n  ...")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub visited: u64,
    pub depth: u32,
    pub edges_checked: u64,
}

/// Graph500-style checks of a BFS tree against the graph it came from.
pub fn validate(result: &BfsResult, csr: &CsrMatrix) -> Result<ValidationReport, ValidationError> {
    const LIMIT: usize = 1000;
    let n = csr.n();
    let mut violations = Vec::new();
    if result.parents.len() != n || result.levels.len() != n {
        violations.push(Violation::Shape {
            parents: result.parents.len(),
            levels: result.levels.len(),
            n,
        });
        return Err(ValidationError { violations });
    }
    let s = result.source;
    if s as u128 >= n as u128 {
        violations.push(Violation::SourceOutOfRange(s));
        return Err(ValidationError { violations });
    }
    let (parents, levels) = (&result.parents, &result.levels);
    if parents[s as usize] != s || levels[s as usize] != 0 {
        violations.push(Violation::SourceNotRoot {
            parent: parents[s as usize],
            level: levels[s as usize],
        });
    }
    let mut max_level = 0;
    for v in 0..n {
        let vid = v as VertexId;
        let (parent, level) = (parents[v], levels[v]);
        if level == UNREACHED {
            if parent != NO_PARENT {
                violations.push(Violation::StrayParent(vid));
            }
            continue;
        }
        max_level = max_level.max(level);
        if vid == s {
            continue;
        }
        if parent == vid || level == 0 {
            violations.push(Violation::ExtraRoot(vid));
            continue;
        }
        if parent as u128 >= n as u128 || levels[parent as usize] == UNREACHED {
            violations.push(Violation::UnreachedParent { v: vid, parent });
            continue;
        }
        if !csr.has_edge(parent, vid) {
            violations.push(Violation::MissingEdge { v: vid, parent });
        }
        let parent_level = levels[parent as usize];
        if parent_level.checked_add(1) != Some(level) {
            violations.push(Violation::LevelMismatch {
                v: vid,
                level,
                parent_level,
            });
        }
        if violations.len() >= LIMIT {
            return Err(ValidationError { violations });
        }
    }
    let mut edges_checked = 0u64;
    for u in 0..n {
        for &v in csr.row(u) {
            edges_checked += 1;
            let (lu, lv) = (levels[u], levels[v as usize]);
            match (lu == UNREACHED, lv == UNREACHED) {
                (false, false) if lu.abs_diff(lv) > 1 => violations.push(Violation::LevelGap { u: u as VertexId, v }),
                (false, true) => violations.push(Violation::CrossingEdge {
                    visited: u as VertexId,
                    unvisited: v,
                }),
                _ => {}
            }
        }
        if violations.len() >= LIMIT {
            break;
        }
    }
    if result.depth != max_level + 1 {
        violations.push(Violation::Depth {
            reported: result.depth,
            expected: max_level + 1,
        });
    }
    if violations.is_empty() {
        Ok(ValidationReport {
            visited: result.visited_count() as u64,
            depth: result.depth,
            edges_checked,
        })
    } else {
        Err(ValidationError { violations })
    }
}

/// Traversed edges per second.
pub fn compute_teps(m: u64, seconds: f64) -> Result<f64, EngineError> {
    if !seconds.is_finite() || seconds <= 0.0 {
        return Err(EngineError::Input(format!("TEPS needs a positive time, got {seconds}")));
    }
    Ok(m as f64 / seconds)
}

/// Input edge tuples inside the traversed component, counting duplicates
/// and self-loops.
pub fn traversed_edge_count(edges: &EdgeList, result: &BfsResult) -> u64 {
    edges
        .edges()
        .iter()
        .filter(|&&(u, v)| result.is_reached(u) || result.is_reached(v))
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitvec::Codec;
    use crate::directory::init_cross_directories;
    use crate::fixtures::eight_vertex_csr;
    use crate::graphgen::partition_rows;

    fn all_variants(csr: &CsrMatrix, p: usize, s: VertexId) -> Vec<(BfsResult, RunReport)> {
        let parts = partition_rows(csr, p).unwrap();
        let fabric = Fabric::new(p);
        let codec = Codec::default();
        let dirs = init_cross_directories(&parts, &fabric).unwrap();
        vec![
            bfs_baseline(&parts, &fabric, s).unwrap(),
            bfs_compressed(&parts, &fabric, s, &codec).unwrap(),
            bfs_sieve_compressed(&parts, &fabric, s, &codec, &dirs).unwrap(),
        ]
    }

    #[test]
    fn example_levels_and_parents() {
        for p in 1..=8 {
            for (result, report) in all_variants(&eight_vertex_csr(), p, 0) {
                assert_eq!(result.levels, vec![0, 3, 1, 1, 2, 1, 2, 2]);
                assert_eq!(result.parents, vec![0, 7, 0, 0, 2, 0, 3, 5]);
                assert_eq!(result.depth, 4);
                assert_eq!(report.per_level.len(), 5);
                validate(&result, &eight_vertex_csr()).unwrap();
            }
        }
    }

    #[test]
    fn singleton_graph() {
        let csr = CsrMatrix::from_rows(&[vec![]]).unwrap();
        for (result, report) in all_variants(&csr, 1, 0) {
            assert_eq!(result.depth, 1);
            assert_eq!(result.parents, vec![0]);
            assert_eq!(report.totals.level_bytes_total, 0);
        }
    }

    #[test]
    fn sieve_drops_vertex_two_toward_rank_three() {
        let parts = partition_rows(&eight_vertex_csr(), 4).unwrap();
        let dirs = init_cross_directories(&parts, &Fabric::new(4)).unwrap();
        let f1: Bitmap = "11".parse().unwrap();
        assert_eq!(crate::directory::sieve(&f1, dirs[1].column(3)).to_string(), "01");
    }

    #[test]
    fn bad_inputs() {
        let csr = eight_vertex_csr();
        let parts = partition_rows(&csr, 2).unwrap();
        assert!(matches!(
            bfs_baseline(&parts, &Fabric::new(2), 8),
            Err(EngineError::Input(_))
        ));
        assert!(matches!(
            bfs_baseline(&parts, &Fabric::new(3), 0),
            Err(EngineError::Input(_))
        ));
        let other = init_cross_directories(&partition_rows(&csr, 2).unwrap()[..1], &Fabric::new(2));
        assert!(other.is_err());
    }

    #[test]
    fn tampered_parent_fails() {
        let csr = eight_vertex_csr();
        let (mut result, _) = bfs_baseline(&partition_rows(&csr, 1).unwrap(), &Fabric::new(1), 0).unwrap();
        result.parents[4] = 1;
        let err = validate(&result, &csr).unwrap_err();
        assert!(err.violations.contains(&Violation::MissingEdge { v: 4, parent: 1 }));
    }

    #[test]
    fn disconnected_vertices_stay_unreached() {
        let csr = CsrMatrix::from_rows(&[vec![1], vec![0], vec![3], vec![2]]).unwrap();
        for (result, _) in all_variants(&csr, 2, 0) {
            assert_eq!(result.levels, vec![0, 1, UNREACHED, UNREACHED]);
            assert_eq!(result.parents[2], NO_PARENT);
            validate(&result, &csr).unwrap();
            let mut bad = result.clone();
            bad.levels[2] = 1;
            bad.parents[2] = 0;
            assert!(validate(&bad, &csr).is_err());
        }
    }

    #[test]
    fn raw_codec_adds_only_headers() {
        let csr = eight_vertex_csr();
        let parts = partition_rows(&csr, 4).unwrap();
        let fabric = Fabric::new(4);
        let (_, bit) = bfs_baseline(&parts, &fabric, 0).unwrap();
        let (_, raw) = bfs_compressed(&parts, &fabric, 0, &Codec::Raw).unwrap();
        for (b, r) in bit.per_level.iter().zip(&raw.per_level) {
            let headers = if b.exchanged { 4 * 3 * 9 } else { 0 };
            assert_eq!(r.bytes.sent_total, b.bytes.sent_total + headers);
        }
    }

    #[test]
    fn report_totals_are_consistent() {
        let csr = eight_vertex_csr();
        for (_, report) in all_variants(&csr, 4, 0) {
            let sum: u64 = report.per_level.iter().map(|l| l.bytes.sent_total).sum();
            assert_eq!(sum, report.totals.level_bytes_total);
            assert_eq!(report.totals.per_rank_sent.iter().sum::<u64>(), sum);
            assert_eq!(
                report.totals.volume_max_rank,
                *report.totals.per_rank_sent.iter().max().unwrap()
            );
            assert_eq!(report.totals.visited, 8);
            assert!(!report.per_level[0].exchanged && !report.per_level[4].exchanged);
        }
    }

    #[test]
    fn teps() {
        assert_eq!(compute_teps(16, 2.0).unwrap(), 8.0);
        assert_eq!(compute_teps(0, 1.0).unwrap(), 0.0);
        assert!(compute_teps(1, 0.0).is_err());
        assert!(compute_teps(1, -1.0).is_err());
    }

    #[test]
    fn traversed_edges_count_tuples() {
        let edges = EdgeList::new(4, vec![(0, 1), (1, 0), (0, 0), (2, 3)]).unwrap();
        let result = BfsResult {
            source: 0,
            parents: vec![0, 0, NO_PARENT, NO_PARENT],
            levels: vec![0, 1, UNREACHED, UNREACHED],
            depth: 2,
        };
        assert_eq!(traversed_edge_count(&edges, &result), 3);
    }
}
