//! Per-run measurements.
//!
//! A report has one row per BFS level `0..=d`. Row 0 is the source, rows
//! `1..d` are the levels whose frontier was exchanged, and row `d` is the
//! empty level that ended the loop (it still pays for the termination
//! reduction).
//!
//! Compression ratios compare what the baseline would have put on the wire
//! for the same shipments, `ceil(rows/8)` bytes per destination, against the
//! encoded message bytes actually sent. `C` and `C'` average `1/C_k` over the
//! exchanged levels.

use serde::Serialize;

use crate::bitvec::{raw_payload_bytes, sparse_payload_bytes, wah_payload_bytes, Bitmap};
use crate::engine::Variant;
use crate::spmv::UNREACHED;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub traversing: f64,
    pub reducing: f64,
    pub communication: f64,
    pub compression_sieve: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.traversing + self.reducing + self.communication + self.compression_sieve
    }

    pub(crate) fn max_assign(&mut self, other: &PhaseTimes) {
        self.traversing = self.traversing.max(other.traversing);
        self.reducing = self.reducing.max(other.reducing);
        self.communication = self.communication.max(other.communication);
        self.compression_sieve = self.compression_sieve.max(other.compression_sieve);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LevelBytes {
    /// Global frontier as a bitmap, `ceil(n/8)`.
    pub raw: u64,
    /// Global frontier as 64-bit vertex ids.
    pub sparse: u64,
    /// Global frontier as 64-bit WAH words, active word included.
    pub wah: u64,
    /// Frontier-exchange bytes sent, summed over ranks, preambles included.
    pub sent_total: u64,
    pub sent_payload: u64,
    pub sent_preamble: u64,
    /// Largest per-rank share of `sent_total`.
    pub max_rank_sent: u64,
    /// Termination reduction bytes, summed over ranks.
    pub reducing: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: u32,
    pub frontier_count: u64,
    pub exchanged: bool,
    /// Frontier vertices put on the wire, counted once per destination.
    pub shipped_vertices: u64,
    pub bytes: LevelBytes,
    /// `C_k`, for compressed variants on exchanged levels.
    pub compression_ratio: Option<f64>,
    /// Slowest rank per phase.
    pub phase_wall_s: PhaseTimes,
    /// Cost-model estimate, slowest rank per phase.
    pub phase_sim_s: PhaseTimes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    /// Non-empty frontier levels.
    pub d: u32,
    pub visited: u64,
    pub level_bytes_total: u64,
    /// `𝒱`, the largest per-rank frontier-exchange byte count.
    pub volume_max_rank: u64,
    pub per_rank_sent: Vec<u64>,
    pub reducing_bytes_total: u64,
    /// Directory exchange; zero unless the run includes it.
    pub init_bytes_total: u64,
    pub shipped_vertices: u64,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "C_prime")]
    pub c_prime: Option<f64>,
    pub sim_time_s: f64,
    pub wall_time_s: f64,
    /// Input edge tuples inside the traversed component.
    pub m: Option<u64>,
    pub teps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub variant: Variant,
    pub codec: String,
    pub ranks: usize,
    pub n: u64,
    pub source: u64,
    pub alpha: f64,
    pub beta: f64,
    pub per_level: Vec<LevelRecord>,
    pub totals: Totals,
}

impl RunReport {
    /// `(1/d') Σ 1/C_k` over levels that report a ratio.
    pub fn mean_inverse_ratio(&self) -> Option<f64> {
        let ratios: Vec<f64> = self.per_level.iter().filter_map(|l| l.compression_ratio).collect();
        if ratios.is_empty() {
            None
        } else {
            Some(ratios.iter().map(|c| 1.0 / c).sum::<f64>() / ratios.len() as f64)
        }
    }

    /// Zeroes wall-clock fields so that repeated runs compare equal.
    pub fn strip_wall_times(&mut self) {
        for l in &mut self.per_level {
            l.phase_wall_s = PhaseTimes::default();
        }
        self.totals.wall_time_s = 0.0;
        self.totals.teps = None;
    }
}

/// One row of the frontier-size table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrontierRow {
    pub level: u32,
    pub count: u64,
    pub raw: u64,
    pub sparse: u64,
    pub wah: u64,
}

/// Representation sizes of every level's global frontier, recomputed from a
/// per-vertex level array. Levels run `0..=d`, the last being empty.
pub fn frontier_table(levels: &[u32], word_width: u8) -> Vec<FrontierRow> {
    let n = levels.len();
    let depth = levels
        .iter()
        .filter(|&&l| l != UNREACHED)
        .max()
        .map_or(0, |&l| l as usize + 1);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (v, &l) in levels.iter().enumerate() {
        if l != UNREACHED {
            buckets[l as usize].push(v);
        }
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(level, vs)| {
            let count = vs.len() as u64;
            let frontier = Bitmap::from_indices(n, vs);
            FrontierRow {
                level: level as u32,
                count,
                raw: raw_payload_bytes(n as u64),
                sparse: sparse_payload_bytes(count),
                wah: wah_payload_bytes(&frontier, word_width),
            }
        })
        .collect()
}

/// Human-readable size with 1024-based units and one decimal, e.g. `196.9MB`.
pub fn format_bytes(bytes: u64) -> String {
    const UNITS: [&str; 6] = ["B", "KB", "MB", "GB", "TB", "PB"];
    if bytes < 1024 {
        return format!("{bytes}B");
    }
    let mut value = bytes as f64;
    let mut unit = 0;
    while value >= 1024.0 && unit + 1 < UNITS.len() {
        value /= 1024.0;
        unit += 1;
    }
    format!("{value:.1}{}", UNITS[unit])
}
