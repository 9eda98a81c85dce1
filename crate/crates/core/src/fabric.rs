//! In-process stand-in for a message-passing runtime.
//!
//! A [`Fabric`] connects `p` ranks, each driven by its own thread. Every
//! collective is one bulk-synchronous *epoch*: all `p` ranks must deposit
//! their contribution before any of them receives a result, and the next
//! epoch cannot start until every rank has collected its result.
//!
//! Each completed epoch appends one [`LedgerEntry`] per rank, in rank order,
//! to an append-only ledger. Senders are charged for fan-out: an all-gather
//! contribution of `n` bytes costs `(p - 1) * n`, the same bandwidth term any
//! all-gather algorithm pays. Variable-size collectives additionally charge
//! an 8-byte size preamble per peer. Self-delivery is free.

use std::panic::AssertUnwindSafe;
use std::sync::{Condvar, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// Bytes of size metadata charged per peer for variable-size collectives.
pub const PREAMBLE_BYTES: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FabricError {
    #[error("rank {rank} out of range for {p} ranks")]
    RankOutOfRange { rank: usize, p: usize },
    #[error("epoch {epoch}: rank {rank} called {found:?} while the epoch is {expected:?}")]
    EpochMismatch {
        epoch: u64,
        rank: usize,
        expected: (Collective, CommTag),
        found: (Collective, CommTag),
    },
    #[error("epoch {epoch}: only {arrived} of {expected} ranks arrived before the timeout")]
    Deadlock {
        epoch: u64,
        arrived: usize,
        expected: usize,
    },
    #[error("alltoallv from rank {rank} carries {found} payloads, expected {expected}")]
    PayloadCount { rank: usize, expected: usize, found: usize },
    #[error("fabric aborted: {0}")]
    Aborted(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// One-off setup traffic, such as the directory exchange.
    Init,
    /// Per-level frontier exchange.
    Communication,
    /// Per-level termination reduction.
    Reducing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Collective {
    Allgatherv,
    Alltoallv,
    AllreduceSum,
}

/// Ledger label attached to a collective call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CommTag {
    pub phase: Phase,
    pub level: u32,
}

impl CommTag {
    pub fn new(phase: Phase, level: u32) -> Self {
        CommTag { phase, level }
    }
}

/// What one rank was charged in one epoch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub epoch: u64,
    pub collective: Collective,
    pub phase: Phase,
    pub level: u32,
    pub rank: usize,
    pub payload_bytes: u64,
    pub preamble_bytes: u64,
    /// Logical peer messages sent.
    pub messages: u64,
    pub received_bytes: u64,
}

impl LedgerEntry {
    pub fn sent_bytes(&self) -> u64 {
        self.payload_bytes + self.preamble_bytes
    }
}

/// α + nβ message cost model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostModelParams {
    /// Seconds per message.
    pub alpha: f64,
    /// Seconds per byte.
    pub beta: f64,
}

impl CostModelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, String> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(format!("cost model needs finite alpha, beta >= 0, got {alpha}, {beta}"));
        }
        Ok(CostModelParams { alpha, beta })
    }

    /// Time for one message of `bytes` bytes.
    pub fn message_time(&self, bytes: u64) -> f64 {
        self.alpha + self.beta * bytes as f64
    }
}

/// Per-rank totals aggregated from ledger entries.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CommStats {
    pub sent: Vec<u64>,
    pub messages: Vec<u64>,
    pub received: Vec<u64>,
}

impl CommStats {
    pub fn from_entries<'a, I>(p: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = &'a LedgerEntry>,
    {
        let mut stats = CommStats {
            sent: vec![0; p],
            messages: vec![0; p],
            received: vec![0; p],
        };
        for e in entries {
            stats.sent[e.rank] += e.sent_bytes();
            stats.messages[e.rank] += e.messages;
            stats.received[e.rank] += e.received_bytes;
        }
        stats
    }

    /// Communication volume: the largest per-rank sent byte count.
    pub fn volume(&self) -> u64 {
        self.sent.iter().copied().max().unwrap_or(0)
    }

    pub fn total_sent(&self) -> u64 {
        self.sent.iter().sum()
    }

    pub fn total_received(&self) -> u64 {
        self.received.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeEstimate {
    pub per_rank: Vec<f64>,
    /// Slowest rank.
    pub max: f64,
}

/// Per rank, `messages * α + bytes * β`; the algorithm estimate is the
/// slowest rank.
pub fn estimate_time(stats: &CommStats, params: &CostModelParams) -> TimeEstimate {
    let per_rank: Vec<f64> = stats
        .sent
        .iter()
        .zip(&stats.messages)
        .map(|(&bytes, &msgs)| msgs as f64 * params.alpha + bytes as f64 * params.beta)
        .collect();
    let max = per_rank.iter().copied().fold(0.0, f64::max);
    TimeEstimate { per_rank, max }
}

enum Deposit {
    Gather(Vec<u8>),
    Scatter(Vec<Vec<u8>>),
    Value(u64),
}

enum Outcome {
    Payloads(Vec<Vec<u8>>),
    Value(u64),
}

struct State {
    epoch: u64,
    collecting: bool,
    current: Option<(Collective, CommTag)>,
    deposits: Vec<Option<Deposit>>,
    results: Vec<Option<Outcome>>,
    arrived: usize,
    departed: usize,
    aborted: Option<String>,
}

pub struct Fabric {
    p: usize,
    timeout: Duration,
    cost: CostModelParams,
    state: Mutex<State>,
    cv: Condvar,
    ledger: Mutex<Vec<LedgerEntry>>,
}

impl std::fmt::Debug for Fabric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fabric")
            .field("p", &self.p)
            .field("timeout", &self.timeout)
            .field("cost", &self.cost)
            .finish_non_exhaustive()
    }
}

impl Fabric {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1, "a fabric needs at least one rank");
        Fabric {
            p,
            timeout: DEFAULT_TIMEOUT,
            cost: CostModelParams::default(),
            state: Mutex::new(State {
                epoch: 0,
                collecting: true,
                current: None,
                deposits: (0..p).map(|_| None).collect(),
                results: (0..p).map(|_| None).collect(),
                arrived: 0,
                departed: 0,
                aborted: None,
            }),
            cv: Condvar::new(),
            ledger: Mutex::new(Vec::new()),
        }
    }

    /// How long a rank waits for its peers before reporting a deadlock.
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_cost_model(mut self, cost: CostModelParams) -> Self {
        self.cost = cost;
        self
    }

    pub fn ranks(&self) -> usize {
        self.p
    }

    pub fn cost_model(&self) -> CostModelParams {
        self.cost
    }

    /// Completed epochs so far.
    pub fn epochs(&self) -> u64 {
        self.lock().epoch
    }

    pub fn ledger(&self) -> Vec<LedgerEntry> {
        self.ledger.lock().expect("ledger poisoned").clone()
    }

    pub fn ledger_len(&self) -> usize {
        self.ledger.lock().expect("ledger poisoned").len()
    }

    /// Entries appended after the first `mark` entries.
    pub fn ledger_since(&self, mark: usize) -> Vec<LedgerEntry> {
        self.ledger.lock().expect("ledger poisoned")[mark..].to_vec()
    }

    /// Fails every pending and future collective.
    pub fn abort(&self, reason: &str) {
        let mut st = self.lock();
        if st.aborted.is_none() {
            st.aborted = Some(reason.to_string());
        }
        self.cv.notify_all();
    }

    pub fn is_aborted(&self) -> bool {
        self.lock().aborted.is_some()
    }

    /// Every rank contributes one payload; every rank receives all `p`
    /// payloads in rank order.
    pub fn allgatherv(&self, rank: usize, tag: CommTag, payload: Vec<u8>) -> Result<Vec<Vec<u8>>, FabricError> {
        match self.collective(rank, Collective::Allgatherv, tag, Deposit::Gather(payload))? {
            Outcome::Payloads(p) => Ok(p),
            Outcome::Value(_) => unreachable!("allgatherv yields payloads"),
        }
    }

    /// `payloads[j]` goes to rank `j`; the result holds one payload from
    /// each source rank, in rank order.
    pub fn alltoallv(&self, rank: usize, tag: CommTag, payloads: Vec<Vec<u8>>) -> Result<Vec<Vec<u8>>, FabricError> {
        if payloads.len() != self.p {
            let err = FabricError::PayloadCount {
                rank,
                expected: self.p,
                found: payloads.len(),
            };
            self.abort(&err.to_string());
            return Err(err);
        }
        match self.collective(rank, Collective::Alltoallv, tag, Deposit::Scatter(payloads))? {
            Outcome::Payloads(p) => Ok(p),
            Outcome::Value(_) => unreachable!("alltoallv yields payloads"),
        }
    }

    /// Sum of every rank's `value`, delivered to all ranks.
    pub fn allreduce_sum(&self, rank: usize, tag: CommTag, value: u64) -> Result<u64, FabricError> {
        match self.collective(rank, Collective::AllreduceSum, tag, Deposit::Value(value))? {
            Outcome::Value(v) => Ok(v),
            Outcome::Payloads(_) => unreachable!("allreduce yields a value"),
        }
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().expect("fabric state poisoned")
    }

    fn collective(
        &self,
        rank: usize,
        kind: Collective,
        tag: CommTag,
        deposit: Deposit,
    ) -> Result<Outcome, FabricError> {
        if rank >= self.p {
            return Err(FabricError::RankOutOfRange { rank, p: self.p });
        }
        let deadline = Instant::now() + self.timeout;
        let mut st = self.lock();

        // Wait for the previous epoch to drain.
        st = self.wait(st, deadline, |s| !s.collecting)?;

        let epoch = st.epoch;
        match st.current {
            None => st.current = Some((kind, tag)),
            Some(expected) if expected != (kind, tag) => {
                let err = FabricError::EpochMismatch {
                    epoch,
                    rank,
                    expected,
                    found: (kind, tag),
                };
                st.aborted = Some(err.to_string());
                self.cv.notify_all();
                return Err(err);
            }
            Some(_) => {}
        }
        assert!(st.deposits[rank].is_none(), "rank {rank} entered epoch {epoch} twice");
        st.deposits[rank] = Some(deposit);
        st.arrived += 1;

        if st.arrived == self.p {
            self.complete(&mut st, kind, tag);
            self.cv.notify_all();
        } else {
            st = self.wait(st, deadline, |s| s.collecting)?;
        }

        let outcome = st.results[rank].take().expect("result present after epoch completes");
        st.departed += 1;
        if st.departed == self.p {
            st.epoch += 1;
            st.collecting = true;
            st.current = None;
            st.arrived = 0;
            st.departed = 0;
            self.cv.notify_all();
        }
        Ok(outcome)
    }

    /// Blocks while `blocked` holds, failing on abort or timeout.
    fn wait<'a>(
        &self,
        mut st: MutexGuard<'a, State>,
        deadline: Instant,
        blocked: impl Fn(&State) -> bool,
    ) -> Result<MutexGuard<'a, State>, FabricError> {
        loop {
            if let Some(reason) = &st.aborted {
                return Err(FabricError::Aborted(reason.clone()));
            }
            if !blocked(&st) {
                return Ok(st);
            }
            let now = Instant::now();
            if now >= deadline {
                let err = FabricError::Deadlock {
                    epoch: st.epoch,
                    arrived: st.arrived,
                    expected: self.p,
                };
                st.aborted = Some(err.to_string());
                self.cv.notify_all();
                return Err(err);
            }
            st = self
                .cv
                .wait_timeout(st, deadline - now)
                .expect("fabric state poisoned")
                .0;
        }
    }

    fn complete(&self, st: &mut State, kind: Collective, tag: CommTag) {
        let p = self.p;
        let peers = (p - 1) as u64;
        let deposits: Vec<Deposit> = st
            .deposits
            .iter_mut()
            .map(|d| d.take().expect("every rank deposited"))
            .collect();
        let mut entries: Vec<LedgerEntry> = (0..p)
            .map(|rank| LedgerEntry {
                epoch: st.epoch,
                collective: kind,
                phase: tag.phase,
                level: tag.level,
                rank,
                payload_bytes: 0,
                preamble_bytes: 0,
                messages: peers,
                received_bytes: 0,
            })
            .collect();

        match kind {
            Collective::Allgatherv => {
                let payloads: Vec<Vec<u8>> = deposits
                    .into_iter()
                    .map(|d| match d {
                        Deposit::Gather(b) => b,
                        _ => unreachable!("epoch kind checked on entry"),
                    })
                    .collect();
                let total: u64 = payloads.iter().map(|b| b.len() as u64).sum();
                for (i, e) in entries.iter_mut().enumerate() {
                    let own = payloads[i].len() as u64;
                    e.payload_bytes = peers * own;
                    e.preamble_bytes = peers * PREAMBLE_BYTES;
                    e.received_bytes = (total - own) + peers * PREAMBLE_BYTES;
                }
                for slot in st.results.iter_mut() {
                    *slot = Some(Outcome::Payloads(payloads.clone()));
                }
            }
            Collective::Alltoallv => {
                let mut matrix: Vec<Vec<Vec<u8>>> = deposits
                    .into_iter()
                    .map(|d| match d {
                        Deposit::Scatter(m) => m,
                        _ => unreachable!("epoch kind checked on entry"),
                    })
                    .collect();
                for i in 0..p {
                    let e = &mut entries[i];
                    e.payload_bytes = (0..p).filter(|&j| j != i).map(|j| matrix[i][j].len() as u64).sum();
                    e.preamble_bytes = peers * PREAMBLE_BYTES;
                    e.received_bytes = (0..p)
                        .filter(|&j| j != i)
                        .map(|j| matrix[j][i].len() as u64)
                        .sum::<u64>()
                        + peers * PREAMBLE_BYTES;
                }
                for dest in 0..p {
                    let column = matrix.iter_mut().map(|row| std::mem::take(&mut row[dest])).collect();
                    st.results[dest] = Some(Outcome::Payloads(column));
                }
            }
            Collective::AllreduceSum => {
                let sum = deposits
                    .into_iter()
                    .map(|d| match d {
                        Deposit::Value(v) => v,
                        _ => unreachable!("epoch kind checked on entry"),
                    })
                    .fold(0u64, u64::saturating_add);
                for e in entries.iter_mut() {
                    e.payload_bytes = peers * 8;
                    e.received_bytes = peers * 8;
                }
                for slot in st.results.iter_mut() {
                    *slot = Some(Outcome::Value(sum));
                }
            }
        }
        if p == 1 {
            entries[0].messages = 0;
        }
        st.collecting = false;
        self.ledger.lock().expect("ledger poisoned").extend(entries);
    }
}

/// Error type of a per-rank worker passed to [`run_ranks`].
pub trait RankError: From<FabricError> + Send {
    /// True when the error only reports that another rank aborted.
    fn is_abort(&self) -> bool;
}

impl RankError for FabricError {
    fn is_abort(&self) -> bool {
        matches!(self, FabricError::Aborted(_))
    }
}

/// Runs `f(rank)` on one thread per rank and collects results in rank order.
///
/// A failing rank aborts the fabric so its peers do not wait for the
/// timeout. The returned error is the lowest-ranked one that is not just a
/// consequence of the abort.
pub fn run_ranks<T, E, F>(fabric: &Fabric, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: RankError,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    let results: Vec<Result<T, E>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..fabric.ranks())
            .map(|rank| {
                let f = &f;
                s.spawn(move || {
                    let out = match std::panic::catch_unwind(AssertUnwindSafe(|| f(rank))) {
                        Ok(out) => out,
                        Err(panic) => {
                            fabric.abort(&format!("rank {rank} panicked"));
                            std::panic::resume_unwind(panic)
                        }
                    };
                    if let Err(e) = &out {
                        if !e.is_abort() {
                            fabric.abort(&format!("rank {rank} failed"));
                        }
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|panic| std::panic::resume_unwind(panic)))
            .collect()
    });
    let mut first_abort = None;
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(e) if e.is_abort() => {
                first_abort.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    match first_abort {
        Some(e) => Err(e),
        None => Ok(values),
    }
}
