use super::rng::SplitMix64;
use super::{EdgeList, GraphError, VertexId};

/// Largest supported scale; keeps vertex ids well inside 64 bits.
pub const MAX_SCALE: u32 = 40;

/// Graph500 initiator probabilities `(a, b, c, d)`.
pub const GRAPH500_INITIATOR: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Parameters of a Kronecker (R-MAT) graph: `2^scale` vertices and
/// `edgefactor * 2^scale` edge tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConfig {
    pub scale: u32,
    pub edgefactor: u64,
    pub seed: u64,
    pub initiator: [f64; 4],
    /// Relabel vertices with a seeded random permutation after generation.
    pub permute: bool,
}

impl GraphConfig {
    pub fn new(scale: u32, edgefactor: u64, seed: u64) -> Self {
        GraphConfig {
            scale,
            edgefactor,
            seed,
            initiator: GRAPH500_INITIATOR,
            permute: false,
        }
    }

    pub fn with_initiator(mut self, initiator: [f64; 4]) -> Self {
        self.initiator = initiator;
        self
    }

    pub fn with_permutation(mut self, permute: bool) -> Self {
        self.permute = permute;
        self
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.scale < 1 {
            return Err(GraphError::Config("scale must be at least 1".into()));
        }
        if self.edgefactor < 1 {
            return Err(GraphError::Config("edgefactor must be at least 1".into()));
        }
        if self.initiator.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(GraphError::Config(format!(
                "initiator probabilities {:?} outside [0, 1]",
                self.initiator
            )));
        }
        let sum: f64 = self.initiator.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(GraphError::Config(format!(
                "initiator probabilities sum to {sum}, expected 1"
            )));
        }
        if self.scale > MAX_SCALE {
            return Err(GraphError::Capacity(format!(
                "scale {} exceeds maximum {MAX_SCALE}",
                self.scale
            )));
        }
        self.edge_count()?;
        Ok(())
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.scale
    }

    /// `edgefactor * 2^scale`, or a capacity error when it overflows.
    pub fn edge_count(&self) -> Result<u64, GraphError> {
        let m = self
            .edgefactor
            .checked_mul(self.vertex_count())
            .ok_or_else(|| GraphError::Capacity("edge count overflows 64 bits".into()))?;
        m.checked_mul(self.scale as u64)
            .ok_or_else(|| GraphError::Capacity("random stream counter overflows".into()))?;
        if m > isize::MAX as u64 / 16 {
            return Err(GraphError::Capacity(format!("{m} edge tuples do not fit in memory")));
        }
        Ok(m)
    }
}

/// Generates `edgefactor * 2^scale` edge tuples.
///
/// Edge `e` descends `scale` levels of the initiator matrix. At level `k`
/// (most significant bit first) it draws `u = unit_at(e * scale + k)` from
/// the counter-based SplitMix64 stream seeded with `cfg.seed` and picks
/// quadrant `(0,0)` if `u < a`, `(0,1)` if `u < a + b`, `(1,0)` if
/// `u < a + b + c`, else `(1,1)`, where the first coordinate is the source
/// bit. Duplicates and self-loops are kept.
pub fn generate_kronecker(cfg: &GraphConfig) -> Result<EdgeList, GraphError> {
    cfg.validate()?;
    let m = cfg.edge_count()?;
    let scale = cfg.scale as u64;
    let rng = SplitMix64::new(cfg.seed);
    let [a, b, c, _] = cfg.initiator;
    let (ab, abc) = (a + b, a + b + c);

    let mut edges = Vec::with_capacity(m as usize);
    for e in 0..m {
        let (mut u, mut v) = (0 as VertexId, 0 as VertexId);
        for k in 0..scale {
            let r = rng.unit_at(e * scale + k);
            let (ub, vb) = if r < a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            u = u << 1 | ub;
            v = v << 1 | vb;
        }
        edges.push((u, v));
    }

    let n = cfg.vertex_count();
    if cfg.permute {
        let perm = permutation(n, rng.derive(0x7065_726d));
        for (u, v) in &mut edges {
            *u = perm[*u as usize];
            *v = perm[*v as usize];
        }
    }
    EdgeList::new(n, edges)
}

/// Fisher-Yates shuffle of `0..n`; swap `i` uses output `i` of `rng`.
fn permutation(n: u64, rng: SplitMix64) -> Vec<VertexId> {
    let mut perm: Vec<VertexId> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below_at(i, i + 1);
        perm.swap(i as usize, j as usize);
    }
    perm
}
