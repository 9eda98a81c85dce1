//! Kronecker graph generation, CSR construction and block-row partitioning.

mod csr;
mod edgelist;
mod kronecker;
mod partition;
pub mod rng;

use thiserror::Error;

pub use csr::{build_csr, build_csr_from_pairs, CsrMatrix};
pub use edgelist::{EdgeList, EDGE_LIST_MAGIC};
pub use kronecker::{generate_kronecker, GraphConfig, GRAPH500_INITIATOR, MAX_SCALE};
pub use partition::{partition_rows, BlockLayout, CsrPartition, SubBlock};

/// Global vertex id.
pub type VertexId = u64;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("vertex {id} out of bounds for {n} vertices")]
    Bounds { id: u64, n: u64 },
    #[error("rank {rank} out of range for {p} ranks")]
    Rank { rank: usize, p: usize },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
