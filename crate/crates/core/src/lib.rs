//! Distributed breadth-first search with compressed and sieved frontier
//! exchange, run over an in-process simulation of message-passing ranks.
//!
//! Three traversal variants share one level-synchronous engine:
//!
//! * **BIT** exchanges each rank's raw frontier bitmap with an all-gather.
//! * **WAH** compresses those bitmaps (word-aligned hybrid by default)
//!   before the all-gather.
//! * **DIR-WAH** first masks each outgoing frontier with a per-destination
//!   directory vector that marks the vertices the destination can actually
//!   use, then compresses and exchanges the pieces with an all-to-all.
//!
//! All three produce identical BFS trees. The [`fabric`] ledgers every byte
//! sent so communication volume can be compared exactly.

pub mod bitvec;
pub mod directory;
pub mod engine;
pub mod experiment;
pub mod fabric;
pub mod fixtures;
pub mod graphgen;
pub mod report;
pub mod spmv;

pub use bitvec::{Bitmap, BitmapCodec, Codec, DecodeError};
pub use engine::{bfs_baseline, bfs_compressed, bfs_sieve_compressed, validate, BfsResult, Variant};
pub use fabric::{CostModelParams, Fabric, FabricError};
pub use graphgen::{CsrMatrix, CsrPartition, EdgeList, GraphConfig, GraphError, VertexId};
pub use report::RunReport;
