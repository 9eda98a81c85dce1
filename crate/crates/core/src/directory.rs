//! Directory vectors and frontier sieving.
//!
//! `V_{i,j}` marks the vertices of rank `j` that appear as a column of rank
//! `i`'s sub-block `A_{i,j}`. Only those vertices can ever produce a hit on
//! rank `i`, so rank `j` may drop every other frontier vertex before sending
//! to `i`. Each rank keeps its own row `{V_{i,x}}` and a copy of its column
//! `{V_{x,i}}`, which is what it needs to sieve outgoing pieces.

use crate::bitvec::{Bitmap, BitmapCodec, Codec, Masked};
use crate::engine::EngineError;
use crate::fabric::{run_ranks, CommTag, Fabric, Phase};
use crate::graphgen::{CsrPartition, GraphError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectoryVector {
    /// Rank whose rows the sub-block belongs to.
    pub row_rank: usize,
    /// Rank whose vertices the bits index.
    pub col_rank: usize,
    bits: Bitmap,
}

impl DirectoryVector {
    /// A vector with explicit contents, e.g. one received from a peer.
    pub fn from_bits(row_rank: usize, col_rank: usize, bits: Bitmap) -> Self {
        DirectoryVector {
            row_rank,
            col_rank,
            bits,
        }
    }

    pub fn bits(&self) -> &Bitmap {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// `V_{i,j}` for `i = part.rank()`.
pub fn build_directory_vector(part: &CsrPartition, j: usize) -> Result<DirectoryVector, GraphError> {
    let block = part.sub_block(j)?;
    let cols = block.column_range();
    let mut bits = Bitmap::new(cols.len());
    for (_, c) in block.iter() {
        bits.set(c as usize - cols.start);
    }
    Ok(DirectoryVector {
        row_rank: part.rank(),
        col_rank: j,
        bits,
    })
}

/// Rank `i`'s view: `rows[x] = V_{i,x}` and `columns[x] = V_{x,i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossDirectory {
    rank: usize,
    rows: Vec<DirectoryVector>,
    columns: Vec<DirectoryVector>,
}

impl CrossDirectory {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `V_{i,x}`: which of rank `x`'s vertices this rank consumes.
    pub fn row(&self, x: usize) -> &DirectoryVector {
        &self.rows[x]
    }

    /// `V_{x,i}`: which of this rank's vertices rank `x` consumes.
    pub fn column(&self, x: usize) -> &DirectoryVector {
        &self.columns[x]
    }

    pub fn rows(&self) -> &[DirectoryVector] {
        &self.rows
    }

    pub fn columns(&self) -> &[DirectoryVector] {
        &self.columns
    }
}

/// Collective: builds this rank's row vectors and trades them so that every
/// rank ends up with its column. Called once by every rank, from its own
/// thread. Traffic is tagged [`Phase::Init`].
pub fn init_cross_directory(part: &CsrPartition, fabric: &Fabric) -> Result<CrossDirectory, EngineError> {
    let p = part.ranks();
    let rank = part.rank();
    let rows = (0..p)
        .map(|x| build_directory_vector(part, x))
        .collect::<Result<Vec<_>, _>>()?;
    let outgoing = rows
        .iter()
        .map(|v| {
            if v.col_rank == rank {
                Vec::new()
            } else {
                Codec::Raw.encode(&v.bits)
            }
        })
        .collect();
    let incoming = fabric.alltoallv(rank, CommTag::new(Phase::Init, 0), outgoing)?;
    let expected = part.layout().len(rank);
    let columns = incoming
        .iter()
        .enumerate()
        .map(|(x, msg)| {
            let bits = if x == rank {
                rows[rank].bits.clone()
            } else {
                Codec::Raw
                    .decode(msg)
                    .map_err(|source| EngineError::Corrupt { rank, from: x, source })?
            };
            if bits.len() != expected {
                return Err(EngineError::Internal(format!(
                    "directory vector from rank {x} has {} bits, expected {expected}",
                    bits.len()
                )));
            }
            Ok(DirectoryVector {
                row_rank: x,
                col_rank: rank,
                bits,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrossDirectory { rank, rows, columns })
}

/// Runs [`init_cross_directory`] on every rank.
pub fn init_cross_directories(parts: &[CsrPartition], fabric: &Fabric) -> Result<Vec<CrossDirectory>, EngineError> {
    if parts.len() != fabric.ranks() {
        return Err(EngineError::Input(format!(
            "{} partitions for a {}-rank fabric",
            parts.len(),
            fabric.ranks()
        )));
    }
    run_ranks(fabric, |rank| init_cross_directory(&parts[rank], fabric))
}

/// `f_i ⊙ V`.
pub fn sieve(frontier: &Bitmap, v: &DirectoryVector) -> Bitmap {
    frontier.and(&v.bits)
}

/// Sieves and encodes in one pass, without materializing the sieved piece.
pub fn sieve_encode(frontier: &Bitmap, v: &DirectoryVector, codec: &dyn BitmapCodec) -> Vec<u8> {
    codec.encode_sparse_piece(&Masked::new(frontier, &v.bits))
}

/// Reference path: materialize the sieved piece, then encode it.
pub fn sieve_then_encode(frontier: &Bitmap, v: &DirectoryVector, codec: &dyn BitmapCodec) -> Vec<u8> {
    codec.encode_sparse_piece(&sieve(frontier, v))
}
