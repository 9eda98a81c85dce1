//! Sparse-vector frontier encoding: the ascending list of set positions,
//! one 64-bit id per vertex.

use super::bitmap::{Bitmap, WordSource};
use super::{DecodeError, Reader};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    indices: Vec<u64>,
    nbits: usize,
}

impl SparseVector {
    pub fn from_indices(nbits: usize, indices: Vec<u64>) -> Result<Self, DecodeError> {
        for pair in indices.windows(2) {
            if pair[0] >= pair[1] {
                return Err(DecodeError::Malformed(format!(
                    "sparse indices not strictly increasing at {}",
                    pair[1]
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= nbits as u64 {
                return Err(DecodeError::IndexOutOfRange {
                    index: last,
                    nbits: nbits as u64,
                });
            }
        }
        Ok(SparseVector { indices, nbits })
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    /// Payload size: 8 bytes per index.
    pub fn payload_len(&self) -> usize {
        8 * self.indices.len()
    }
}

pub fn encode<S: WordSource + ?Sized>(src: &S) -> SparseVector {
    let mut indices = Vec::new();
    for i in 0..src.num_words() {
        let mut w = src.word(i);
        while w != 0 {
            indices.push((i * 64) as u64 + w.trailing_zeros() as u64);
            w &= w - 1;
        }
    }
    SparseVector {
        indices,
        nbits: src.nbits(),
    }
}

pub fn decode(s: &SparseVector) -> Bitmap {
    Bitmap::from_indices(s.nbits, s.indices.iter().map(|&k| k as usize))
}

pub(crate) fn write_body(s: &SparseVector, out: &mut Vec<u8>) {
    out.extend_from_slice(&(s.indices.len() as u64).to_le_bytes());
    for &k in &s.indices {
        out.extend_from_slice(&k.to_le_bytes());
    }
}

pub(crate) fn read_body(nbits: usize, body: &[u8]) -> Result<SparseVector, DecodeError> {
    let mut r = Reader::new(body);
    let count = r.u64()?;
    if (count as u128) * 8 != r.remaining() as u128 {
        return Err(DecodeError::Truncated);
    }
    let indices = (0..count).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    SparseVector::from_indices(nbits, indices)
}
