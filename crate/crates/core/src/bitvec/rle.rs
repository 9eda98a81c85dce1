//! Byte-level run-length codec over the raw packed bitmap bytes.
//!
//! Body: `u64` run count, then per run a value byte and a `u32` little-endian
//! length. Stands in for a general-purpose byte compressor.

use super::bitmap::{Bitmap, WordSource};
use super::{DecodeError, Reader};

pub(crate) fn write_body<S: WordSource + ?Sized>(src: &S, out: &mut Vec<u8>) {
    let nbytes = src.nbits().div_ceil(8);
    let count_at = out.len();
    out.extend_from_slice(&0u64.to_le_bytes());
    let mut runs = 0u64;
    let mut current: Option<(u8, u32)> = None;
    let mut push = |out: &mut Vec<u8>, (value, len): (u8, u32)| {
        out.push(value);
        out.extend_from_slice(&len.to_le_bytes());
        runs += 1;
    };
    for i in 0..nbytes {
        let byte = (src.word(i / 8) >> (8 * (i % 8))) as u8;
        current = match current {
            Some((v, len)) if v == byte && len < u32::MAX => Some((v, len + 1)),
            Some(run) => {
                push(out, run);
                Some((byte, 1))
            }
            None => Some((byte, 1)),
        };
    }
    if let Some(run) = current {
        push(out, run);
    }
    out[count_at..count_at + 8].copy_from_slice(&runs.to_le_bytes());
}

pub(crate) fn read_body(nbits: usize, body: &[u8]) -> Result<Bitmap, DecodeError> {
    let mut r = Reader::new(body);
    let runs = r.u64()?;
    if (runs as u128) * 5 != r.remaining() as u128 {
        return Err(DecodeError::Truncated);
    }
    let nbytes = nbits.div_ceil(8);
    let mut bytes = Vec::with_capacity(nbytes);
    for _ in 0..runs {
        let value = r.u8()?;
        let len = r.u32()? as usize;
        if len == 0 {
            return Err(DecodeError::Malformed("zero-length run".into()));
        }
        if bytes.len() + len > nbytes {
            return Err(DecodeError::Length {
                expected: nbytes as u64,
                found: (bytes.len() + len) as u64,
            });
        }
        bytes.resize(bytes.len() + len, value);
    }
    r.finish()?;
    if bytes.len() != nbytes {
        return Err(DecodeError::Length {
            expected: nbytes as u64,
            found: bytes.len() as u64,
        });
    }
    Bitmap::from_bytes(nbits, &bytes).ok_or(DecodeError::Padding)
}
