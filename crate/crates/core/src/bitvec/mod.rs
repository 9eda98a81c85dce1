//! Frontier bitmaps and their wire codecs.
//!
//! Every encoded message is self-describing:
//!
//! ```text
//! byte 0      codec id (0 raw, 1 wah, 2 sparse, 3 rle)
//! bytes 1..9  u64 nbits, little-endian
//! bytes 9..   codec body
//! ```
//!
//! A message that stops right after the header is an all-zero bitmap of
//! `nbits` bits, whatever the codec id.

mod bitmap;
pub mod rle;
pub mod sparse;
pub mod wah;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use bitmap::{Bitmap, Masked, Ones, WordSource};
pub use sparse::SparseVector;
pub use wah::{WahVector, WahWord};

pub const HEADER_LEN: usize = 9;

/// Largest bitmap a message may claim unless the caller asks otherwise.
/// Matches the 2^40 vertex ceiling of the graph generator.
pub const DEFAULT_MAX_NBITS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("message truncated or has trailing bytes")]
    Truncated,
    #[error("unknown codec id {0}")]
    UnknownCodec(u8),
    #[error("WAH word width {0} outside [4, 64]")]
    WordWidth(u8),
    #[error("message claims {nbits} bits, limit is {limit}")]
    TooLarge { nbits: u64, limit: u64 },
    #[error("decoded length {found} does not match expected {expected}")]
    Length { expected: u64, found: u64 },
    #[error("index {index} out of range for {nbits} bits")]
    IndexOutOfRange { index: u64, nbits: u64 },
    #[error("padding bits past the bitmap end are set")]
    Padding,
    #[error("malformed stream: {0}")]
    Malformed(String),
}

/// Built-in frontier codecs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Codec {
    /// Packed bitmap bytes, no compression.
    Raw,
    Wah {
        word_width: u8,
    },
    Sparse,
    Rle,
}

impl Default for Codec {
    fn default() -> Self {
        Codec::Wah {
            word_width: wah::DEFAULT_WORD_WIDTH,
        }
    }
}

/// Pluggable frontier compressor.
///
/// Implementations must be lossless: `decode(encode_source(b)) == b`.
pub trait BitmapCodec: Send + Sync + fmt::Debug {
    fn encode_source(&self, src: &dyn WordSource) -> Vec<u8>;

    /// Encoding used for pieces that are often empty. Built-in codecs send
    /// an all-zero input as a header-only message.
    fn encode_sparse_piece(&self, src: &dyn WordSource) -> Vec<u8> {
        self.encode_source(src)
    }

    fn decode(&self, message: &[u8]) -> Result<Bitmap, DecodeError>;
    fn label(&self) -> String;
}

impl Codec {
    pub fn id(&self) -> u8 {
        match self {
            Codec::Raw => 0,
            Codec::Wah { .. } => 1,
            Codec::Sparse => 2,
            Codec::Rle => 3,
        }
    }

    pub fn encode<S: WordSource + ?Sized>(&self, src: &S) -> Vec<u8> {
        let mut out = header(self.id(), src.nbits());
        match *self {
            Codec::Raw => {
                let nbytes = src.nbits().div_ceil(8);
                out.reserve(nbytes);
                for i in 0..src.num_words() {
                    let bytes = src.word(i).to_le_bytes();
                    let take = (nbytes - 8 * i).min(8);
                    out.extend_from_slice(&bytes[..take]);
                }
            }
            Codec::Wah { word_width } => wah::write_body(&wah::encode(src, word_width), &mut out),
            Codec::Sparse => sparse::write_body(&sparse::encode(src), &mut out),
            Codec::Rle => rle::write_body(src, &mut out),
        }
        out
    }

    /// Like [`Codec::encode`], but an all-zero input becomes a header-only
    /// message.
    pub fn encode_compact<S: WordSource + ?Sized>(&self, src: &S) -> Vec<u8> {
        if src.count_ones() == 0 {
            header(self.id(), src.nbits())
        } else {
            self.encode(src)
        }
    }

    /// Exact serialized size of `b`, header included.
    pub fn encoded_size(&self, b: &Bitmap) -> usize {
        HEADER_LEN
            + match *self {
                Codec::Raw => b.len().div_ceil(8),
                Codec::Sparse => 8 + 8 * b.popcount(),
                Codec::Wah { word_width } => wah::body_len(&wah::encode(b, word_width)),
                Codec::Rle => {
                    let mut body = Vec::new();
                    rle::write_body(b, &mut body);
                    body.len()
                }
            }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Codec::Wah { word_width } if !(wah::MIN_WORD_WIDTH..=wah::MAX_WORD_WIDTH).contains(&word_width) => {
                Err(format!("WAH word width {word_width} outside [4, 64]"))
            }
            _ => Ok(()),
        }
    }
}

impl BitmapCodec for Codec {
    fn encode_source(&self, src: &dyn WordSource) -> Vec<u8> {
        self.encode(src)
    }

    fn encode_sparse_piece(&self, src: &dyn WordSource) -> Vec<u8> {
        self.encode_compact(src)
    }

    fn decode(&self, message: &[u8]) -> Result<Bitmap, DecodeError> {
        let bitmap = decode(message)?;
        if message.len() > HEADER_LEN && message[0] != self.id() {
            return Err(DecodeError::UnknownCodec(message[0]));
        }
        Ok(bitmap)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codec::Raw => f.write_str("raw"),
            Codec::Wah { word_width } => write!(f, "wah:{word_width}"),
            Codec::Sparse => f.write_str("sparse"),
            Codec::Rle => f.write_str("rle"),
        }
    }
}

impl FromStr for Codec {
    type Err = String;

    /// Accepts `raw`, `sparse`, `rle`, `wah` (64-bit words) or `wah:W`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let codec = match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Codec::Raw,
            "sparse" => Codec::Sparse,
            "rle" => Codec::Rle,
            "wah" => Codec::default(),
            other => match other.strip_prefix("wah:") {
                Some(w) => Codec::Wah {
                    word_width: w.parse().map_err(|_| format!("invalid WAH word width {w:?}"))?,
                },
                None => return Err(format!("unknown codec {s:?}")),
            },
        };
        codec.validate()?;
        Ok(codec)
    }
}

fn header(id: u8, nbits: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.push(id);
    out.extend_from_slice(&(nbits as u64).to_le_bytes());
    out
}

/// Reads the codec id and bit length of a message without decoding it.
pub fn peek_header(message: &[u8]) -> Result<(u8, u64), DecodeError> {
    let mut r = Reader::new(message);
    let id = r.u8()?;
    let nbits = r.u64()?;
    Ok((id, nbits))
}

/// Decodes any built-in message, with the default size limit.
pub fn decode(message: &[u8]) -> Result<Bitmap, DecodeError> {
    decode_with_limit(message, DEFAULT_MAX_NBITS)
}

/// Decodes any built-in message, refusing ones that claim more than
/// `max_nbits` bits.
pub fn decode_with_limit(message: &[u8], max_nbits: u64) -> Result<Bitmap, DecodeError> {
    let (id, nbits64) = peek_header(message)?;
    if id > 3 {
        return Err(DecodeError::UnknownCodec(id));
    }
    if nbits64 > max_nbits || nbits64 > usize::MAX as u64 {
        return Err(DecodeError::TooLarge {
            nbits: nbits64,
            limit: max_nbits,
        });
    }
    let nbits = nbits64 as usize;
    let body = &message[HEADER_LEN..];
    if body.is_empty() {
        return Ok(Bitmap::new(nbits));
    }
    match id {
        0 => Bitmap::from_bytes(nbits, body).ok_or_else(|| {
            if body.len() != nbits.div_ceil(8) {
                DecodeError::Truncated
            } else {
                DecodeError::Padding
            }
        }),
        1 => wah::decode(&wah::read_body(nbits, body)?),
        2 => Ok(sparse::decode(&sparse::read_body(nbits, body)?)),
        _ => rle::read_body(nbits, body),
    }
}

/// Raw bitmap payload for `nbits` bits, independent of popcount.
pub fn raw_payload_bytes(nbits: u64) -> u64 {
    nbits.div_ceil(8)
}

/// Sparse-vector payload for `count` vertices.
pub fn sparse_payload_bytes(count: u64) -> u64 {
    8 * count
}

/// WAH payload (code words plus the active word), excluding message headers.
pub fn wah_payload_bytes(b: &Bitmap, word_width: u8) -> u64 {
    let v = wah::encode(b, word_width);
    ((v.words().len() + 1) * v.word_bytes()) as u64
}

/// Little-endian cursor used by the body parsers.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len()
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.buf.len() < n {
            return Err(DecodeError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(self.uint(4)? as u32)
    }

    pub(crate) fn u64(&mut self) -> Result<u64, DecodeError> {
        self.uint(8)
    }

    /// `n <= 8` little-endian bytes.
    pub(crate) fn uint(&mut self, n: usize) -> Result<u64, DecodeError> {
        let mut buf = [0u8; 8];
        buf[..n].copy_from_slice(self.take(n)?);
        Ok(u64::from_le_bytes(buf))
    }

    pub(crate) fn finish(&self) -> Result<(), DecodeError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(DecodeError::Truncated)
        }
    }
}
