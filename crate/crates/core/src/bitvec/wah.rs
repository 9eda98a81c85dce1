//! Word-aligned hybrid (WAH) bitmap compression.
//!
//! A bitmap is cut into groups of `W - 1` bits. Every group becomes either a
//! *literal* word (top bit 0, the group's bits in the low `W - 1` bits) or
//! part of a *fill* word (top bit 1, next bit the fill value, low `W - 2`
//! bits the number of identical all-zero or all-one groups it stands for).
//! The trailing `nbits mod (W - 1)` bits that do not form a whole group are
//! kept in a separate *active* word together with their count.
//!
//! Bits inside a literal or active payload are stored most-significant
//! first: the earliest bitmap position lands in the highest payload bit, so
//! the group `100` becomes the literal `0100` at `W = 4`.

use super::bitmap::{low_mask, Bitmap, WordSource};
use super::DecodeError;

pub const MIN_WORD_WIDTH: u8 = 4;
pub const MAX_WORD_WIDTH: u8 = 64;
pub const DEFAULT_WORD_WIDTH: u8 = 64;

/// One decoded WAH code word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WahWord {
    Literal(u64),
    Fill { value: bool, count: u64 },
}

/// Compressed form of a [`Bitmap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WahVector {
    word_width: u8,
    words: Vec<u64>,
    active: u64,
    active_len: u8,
    nbits: usize,
}

impl WahVector {
    /// Assembles a vector from raw parts, checking the structural invariants.
    pub fn from_parts(
        word_width: u8,
        words: Vec<u64>,
        active: u64,
        active_len: u8,
        nbits: usize,
    ) -> Result<Self, DecodeError> {
        let v = WahVector {
            word_width,
            words,
            active,
            active_len,
            nbits,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn word_width(&self) -> u8 {
        self.word_width
    }

    /// Code words, not counting the active word.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn active(&self) -> (u64, u8) {
        (self.active, self.active_len)
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn decoded_words(&self) -> impl Iterator<Item = WahWord> + '_ {
        let w = self.word_width as u32;
        self.words.iter().map(move |&word| classify(word, w))
    }

    /// Bytes one serialized code word occupies.
    pub fn word_bytes(&self) -> usize {
        word_bytes(self.word_width)
    }

    fn group_bits(&self) -> usize {
        self.word_width as usize - 1
    }

    fn validate(&self) -> Result<(), DecodeError> {
        let w = self.word_width;
        if !(MIN_WORD_WIDTH..=MAX_WORD_WIDTH).contains(&w) {
            return Err(DecodeError::WordWidth(w));
        }
        let g = self.group_bits() as u128;
        if self.active_len as u128 > g {
            return Err(DecodeError::Malformed(format!(
                "active length {} exceeds group size {g}",
                self.active_len
            )));
        }
        if self.active & !low_mask(self.active_len as usize) != 0 {
            return Err(DecodeError::Malformed("active word has bits beyond its length".into()));
        }
        let mut groups: u128 = 0;
        for &word in &self.words {
            if w < 64 && word >> w != 0 {
                return Err(DecodeError::Malformed(format!(
                    "code word {word:#x} wider than {w} bits"
                )));
            }
            groups += match classify(word, w as u32) {
                WahWord::Literal(_) => 1,
                WahWord::Fill { count: 0, .. } => {
                    return Err(DecodeError::Malformed("fill word with zero count".into()))
                }
                WahWord::Fill { count, .. } => count as u128,
            };
        }
        let total = groups * g + self.active_len as u128;
        if total != self.nbits as u128 {
            return Err(DecodeError::Length {
                expected: self.nbits as u64,
                found: total.min(u64::MAX as u128) as u64,
            });
        }
        Ok(())
    }
}

pub(crate) fn word_bytes(word_width: u8) -> usize {
    (word_width as usize).div_ceil(8)
}

#[inline]
fn classify(word: u64, w: u32) -> WahWord {
    if word >> (w - 1) & 1 == 0 {
        WahWord::Literal(word)
    } else {
        WahWord::Fill {
            value: word >> (w - 2) & 1 == 1,
            count: word & low_mask(w as usize - 2),
        }
    }
}

/// Largest group count one fill word can carry.
pub fn max_fill_count(word_width: u8) -> u64 {
    low_mask(word_width as usize - 2)
}

fn fill_word(w: u32, value: bool, count: u64) -> u64 {
    (1u64 << (w - 1)) | ((value as u64) << (w - 2)) | count
}

/// Reverses the low `len` bits of `v`, turning LSB-first into MSB-first.
#[inline]
fn reverse_low(v: u64, len: usize) -> u64 {
    if len == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - len)
    }
}

/// Encodes `src` in canonical greedy form.
///
/// Every all-zero or all-one group goes into a fill word; runs of the same
/// fill value are merged until the count field saturates.
pub fn encode<S: WordSource + ?Sized>(src: &S, word_width: u8) -> WahVector {
    assert!(
        (MIN_WORD_WIDTH..=MAX_WORD_WIDTH).contains(&word_width),
        "WAH word width {word_width} outside [{MIN_WORD_WIDTH}, {MAX_WORD_WIDTH}]"
    );
    let w = word_width as u32;
    let g = word_width as usize - 1;
    let full = low_mask(g);
    let max_count = max_fill_count(word_width);
    let nbits = src.nbits();
    let groups = nbits / g;

    let mut words = Vec::new();
    // Pending fill run: (value, count).
    let mut run: Option<(bool, u64)> = None;
    let flush = |words: &mut Vec<u64>, run: &mut Option<(bool, u64)>| {
        if let Some((value, count)) = run.take() {
            words.push(fill_word(w, value, count));
        }
    };

    for k in 0..groups {
        let bits = src.bits(k * g, g);
        let fill = if bits == 0 {
            Some(false)
        } else if bits == full {
            Some(true)
        } else {
            None
        };
        match (fill, run.as_mut()) {
            (Some(v), Some((rv, count))) if *rv == v && *count < max_count => *count += 1,
            (Some(v), _) => {
                flush(&mut words, &mut run);
                run = Some((v, 1));
            }
            (None, _) => {
                flush(&mut words, &mut run);
                words.push(reverse_low(bits, g));
            }
        }
    }
    flush(&mut words, &mut run);

    let active_len = nbits - groups * g;
    let active = reverse_low(src.bits(groups * g, active_len), active_len);
    WahVector {
        word_width,
        words,
        active,
        active_len: active_len as u8,
        nbits,
    }
}

/// Expands `v` back into a bitmap. Accepts any valid encoding, canonical or
/// not.
pub fn decode(v: &WahVector) -> Result<Bitmap, DecodeError> {
    v.validate()?;
    let g = v.group_bits();
    let mut out = Bitmap::new(v.nbits);
    let mut off = 0usize;
    for word in v.decoded_words() {
        match word {
            WahWord::Literal(payload) => {
                out.or_bits(off, g, reverse_low(payload, g));
                off += g;
            }
            WahWord::Fill { value, count } => {
                let span = count as usize * g;
                if value {
                    out.set_range(off, off + span);
                }
                off += span;
            }
        }
    }
    let len = v.active_len as usize;
    out.or_bits(off, len, reverse_low(v.active, len));
    Ok(out)
}

/// Serialized body: `u8 W`, `u64 word count`, words, `u8 active_len`,
/// active payload. Each word takes `ceil(W / 8)` little-endian bytes.
pub(crate) fn write_body(v: &WahVector, out: &mut Vec<u8>) {
    let wb = v.word_bytes();
    out.push(v.word_width);
    out.extend_from_slice(&(v.words.len() as u64).to_le_bytes());
    for &word in &v.words {
        out.extend_from_slice(&word.to_le_bytes()[..wb]);
    }
    out.push(v.active_len);
    out.extend_from_slice(&v.active.to_le_bytes()[..wb]);
}

pub(crate) fn body_len(v: &WahVector) -> usize {
    1 + 8 + (v.words.len() + 1) * v.word_bytes() + 1
}

pub(crate) fn read_body(nbits: usize, body: &[u8]) -> Result<WahVector, DecodeError> {
    let mut r = super::Reader::new(body);
    let word_width = r.u8()?;
    if !(MIN_WORD_WIDTH..=MAX_WORD_WIDTH).contains(&word_width) {
        return Err(DecodeError::WordWidth(word_width));
    }
    let wb = word_bytes(word_width);
    let count = r.u64()?;
    let need = (count as u128) * wb as u128 + 1 + wb as u128;
    if need != r.remaining() as u128 {
        return Err(DecodeError::Truncated);
    }
    let mut words = Vec::with_capacity(count as usize);
    for _ in 0..count {
        words.push(r.uint(wb)?);
    }
    let active_len = r.u8()?;
    let active = r.uint(wb)?;
    r.finish()?;
    WahVector::from_parts(word_width, words, active, active_len, nbits)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: expands every word on its own into a bool
    /// vector, with no shared helpers from the encoder.
    fn naive_decode(v: &WahVector) -> Vec<bool> {
        let w = v.word_width() as u32;
        let g = (w - 1) as usize;
        let mut bits = Vec::new();
        for &word in v.words() {
            if word >> (w - 1) & 1 == 0 {
                for t in (0..g).rev() {
                    bits.push(word >> t & 1 == 1);
                }
            } else {
                let value = word >> (w - 2) & 1 == 1;
                let count = word & ((1u64 << (w - 2)) - 1);
                bits.extend(std::iter::repeat_n(value, count as usize * g));
            }
        }
        let (active, len) = v.active();
        for t in (0..len as usize).rev() {
            bits.push(active >> t & 1 == 1);
        }
        bits
    }

    fn bm(s: &str) -> Bitmap {
        s.parse().unwrap()
    }

    #[test]
    fn all_zero_is_single_fill() {
        let b = Bitmap::new(10 * 63);
        let v = encode(&b, 64);
        assert_eq!(
            v.decoded_words().collect::<Vec<_>>(),
            vec![WahWord::Fill {
                value: false,
                count: 10
            }]
        );
        assert_eq!(v.active(), (0, 0));
    }

    #[test]
    fn sixteen_bit_example_at_width_four() {
        let b = bm("1000000000000000");
        let v = encode(&b, 4);
        // Groups: 100 | 000 x4 | active "0". The 2-bit count saturates at 3.
        assert_eq!(
            v.decoded_words().collect::<Vec<_>>(),
            vec![
                WahWord::Literal(0b0100),
                WahWord::Fill { value: false, count: 3 },
                WahWord::Fill { value: false, count: 1 },
            ]
        );
        assert_eq!(v.words(), &[0b0100, 0b1011, 0b1001]);
        assert_eq!(v.active(), (0, 1));
        assert_eq!(decode(&v).unwrap(), b);
    }

    #[test]
    fn one_fill_decodes_to_six_ones() {
        let v = WahVector::from_parts(4, vec![0b1110], 0, 0, 6).unwrap();
        assert_eq!(decode(&v).unwrap(), bm("111111"));
    }

    #[test]
    fn first_frontier_round_trips() {
        let f = bm("00110100");
        for w in [4, 8, 64] {
            assert_eq!(decode(&encode(&f, w)).unwrap(), f);
        }
    }

    #[test]
    fn rejects_malformed_vectors() {
        // Zero-count fill.
        assert!(matches!(
            WahVector::from_parts(4, vec![0b1000], 0, 0, 0),
            Err(DecodeError::Malformed(_))
        ));
        // Length mismatch.
        assert!(matches!(
            WahVector::from_parts(4, vec![0b0101], 0, 0, 4),
            Err(DecodeError::Length { .. })
        ));
        // Word wider than W.
        assert!(WahVector::from_parts(4, vec![0b10101], 0, 0, 3).is_err());
        // Active bits past active_len.
        assert!(WahVector::from_parts(4, vec![], 0b10, 1, 1).is_err());
        // Width out of range.
        assert!(matches!(
            WahVector::from_parts(3, vec![], 0, 0, 0),
            Err(DecodeError::WordWidth(3))
        ));
    }

    #[test]
    fn non_greedy_streams_decode() {
        // Two separate zero fills plus an all-zero literal: 9 zero bits at W=4.
        let v = WahVector::from_parts(4, vec![0b1001, 0b0000, 0b1001], 0, 0, 9).unwrap();
        assert_eq!(decode(&v).unwrap(), Bitmap::new(9));
        assert_eq!(encode(&decode(&v).unwrap(), 4).words(), &[0b1011]);
    }

    #[test]
    fn saturated_fills_split() {
        let b = Bitmap::ones(3 * 7);
        let v = encode(&b, 4);
        assert_eq!(v.words(), &[0b1111, 0b1111, 0b1101]);
        assert_eq!(decode(&v).unwrap(), b);
    }

    #[test]
    fn matches_naive_decoder_on_patterns() {
        for w in [4u8, 5, 8, 16, 31, 32, 63, 64] {
            for n in [0usize, 1, 2, 62, 63, 64, 65, 127, 200, 1000] {
                for pattern in 0..4 {
                    let b = Bitmap::from_indices(
                        n,
                        (0..n).filter(|k| match pattern {
                            0 => false,
                            1 => true,
                            2 => k % 7 == 3,
                            _ => (k / 40) % 2 == 0,
                        }),
                    );
                    let v = encode(&b, w);
                    let bits = naive_decode(&v);
                    assert_eq!(Bitmap::from_bools(&bits), b, "w={w} n={n} p={pattern}");
                    assert_eq!(decode(&v).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn single_run_needs_at_most_five_words() {
        // Leading zeros, head literal, one-fill, tail literal, trailing
        // zero-fill. The active word is extra. Narrow words saturate fills,
        // which costs one more fill per max_fill_count groups.
        let n = 1300;
        for w in [4u8, 8, 17, 64] {
            let groups = n as u64 / (w as u64 - 1);
            let bound = 5 + (groups / max_fill_count(w)) as usize;
            for start in (0..n).step_by(7) {
                for end in (start + 1..=n).step_by(11) {
                    let v = encode(&Bitmap::from_indices(n, start..end), w);
                    assert!(v.words().len() <= bound, "w={w} start={start} end={end}");
                }
            }
        }
    }

    #[test]
    fn single_bit_removal_can_grow_an_aligned_run() {
        // Two full one-groups compress to one fill; dropping the last bit
        // leaves fill(1, 1) plus a literal.
        let n = 63 * 4;
        let full = encode(&Bitmap::from_indices(n, 0..126), 64);
        let trimmed = encode(&Bitmap::from_indices(n, 0..125), 64);
        assert!(body_len(&trimmed) > body_len(&full));
    }
}
