use std::fmt;

/// Fixed-length bit vector over vertex ids.
///
/// Bits are packed into `u64` words with bit `k` stored at bit `k % 64` of
/// word `k / 64`. Serializing the words little-endian therefore yields the
/// wire byte order (bit `k` is bit `k % 8` of byte `k / 8`). Bits at
/// positions `>= nbits` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitmap {
    nbits: usize,
    words: Vec<u64>,
}

/// Read-only access to a bitmap-shaped word stream.
///
/// Encoders are written against this trait so that a masked view (for
/// example a frontier ANDed with a directory vector) can be encoded without
/// first materializing the masked bitmap.
pub trait WordSource {
    fn nbits(&self) -> usize;

    /// Word `idx`; indices past the end read as zero.
    fn word(&self, idx: usize) -> u64;

    fn num_words(&self) -> usize {
        words_for(self.nbits())
    }

    /// `len <= 64` bits starting at `offset`, LSB-first.
    fn bits(&self, offset: usize, len: usize) -> u64 {
        debug_assert!(len <= 64);
        if len == 0 {
            return 0;
        }
        let idx = offset / 64;
        let shift = offset % 64;
        let mut value = self.word(idx) >> shift;
        if shift != 0 && shift + len > 64 {
            value |= self.word(idx + 1) << (64 - shift);
        }
        value & low_mask(len)
    }

    fn count_ones(&self) -> usize {
        (0..self.num_words()).map(|i| self.word(i).count_ones() as usize).sum()
    }
}

/// `a & mask`, evaluated lazily word by word.
#[derive(Clone, Copy)]
pub struct Masked<'a> {
    value: &'a Bitmap,
    mask: &'a Bitmap,
}

impl<'a> Masked<'a> {
    pub fn new(value: &'a Bitmap, mask: &'a Bitmap) -> Self {
        assert_eq!(value.len(), mask.len(), "masked view requires equal bitmap lengths");
        Masked { value, mask }
    }
}

impl WordSource for Masked<'_> {
    fn nbits(&self) -> usize {
        self.value.nbits
    }

    fn word(&self, idx: usize) -> u64 {
        self.value.word(idx) & self.mask.word(idx)
    }
}

#[inline]
pub(crate) fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Bitmap {
    pub fn new(nbits: usize) -> Self {
        Bitmap {
            nbits,
            words: vec![0; words_for(nbits)],
        }
    }

    pub fn ones(nbits: usize) -> Self {
        let mut b = Bitmap {
            nbits,
            words: vec![u64::MAX; words_for(nbits)],
        };
        b.clear_tail();
        b
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(nbits: usize, indices: I) -> Self {
        let mut b = Bitmap::new(nbits);
        for k in indices {
            b.set(k);
        }
        b
    }

    /// Builds a bitmap from `bools`, position `k` taken from element `k`.
    pub fn from_bools(bits: &[bool]) -> Self {
        Bitmap::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| k))
    }

    /// Copies the words of any source into an owned bitmap.
    pub fn from_source<S: WordSource + ?Sized>(src: &S) -> Self {
        let mut b = Bitmap {
            nbits: src.nbits(),
            words: (0..src.num_words()).map(|i| src.word(i)).collect(),
        };
        b.clear_tail();
        b
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.nbits, "bit {k} out of range for {} bits", self.nbits);
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize) {
        assert!(k < self.nbits, "bit {k} out of range for {} bits", self.nbits);
        self.words[k / 64] |= 1 << (k % 64);
    }

    #[inline]
    pub fn clear(&mut self, k: usize) {
        assert!(k < self.nbits, "bit {k} out of range for {} bits", self.nbits);
        self.words[k / 64] &= !(1 << (k % 64));
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn clear_all(&mut self) {
        self.words.fill(0);
    }

    /// `self |= other`.
    pub fn or_assign(&mut self, other: &Bitmap) {
        self.check_len(other);
        for (d, s) in self.words.iter_mut().zip(&other.words) {
            *d |= s;
        }
    }

    /// `self &= other`.
    pub fn and_assign(&mut self, other: &Bitmap) {
        self.check_len(other);
        for (d, s) in self.words.iter_mut().zip(&other.words) {
            *d &= s;
        }
    }

    /// `self &= !mask`.
    pub fn and_not_assign(&mut self, mask: &Bitmap) {
        self.check_len(mask);
        for (d, s) in self.words.iter_mut().zip(&mask.words) {
            *d &= !s;
        }
    }

    pub fn and(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    pub fn or(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    /// Bit `k` of the result is `self[k] && !mask[k]`.
    pub fn and_not(&self, mask: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.and_not_assign(mask);
        out
    }

    /// Ascending positions of set bits.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Copy of bits `[lo, hi)` as a new bitmap of length `hi - lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> Bitmap {
        assert!(lo <= hi && hi <= self.nbits, "slice [{lo}, {hi}) out of range");
        let len = hi - lo;
        let mut out = Bitmap::new(len);
        let mut off = 0;
        while off < len {
            let take = (len - off).min(64);
            out.words[off / 64] = self.bits(lo + off, take);
            off += take;
        }
        out
    }

    /// ORs `src` into `self` starting at bit `offset`.
    pub fn or_at(&mut self, offset: usize, src: &Bitmap) {
        assert!(
            offset + src.nbits <= self.nbits,
            "or_at: {} bits at offset {offset} exceed {}",
            src.nbits,
            self.nbits
        );
        let mut off = 0;
        while off < src.nbits {
            let take = (src.nbits - off).min(64);
            self.or_bits(offset + off, take, src.bits(off, take));
            off += take;
        }
    }

    /// ORs the low `len` bits of `value` (LSB-first) in at `offset`.
    pub(crate) fn or_bits(&mut self, offset: usize, len: usize, value: u64) {
        if len == 0 {
            return;
        }
        debug_assert!(offset + len <= self.nbits);
        let value = value & low_mask(len);
        let idx = offset / 64;
        let shift = offset % 64;
        self.words[idx] |= value << shift;
        if shift != 0 && shift + len > 64 {
            self.words[idx + 1] |= value >> (64 - shift);
        }
    }

    /// Sets every bit in `[lo, hi)`.
    pub(crate) fn set_range(&mut self, lo: usize, hi: usize) {
        let mut off = lo;
        while off < hi {
            let take = (hi - off).min(64 - off % 64);
            self.or_bits(off, take, u64::MAX);
            off += take;
        }
    }

    /// Little-endian packed bytes, `ceil(nbits / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.nbits.div_ceil(8));
        out
    }

    /// Inverse of [`Bitmap::to_bytes`]. Returns `None` when the byte count is
    /// wrong or padding bits past `nbits` are set.
    pub fn from_bytes(nbits: usize, bytes: &[u8]) -> Option<Bitmap> {
        if bytes.len() != nbits.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; words_for(nbits)];
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        let b = Bitmap { nbits, words };
        if b.tail_is_clear() {
            Some(b)
        } else {
            None
        }
    }

    fn tail_is_clear(&self) -> bool {
        match self.words.last() {
            Some(last) if !self.nbits.is_multiple_of(64) => last & !low_mask(self.nbits % 64) == 0,
            _ => true,
        }
    }

    fn clear_tail(&mut self) {
        if !self.nbits.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(self.nbits % 64);
            }
        }
    }

    #[inline]
    fn check_len(&self, other: &Bitmap) {
        assert_eq!(
            self.nbits, other.nbits,
            "bitmap length mismatch: {} vs {}",
            self.nbits, other.nbits
        );
    }
}

impl WordSource for Bitmap {
    fn nbits(&self) -> usize {
        self.nbits
    }

    #[inline]
    fn word(&self, idx: usize) -> u64 {
        self.words.get(idx).copied().unwrap_or(0)
    }

    fn num_words(&self) -> usize {
        self.words.len()
    }
}

impl fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nbits <= 128 {
            write!(f, "Bitmap({})", self)
        } else {
            write!(f, "Bitmap {{ nbits: {}, ones: {} }}", self.nbits, self.popcount())
        }
    }
}

/// Renders bit 0 first, e.g. `00110100`.
impl fmt::Display for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.nbits {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bitmap {
    type Err = String;

    /// Parses a string of `0`/`1`, bit 0 first.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit character {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Bitmap::from_bools(&bits))
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            self.current = *self.words.get(self.idx)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(s: &str) -> Bitmap {
        s.parse().unwrap()
    }

    #[test]
    fn and_not_definition() {
        assert_eq!(bm("10110").and_not(&bm("00100")), bm("10010"));
    }

    #[test]
    fn or_with_zero_is_identity() {
        let x = bm("1001101");
        assert_eq!(x.or(&Bitmap::new(7)), x);
    }

    #[test]
    fn first_level_mask_leaves_product_unchanged() {
        // Product row A^T e0 of the 8-vertex example, masked by pi0 = e0.
        let product = bm("00110100");
        let visited = bm("10000000");
        assert_eq!(product.and_not(&visited), bm("00110100"));
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn length_mismatch_panics() {
        let mut a = Bitmap::new(3);
        a.or_assign(&Bitmap::new(4));
    }

    #[test]
    fn set_get_popcount() {
        let mut b = Bitmap::new(130);
        for k in [0, 63, 64, 129] {
            b.set(k);
        }
        assert!(b.get(63) && b.get(64) && !b.get(65));
        assert_eq!(b.popcount(), 4);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        b.clear(63);
        assert_eq!(b.popcount(), 3);
    }

    #[test]
    fn ones_clears_padding() {
        let b = Bitmap::ones(70);
        assert_eq!(b.popcount(), 70);
        assert_eq!(b.words()[1], low_mask(6));
    }

    #[test]
    fn byte_order_is_little_endian_bitwise() {
        let b = Bitmap::from_indices(12, [0, 9]);
        assert_eq!(b.to_bytes(), vec![0b0000_0001, 0b0000_0010]);
        assert_eq!(Bitmap::from_bytes(12, &b.to_bytes()), Some(b));
        // Padding bit 12 set.
        assert_eq!(Bitmap::from_bytes(12, &[0, 0b0001_0000]), None);
        assert_eq!(Bitmap::from_bytes(12, &[0]), None);
    }

    #[test]
    fn slice_and_or_at_round_trip() {
        let b = Bitmap::from_indices(200, [1, 5, 63, 64, 100, 150, 199]);
        for (lo, hi) in [(0, 200), (3, 70), (60, 199), (64, 128), (7, 7)] {
            let s = b.slice(lo, hi);
            let expect: Vec<usize> = b.iter_ones().filter(|k| (lo..hi).contains(k)).map(|k| k - lo).collect();
            assert_eq!(s.iter_ones().collect::<Vec<_>>(), expect);
            let mut back = Bitmap::new(200);
            back.or_at(lo, &s);
            assert_eq!(back, b.slice(0, 200).and(&range_mask(200, lo, hi)));
        }
    }

    fn range_mask(n: usize, lo: usize, hi: usize) -> Bitmap {
        Bitmap::from_indices(n, lo..hi)
    }

    #[test]
    fn set_range_matches_per_bit() {
        for (lo, hi) in [(0, 0), (0, 64), (3, 130), (64, 65), (10, 11)] {
            let mut b = Bitmap::new(140);
            b.set_range(lo, hi);
            assert_eq!(b, range_mask(140, lo, hi));
        }
    }

    #[test]
    fn masked_source_matches_and() {
        let a = Bitmap::from_indices(100, (0..100).step_by(3));
        let m = Bitmap::from_indices(100, (0..100).step_by(2));
        let view = Masked::new(&a, &m);
        assert_eq!(Bitmap::from_source(&view), a.and(&m));
        assert_eq!(view.count_ones(), a.and(&m).popcount());
    }

    fn all_bitmaps(n: usize) -> Vec<Bitmap> {
        (0..1u32 << n)
            .map(|v| Bitmap::from_indices(n, (0..n).filter(|k| v >> k & 1 == 1)))
            .collect()
    }

    #[test]
    fn identity_laws_exhaustive_up_to_12_bits() {
        for n in 0..=12usize {
            let zero = Bitmap::new(n);
            let full = Bitmap::ones(n);
            for a in all_bitmaps(n) {
                assert_eq!(a.and_not(&zero), a);
                assert_eq!(a.or(&zero), a);
                assert_eq!(a.and(&full), a);
                assert!(a.and_not(&a).none());
            }
        }
    }

    #[test]
    fn binary_laws_exhaustive_small() {
        for n in 0..=6usize {
            let all = all_bitmaps(n);
            for a in &all {
                for b in &all {
                    assert_eq!(a.or(b), b.or(a));
                    assert_eq!(a.and(b), b.and(a));
                    assert_eq!(a.and_not(b), a.and(&Bitmap::ones(n).and_not(b)));
                    for c in &all {
                        assert_eq!(a.or(b).or(c), a.or(&b.or(c)));
                        assert_eq!(a.and(b).and(c), a.and(&b.and(c)));
                    }
                }
            }
        }
    }
}
