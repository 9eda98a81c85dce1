#![no_main]

use bfs_sieve::bitvec::{Bitmap, Codec};
use bfs_sieve::directory::{sieve_encode, sieve_then_encode, DirectoryVector};
use libfuzzer_sys::fuzz_target;

// Byte 0 picks the codec; the remaining bytes interleave frontier and
// directory bytes.
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else {
        return;
    };
    let codec = match pick % 4 {
        0 => Codec::Raw,
        1 => Codec::Sparse,
        2 => Codec::Rle,
        _ => Codec::Wah {
            word_width: 4 + pick / 4 % 61,
        },
    };
    let nbits = rest.len() / 2 * 8;
    let lane = |offset: usize| -> Vec<bool> {
        (0..nbits)
            .map(|k| rest[2 * (k / 8) + offset] >> (k % 8) & 1 == 1)
            .collect()
    };
    let frontier = Bitmap::from_bools(&lane(0));
    let v = DirectoryVector::from_bits(0, 1, Bitmap::from_bools(&lane(1)));
    assert_eq!(
        sieve_encode(&frontier, &v, &codec),
        sieve_then_encode(&frontier, &v, &codec)
    );
});
