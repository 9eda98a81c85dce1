#![no_main]

use bfs_sieve::bitvec::{decode, decode_with_limit, Codec, HEADER_LEN};
use libfuzzer_sys::fuzz_target;

const LIMIT: u64 = 1 << 24;

fuzz_target!(|data: &[u8]| {
    let Ok(bitmap) = decode_with_limit(data, LIMIT) else {
        return;
    };
    let codec = match data[0] {
        0 => Codec::Raw,
        1 if data.len() > HEADER_LEN => Codec::Wah {
            word_width: data[HEADER_LEN],
        },
        1 => Codec::default(),
        2 => Codec::Sparse,
        _ => Codec::Rle,
    };
    let again = codec.encode(&bitmap);
    assert_eq!(decode(&again).unwrap(), bitmap);
    assert_eq!(decode(&codec.encode_compact(&bitmap)).unwrap(), bitmap);
});
