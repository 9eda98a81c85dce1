#![no_main]

use bfs_sieve::bitvec::{decode, wah, Bitmap, Codec};
use libfuzzer_sys::fuzz_target;

// Byte 0 picks the word width, byte 1 trims the bit length, the rest is the
// bitmap.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let width = wah::MIN_WORD_WIDTH + data[0] % (wah::MAX_WORD_WIDTH - wah::MIN_WORD_WIDTH + 1);
    let body = &data[2..];
    let nbits = (body.len() * 8).saturating_sub((data[1] % 8) as usize);
    let bits: Vec<bool> = (0..nbits).map(|k| body[k / 8] >> (k % 8) & 1 == 1).collect();
    let bitmap = Bitmap::from_bools(&bits);
    let vector = wah::encode(&bitmap, width);
    assert_eq!(wah::decode(&vector).unwrap(), bitmap);
    let codec = Codec::Wah { word_width: width };
    let msg = codec.encode(&bitmap);
    assert_eq!(msg.len(), codec.encoded_size(&bitmap));
    assert_eq!(decode(&msg).unwrap(), bitmap);
});
