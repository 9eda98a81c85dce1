#![no_main]

use bfs_sieve::bitvec::{Bitmap, Codec};
use bfs_sieve::engine::Variant;
use bfs_sieve::experiment::SourcePolicy;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(codec) = text.parse::<Codec>() {
        assert_eq!(codec.to_string().parse::<Codec>().unwrap(), codec);
    }
    if let Ok(bitmap) = text.parse::<Bitmap>() {
        assert_eq!(bitmap.to_string().parse::<Bitmap>().unwrap(), bitmap);
    }
    if let Ok(variant) = text.parse::<Variant>() {
        assert_eq!(variant.to_string().parse::<Variant>().unwrap(), variant);
    }
    let _ = SourcePolicy::parse(text, 0);
});
