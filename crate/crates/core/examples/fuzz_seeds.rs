//! Writes the seed corpus for the fuzz targets.
//!
//! Usage: `cargo run -p bfs-sieve --example fuzz_seeds -- <corpus-dir>`

use std::fs;
use std::path::Path;

use bfs_sieve::bitvec::{Bitmap, Codec};
use bfs_sieve::graphgen::{generate_kronecker, EdgeList, GraphConfig};

fn write(dir: &Path, target: &str, name: &str, bytes: &[u8]) -> std::io::Result<()> {
    let d = dir.join(target);
    fs::create_dir_all(&d)?;
    fs::write(d.join(name), bytes)
}

fn bitmaps() -> Vec<(&'static str, Bitmap)> {
    vec![
        ("empty", Bitmap::new(0)),
        ("zeros", Bitmap::new(200)),
        ("ones", Bitmap::ones(130)),
        ("single", Bitmap::from_indices(300, [77])),
        (
            "mixed",
            Bitmap::from_indices(190, (0..190).filter(|k| k % 7 < 2 || (60..130).contains(k))),
        ),
    ]
}

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fuzz/corpus".into());
    let dir = Path::new(&dir);
    let codecs = [
        ("raw", Codec::Raw),
        ("sparse", Codec::Sparse),
        ("rle", Codec::Rle),
        ("wah64", Codec::Wah { word_width: 64 }),
        ("wah8", Codec::Wah { word_width: 8 }),
        ("wah4", Codec::Wah { word_width: 4 }),
    ];
    for (bname, b) in bitmaps() {
        for (cname, c) in &codecs {
            write(dir, "wire_decode", &format!("{cname}-{bname}"), &c.encode(&b))?;
        }
        write(
            dir,
            "wire_decode",
            &format!("compact-{bname}"),
            &Codec::Sparse.encode_compact(&b),
        )?;
        let mut body = b.to_bytes();
        for (w, tag) in [(60u8, "w64"), (4, "w8"), (0, "w4")] {
            let mut seed = vec![w, 0];
            seed.append(&mut body.clone());
            write(dir, "wah_roundtrip", &format!("{tag}-{bname}"), &seed)?;
        }
        let mut fused = vec![3u8];
        for byte in body.drain(..) {
            fused.extend([byte, byte.rotate_left(3)]);
        }
        for (pick, cname) in [
            (0u8, "raw"),
            (1, "sparse"),
            (2, "rle"),
            (3 + 4 * 60, "wah64"),
            (3, "wah4"),
        ] {
            fused[0] = pick;
            write(dir, "sieve_fused", &format!("{cname}-{bname}"), &fused)?;
        }
    }

    let tiny = EdgeList::new(8, vec![(0, 2), (0, 3), (0, 5), (1, 7), (2, 4), (3, 6), (5, 7), (4, 4)]).unwrap();
    write(dir, "edge_list", "tiny", &tiny.to_bytes())?;
    write(dir, "edge_list", "empty", &EdgeList::new(1, vec![]).unwrap().to_bytes())?;
    let kron = generate_kronecker(&GraphConfig::new(5, 4, 1)).unwrap();
    write(dir, "edge_list", "kronecker-5", &kron.to_bytes())?;

    for text in [
        "raw", "wah", "wah:17", "WAH:4", "sparse", "rle", "wah:3", "0110", "", "1", "bit", "dir-wah", "WAH",
        "random:8", "1,2,3", "random:0",
    ] {
        let name = if text.is_empty() {
            "blank".to_string()
        } else {
            text.replace([':', ','], "_")
        };
        write(dir, "text_parsers", &name, text.as_bytes())?;
    }
    Ok(())
}
