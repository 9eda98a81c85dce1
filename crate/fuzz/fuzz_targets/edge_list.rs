#![no_main]

use bfs_sieve::graphgen::{build_csr, EdgeList};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(edges) = EdgeList::from_bytes(data) else {
        return;
    };
    assert_eq!(edges.to_bytes(), data);
    if edges.vertex_count() <= 1 << 16 {
        let csr = build_csr(&edges).unwrap();
        assert!(csr.is_symmetric());
        for &(u, v) in edges.edges() {
            assert_eq!(csr.has_edge(u, v), u != v);
        }
    }
});
