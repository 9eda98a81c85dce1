//! The 8-vertex undirected example graph used throughout the tests and
//! documentation. BFS from vertex 0 visits `{0}`, `{2, 3, 5}`, `{4, 6, 7}`,
//! `{1}`.

use crate::graphgen::{build_csr, CsrMatrix, EdgeList};

/// Adjacency rows of the example graph.
pub const EIGHT_VERTEX_ROWS: [&[u64]; 8] = [
    &[2, 3, 5],
    &[6, 7],
    &[0, 4],
    &[0, 5, 6],
    &[2, 7],
    &[0, 3, 7],
    &[1, 3],
    &[1, 4, 5],
];

/// One tuple per undirected edge, lower endpoint first.
pub fn eight_vertex_edges() -> EdgeList {
    let edges = EIGHT_VERTEX_ROWS
        .iter()
        .enumerate()
        .flat_map(|(v, row)| {
            row.iter()
                .filter(move |&&u| (v as u64) < u)
                .map(move |&u| (v as u64, u))
        })
        .collect();
    EdgeList::new(8, edges).expect("example ids are in range")
}

pub fn eight_vertex_csr() -> CsrMatrix {
    build_csr(&eight_vertex_edges()).expect("example graph is valid")
}
