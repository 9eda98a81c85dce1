use super::{EdgeList, GraphError, VertexId};

/// Compressed sparse row adjacency, stored pre-transposed: row `v` lists the
/// sources `u` of edges `(u, v)`. Benchmark graphs are symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    column_indices: Vec<VertexId>,
}

impl CsrMatrix {
    /// Builds a matrix from explicit rows. Rows must be strictly increasing,
    /// in range and free of self-loops; symmetry is not required.
    pub fn from_rows(rows: &[Vec<VertexId>]) -> Result<Self, GraphError> {
        let n = rows.len();
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        let mut column_indices = Vec::new();
        for (v, row) in rows.iter().enumerate() {
            for (k, &u) in row.iter().enumerate() {
                if u >= n as u64 {
                    return Err(GraphError::Bounds { id: u, n: n as u64 });
                }
                if u == v as u64 {
                    return Err(GraphError::Format(format!("self-loop at {v}")));
                }
                if k > 0 && row[k - 1] >= u {
                    return Err(GraphError::Format(format!("row {v} is not strictly increasing")));
                }
            }
            column_indices.extend_from_slice(row);
            row_offsets.push(column_indices.len());
        }
        Ok(CsrMatrix {
            n,
            row_offsets,
            column_indices,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries (twice the undirected edge count for symmetric graphs).
    pub fn nnz(&self) -> usize {
        self.column_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[VertexId] {
        &self.column_indices
    }

    pub fn row(&self, v: usize) -> &[VertexId] {
        &self.column_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        (u as usize) < self.n && self.row(u as usize).binary_search(&v).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|v| self.row(v).iter().all(|&u| self.has_edge(u, v as u64)))
    }
}

/// Builds the cleaned symmetric CSR of an edge list: every tuple `(u, v)`
/// with `u != v` contributes `v` to row `u` and `u` to row `v`; duplicates
/// and self-loops are dropped and rows are sorted.
pub fn build_csr(edges: &EdgeList) -> Result<CsrMatrix, GraphError> {
    let n = usize::try_from(edges.vertex_count())
        .map_err(|_| GraphError::Capacity("vertex count exceeds address space".into()))?;
    build_csr_from_pairs(edges.edges(), n)
}

pub fn build_csr_from_pairs(pairs: &[(VertexId, VertexId)], n: usize) -> Result<CsrMatrix, GraphError> {
    let mut degree = vec![0usize; n + 1];
    for &(u, v) in pairs {
        for id in [u, v] {
            if id >= n as u64 {
                return Err(GraphError::Bounds { id, n: n as u64 });
            }
        }
        if u != v {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    for v in 0..n {
        offsets.push(offsets[v] + degree[v]);
    }
    let mut fill = offsets.clone();
    let mut columns = vec![0 as VertexId; offsets[n]];
    for &(u, v) in pairs {
        if u != v {
            columns[fill[u as usize]] = v;
            fill[u as usize] += 1;
            columns[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
    }

    // Sort and dedup each row, compacting in place.
    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0usize);
    let mut write = 0usize;
    for v in 0..n {
        let (lo, hi) = (offsets[v], offsets[v + 1]);
        columns[lo..hi].sort_unstable();
        let mut last = None;
        for k in lo..hi {
            let u = columns[k];
            if last != Some(u) {
                columns[write] = u;
                write += 1;
                last = Some(u);
            }
        }
        row_offsets.push(write);
    }
    columns.truncate(write);
    columns.shrink_to_fit();
    Ok(CsrMatrix {
        n,
        row_offsets,
        column_indices: columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{eight_vertex_edges, EIGHT_VERTEX_ROWS};

    #[test]
    fn eight_vertex_example_matches_printed_matrix() {
        let csr = build_csr(&eight_vertex_edges()).unwrap();
        for (v, row) in EIGHT_VERTEX_ROWS.iter().enumerate() {
            assert_eq!(csr.row(v), *row, "row {v}");
        }
        assert_eq!(csr.row_offsets(), &[0, 3, 5, 7, 10, 12, 15, 17, 20]);
        assert!(csr.is_symmetric());
    }

    #[test]
    fn empty_edge_list() {
        let csr = build_csr_from_pairs(&[], 4).unwrap();
        assert_eq!(csr.row_offsets(), &[0, 0, 0, 0, 0]);
        assert_eq!(csr.nnz(), 0);
    }

    #[test]
    fn dedup_and_self_loop_removal() {
        let csr = build_csr_from_pairs(&[(1, 2), (1, 2), (2, 1), (2, 2)], 3).unwrap();
        assert_eq!(csr.row(0), &[] as &[u64]);
        assert_eq!(csr.row(1), &[2]);
        assert_eq!(csr.row(2), &[1]);
    }

    #[test]
    fn out_of_bounds_id() {
        assert!(matches!(
            build_csr_from_pairs(&[(0, 3)], 3),
            Err(GraphError::Bounds { id: 3, n: 3 })
        ));
    }

    #[test]
    fn from_rows_validation() {
        assert!(CsrMatrix::from_rows(&[vec![1], vec![]]).is_ok());
        assert!(CsrMatrix::from_rows(&[vec![0]]).is_err());
        assert!(CsrMatrix::from_rows(&[vec![2], vec![]]).is_err());
        assert!(CsrMatrix::from_rows(&[vec![], vec![0, 0], vec![]]).is_err());
    }
}
