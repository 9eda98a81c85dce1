use std::ops::Range;

use super::{CsrMatrix, GraphError, VertexId};

/// Uniform 1-D blocking of `n` rows over `p` ranks: rank `i` owns
/// `[i * b, min((i + 1) * b, n))` with `b = ceil(n / p)`. Trailing ranks may
/// own fewer rows, or none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    n: usize,
    p: usize,
    block: usize,
}

impl BlockLayout {
    pub fn new(n: usize, p: usize) -> Result<Self, GraphError> {
        if p == 0 {
            return Err(GraphError::Config("rank count must be at least 1".into()));
        }
        if p > n {
            return Err(GraphError::Config(format!("{p} ranks exceed {n} vertices")));
        }
        Ok(BlockLayout {
            n,
            p,
            block: n.div_ceil(p),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ranks(&self) -> usize {
        self.p
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn range(&self, rank: usize) -> Range<usize> {
        let lo = (rank * self.block).min(self.n);
        let hi = ((rank + 1) * self.block).min(self.n);
        lo..hi
    }

    pub fn len(&self, rank: usize) -> usize {
        self.range(rank).len()
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> usize {
        v as usize / self.block
    }

    /// `(owner, local index)` of a global vertex.
    #[inline]
    pub fn locate(&self, v: VertexId) -> (usize, usize) {
        let v = v as usize;
        (v / self.block, v % self.block)
    }
}

/// Rank `i`'s block of rows `A_i`, holding global column ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPartition {
    layout: BlockLayout,
    rank: usize,
    row_offsets: Vec<usize>,
    columns: Vec<VertexId>,
}

impl CsrPartition {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ranks(&self) -> usize {
        self.layout.p
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// Global rows `[lo, hi)` owned by this rank.
    pub fn row_range(&self) -> Range<usize> {
        self.layout.range(self.rank)
    }

    pub fn local_rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.columns.len()
    }

    /// Sorted global columns of local row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> &[VertexId] {
        &self.columns[self.row_offsets[r]..self.row_offsets[r + 1]]
    }

    /// Every `(global row, global column)` entry.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let lo = self.row_range().start as u64;
        (0..self.local_rows()).flat_map(move |r| self.row(r).iter().map(move |&c| (lo + r as u64, c)))
    }

    /// Read-only view of `A_{i,j}`: the entries whose column lies in rank
    /// `j`'s row range.
    pub fn sub_block(&self, j: usize) -> Result<SubBlock<'_>, GraphError> {
        if j >= self.layout.p {
            return Err(GraphError::Rank {
                rank: j,
                p: self.layout.p,
            });
        }
        Ok(SubBlock {
            part: self,
            columns: self.layout.range(j),
        })
    }
}

/// Column-filtered view of one partition. Borrows the partition's arrays;
/// each row is narrowed by binary search.
#[derive(Debug, Clone)]
pub struct SubBlock<'a> {
    part: &'a CsrPartition,
    columns: Range<usize>,
}

impl<'a> SubBlock<'a> {
    /// Global column range `[lo, hi)` of the view.
    pub fn column_range(&self) -> Range<usize> {
        self.columns.clone()
    }

    /// Columns of local row `r` that fall inside the view.
    pub fn row(&self, r: usize) -> &'a [VertexId] {
        let row = self.part.row(r);
        let lo = row.partition_point(|&c| (c as usize) < self.columns.start);
        let hi = row.partition_point(|&c| (c as usize) < self.columns.end);
        &row[lo..hi]
    }

    /// `(global row, global column)` entries of the view.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + 'a {
        let view = self.clone();
        let lo = self.part.row_range().start as u64;
        (0..self.part.local_rows()).flat_map(move |r| view.row(r).iter().map(move |&c| (lo + r as u64, c)))
    }
}

/// Splits `csr` into `p` block-rows.
pub fn partition_rows(csr: &CsrMatrix, p: usize) -> Result<Vec<CsrPartition>, GraphError> {
    let layout = BlockLayout::new(csr.n(), p)?;
    Ok((0..p)
        .map(|rank| {
            let rows = layout.range(rank);
            let base = csr.row_offsets()[rows.start];
            let row_offsets = csr.row_offsets()[rows.start..=rows.end]
                .iter()
                .map(|o| o - base)
                .collect();
            let columns = csr.column_indices()[base..csr.row_offsets()[rows.end]].to_vec();
            CsrPartition {
                layout,
                rank,
                row_offsets,
                columns,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::eight_vertex_csr;
    use crate::graphgen::build_csr_from_pairs;
    use std::collections::BTreeSet;

    fn ranges(n: usize, p: usize) -> Vec<Range<usize>> {
        let l = BlockLayout::new(n, p).unwrap();
        (0..p).map(|i| l.range(i)).collect()
    }

    #[test]
    fn blocking() {
        assert_eq!(ranges(8, 4), vec![0..2, 2..4, 4..6, 6..8]);
        assert_eq!(
            ranges(10, 4).iter().map(|r| r.len()).collect::<Vec<_>>(),
            vec![3, 3, 3, 1]
        );
        assert_eq!(ranges(9, 4), vec![0..3, 3..6, 6..9, 9..9]);
        assert!(matches!(BlockLayout::new(3, 4), Err(GraphError::Config(_))));
        assert!(BlockLayout::new(3, 0).is_err());
    }

    #[test]
    fn single_partition_is_identity() {
        let csr = eight_vertex_csr();
        let parts = partition_rows(&csr, 1).unwrap();
        assert_eq!(parts.len(), 1);
        let entries: Vec<_> = parts[0].entries().collect();
        let expect: Vec<_> = (0..8)
            .flat_map(|v| csr.row(v).iter().map(move |&c| (v as u64, c)))
            .collect();
        assert_eq!(entries, expect);
    }

    #[test]
    fn sub_block_of_example() {
        let parts = partition_rows(&eight_vertex_csr(), 4).unwrap();
        // Rows {6, 7} restricted to columns {2, 3}.
        let view = parts[3].sub_block(1).unwrap();
        assert_eq!(view.iter().collect::<Vec<_>>(), vec![(6, 3)]);
        // Rows {0, 1} have no column in {0, 1}.
        assert_eq!(parts[0].sub_block(0).unwrap().iter().count(), 0);
        assert!(matches!(parts[0].sub_block(4), Err(GraphError::Rank { rank: 4, p: 4 })));
    }

    #[test]
    fn views_tile_each_partition() {
        // Deterministic pseudo-random 32-vertex graph.
        let mut pairs = Vec::new();
        let mut x = 12345u64;
        for _ in 0..90 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pairs.push(((x >> 33) % 32, (x >> 13) % 32));
        }
        let csr = build_csr_from_pairs(&pairs, 32).unwrap();
        let all: BTreeSet<_> = (0..32)
            .flat_map(|v| csr.row(v).iter().map(move |&c| (v as u64, c)))
            .collect();
        for p in [1, 2, 3, 5, 8, 32] {
            let parts = partition_rows(&csr, p).unwrap();
            let mut union = Vec::new();
            for part in &parts {
                let whole: BTreeSet<_> = part.entries().collect();
                let mut from_views = Vec::new();
                for j in 0..p {
                    from_views.extend(part.sub_block(j).unwrap().iter());
                }
                assert_eq!(from_views.len(), whole.len());
                assert_eq!(from_views.iter().copied().collect::<BTreeSet<_>>(), whole);
                union.extend(from_views);
            }
            assert_eq!(union.len(), all.len());
            assert_eq!(union.into_iter().collect::<BTreeSet<_>>(), all);
        }
    }
}
