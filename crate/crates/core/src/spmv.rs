//! Frontier expansion as a sparse matrix-vector product over the
//! (select, max) semiring.
//!
//! For a local row `v`, the product is nonzero when any column `u` of that
//! row is in the frontier, and its value is the largest such `u`. That value
//! becomes `v`'s parent, which makes the BFS tree independent of rank count,
//! scheduling and exchange variant.

use crate::bitvec::Bitmap;
use crate::graphgen::{CsrPartition, VertexId};

pub const NO_PARENT: VertexId = VertexId::MAX;
pub const UNREACHED: u32 = u32::MAX;

/// Raw product `A_i ⊗ f` before masking with the visited set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub hits: Bitmap,
    /// `(local row, max contributing column)` for every set bit of `hits`,
    /// ascending by row.
    pub candidates: Vec<(usize, VertexId)>,
}

/// Newly discovered vertices of one level on one rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    /// `t_i`, local length.
    pub next: Bitmap,
    /// `(local row, parent)` for each set bit of `next`, ascending.
    pub parents: Vec<(usize, VertexId)>,
}

impl Product {
    /// `t_i ⊙ !π_i`.
    pub fn mask(self, visited: &Bitmap) -> Expansion {
        assert_eq!(
            self.hits.len(),
            visited.len(),
            "visited set length does not match local rows"
        );
        let mut next = self.hits;
        next.and_not_assign(visited);
        let parents = self.candidates.into_iter().filter(|&(r, _)| !visited.get(r)).collect();
        Expansion { next, parents }
    }
}

/// `A_i ⊗ f` with a global-length frontier.
pub fn multiply(part: &CsrPartition, frontier: &Bitmap) -> Product {
    assert_eq!(
        frontier.len(),
        part.layout().n(),
        "frontier length must equal the vertex count"
    );
    let rows = part.local_rows();
    let mut hits = Bitmap::new(rows);
    let mut candidates = Vec::new();
    for r in 0..rows {
        if let Some(&u) = part.row(r).iter().rev().find(|&&u| frontier.get(u as usize)) {
            hits.set(r);
            candidates.push((r, u));
        }
    }
    Product { hits, candidates }
}

/// `Σ_j A_{i,j} ⊗ f_{i,j}`, where `pieces[j]` covers rank `j`'s rows.
///
/// Each row is split into its per-block column segments. A per-block maximum
/// is taken inside each segment and the largest across blocks wins. Segments
/// are visited from the highest block down, so the first block with a hit
/// already holds the cross-block maximum.
pub fn multiply_blocked(part: &CsrPartition, pieces: &[Bitmap]) -> Product {
    let layout = part.layout();
    assert_eq!(pieces.len(), layout.ranks(), "need one piece per rank");
    for (j, piece) in pieces.iter().enumerate() {
        assert_eq!(
            piece.len(),
            layout.len(j),
            "piece {j} length does not match rank {j}'s row range"
        );
    }
    let rows = part.local_rows();
    let mut hits = Bitmap::new(rows);
    let mut candidates = Vec::new();
    for r in 0..rows {
        let mut row = part.row(r);
        while let Some(&last) = row.last() {
            let j = layout.owner(last);
            let lo = layout.range(j).start;
            let split = row.partition_point(|&c| (c as usize) < lo);
            let (rest, segment) = row.split_at(split);
            let piece = &pieces[j];
            if let Some(&u) = segment.iter().rev().find(|&&u| piece.get(u as usize - lo)) {
                hits.set(r);
                candidates.push((r, u));
                break;
            }
            row = rest;
        }
    }
    Product { hits, candidates }
}

/// Multiply then mask: the vertices of this rank first reached from `f`.
pub fn expand(part: &CsrPartition, frontier: &Bitmap, visited: &Bitmap) -> Expansion {
    multiply(part, frontier).mask(visited)
}

pub fn expand_blocked(part: &CsrPartition, pieces: &[Bitmap], visited: &Bitmap) -> Expansion {
    multiply_blocked(part, pieces).mask(visited)
}

/// Per-rank traversal state.
#[derive(Debug, Clone)]
pub struct LevelState {
    /// First global row owned by the rank.
    pub offset: usize,
    /// `π_i`.
    pub visited: Bitmap,
    /// `f_i`, the rank's slice of the current frontier.
    pub frontier: Bitmap,
    pub parents: Vec<VertexId>,
    pub levels: Vec<u32>,
    pub level: u32,
}

impl LevelState {
    /// Level-0 state: only `source` is visited, and only on its owner.
    pub fn new(part: &CsrPartition, source: VertexId) -> Self {
        let range = part.row_range();
        let rows = range.len();
        let mut state = LevelState {
            offset: range.start,
            visited: Bitmap::new(rows),
            frontier: Bitmap::new(rows),
            parents: vec![NO_PARENT; rows],
            levels: vec![UNREACHED; rows],
            level: 0,
        };
        if range.contains(&(source as usize)) {
            let r = source as usize - range.start;
            state.visited.set(r);
            state.frontier.set(r);
            state.parents[r] = source;
            state.levels[r] = 0;
        }
        state
    }

    /// `π_i ← π_i + t_i`, `f_i ← t_i`, advance the level and record parents.
    pub fn apply(&mut self, expansion: Expansion) {
        let level = self.level + 1;
        for &(r, parent) in &expansion.parents {
            self.parents[r] = parent;
            self.levels[r] = level;
        }
        self.visited.or_assign(&expansion.next);
        self.frontier = expansion.next;
        self.level = level;
    }

    pub fn global_id(&self, local: usize) -> VertexId {
        (self.offset + local) as VertexId
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::eight_vertex_csr;
    use crate::graphgen::{build_csr_from_pairs, partition_rows};

    fn global_expand(f: &Bitmap, visited_global: &Bitmap, p: usize) -> (Bitmap, Vec<(u64, u64)>) {
        let parts = partition_rows(&eight_vertex_csr(), p).unwrap();
        let mut t = Bitmap::new(8);
        let mut parents = Vec::new();
        for part in &parts {
            let range = part.row_range();
            let e = expand(part, f, &visited_global.slice(range.start, range.end));
            t.or_at(range.start, &e.next);
            parents.extend(e.parents.iter().map(|&(r, u)| ((range.start + r) as u64, u)));
        }
        (t, parents)
    }

    #[test]
    fn first_level_of_example() {
        let e0: Bitmap = "10000000".parse().unwrap();
        for p in [1, 2, 4, 8] {
            let (t, parents) = global_expand(&e0, &e0, p);
            assert_eq!(t, "00110100".parse().unwrap());
            assert_eq!(parents, vec![(2, 0), (3, 0), (5, 0)]);
        }
    }

    #[test]
    fn empty_frontier_annihilates() {
        let (t, parents) = global_expand(&Bitmap::new(8), &Bitmap::new(8), 4);
        assert!(t.none());
        assert!(parents.is_empty());
    }

    #[test]
    fn parent_is_highest_label() {
        // Level 3 of the example: vertex 1 sees frontier {4, 6, 7}; max is 7.
        let f: Bitmap = "00001011".parse().unwrap();
        let visited: Bitmap = "10111111".parse().unwrap();
        let (t, parents) = global_expand(&f, &visited, 2);
        assert_eq!(t, "01000000".parse().unwrap());
        assert_eq!(parents, vec![(1, 7)]);
    }

    #[test]
    fn blocked_equals_unblocked_on_unsieved_pieces() {
        let csr = eight_vertex_csr();
        let f: Bitmap = "10000000".parse().unwrap();
        for p in [1, 2, 3, 4, 8] {
            for part in partition_rows(&csr, p).unwrap() {
                let layout = *part.layout();
                let pieces: Vec<_> = (0..p)
                    .map(|j| {
                        let r = layout.range(j);
                        f.slice(r.start, r.end)
                    })
                    .collect();
                let visited = Bitmap::new(part.local_rows());
                assert_eq!(expand_blocked(&part, &pieces, &visited), expand(&part, &f, &visited));
                let empty: Vec<_> = (0..p).map(|j| Bitmap::new(layout.len(j))).collect();
                assert!(expand_blocked(&part, &empty, &visited).next.none());
            }
        }
    }

    #[test]
    fn apply_updates_visited_and_levels() {
        let parts = partition_rows(&eight_vertex_csr(), 1).unwrap();
        let mut state = LevelState::new(&parts[0], 0);
        assert_eq!(state.visited, "10000000".parse().unwrap());
        let mut order = vec![state.frontier.iter_ones().collect::<Vec<_>>()];
        loop {
            let e = expand(&parts[0], &state.frontier, &state.visited);
            if e.next.none() {
                // Empty step leaves the visited set alone.
                let before = state.visited.clone();
                state.apply(e);
                assert_eq!(state.visited, before);
                break;
            }
            state.apply(e);
            order.push(state.frontier.iter_ones().collect());
            if state.level == 1 {
                assert_eq!(state.visited, "10110100".parse().unwrap());
            }
        }
        assert_eq!(order, vec![vec![0], vec![2, 3, 5], vec![4, 6, 7], vec![1]]);
        assert_eq!(state.visited, Bitmap::ones(8));
        assert_eq!(state.parents, vec![0, 7, 0, 0, 2, 0, 3, 5]);
        assert_eq!(state.levels, vec![0, 3, 1, 1, 2, 1, 2, 2]);
    }

    #[test]
    #[should_panic(expected = "frontier length")]
    fn frontier_dimension_mismatch_panics() {
        let parts = partition_rows(&eight_vertex_csr(), 2).unwrap();
        expand(&parts[0], &Bitmap::new(7), &Bitmap::new(4));
    }

    #[test]
    #[should_panic(expected = "piece 1 length")]
    fn piece_dimension_mismatch_panics() {
        let parts = partition_rows(&eight_vertex_csr(), 2).unwrap();
        expand_blocked(&parts[0], &[Bitmap::new(4), Bitmap::new(3)], &Bitmap::new(4));
    }

    /// Brute force over the dense matrix: for each row, scan every column.
    fn brute_force(dense: &[Vec<bool>], f: &Bitmap, visited: &Bitmap) -> (Bitmap, Vec<(usize, u64)>) {
        let n = dense.len();
        let mut t = Bitmap::new(n);
        let mut parents = Vec::new();
        for (v, row) in dense.iter().enumerate() {
            let best = (0..n).rfind(|&u| row[u] && f.get(u)).map(|u| u as u64);
            if let Some(u) = best {
                if !visited.get(v) {
                    t.set(v);
                    parents.push((v, u));
                }
            }
        }
        (t, parents)
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut x = 0x1234_5678u64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            x
        };
        for _ in 0..50 {
            let n = 64;
            let pairs: Vec<_> = (0..150).map(|_| (next() % n, next() % n)).collect();
            let csr = build_csr_from_pairs(&pairs, n as usize).unwrap();
            let mut dense = vec![vec![false; 64]; 64];
            for (v, row) in dense.iter_mut().enumerate() {
                for &u in csr.row(v) {
                    row[u as usize] = true;
                }
            }
            let f = Bitmap::from_indices(64, (0..64).filter(|_| next() % 4 == 0));
            let visited = Bitmap::from_indices(64, (0..64).filter(|_| next() % 3 == 0));
            let (want_t, want_parents) = brute_force(&dense, &f, &visited);
            for p in [1, 3, 4, 7] {
                let mut t = Bitmap::new(64);
                let mut parents = Vec::new();
                for part in partition_rows(&csr, p).unwrap() {
                    let r = part.row_range();
                    let e = expand(&part, &f, &visited.slice(r.start, r.end));
                    t.or_at(r.start, &e.next);
                    parents.extend(e.parents.iter().map(|&(l, u)| (r.start + l, u)));
                }
                assert_eq!(t, want_t);
                assert_eq!(parents, want_parents);
            }
        }
    }
}
