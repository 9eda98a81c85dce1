use std::io::{Read, Write};

use super::{GraphError, VertexId};

/// Magic prefix of the binary edge-list file.
pub const EDGE_LIST_MAGIC: [u8; 8] = *b"KRONEL1\0";

const HEADER_LEN: usize = 24;

/// Raw edge tuples over `n` vertices, duplicates and self-loops included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    n: u64,
    edges: Vec<(VertexId, VertexId)>,
}

impl EdgeList {
    pub fn new(n: u64, edges: Vec<(VertexId, VertexId)>) -> Result<Self, GraphError> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(GraphError::Bounds { id: u.max(v), n });
        }
        Ok(EdgeList { n, edges })
    }

    pub fn vertex_count(&self) -> u64 {
        self.n
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Serializes as `KRONEL1\0`, `u64 n`, `u64 count`, then `count` pairs of
    /// `u64`, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.edges.len());
        out.extend_from_slice(&EDGE_LIST_MAGIC);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&(self.edges.len() as u64).to_le_bytes());
        for &(u, v) in &self.edges {
            out.extend_from_slice(&u.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GraphError> {
        if bytes.len() < HEADER_LEN {
            return Err(GraphError::Format("edge list shorter than header".into()));
        }
        if bytes[..8] != EDGE_LIST_MAGIC {
            return Err(GraphError::Format("bad edge list magic".into()));
        }
        let n = u64_at(bytes, 8);
        let count = u64_at(bytes, 16);
        let body = &bytes[HEADER_LEN..];
        if count as u128 * 16 != body.len() as u128 {
            return Err(GraphError::Format(format!(
                "header declares {count} edges but body holds {} bytes",
                body.len()
            )));
        }
        let edges = body.chunks_exact(16).map(|c| (u64_at(c, 0), u64_at(c, 8))).collect();
        EdgeList::new(n, edges)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, GraphError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        EdgeList::from_bytes(&bytes)
    }
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}
