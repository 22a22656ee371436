use std::fmt;

use serde::{Deserialize, Serialize};

/// A simplex of dimension 0, 1 or 2 with strictly increasing vertex ids.
///
/// Ordering is by dimension, then lexicographic on the vertex tuple.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex {
    dim: u8,
    // Unused trailing slots are zero so that derived ordering stays lexicographic.
    verts: [u32; 3],
}

impl Simplex {
    pub fn vertex(v: u32) -> Self {
        Simplex {
            dim: 0,
            verts: [v, 0, 0],
        }
    }

    /// Edge on two distinct vertices, in either order.
    pub fn edge(a: u32, b: u32) -> Self {
        assert_ne!(a, b, "edge needs two distinct vertices");
        Simplex {
            dim: 1,
            verts: [a.min(b), a.max(b), 0],
        }
    }

    /// Triangle on three distinct vertices, in any order.
    pub fn triangle(a: u32, b: u32, c: u32) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        assert!(
            v[0] < v[1] && v[1] < v[2],
            "triangle needs three distinct vertices"
        );
        Simplex { dim: 2, verts: v }
    }

    /// Builds a simplex from 1 to 3 vertex ids, in any order.
    pub fn from_vertices(vs: &[u32]) -> Option<Self> {
        match *vs {
            [a] => Some(Self::vertex(a)),
            [a, b] if a != b => Some(Self::edge(a, b)),
            [a, b, c] if a != b && b != c && a != c => Some(Self::triangle(a, b, c)),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts[..=self.dim as usize]
    }

    /// Codimension-1 faces; empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        let v = self.verts;
        match self.dim {
            0 => Vec::new(),
            1 => vec![Self::vertex(v[0]), Self::vertex(v[1])],
            _ => vec![
                Self::edge(v[1], v[2]),
                Self::edge(v[0], v[2]),
                Self::edge(v[0], v[1]),
            ],
        }
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.vertices())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
