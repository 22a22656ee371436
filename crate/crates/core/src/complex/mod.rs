//! Clique complexes of neighbour graphs, their intersections, and the
//! simplex-wise schedule that realizes the layer/intersection zigzag.

mod schedule;
mod simplex;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geometry::NeighborGraph;

pub use schedule::{
    replay, schedule_zigzag, EventOp, SpaceLabel, SpaceMark, ZigzagEvent, ZigzagSchedule,
};
pub use simplex::Simplex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex {simplex} is missing its face {face}")]
    NotFaceClosed { simplex: Simplex, face: Simplex },
    #[error("max_dim must be 0, 1 or 2, got {0}")]
    InvalidMaxDim(usize),
    #[error("zigzag needs an odd number of complexes (layer, intersection, ..., layer), got {0}")]
    BadSequenceLength(usize),
    #[error("intersection complex at position {position} is not a subcomplex of its {side} neighbour: {simplex} is missing")]
    NotSubcomplex {
        position: usize,
        side: &'static str,
        simplex: Simplex,
    },
    #[error("event {index}: cannot add {simplex}: {reason}")]
    InvalidAdd {
        index: usize,
        simplex: Simplex,
        reason: &'static str,
    },
    #[error("event {index}: cannot remove {simplex}: {reason}")]
    InvalidRemove {
        index: usize,
        simplex: Simplex,
        reason: &'static str,
    },
    #[error("space mark {mark} points at event {event_index}, beyond or before its neighbours")]
    BadMark { mark: usize, event_index: usize },
}

/// A face-closed set of simplices of dimension at most 2.
///
/// Each dimension is stored as a sorted vector of vertex tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    vertices: Vec<u32>,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a complex from arbitrary simplices, rejecting sets that are not
    /// closed under taking faces. Duplicates are ignored.
    pub fn from_simplices(
        simplices: impl IntoIterator<Item = Simplex>,
    ) -> Result<Self, ComplexError> {
        let set: BTreeSet<Simplex> = simplices.into_iter().collect();
        for s in &set {
            for face in s.facets() {
                if !set.contains(&face) {
                    return Err(ComplexError::NotFaceClosed { simplex: *s, face });
                }
            }
        }
        Ok(Self::from_sorted_unchecked(set.into_iter()))
    }

    /// Caller guarantees sorted, deduplicated, face-closed input.
    fn from_sorted_unchecked(simplices: impl Iterator<Item = Simplex>) -> Self {
        let mut out = Self::default();
        for s in simplices {
            let v = s.vertices();
            match s.dim() {
                0 => out.vertices.push(v[0]),
                1 => out.edges.push([v[0], v[1]]),
                _ => out.triangles.push([v[0], v[1], v[2]]),
            }
        }
        out
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of simplices of dimension `dim`.
    pub fn count(&self, dim: usize) -> usize {
        match dim {
            0 => self.vertices.len(),
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        (0..3).rev().find(|&d| self.count(d) > 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        let v = s.vertices();
        match s.dim() {
            0 => self.vertices.binary_search(&v[0]).is_ok(),
            1 => self.edges.binary_search(&[v[0], v[1]]).is_ok(),
            _ => self.triangles.binary_search(&[v[0], v[1], v[2]]).is_ok(),
        }
    }

    /// All simplices in ascending (dimension, vertex tuple) order.
    pub fn simplices(&self) -> impl Iterator<Item = Simplex> + '_ {
        self.vertices
            .iter()
            .map(|&v| Simplex::vertex(v))
            .chain(self.edges.iter().map(|&[a, b]| Simplex::edge(a, b)))
            .chain(
                self.triangles
                    .iter()
                    .map(|&[a, b, c]| Simplex::triangle(a, b, c)),
            )
    }

    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        self.first_missing_from(other).is_none()
    }

    fn first_missing_from(&self, other: &Self) -> Option<Simplex> {
        self.simplices().find(|s| !other.contains(s))
    }

    /// Simplices of `self` absent from `other`, ascending.
    pub fn difference(&self, other: &Self) -> Vec<Simplex> {
        let mut out = Vec::new();
        out.extend(sorted_difference(&self.vertices, &other.vertices).map(Simplex::vertex));
        out.extend(sorted_difference(&self.edges, &other.edges).map(|[a, b]| Simplex::edge(a, b)));
        out.extend(
            sorted_difference(&self.triangles, &other.triangles)
                .map(|[a, b, c]| Simplex::triangle(a, b, c)),
        );
        out
    }

    /// Checks face closure; complexes built through this module always pass.
    pub fn validate(&self) -> Result<(), ComplexError> {
        Self::from_simplices(self.simplices()).map(|_| ())
    }
}

fn sorted_difference<'a, T: Ord + Copy>(a: &'a [T], b: &'a [T]) -> impl Iterator<Item = T> + 'a {
    let mut j = 0;
    a.iter().copied().filter(move |x| {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        !(j < b.len() && b[j] == *x)
    })
}

fn sorted_intersection<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Clique (flag) complex of `graph` truncated at `max_dim`: all vertices
/// `0..N`, then the graph edges, then one triangle per 3-clique.
pub fn clique_complex(
    graph: &NeighborGraph,
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    if max_dim > 2 {
        return Err(ComplexError::InvalidMaxDim(max_dim));
    }
    let mut out = SimplicialComplex {
        vertices: (0..graph.vertex_count() as u32).collect(),
        ..Default::default()
    };
    if max_dim >= 1 {
        out.edges = graph.edges().to_vec();
    }
    if max_dim >= 2 {
        let adj = graph.adjacency();
        for &[a, b] in graph.edges() {
            // Common neighbours above b keep each triangle (a < b < c) unique.
            let above_a = &adj[a as usize][adj[a as usize].partition_point(|&x| x <= b)..];
            let above_b = &adj[b as usize][adj[b as usize].partition_point(|&x| x <= b)..];
            for c in sorted_intersection(above_a, above_b) {
                out.triangles.push([a, b, c]);
            }
        }
        // Edges are sorted by (a, b) and c ascends within each edge.
        debug_assert!(out.triangles.windows(2).all(|w| w[0] < w[1]));
    }
    Ok(out)
}

/// Set intersection of two complexes over the same vertex universe.
pub fn intersect_complexes(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    SimplicialComplex {
        vertices: sorted_intersection(&a.vertices, &b.vertices),
        edges: sorted_intersection(&a.edges, &b.edges),
        triangles: sorted_intersection(&a.triangles, &b.triangles),
    }
}

/// The zigzag sequence `K_1, K_1 ∩ K_2, K_2, ..., K_L` for per-layer complexes.
pub fn zigzag_sequence(layers: &[SimplicialComplex]) -> Vec<SimplicialComplex> {
    let mut seq = Vec::with_capacity(2 * layers.len().saturating_sub(1) + 1);
    for (i, k) in layers.iter().enumerate() {
        if i > 0 {
            seq.push(intersect_complexes(&layers[i - 1], k));
        }
        seq.push(k.clone());
    }
    seq
}
