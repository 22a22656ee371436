//! Exact Euclidean k-nearest-neighbour graphs over point clouds.
//!
//! Distances are brute force, `O(N^2 d)` per cloud. This is the dominant cost
//! of a layer; the complex and homology stages downstream work on the
//! `O(Nk)` edges it produces.

use std::cmp::Ordering;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("kNN graph needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("point cloud buffer has {len} values, expected {n} x {d}")]
    Shape { len: usize, n: usize, d: usize },
    #[error("non-finite coordinate at point {point}")]
    NonFinite { point: usize },
}

/// `N` points in `R^d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    n: usize,
    d: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(n: usize, d: usize, coords: Vec<T>) -> Result<Self, GeometryError> {
        if coords.len() != n * d {
            return Err(GeometryError::Shape {
                len: coords.len(),
                n,
                d,
            });
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite {
                point: i / d.max(1),
            });
        }
        Ok(PointCloud { n, d, coords })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, GeometryError> {
        let d = rows.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(GeometryError::Shape {
                    len: row.len(),
                    n: rows.len(),
                    d,
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(rows.len(), d, coords)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> T {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum()
    }
}

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborGraph {
    vertex_count: usize,
    k_requested: usize,
    k_effective: usize,
    /// Sorted, each `[u, v]` with `u < v`.
    edges: Vec<[u32; 2]>,
}

impl NeighborGraph {
    /// Graph from an explicit edge list; pairs are normalized, sorted and deduplicated.
    ///
    /// Panics on self-loops or vertices out of range.
    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut edges: Vec<[u32; 2]> = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a != b, "self-loop on vertex {a}");
                assert!(
                    (a.max(b) as usize) < vertex_count,
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                );
                [a.min(b), a.max(b)]
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        NeighborGraph {
            vertex_count,
            k_requested: 0,
            k_effective: 0,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// The `k` passed to [`knn_graph`]; 0 for explicit graphs.
    pub fn k_requested(&self) -> usize {
        self.k_requested
    }

    /// `min(k, N - 1)`.
    pub fn k_effective(&self) -> usize {
        self.k_effective
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn contains_edge(&self, a: u32, b: u32) -> bool {
        self.edges.binary_search(&[a.min(b), a.max(b)]).is_ok()
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &[a, b] in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// The `k` nearest other points of `i`, nearest first, ties by lower index.
fn nearest<T: Scalar>(points: &PointCloud<T>, i: usize, k: usize) -> Vec<usize> {
    let mut candidates: Vec<(T, usize)> = (0..points.len())
        .filter(|&j| j != i)
        .map(|j| (points.squared_distance(i, j), j))
        .collect();
    let cmp = |a: &(T, usize), b: &(T, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, cmp);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(cmp);
    candidates.into_iter().map(|(_, j)| j).collect()
}

/// Exact Euclidean kNN graph with union symmetrization: `{u, v}` is an edge iff
/// `u` is among the `k` nearest of `v` or vice versa. `k` is clamped to `N - 1`.
pub fn knn_graph<T: Scalar>(
    points: &PointCloud<T>,
    k: usize,
) -> Result<NeighborGraph, GeometryError> {
    let n = points.len();
    if n < 2 {
        return Err(GeometryError::TooFewPoints(n));
    }
    if k == 0 {
        return Err(GeometryError::ZeroK);
    }
    let k_effective = k.min(n - 1);
    let mut edges = Vec::with_capacity(n * k_effective);
    for i in 0..n {
        for j in nearest(points, i, k_effective) {
            edges.push((i as u32, j as u32));
        }
    }
    let mut graph = NeighborGraph::from_edges(n, edges);
    graph.k_requested = k;
    graph.k_effective = k_effective;
    Ok(graph)
}
