//! Homology coordinates of a single complex in degrees 0 and 1.
//!
//! `H_0` has one basis vector per connected component. For `H_1` a BFS
//! spanning forest is fixed; a 1-cycle is determined by its non-tree edges,
//! so the cycle space is identified with the span of the non-tree edges.
//! Triangle boundaries are reduced in that space; the non-tree edges that
//! are not pivots of the reduced boundaries index the `H_1` basis, each
//! represented by its fundamental cycle.

use std::collections::VecDeque;

use crate::complex::SimplicialComplex;

use super::gf2::{normalize, Echelon, SparseVec};

const TREE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ComplexHomology {
    vertices: Vec<u32>,
    edges: Vec<[u32; 2]>,
    component: Vec<u32>,
    roots: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    /// Non-tree coordinate of each edge, `TREE` for forest edges.
    cycle_coord: Vec<u32>,
    /// Edge index of each non-tree coordinate.
    coord_edge: Vec<u32>,
    boundaries: Echelon,
    /// H1 basis position of each non-tree coordinate, `TREE` for pivots.
    h1_index: Vec<u32>,
    h1_basis: Vec<u32>,
}

impl ComplexHomology {
    /// Computes `H_0`, and `H_1` when `with_h1` is set.
    pub fn new(complex: &SimplicialComplex, with_h1: bool) -> Self {
        let vertices = complex.vertices().to_vec();
        let edges = complex.edges().to_vec();
        let n = vertices.len();
        let local = |v: u32| {
            vertices
                .binary_search(&v)
                .expect("edge endpoints are vertices") as u32
        };

        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            let (a, b) = (local(a), local(b));
            adj[a as usize].push((b, e as u32));
            adj[b as usize].push((a, e as u32));
        }

        let mut component = vec![TREE; n];
        let mut parent = vec![TREE; n];
        let mut depth = vec![0; n];
        let mut tree_edge = vec![false; edges.len()];
        let mut roots = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n as u32 {
            if component[root as usize] != TREE {
                continue;
            }
            let c = roots.len() as u32;
            roots.push(root);
            component[root as usize] = c;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &(w, e) in &adj[u as usize] {
                    if component[w as usize] == TREE {
                        component[w as usize] = c;
                        parent[w as usize] = u;
                        depth[w as usize] = depth[u as usize] + 1;
                        tree_edge[e as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }

        let mut h = ComplexHomology {
            vertices,
            edges,
            component,
            roots,
            parent,
            depth,
            cycle_coord: Vec::new(),
            coord_edge: Vec::new(),
            boundaries: Echelon::new(),
            h1_index: Vec::new(),
            h1_basis: Vec::new(),
        };
        if with_h1 {
            h.compute_h1(complex, &tree_edge);
        }
        h
    }

    fn compute_h1(&mut self, complex: &SimplicialComplex, tree_edge: &[bool]) {
        self.cycle_coord = vec![TREE; self.edges.len()];
        for (e, &is_tree) in tree_edge.iter().enumerate() {
            if !is_tree {
                self.cycle_coord[e] = self.coord_edge.len() as u32;
                self.coord_edge.push(e as u32);
            }
        }
        for &[a, b, c] in complex.triangles() {
            let boundary = normalize(
                [[b, c], [a, c], [a, b]]
                    .iter()
                    .map(|e| {
                        self.cycle_coord[self.edge_index(e).expect("triangle edges are present")]
                    })
                    .filter(|&x| x != TREE)
                    .collect(),
            );
            if !boundary.is_empty() {
                self.boundaries.add(boundary, Vec::new());
            }
        }
        self.h1_index = vec![TREE; self.coord_edge.len()];
        for coord in 0..self.coord_edge.len() as u32 {
            if !self.boundaries.is_pivot(coord) {
                self.h1_index[coord as usize] = self.h1_basis.len() as u32;
                self.h1_basis.push(coord);
            }
        }
    }

    fn edge_index(&self, e: &[u32; 2]) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn betti0(&self) -> usize {
        self.roots.len()
    }

    pub fn betti1(&self) -> usize {
        self.h1_basis.len()
    }

    pub fn betti(&self, p: usize) -> usize {
        match p {
            0 => self.betti0(),
            1 => self.betti1(),
            _ => 0,
        }
    }

    /// Component index of vertex `v`, `None` if `v` is not in the complex.
    pub fn component_of(&self, v: u32) -> Option<u32> {
        let i = self.vertices.binary_search(&v).ok()?;
        Some(self.component[i])
    }

    /// Lowest vertex id of component `c`.
    pub fn component_representative(&self, c: usize) -> u32 {
        self.vertices[self.roots[c] as usize]
    }

    /// `H_1` coordinates of the class of a 1-cycle given as an edge list.
    /// `None` if some edge is not in the complex.
    pub fn h1_coordinates(&self, cycle: &[[u32; 2]]) -> Option<SparseVec> {
        let mut coords = Vec::with_capacity(cycle.len());
        for e in cycle {
            let c = self.cycle_coord[self.edge_index(e)?];
            if c != TREE {
                coords.push(c);
            }
        }
        let reduced = self.boundaries.normal_form(normalize(coords));
        let mut out: SparseVec = reduced
            .into_iter()
            .map(|c| self.h1_index[c as usize])
            .collect();
        out.sort_unstable();
        Some(out)
    }

    /// Fundamental cycle of the `i`-th `H_1` basis vector, as edges.
    pub fn h1_representative(&self, i: usize) -> Vec<[u32; 2]> {
        let e = self.coord_edge[self.h1_basis[i] as usize] as usize;
        let [a, b] = self.edges[e];
        let mut cycle = vec![[a, b]];
        let mut u = self.vertices.binary_search(&a).expect("vertex") as u32;
        let mut w = self.vertices.binary_search(&b).expect("vertex") as u32;
        let step = |x: &mut u32, cycle: &mut Vec<[u32; 2]>| {
            let p = self.parent[*x as usize];
            let (vx, vp) = (self.vertices[*x as usize], self.vertices[p as usize]);
            cycle.push([vx.min(vp), vx.max(vp)]);
            *x = p;
        };
        while self.depth[u as usize] > self.depth[w as usize] {
            step(&mut u, &mut cycle);
        }
        while self.depth[w as usize] > self.depth[u as usize] {
            step(&mut w, &mut cycle);
        }
        while u != w {
            step(&mut u, &mut cycle);
            step(&mut w, &mut cycle);
        }
        cycle
    }
}
