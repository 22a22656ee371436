//! Betti numbers from dense boundary-matrix ranks.
//!
//! This path shares no code with the sparse homology used by the zigzag
//! sweep and serves as its oracle. It is cubic in the complex size, so keep
//! it to small complexes.

use crate::complex::SimplicialComplex;

/// Dense GF(2) matrix, rows packed into 64-bit words.
struct BitMatrix {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    fn new(cols: usize) -> Self {
        BitMatrix {
            words: cols.div_ceil(64).max(1),
            rows: Vec::new(),
        }
    }

    fn push_row(&mut self, ones: &[usize]) {
        let mut row = vec![0u64; self.words];
        for &c in ones {
            row[c / 64] ^= 1 << (c % 64);
        }
        self.rows.push(row);
    }

    fn rank(mut self) -> usize {
        let mut rank = 0;
        let cols = self.words * 64;
        for col in 0..cols {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for r in 0..self.rows.len() {
                if r != rank && self.rows[r][w] & bit != 0 {
                    for (x, y) in self.rows[r].iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of the boundary map from `dim`-simplices to `(dim-1)`-simplices.
fn boundary_rank(k: &SimplicialComplex, dim: usize) -> usize {
    match dim {
        1 => {
            let mut m = BitMatrix::new(k.vertices().len());
            for [a, b] in k.edges() {
                let ia = k.vertices().binary_search(a).expect("face-closed");
                let ib = k.vertices().binary_search(b).expect("face-closed");
                m.push_row(&[ia, ib]);
            }
            m.rank()
        }
        2 => {
            let mut m = BitMatrix::new(k.edges().len());
            for &[a, b, c] in k.triangles() {
                let faces: Vec<usize> = [[b, c], [a, c], [a, b]]
                    .iter()
                    .map(|e| k.edges().binary_search(e).expect("face-closed"))
                    .collect();
                m.push_row(&faces);
            }
            m.rank()
        }
        _ => 0,
    }
}

/// Rank of the `p`-th simplicial homology over GF(2).
pub fn betti(complex: &SimplicialComplex, p: usize) -> usize {
    let rank_in = boundary_rank(complex, p + 1);
    let rank_out = boundary_rank(complex, p);
    complex.count(p) - rank_out - rank_in
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::clique_complex;
    use crate::geometry::NeighborGraph;

    fn k(n: usize, edges: &[(u32, u32)]) -> SimplicialComplex {
        clique_complex(&NeighborGraph::from_edges(n, edges.iter().copied()), 2).unwrap()
    }

    #[test]
    fn isolated_vertices() {
        let c = k(6, &[]);
        assert_eq!((betti(&c, 0), betti(&c, 1)), (6, 0));
    }

    #[test]
    fn four_cycle() {
        let c = k(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(boundary_rank(&c, 1), 3);
        assert_eq!((betti(&c, 0), betti(&c, 1)), (1, 1));
    }

    #[test]
    fn filled_triangle() {
        let c = k(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!((betti(&c, 0), betti(&c, 1)), (1, 0));
    }

    #[test]
    fn octahedron_has_a_void() {
        // Clique complex of the octahedron graph: β = (1, 0, 1).
        let edges: Vec<(u32, u32)> = (0..6u32)
            .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
            .filter(|&(a, b)| b != a + 3)
            .collect();
        let c = k(6, &edges);
        assert_eq!(c.count(2), 8);
        assert_eq!((betti(&c, 0), betti(&c, 1), betti(&c, 2)), (1, 0, 1));
    }
}
