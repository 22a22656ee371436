//! Interval decomposition of a zigzag of finite-dimensional vector spaces
//! over the two-element field.
//!
//! The sweep runs left to right keeping a basis of the current space in
//! which every vector generates one interval summand of the module
//! restricted to the spaces seen so far. Basis changes are restricted to
//! those that preserve this property: `z_c += z_a` is allowed only when a
//! module map `I[c, i] -> I[a, i]` exists, which depends on the arrow
//! directions at the two births. That relation is a total preorder
//! ("`c` is younger than `a`"), see [`Generator::age_key`].
//!
//! * Forward arrow `V_i -> V_{i+1}`: images are reduced oldest first; a
//!   generator whose image depends on older ones dies at `i` (it is the
//!   youngest term of the kernel vector). Cokernel coordinates are born at `i+1`.
//! * Backward arrow `V_i <- V_{i+1}`: generators are reduced oldest first
//!   against `im g` plus the already-dying ones; those independent of that
//!   span die at `i`, the rest are lifted to `V_{i+1}`. `ker g` is born at `i+1`.
//!
//! Each step is a bounded amount of sparse elimination, so the sweep is
//! linear in the number of spaces.

use thiserror::Error;

use super::gf2::{apply, Echelon, SparseVec};

/// Map between consecutive spaces, as the images of the source basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arrow {
    /// `V_i -> V_{i+1}`; one column per basis vector of `V_i`.
    Forward(Vec<SparseVec>),
    /// `V_i <- V_{i+1}`; one column per basis vector of `V_{i+1}`.
    Backward(Vec<SparseVec>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModuleError {
    #[error("{arrows} arrows for {spaces} spaces")]
    ArrowCount { spaces: usize, arrows: usize },
    #[error("arrow {index}: {columns} columns but the source has dimension {expected}")]
    ColumnCount {
        index: usize,
        columns: usize,
        expected: usize,
    },
    #[error("arrow {index}: coordinate {coord} exceeds target dimension {dim}")]
    OutOfRange {
        index: usize,
        coord: u32,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagModule {
    dims: Vec<usize>,
    arrows: Vec<Arrow>,
}

#[derive(Debug, Clone)]
struct Generator {
    vec: SparseVec,
    birth: usize,
    // Arrow into the birth space points forward (`birth - 1 -> birth`).
    born_forward: bool,
}

impl Generator {
    /// Larger key = younger. Forward-born generators are younger than
    /// everything else and age with birth index; backward-born ones are older
    /// than everything else and the earliest birth is the youngest. Births at
    /// the first space sit between the two groups.
    fn age_key(&self) -> (u8, usize) {
        if self.birth == 0 {
            (1, 0)
        } else if self.born_forward {
            (2, self.birth)
        } else {
            (0, usize::MAX - self.birth)
        }
    }
}

impl ZigzagModule {
    pub fn new(dims: Vec<usize>, arrows: Vec<Arrow>) -> Result<Self, ModuleError> {
        if dims.is_empty() || arrows.len() + 1 != dims.len() {
            return Err(ModuleError::ArrowCount {
                spaces: dims.len(),
                arrows: arrows.len(),
            });
        }
        for (index, arrow) in arrows.iter().enumerate() {
            let (columns, source, target) = match arrow {
                Arrow::Forward(c) => (c, dims[index], dims[index + 1]),
                Arrow::Backward(c) => (c, dims[index + 1], dims[index]),
            };
            if columns.len() != source {
                return Err(ModuleError::ColumnCount {
                    index,
                    columns: columns.len(),
                    expected: source,
                });
            }
            if let Some(&coord) = columns.iter().flatten().find(|&&c| c as usize >= target) {
                return Err(ModuleError::OutOfRange {
                    index,
                    coord,
                    dim: target,
                });
            }
        }
        Ok(ZigzagModule { dims, arrows })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Intervals `(birth, death)` over 0-based space indices, inclusive,
    /// sorted ascending.
    pub fn decompose(&self) -> Vec<(usize, usize)> {
        let mut intervals = Vec::new();
        let mut basis: Vec<Generator> = (0..self.dims[0] as u32)
            .map(|k| Generator {
                vec: vec![k],
                birth: 0,
                born_forward: false,
            })
            .collect();

        for (i, arrow) in self.arrows.iter().enumerate() {
            basis.sort_by_key(Generator::age_key);
            basis = match arrow {
                Arrow::Forward(f) => forward_step(basis, f, i, self.dims[i + 1], &mut intervals),
                Arrow::Backward(g) => backward_step(basis, g, i, &mut intervals),
            };
        }
        let last = self.dims.len() - 1;
        intervals.extend(basis.iter().map(|z| (z.birth, last)));
        intervals.sort_unstable();
        intervals
    }
}

/// `basis` must be sorted oldest first.
fn forward_step(
    basis: Vec<Generator>,
    f: &[SparseVec],
    i: usize,
    target_dim: usize,
    intervals: &mut Vec<(usize, usize)>,
) -> Vec<Generator> {
    let mut images = Echelon::new();
    let mut next = Vec::with_capacity(target_dim);
    for z in basis {
        let image = apply(f, &z.vec);
        if images.add(image.clone(), Vec::new()).is_some() {
            intervals.push((z.birth, i));
        } else {
            next.push(Generator { vec: image, ..z });
        }
    }
    for k in 0..target_dim as u32 {
        if !images.is_pivot(k) {
            next.push(Generator {
                vec: vec![k],
                birth: i + 1,
                born_forward: true,
            });
        }
    }
    next
}

/// `basis` must be sorted oldest first.
fn backward_step(
    basis: Vec<Generator>,
    g: &[SparseVec],
    i: usize,
    intervals: &mut Vec<(usize, usize)>,
) -> Vec<Generator> {
    // Rows are vectors of V_i tagged with a preimage combination in V_{i+1}.
    let mut span = Echelon::new();
    let mut next = Vec::with_capacity(g.len());
    let mut kernel = Vec::new();
    for (k, column) in g.iter().enumerate() {
        if let Some(combo) = span.add(column.clone(), vec![k as u32]) {
            kernel.push(combo);
        }
    }
    for z in basis {
        let mut v = z.vec.clone();
        let mut preimage = Vec::new();
        span.reduce(&mut v, &mut preimage);
        if v.is_empty() {
            // z plus older dying generators equals g(preimage).
            next.push(Generator { vec: preimage, ..z });
        } else {
            intervals.push((z.birth, i));
            span.insert(v, preimage);
        }
    }
    next.extend(kernel.into_iter().map(|vec| Generator {
        vec,
        birth: i + 1,
        born_forward: false,
    }));
    next
}
