//! Zigzag persistent homology in degrees 0 and 1 over GF(2).
//!
//! The schedule is replayed to recover the complex at every space. Each
//! pair of consecutive spaces is related by an inclusion; the induced maps
//! on homology are computed in explicit bases ([`homology`]) and the
//! resulting zigzag of vector spaces is decomposed into intervals
//! ([`module`]).

mod betti;
mod diagram;
pub mod gf2;
pub mod homology;
pub mod module;

use thiserror::Error;

use crate::complex::{replay, ComplexError, SimplicialComplex, ZigzagSchedule};

pub use betti::betti;
pub use diagram::{Diagram, PersistenceInterval};
use homology::ComplexHomology;
pub use module::{Arrow, ModuleError, ZigzagModule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZigzagError {
    #[error("invalid schedule: {0}")]
    Schedule(#[from] ComplexError),
    #[error("max homology dimension must be 0 or 1, got {0}")]
    InvalidMaxP(usize),
    #[error("spaces {0} and {1} are not related by an inclusion")]
    NotAnInclusion(usize, usize),
    #[error("schedule has no spaces")]
    Empty,
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// Interval decomposition of the homology of the zigzag realized by `schedule`.
pub fn zigzag_persistence(schedule: &ZigzagSchedule, max_p: usize) -> Result<Diagram, ZigzagError> {
    let spaces = replay(schedule)?;
    persistence_of_sequence(&spaces, max_p)
}

/// Same as [`zigzag_persistence`] for an explicit sequence of complexes in
/// which neighbours are nested one way or the other.
pub fn persistence_of_sequence(
    spaces: &[SimplicialComplex],
    max_p: usize,
) -> Result<Diagram, ZigzagError> {
    if max_p > 1 {
        return Err(ZigzagError::InvalidMaxP(max_p));
    }
    if spaces.is_empty() {
        return Err(ZigzagError::Empty);
    }
    let forward: Vec<bool> = spaces
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[0].is_subcomplex_of(&w[1]) {
                Ok(true)
            } else if w[1].is_subcomplex_of(&w[0]) {
                Ok(false)
            } else {
                Err(ZigzagError::NotAnInclusion(i + 1, i + 2))
            }
        })
        .collect::<Result<_, _>>()?;

    let homology: Vec<ComplexHomology> = spaces
        .iter()
        .map(|k| ComplexHomology::new(k, max_p >= 1))
        .collect();

    let mut intervals = Vec::new();
    for p in 0..=max_p {
        let module = homology_module(&homology, &forward, p)?;
        intervals.extend(
            module
                .decompose()
                .into_iter()
                .map(|(b, d)| PersistenceInterval {
                    p: p as u8,
                    birth: b + 1,
                    death: d + 1,
                }),
        );
    }
    intervals.sort_unstable();
    Ok(Diagram {
        space_count: spaces.len(),
        max_p,
        intervals,
    })
}

/// The degree-`p` homology zigzag with maps induced by inclusion.
pub fn homology_module(
    homology: &[ComplexHomology],
    forward: &[bool],
    p: usize,
) -> Result<ZigzagModule, ModuleError> {
    let dims = homology.iter().map(|h| h.betti(p)).collect();
    let arrows = forward
        .iter()
        .enumerate()
        .map(|(i, &fwd)| {
            let (source, target) = if fwd {
                (&homology[i], &homology[i + 1])
            } else {
                (&homology[i + 1], &homology[i])
            };
            let columns = induced_map(source, target, p);
            if fwd {
                Arrow::Forward(columns)
            } else {
                Arrow::Backward(columns)
            }
        })
        .collect();
    ZigzagModule::new(dims, arrows)
}

/// Images of the source basis under the inclusion of source into target.
fn induced_map(
    source: &ComplexHomology,
    target: &ComplexHomology,
    p: usize,
) -> Vec<gf2::SparseVec> {
    match p {
        0 => (0..source.betti0())
            .map(|c| {
                let v = source.component_representative(c);
                vec![target
                    .component_of(v)
                    .expect("source is a subcomplex of target")]
            })
            .collect(),
        _ => (0..source.betti1())
            .map(|i| {
                target
                    .h1_coordinates(&source.h1_representative(i))
                    .expect("source is a subcomplex of target")
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{clique_complex, schedule_zigzag, zigzag_sequence};
    use crate::geometry::NeighborGraph;

    fn k(n: usize, edges: &[(u32, u32)]) -> SimplicialComplex {
        clique_complex(&NeighborGraph::from_edges(n, edges.iter().copied()), 2).unwrap()
    }

    fn diagram(layers: &[SimplicialComplex]) -> Diagram {
        let schedule = schedule_zigzag(&zigzag_sequence(layers)).unwrap();
        zigzag_persistence(&schedule, 1).unwrap()
    }

    fn pairs(d: &Diagram, p: usize) -> Vec<(usize, usize)> {
        d.dimension(p).map(|i| (i.birth, i.death)).collect()
    }

    #[test]
    fn edge_disappears() {
        let d = diagram(&[k(2, &[(0, 1)]), k(2, &[])]);
        assert_eq!(pairs(&d, 0), vec![(1, 3), (2, 3)]);
        assert!(pairs(&d, 1).is_empty());
    }

    #[test]
    fn constant_four_cycle() {
        let c = k(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let d = diagram(&[c.clone(), c]);
        assert_eq!(pairs(&d, 0), vec![(1, 3)]);
        assert_eq!(pairs(&d, 1), vec![(1, 3)]);
    }

    #[test]
    fn single_vertex_single_space() {
        let d = persistence_of_sequence(&[k(1, &[])], 1).unwrap();
        assert_eq!(pairs(&d, 0), vec![(1, 1)]);
        assert!(pairs(&d, 1).is_empty());
    }

    #[test]
    fn cycle_filled_then_reopened() {
        let square = k(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let filled = k(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        // Layer 2 adds a chord that fills the loop; layer 3 drops it again.
        // The loop dies entering layer 2 and a new one is born leaving it.
        let d = diagram(&[square.clone(), filled, square]);
        assert_eq!(pairs(&d, 1), vec![(1, 2), (4, 5)]);
    }

    #[test]
    fn rejects_non_nested_neighbours() {
        let err = persistence_of_sequence(&[k(3, &[(0, 1)]), k(3, &[(1, 2)])], 0).unwrap_err();
        assert_eq!(err, ZigzagError::NotAnInclusion(1, 2));
        assert_eq!(
            persistence_of_sequence(&[k(1, &[])], 2).unwrap_err(),
            ZigzagError::InvalidMaxP(2)
        );
    }
}
