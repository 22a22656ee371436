use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// One summand `[birth, death]` of the zigzag decomposition, over 1-based
/// space indices (layers are odd, intersections even). Deaths are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PersistenceInterval {
    pub p: u8,
    pub birth: usize,
    pub death: usize,
}

impl PersistenceInterval {
    pub fn contains(&self, space: usize) -> bool {
        self.birth <= space && space <= self.death
    }
}

/// The multiset of intervals in every computed homology dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub space_count: usize,
    pub max_p: usize,
    /// Sorted by (p, birth, death).
    pub intervals: Vec<PersistenceInterval>,
}

impl Diagram {
    pub fn dimension(&self, p: usize) -> impl Iterator<Item = &PersistenceInterval> + '_ {
        self.intervals.iter().filter(move |i| i.p as usize == p)
    }

    /// Number of dimension-`p` intervals alive at `space` (1-based).
    pub fn rank_at(&self, space: usize, p: usize) -> usize {
        self.dimension(p).filter(|i| i.contains(space)).count()
    }

    /// Sum of `death - birth` over dimension `p`.
    pub fn total_length(&self, p: usize) -> usize {
        self.dimension(p).map(|i| i.death - i.birth).sum()
    }

    /// CSV with header `p,birth_space,death_space`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,birth_space,death_space\n");
        for i in &self.intervals {
            writeln!(out, "{},{},{}", i.p, i.birth, i.death).expect("writing to a String");
        }
        out
    }
}
