use serde::{Deserialize, Serialize};

use crate::zigzag::PersistenceInterval;

use super::ScoringError;

/// An interval expressed in model-layer coordinates (1-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EffectiveInterval {
    pub p: u8,
    pub birth: usize,
    pub death: usize,
}

impl EffectiveInterval {
    /// Lifespan in layers.
    pub fn persistence(&self) -> usize {
        self.death - self.birth
    }
}

/// Maps filtration spaces to layers. Layer spaces `2l - 1` map to `l`; an
/// intersection space `2l` sits between layers `l` and `l + 1` and rounds
/// outward, down for births and up for deaths.
pub fn project_intervals(
    intervals: &[PersistenceInterval],
    layer_count: usize,
) -> Result<Vec<EffectiveInterval>, ScoringError> {
    let last = (2 * layer_count).saturating_sub(1);
    intervals
        .iter()
        .map(|i| {
            if i.birth < 1 || i.death > last || i.birth > i.death {
                return Err(ScoringError::IntervalOutOfRange {
                    birth: i.birth,
                    death: i.death,
                    space_count: last,
                });
            }
            Ok(EffectiveInterval {
                p: i.p,
                birth: i.birth.div_ceil(2),
                death: i.death / 2 + 1,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn project(birth: usize, death: usize, l: usize) -> Result<(usize, usize), ScoringError> {
        let e = project_intervals(&[PersistenceInterval { p: 0, birth, death }], l)?[0];
        Ok((e.birth, e.death))
    }

    #[test]
    fn layer_spaces_map_to_layers() {
        assert_eq!(project(1, 5, 3).unwrap(), (1, 3));
        assert_eq!(project(3, 3, 3).unwrap(), (2, 2));
    }

    #[test]
    fn intersections_round_outward() {
        assert_eq!(project(2, 4, 3).unwrap(), (1, 3));
        assert_eq!(project(2, 2, 2).unwrap(), (1, 2));
        assert_eq!(project(1, 2, 2).unwrap(), (1, 2));
        assert_eq!(project(2, 3, 2).unwrap(), (1, 2));
    }

    #[test]
    fn never_shortens() {
        for l in 1..6 {
            for b in 1..2 * l {
                for d in b..2 * l {
                    let (eb, ed) = project(b, d, l).unwrap();
                    assert!(1 <= eb && eb <= ed && ed <= l);
                    // Space s sits at layer coordinate (s + 1) / 2.
                    assert!(2 * (ed - eb) + 1 > d - b, "{b} {d}");
                }
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(project(0, 1, 2).is_err());
        assert!(project(1, 4, 2).is_err());
        assert!(project(3, 2, 2).is_err());
    }
}
