use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ComplexError, Simplex, SimplicialComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventOp {
    Add,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZigzagEvent {
    pub op: EventOp,
    pub simplex: Simplex,
}

/// Which space of the zigzag a mark realizes. Layers are 1-based;
/// `Intersection(l)` sits between layers `l` and `l + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceLabel {
    Layer(usize),
    Intersection(usize),
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceLabel::Layer(l) => write!(f, "layer {l}"),
            SpaceLabel::Intersection(l) => write!(f, "intersection {l}/{}", l + 1),
        }
    }
}

/// A space is realized once the first `event_index` events have been applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceMark {
    pub event_index: usize,
    pub label: SpaceLabel,
}

/// Simplex-wise add/remove events realizing
/// `K_1 ⊇ K_1∩K_2 ⊆ K_2 ⊇ ... ⊆ K_L`, with marks at each space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagSchedule {
    pub events: Vec<ZigzagEvent>,
    pub marks: Vec<SpaceMark>,
}

impl ZigzagSchedule {
    /// Number of spaces (`2L - 1` for `L` layers).
    pub fn space_count(&self) -> usize {
        self.marks.len()
    }

    /// Number of layers, counting only layer marks.
    pub fn layer_count(&self) -> usize {
        self.marks
            .iter()
            .filter(|m| matches!(m.label, SpaceLabel::Layer(_)))
            .count()
    }
}

/// Linearizes the zigzag sequence `[K_1, K_12, K_2, ..., K_L]`.
///
/// Each layer-to-intersection step removes `K_l \ K_{l,l+1}` in descending
/// (dimension, vertices) order; each intersection-to-layer step adds
/// `K_{l+1} \ K_{l,l+1}` in ascending order. The first layer is built from
/// scratch with adds.
pub fn schedule_zigzag(complexes: &[SimplicialComplex]) -> Result<ZigzagSchedule, ComplexError> {
    if complexes.len().is_multiple_of(2) {
        return Err(ComplexError::BadSequenceLength(complexes.len()));
    }
    for position in (1..complexes.len()).step_by(2) {
        let meet = &complexes[position];
        for (side, neighbour) in [
            ("left", &complexes[position - 1]),
            ("right", &complexes[position + 1]),
        ] {
            if let Some(simplex) = meet.first_missing_from(neighbour) {
                return Err(ComplexError::NotSubcomplex {
                    position,
                    side,
                    simplex,
                });
            }
        }
    }

    let add = |simplex| ZigzagEvent {
        op: EventOp::Add,
        simplex,
    };
    let remove = |simplex| ZigzagEvent {
        op: EventOp::Remove,
        simplex,
    };

    let mut schedule = ZigzagSchedule::default();
    schedule.events.extend(complexes[0].simplices().map(add));
    schedule.marks.push(SpaceMark {
        event_index: schedule.events.len(),
        label: SpaceLabel::Layer(1),
    });
    for position in (1..complexes.len()).step_by(2) {
        let layer = position / 2 + 1;
        let meet = &complexes[position];
        let gone = complexes[position - 1].difference(meet);
        schedule.events.extend(gone.into_iter().rev().map(remove));
        schedule.marks.push(SpaceMark {
            event_index: schedule.events.len(),
            label: SpaceLabel::Intersection(layer),
        });
        let new = complexes[position + 1].difference(meet);
        schedule.events.extend(new.into_iter().map(add));
        schedule.marks.push(SpaceMark {
            event_index: schedule.events.len(),
            label: SpaceLabel::Layer(layer + 1),
        });
    }
    Ok(schedule)
}

/// Applies the events from the empty complex, checking that every
/// intermediate state is a complex, and returns the complex at each mark.
pub fn replay(schedule: &ZigzagSchedule) -> Result<Vec<SimplicialComplex>, ComplexError> {
    // Present simplices with their number of present cofacets.
    let mut present: HashMap<Simplex, u32> = HashMap::new();
    let mut snapshots = Vec::with_capacity(schedule.marks.len());
    let mut marks = schedule.marks.iter().enumerate().peekable();
    let mut last_mark = 0;

    let mut snapshot_due = |applied: usize,
                            present: &HashMap<Simplex, u32>,
                            snapshots: &mut Vec<SimplicialComplex>|
     -> Result<(), ComplexError> {
        while let Some(&(i, mark)) = marks.peek() {
            if mark.event_index < last_mark || mark.event_index > schedule.events.len() {
                return Err(ComplexError::BadMark {
                    mark: i,
                    event_index: mark.event_index,
                });
            }
            if mark.event_index != applied {
                break;
            }
            last_mark = mark.event_index;
            let mut simplices: Vec<Simplex> = present.keys().copied().collect();
            simplices.sort_unstable();
            snapshots.push(SimplicialComplex::from_sorted_unchecked(
                simplices.into_iter(),
            ));
            marks.next();
        }
        Ok(())
    };

    snapshot_due(0, &present, &mut snapshots)?;
    for (index, event) in schedule.events.iter().enumerate() {
        let s = event.simplex;
        match event.op {
            EventOp::Add => {
                if present.contains_key(&s) {
                    return Err(ComplexError::InvalidAdd {
                        index,
                        simplex: s,
                        reason: "already present",
                    });
                }
                let facets = s.facets();
                if facets.iter().any(|f| !present.contains_key(f)) {
                    return Err(ComplexError::InvalidAdd {
                        index,
                        simplex: s,
                        reason: "a face is absent",
                    });
                }
                for f in facets {
                    *present.get_mut(&f).expect("checked above") += 1;
                }
                present.insert(s, 0);
            }
            EventOp::Remove => match present.get(&s) {
                None => {
                    return Err(ComplexError::InvalidRemove {
                        index,
                        simplex: s,
                        reason: "not present",
                    })
                }
                Some(&cofaces) if cofaces > 0 => {
                    return Err(ComplexError::InvalidRemove {
                        index,
                        simplex: s,
                        reason: "a coface is present",
                    })
                }
                Some(_) => {
                    present.remove(&s);
                    for f in s.facets() {
                        *present
                            .get_mut(&f)
                            .expect("faces of a present simplex are present") -= 1;
                    }
                }
            },
        }
        snapshot_due(index + 1, &present, &mut snapshots)?;
    }
    if snapshots.len() != schedule.marks.len() {
        let mark = snapshots.len();
        return Err(ComplexError::BadMark {
            mark,
            event_index: schedule.marks[mark].event_index,
        });
    }
    Ok(snapshots)
}
