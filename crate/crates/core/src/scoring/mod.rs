//! From persistence intervals to per-layer scores and a pruning plan.

mod activity;
mod baseline;
mod consistency;
mod epi;
mod plan;
mod project;

use thiserror::Error;

pub use activity::{activity, Activity};
pub use baseline::cosine_baseline;
pub use consistency::{
    aggregate_consistency, consistency_matrix, AggregatedConsistency, ConsistencyMatrix,
    UNDEFINED_ROW_RTOL,
};
pub use epi::{build_epi, EpiCenter, EpiParams, EpiRaster, MIN_SIGMA};
pub use plan::{
    plan_overlap, prune_plan, set_overlap, Combine, OverlapMetric, PlanMode, PlanOptions,
    PruningPlan,
};
pub use project::{project_intervals, EffectiveInterval};

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("interval [{birth}, {death}] outside 1..={space_count}")]
    IntervalOutOfRange {
        birth: usize,
        death: usize,
        space_count: usize,
    },
    #[error("layer count mismatch: expected {expected}, found {found}")]
    LayerCountMismatch { expected: usize, found: usize },
    #[error("cannot prune {requested} layers, only {eligible} are eligible")]
    TooFewEligible { requested: usize, eligible: usize },
    #[error("{0}")]
    InvalidParameter(String),
}
