//! Layer redundancy scores for transformers from the zigzag persistent
//! homology of token point clouds.
//!
//! Each layer's hidden states form a point cloud. A kNN graph and its clique
//! complex summarize the local shape at every layer; consecutive complexes
//! are joined through their intersections into a zigzag, whose persistence
//! intervals track which features survive from layer to layer. The intervals
//! are smoothed into a persistence image, from which per-layer activity and
//! inter-layer consistency are read and turned into a pruning plan.
//!
//! ```no_run
//! use topoprune::{prune_plan, read_trace, score_trace, PipelineParams, PlanOptions};
//!
//! let trace = read_trace("sample.ltrc")?;
//! let scores = score_trace::<f64>(&trace, &PipelineParams::default())?;
//! let plan = prune_plan(&scores.per_dimension(), &PlanOptions::default())?;
//! println!("{:?}", plan.pruned);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod complex;
pub mod geometry;
pub mod params;
pub mod pipeline;
pub mod report;
mod scalar;
pub mod scoring;
pub mod trace;
pub mod zigzag;

pub use complex::{
    clique_complex, intersect_complexes, schedule_zigzag, zigzag_sequence, SimplicialComplex,
};
pub use geometry::{knn_graph, NeighborGraph, PointCloud};
pub use params::PipelineParams;
pub use pipeline::{aggregate_samples, score_trace, score_traces, PipelineError, SampleScores};
pub use scalar::Scalar;
pub use scoring::{
    activity, aggregate_consistency, build_epi, consistency_matrix, cosine_baseline, plan_overlap,
    project_intervals, prune_plan, Combine, OverlapMetric, PlanMode, PlanOptions,
};
pub use trace::{
    read_trace, synth_trace, write_trace, LayerTrace, Scenario, SynthSpec, TraceError,
};
pub use zigzag::{zigzag_persistence, Diagram, PersistenceInterval};

/// Double-precision instances of the generic types.
pub type Epi = scoring::EpiRaster<f64>;
pub type Plan = scoring::PruningPlan<f64>;
pub type Scores = pipeline::SampleScores<f64>;
pub type Cloud = geometry::PointCloud<f64>;

/// Single-precision instances.
pub type Epi32 = scoring::EpiRaster<f32>;
pub type Plan32 = scoring::PruningPlan<f32>;
pub type Scores32 = pipeline::SampleScores<f32>;
pub type Cloud32 = geometry::PointCloud<f32>;
