//! End-to-end scoring of one trace, and averaging over several.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{clique_complex, schedule_zigzag, zigzag_sequence, ComplexError};
use crate::geometry::{knn_graph, GeometryError};
use crate::params::PipelineParams;
use crate::scalar::Scalar;
use crate::scoring::{
    activity, aggregate_consistency, build_epi, consistency_matrix, project_intervals, Activity,
    AggregatedConsistency, ConsistencyMatrix, EffectiveInterval, EpiParams, EpiRaster,
    ScoringError,
};
use crate::trace::{LayerTrace, TraceError};
use crate::zigzag::{zigzag_persistence, Diagram, ZigzagError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("trace: {0}")]
    Trace(#[from] TraceError),
    #[error("graph stage, layer {layer}: {source}")]
    Geometry { layer: usize, source: GeometryError },
    #[error("complex stage: {0}")]
    Complex(#[from] ComplexError),
    #[error("homology stage: {0}")]
    Zigzag(#[from] ZigzagError),
    #[error("scoring stage: {0}")]
    Scoring(#[from] ScoringError),
    #[error("samples disagree on layer count: {expected} vs {found}")]
    LayerCountMismatch { expected: usize, found: usize },
    #[error("no samples to aggregate")]
    NoSamples,
}

/// Wall time per stage. The graph stage is `O(N^2 d)` per layer and is kept
/// apart from the rest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub graph: Duration,
    pub complex: Duration,
    pub homology: Duration,
    pub scoring: Duration,
}

impl StageTimings {
    pub fn after_graph(&self) -> Duration {
        self.complex + self.homology + self.scoring
    }

    pub fn total(&self) -> Duration {
        self.graph + self.after_graph()
    }
}

#[derive(Debug, Clone)]
pub struct SampleScores<T> {
    pub sample_id: String,
    pub layer_count: usize,
    pub token_count: usize,
    pub k_requested: usize,
    pub k_effective: usize,
    pub diagram: Diagram,
    pub effective: Vec<EffectiveInterval>,
    /// One raster per homology dimension `0..=max_p`.
    pub rasters: Vec<EpiRaster<T>>,
    pub activity: Activity<T>,
    pub consistency: Vec<ConsistencyMatrix<T>>,
    pub aggregated: Vec<AggregatedConsistency<T>>,
    pub timings: StageTimings,
}

impl<T: Scalar> SampleScores<T> {
    pub fn k_clamped(&self) -> bool {
        self.k_effective < self.k_requested
    }

    /// Aggregated consistency per dimension, `[p][l - 1]`.
    pub fn per_dimension(&self) -> Vec<Vec<T>> {
        self.aggregated.iter().map(|a| a.values.clone()).collect()
    }
}

/// Runs every stage on one trace.
pub fn score_trace<T: Scalar>(
    trace: &LayerTrace,
    params: &PipelineParams,
) -> Result<SampleScores<T>, PipelineError> {
    params.validate().map_err(PipelineError::Params)?;
    trace.validate()?;
    let l = trace.layer_count();

    let start = Instant::now();
    let graphs = (0..l)
        .into_par_iter()
        .map(|layer| {
            knn_graph(&trace.point_cloud::<T>(layer), params.k).map_err(|source| {
                PipelineError::Geometry {
                    layer: layer + 1,
                    source,
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let graph_time = start.elapsed();
    let k_effective = graphs.first().map_or(0, |g| g.k_effective());

    let start = Instant::now();
    let complexes = graphs
        .par_iter()
        .map(|g| clique_complex(g, params.max_p + 1))
        .collect::<Result<Vec<_>, _>>()?;
    let schedule = schedule_zigzag(&zigzag_sequence(&complexes))?;
    let complex_time = start.elapsed();

    let start = Instant::now();
    let diagram = zigzag_persistence(&schedule, params.max_p)?;
    let homology_time = start.elapsed();

    let start = Instant::now();
    let effective = project_intervals(&diagram.intervals, l)?;
    let epi = EpiParams {
        resolution: params.grid_resolution,
        sigma_scale: T::of(params.sigma_scale),
    };
    let rasters = (0..=params.max_p as u8)
        .map(|p| build_epi(&effective, p, l, &epi))
        .collect::<Result<Vec<_>, _>>()?;
    let activity = activity(&rasters)?;
    let consistency: Vec<_> = rasters.iter().map(consistency_matrix).collect();
    let aggregated = consistency
        .iter()
        .map(|s| aggregate_consistency(s, T::of(params.alpha)))
        .collect::<Result<Vec<_>, _>>()?;
    let scoring_time = start.elapsed();

    Ok(SampleScores {
        sample_id: trace.manifest.get("sample_id").cloned().unwrap_or_default(),
        layer_count: l,
        token_count: trace.token_count(),
        k_requested: params.k,
        k_effective,
        diagram,
        effective,
        rasters,
        activity,
        consistency,
        aggregated,
        timings: StageTimings {
            graph: graph_time,
            complex: complex_time,
            homology: homology_time,
            scoring: scoring_time,
        },
    })
}

/// Scores several traces in parallel, keeping input order.
pub fn score_traces<T: Scalar>(
    traces: &[LayerTrace],
    params: &PipelineParams,
) -> Result<Vec<SampleScores<T>>, PipelineError> {
    traces.par_iter().map(|t| score_trace(t, params)).collect()
}

/// Scores averaged over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScores<T> {
    pub sample_count: usize,
    pub layer_count: usize,
    pub activity: Vec<T>,
    /// Mean aggregated consistency, `[p][l - 1]`.
    pub per_dimension: Vec<Vec<T>>,
}

pub fn aggregate_samples<T: Scalar>(
    samples: &[SampleScores<T>],
) -> Result<AggregateScores<T>, PipelineError> {
    let first = samples.first().ok_or(PipelineError::NoSamples)?;
    let (l, dims) = (first.layer_count, first.aggregated.len());
    if let Some(s) = samples
        .iter()
        .find(|s| s.layer_count != l || s.aggregated.len() != dims)
    {
        return Err(PipelineError::LayerCountMismatch {
            expected: l,
            found: s.layer_count,
        });
    }
    let n = T::of_usize(samples.len());
    let mean = |get: &dyn Fn(&SampleScores<T>) -> &[T]| -> Vec<T> {
        (0..l)
            .map(|i| samples.iter().map(|s| get(s)[i]).sum::<T>() / n)
            .collect()
    };
    Ok(AggregateScores {
        sample_count: samples.len(),
        layer_count: l,
        activity: mean(&|s| &s.activity.values),
        per_dimension: (0..dims)
            .map(|p| mean(&|s| &s.aggregated[p].values))
            .collect(),
    })
}
