//! Versioned JSON documents written by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::params::PipelineParams;
use crate::pipeline::{aggregate_samples, AggregateScores, PipelineError, SampleScores};
use crate::scalar::Scalar;
use crate::scoring::{
    prune_plan, Activity, AggregatedConsistency, Combine, ConsistencyMatrix, PlanOptions,
    PruningPlan, ScoringError,
};

pub const SCORES_FORMAT: &str = "topoprune.scores/1";
pub const PLAN_FORMAT: &str = "topoprune.plan/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub sample_id: String,
    pub source: Option<String>,
    pub token_count: usize,
    pub k_requested: usize,
    pub k_effective: usize,
    pub k_clamped: bool,
    /// Interval count per homology dimension.
    pub interval_counts: Vec<usize>,
    /// Kernel bandwidth per homology dimension.
    pub sigma: Vec<f64>,
    /// Dimensions without any interval; their image is zero.
    pub empty_dimensions: Vec<u8>,
    pub activity: Activity<f64>,
    pub consistency: Vec<ConsistencyMatrix<f64>>,
    pub aggregated: Vec<AggregatedConsistency<f64>>,
    /// Per-layer maximum of the aggregated consistency over dimensions.
    pub combined: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoresDocument {
    pub format: String,
    pub params: PipelineParams,
    pub layer_count: usize,
    pub samples: Vec<SampleReport>,
    pub aggregate: AggregateScores<f64>,
}

fn f<T: Scalar>(x: T) -> f64 {
    x.to_f64_lossy()
}

fn vf<T: Scalar>(xs: &[T]) -> Vec<f64> {
    xs.iter().map(|&x| f(x)).collect()
}

impl SampleReport {
    pub fn new<T: Scalar>(s: &SampleScores<T>, source: Option<String>) -> Self {
        let dims = s.rasters.len();
        SampleReport {
            sample_id: s.sample_id.clone(),
            source,
            token_count: s.token_count,
            k_requested: s.k_requested,
            k_effective: s.k_effective,
            k_clamped: s.k_clamped(),
            interval_counts: (0..dims).map(|p| s.diagram.dimension(p).count()).collect(),
            sigma: s.rasters.iter().map(|r| f(r.sigma())).collect(),
            empty_dimensions: s
                .rasters
                .iter()
                .filter(|r| r.is_empty())
                .map(|r| r.p())
                .collect(),
            activity: Activity {
                values: vf(&s.activity.values),
                z: f(s.activity.z),
                fallback: s.activity.fallback,
            },
            consistency: s
                .consistency
                .iter()
                .map(|m| ConsistencyMatrix {
                    p: m.p,
                    rows: m.rows.iter().map(|r| r.as_deref().map(vf)).collect(),
                })
                .collect(),
            aggregated: s
                .aggregated
                .iter()
                .map(|a| AggregatedConsistency {
                    p: a.p,
                    alpha: f(a.alpha),
                    values: vf(&a.values),
                    undefined: a.undefined.clone(),
                })
                .collect(),
            combined: vf(&Combine::Max.apply(&s.per_dimension())),
        }
    }
}

impl ScoresDocument {
    /// `sources` pairs with `samples` by position; missing entries are `None`.
    pub fn new<T: Scalar>(
        params: PipelineParams,
        samples: &[SampleScores<T>],
        sources: &[String],
    ) -> Result<Self, PipelineError> {
        let agg = aggregate_samples(samples)?;
        Ok(ScoresDocument {
            format: SCORES_FORMAT.to_string(),
            params,
            layer_count: agg.layer_count,
            samples: samples
                .iter()
                .enumerate()
                .map(|(i, s)| SampleReport::new(s, sources.get(i).cloned()))
                .collect(),
            aggregate: AggregateScores {
                sample_count: agg.sample_count,
                layer_count: agg.layer_count,
                activity: vf(&agg.activity),
                per_dimension: agg.per_dimension.iter().map(|v| vf(v)).collect(),
            },
        })
    }

    /// Structural checks for documents read back from disk.
    pub fn validate(&self) -> Result<(), String> {
        if self.format != SCORES_FORMAT {
            return Err(format!(
                "unsupported format {:?}, expected {SCORES_FORMAT:?}",
                self.format
            ));
        }
        self.params.validate()?;
        let l = self.layer_count;
        let agg = &self.aggregate;
        if agg.layer_count != l
            || agg.activity.len() != l
            || agg.per_dimension.is_empty()
            || agg.per_dimension.iter().any(|v| v.len() != l)
        {
            return Err(format!("aggregate scores do not have {l} layers"));
        }
        if agg.per_dimension.iter().flatten().any(|x| !x.is_finite()) {
            return Err("aggregate scores contain non-finite values".into());
        }
        Ok(())
    }

    pub fn plan(&self, options: &PlanOptions) -> Result<PruningPlan<f64>, ScoringError> {
        Ok(prune_plan(&self.aggregate.per_dimension, options)?.with_params(self.params))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub format: String,
    #[serde(flatten)]
    pub plan: PruningPlan<f64>,
}

impl PlanDocument {
    pub fn new(plan: PruningPlan<f64>) -> Self {
        PlanDocument {
            format: PLAN_FORMAT.to_string(),
            plan,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.format != PLAN_FORMAT {
            return Err(format!(
                "unsupported format {:?}, expected {PLAN_FORMAT:?}",
                self.format
            ));
        }
        let l = self.plan.layer_count;
        if self.plan.pruned.iter().any(|&x| x < 1 || x > l) {
            return Err(format!("pruned layer outside 1..={l}"));
        }
        Ok(())
    }
}
