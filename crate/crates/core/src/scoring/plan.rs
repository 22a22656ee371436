use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::params::PipelineParams;
use crate::scalar::Scalar;

use super::ScoringError;

/// Slack added before flooring `target * L`, so products such as
/// `0.29 * 100 = 28.999999999999996` count as intended.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PlanMode {
    /// Prune layers scoring at least `epsilon` times the best score.
    Threshold { epsilon: f64 },
    /// Prune the `floor(target * L)` highest-scoring layers.
    Sparsity { target: f64 },
}

impl PlanMode {
    pub fn validate(&self) -> Result<(), ScoringError> {
        match *self {
            PlanMode::Threshold { epsilon } if !(epsilon > 0.0 && epsilon <= 1.0) => Err(
                ScoringError::InvalidParameter(format!("epsilon must be in (0, 1], got {epsilon}")),
            ),
            PlanMode::Sparsity { target } if !(0.0..1.0).contains(&target) => {
                Err(ScoringError::InvalidParameter(format!(
                    "target sparsity must be in [0, 1), got {target}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// How per-dimension scores fold into one score per layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    Max,
    Mean,
}

impl Combine {
    pub fn apply<T: Scalar>(&self, per_dimension: &[Vec<T>]) -> Vec<T> {
        let l = per_dimension.first().map_or(0, Vec::len);
        (0..l)
            .map(|i| {
                let xs = per_dimension.iter().map(|v| v[i]);
                match self {
                    Combine::Max => xs.fold(T::neg_infinity(), T::max),
                    Combine::Mean => xs.sum::<T>() / T::of_usize(per_dimension.len()),
                }
            })
            .collect()
    }
}

impl fmt::Display for Combine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combine::Max => "max",
            Combine::Mean => "mean",
        })
    }
}

impl FromStr for Combine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max" => Ok(Combine::Max),
            "mean" => Ok(Combine::Mean),
            _ => Err(format!("unknown combine rule {s:?}, expected max or mean")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub mode: PlanMode,
    pub combine: Combine,
    /// Never prune the first and last layer.
    pub protect_ends: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            mode: PlanMode::Sparsity { target: 0.25 },
            combine: Combine::Max,
            protect_ends: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningPlan<T> {
    pub layer_count: usize,
    /// Pruned layers, 1-based, ascending.
    pub pruned: Vec<usize>,
    #[serde(flatten)]
    pub mode: PlanMode,
    pub combine: Combine,
    pub protect_ends: bool,
    /// Combined score per layer.
    pub scores: Vec<T>,
    /// Largest combined score over all layers.
    pub reference_max: T,
    /// `epsilon * reference_max` in threshold mode.
    pub threshold: Option<T>,
    /// Set in threshold mode when every score is zero; nothing is pruned.
    pub degenerate: bool,
    /// Layers selected if the maximum were taken per layer over dimensions
    /// instead of over layers. Compares each layer against its own dominant
    /// score, so for `epsilon <= 1` it selects every layer with a score.
    /// Threshold mode only, for inspection.
    pub per_layer_max_reading: Option<Vec<usize>>,
    pub params: Option<PipelineParams>,
}

impl<T> PruningPlan<T> {
    pub fn with_params(mut self, params: PipelineParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn pruned_set(&self) -> BTreeSet<usize> {
        self.pruned.iter().copied().collect()
    }
}

/// Selects layers to prune from per-dimension scores (`scores[p][l - 1]`).
pub fn prune_plan<T: Scalar>(
    scores: &[Vec<T>],
    options: &PlanOptions,
) -> Result<PruningPlan<T>, ScoringError> {
    options.mode.validate()?;
    let Some(first) = scores.first() else {
        return Err(ScoringError::InvalidParameter("no score vectors".into()));
    };
    let l = first.len();
    if l == 0 {
        return Err(ScoringError::InvalidParameter(
            "score vectors are empty".into(),
        ));
    }
    if let Some(v) = scores.iter().find(|v| v.len() != l) {
        return Err(ScoringError::LayerCountMismatch {
            expected: l,
            found: v.len(),
        });
    }
    if let Some(x) = scores.iter().flatten().find(|x| !x.is_finite()) {
        return Err(ScoringError::InvalidParameter(format!(
            "non-finite score {x}"
        )));
    }

    let combined = options.combine.apply(scores);
    let reference_max = combined.iter().copied().fold(T::zero(), T::max);
    let protected = |layer: usize| options.protect_ends && (layer == 1 || layer == l);

    let mut plan = PruningPlan {
        layer_count: l,
        pruned: Vec::new(),
        mode: options.mode,
        combine: options.combine,
        protect_ends: options.protect_ends,
        scores: combined.clone(),
        reference_max,
        threshold: None,
        degenerate: false,
        per_layer_max_reading: None,
        params: None,
    };

    match options.mode {
        PlanMode::Threshold { epsilon } => {
            let eps = T::of(epsilon);
            let threshold = eps * reference_max;
            plan.threshold = Some(threshold);
            plan.per_layer_max_reading = Some(
                (1..=l)
                    .filter(|&layer| {
                        let own = scores
                            .iter()
                            .map(|v| v[layer - 1])
                            .fold(T::neg_infinity(), T::max);
                        own > T::zero() && own >= eps * own
                    })
                    .collect(),
            );
            if reference_max <= T::zero() {
                plan.degenerate = true;
                log::warn!("all layer scores are zero; threshold plan is empty");
            } else {
                plan.pruned = (1..=l)
                    .filter(|&layer| !protected(layer) && combined[layer - 1] >= threshold)
                    .collect();
            }
        }
        PlanMode::Sparsity { target } => {
            let count = (target * l as f64 + FLOOR_SLACK).floor() as usize;
            let mut eligible: Vec<usize> = (1..=l).filter(|&layer| !protected(layer)).collect();
            if count > eligible.len() {
                return Err(ScoringError::TooFewEligible {
                    requested: count,
                    eligible: eligible.len(),
                });
            }
            eligible.sort_by(|&a, &b| {
                combined[b - 1]
                    .partial_cmp(&combined[a - 1])
                    .unwrap_or(Ordering::Equal)
                    .then(b.cmp(&a))
            });
            eligible.truncate(count);
            eligible.sort_unstable();
            plan.pruned = eligible;
        }
    }
    Ok(plan)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMetric {
    /// `|A and B| / |A or B|`.
    #[default]
    Jaccard,
    /// `|A and B| / |A|`, with the first plan as reference.
    OverReference,
}

impl FromStr for OverlapMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jaccard" => Ok(OverlapMetric::Jaccard),
            "over-reference" | "over_reference" => Ok(OverlapMetric::OverReference),
            _ => Err(format!(
                "unknown overlap metric {s:?}, expected jaccard or over-reference"
            )),
        }
    }
}

/// Agreement between two pruned sets in `[0, 1]`; two empty sets agree fully.
pub fn plan_overlap<T>(
    a: &PruningPlan<T>,
    b: &PruningPlan<T>,
    metric: OverlapMetric,
) -> Result<f64, ScoringError> {
    if a.layer_count != b.layer_count {
        return Err(ScoringError::LayerCountMismatch {
            expected: a.layer_count,
            found: b.layer_count,
        });
    }
    Ok(set_overlap(&a.pruned_set(), &b.pruned_set(), metric))
}

pub fn set_overlap(a: &BTreeSet<usize>, b: &BTreeSet<usize>, metric: OverlapMetric) -> f64 {
    let common = a.intersection(b).count();
    let denominator = match metric {
        OverlapMetric::Jaccard => a.union(b).count(),
        OverlapMetric::OverReference => a.len(),
    };
    match (denominator, metric) {
        (0, OverlapMetric::Jaccard) => 1.0,
        (0, OverlapMetric::OverReference) => {
            if b.is_empty() {
                1.0
            } else {
                0.0
            }
        }
        (n, _) => common as f64 / n as f64,
    }
}
