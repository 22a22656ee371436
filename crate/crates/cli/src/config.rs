use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use topoprune::{PipelineParams, PlanMode, PlanOptions};

use crate::{ModeArg, PlanFlags, ScoreArgs, TopologyArgs, UsageError};

pub const CONFIG_FORMAT: &str = "topoprune.config/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

/// Every effective setting of a `score` run; written next to its outputs
/// and accepted back by `score --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format: String,
    pub params: PipelineParams,
    pub plan: PlanOptions,
    pub precision: Precision,
    pub token_fraction: f64,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
}

pub fn params_from(t: &TopologyArgs) -> PipelineParams {
    PipelineParams {
        k: t.k,
        alpha: t.alpha,
        sigma_scale: t.sigma_scale,
        grid_resolution: t.grid_res,
        max_p: t.max_dim,
    }
}

pub fn plan_options_from(p: &PlanFlags) -> PlanOptions {
    PlanOptions {
        mode: match p.mode {
            ModeArg::Threshold => PlanMode::Threshold { epsilon: p.epsilon },
            ModeArg::Sparsity => PlanMode::Sparsity { target: p.sparsity },
        },
        combine: p.combine,
        protect_ends: !p.no_protect_ends,
    }
}

impl RunConfig {
    pub fn from_args(args: &ScoreArgs) -> Self {
        RunConfig {
            format: CONFIG_FORMAT.into(),
            params: params_from(&args.topology),
            plan: plan_options_from(&args.plan),
            precision: args.topology.precision,
            token_fraction: args.token_fraction,
            seed: args.seed,
            inputs: args.traces.clone(),
            out_dir: args.out_dir.clone(),
        }
    }

    /// Checks every field before any file is read.
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.format != CONFIG_FORMAT {
            return Err(UsageError(format!(
                "unsupported config format {:?}, expected {CONFIG_FORMAT:?}",
                self.format
            )));
        }
        self.params.validate().map_err(UsageError)?;
        self.plan
            .mode
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;
        if !(self.token_fraction > 0.0 && self.token_fraction <= 1.0) {
            return Err(UsageError(format!(
                "token fraction must be in (0, 1], got {}",
                self.token_fraction
            )));
        }
        if self.inputs.is_empty() {
            return Err(UsageError("no trace files given".into()));
        }
        Ok(())
    }
}
