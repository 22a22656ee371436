use serde::{Deserialize, Serialize};

/// Parameters of the topology stages, recorded with every output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineParams {
    /// Neighbours per token in the kNN graph.
    pub k: usize,
    /// Distance exponent of the consistency weights.
    pub alpha: f64,
    /// Kernel bandwidth as a fraction of the birth-to-death span.
    pub sigma_scale: f64,
    /// Image cells per layer.
    pub grid_resolution: usize,
    /// Highest homology dimension, 0 or 1.
    pub max_p: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            k: 15,
            alpha: 1.0,
            sigma_scale: 0.1,
            grid_resolution: 8,
            max_p: 1,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 {
            return Err("k must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(format!("alpha must be finite and >= 0, got {}", self.alpha));
        }
        if !(self.sigma_scale.is_finite() && self.sigma_scale > 0.0) {
            return Err(format!(
                "sigma scale must be positive and finite, got {}",
                self.sigma_scale
            ));
        }
        if self.grid_resolution == 0 {
            return Err("grid resolution must be at least 1".into());
        }
        if self.max_p > 1 {
            return Err(format!(
                "max homology dimension must be 0 or 1, got {}",
                self.max_p
            ));
        }
        Ok(())
    }
}
