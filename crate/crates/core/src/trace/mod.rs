//! Layer traces: the per-sample stack of hidden-state point clouds.
//!
//! A trace holds `L` point clouds of `N` tokens in `d` dimensions. Tokens are
//! tracked through depth, so every layer has the same `N` and `d`. Traces are
//! exchanged as LTRC files (see [`format`]) and can be generated without a
//! model by [`synth`].

pub mod format;
pub mod synth;

use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::PointCloud;
use crate::scalar::Scalar;

pub use format::{read_trace, write_trace, HEADER_LEN, MAGIC, VERSION};
pub use synth::{synth_trace, Scenario, SynthSpec};

/// Flat string metadata stored next to a trace (model id, prompt, sample id, ...).
pub type Manifest = BTreeMap<String, String>;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("bad magic: expected \"LTRC\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("truncated header: missing field `{field}`")]
    TruncatedHeader { field: &'static str },
    #[error("reserved header field is {found}, expected 0")]
    ReservedNonZero { found: u32 },
    #[error("invalid header field `{field}` = {value}: {reason}")]
    InvalidHeader {
        field: &'static str,
        value: u64,
        reason: &'static str,
    },
    #[error("truncated payload: header declares {declared} float32 elements ({expected_bytes} bytes), file holds {actual_bytes} bytes")]
    TruncatedPayload {
        declared: u64,
        expected_bytes: u64,
        actual_bytes: u64,
    },
    #[error("trailing bytes: {extra} bytes after the declared payload")]
    TrailingBytes { extra: u64 },
    #[error("non-finite coordinate at layer {layer}, token {token}, dim {dim}")]
    NonFinite {
        layer: usize,
        token: usize,
        dim: usize,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// `L` point clouds of `N` points in `R^d`, stored as 32-bit floats,
/// layer-major then token-major then coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    layer_count: usize,
    token_count: usize,
    dim: usize,
    data: Vec<f32>,
    pub manifest: Manifest,
}

impl LayerTrace {
    /// Builds a trace from a flat coordinate buffer, checking every invariant.
    pub fn new(
        layer_count: usize,
        token_count: usize,
        dim: usize,
        data: Vec<f32>,
    ) -> Result<Self, TraceError> {
        let trace = LayerTrace {
            layer_count,
            token_count,
            dim,
            data,
            manifest: Manifest::new(),
        };
        trace.validate()?;
        Ok(trace)
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(
        layer_count: usize,
        token_count: usize,
        dim: usize,
        data: Vec<f32>,
    ) -> Self {
        LayerTrace {
            layer_count,
            token_count,
            dim,
            data,
            manifest: Manifest::new(),
        }
    }

    /// Builds a trace from nested `layers[ℓ][token][coord]` vectors.
    pub fn from_layers(layers: &[Vec<Vec<f32>>]) -> Result<Self, TraceError> {
        let layer_count = layers.len();
        let token_count = layers.first().map_or(0, Vec::len);
        let dim = layers.first().and_then(|l| l.first()).map_or(0, Vec::len);
        let mut data = Vec::with_capacity(layer_count * token_count * dim);
        for (l, layer) in layers.iter().enumerate() {
            if layer.len() != token_count {
                return Err(TraceError::Shape(format!(
                    "layer {} has {} tokens, layer 1 has {token_count}",
                    l + 1,
                    layer.len()
                )));
            }
            for (t, point) in layer.iter().enumerate() {
                if point.len() != dim {
                    return Err(TraceError::Shape(format!(
                        "layer {}, token {t} has dimension {}, expected {dim}",
                        l + 1,
                        point.len()
                    )));
                }
                data.extend_from_slice(point);
            }
        }
        Self::new(layer_count, token_count, dim, data)
    }

    pub fn with_manifest(mut self, manifest: Manifest) -> Self {
        self.manifest = manifest;
        self
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All coordinates, layer-major.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Coordinates of layer `layer` (0-based), token-major.
    pub fn layer(&self, layer: usize) -> &[f32] {
        let stride = self.token_count * self.dim;
        &self.data[layer * stride..(layer + 1) * stride]
    }

    /// Coordinates of one token at one layer (both 0-based).
    pub fn point(&self, layer: usize, token: usize) -> &[f32] {
        let start = (layer * self.token_count + token) * self.dim;
        &self.data[start..start + self.dim]
    }

    /// Layer `layer` (0-based) as a point cloud over scalar `T`.
    pub fn point_cloud<T: Scalar>(&self, layer: usize) -> PointCloud<T> {
        let coords = self
            .layer(layer)
            .iter()
            .map(|&x| T::of(f64::from(x)))
            .collect();
        PointCloud::new(self.token_count, self.dim, coords)
            .expect("trace layers always form a valid point cloud")
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f32) -> Result<Self, TraceError> {
        let data = self.data.iter().map(|&x| x * factor).collect();
        let mut out = Self::new(self.layer_count, self.token_count, self.dim, data)?;
        out.manifest = self.manifest.clone();
        Ok(out)
    }

    /// Keeps only the listed tokens (in the given order) in every layer.
    pub fn select_tokens(&self, tokens: &[usize]) -> Result<Self, TraceError> {
        if let Some(&bad) = tokens.iter().find(|&&t| t >= self.token_count) {
            return Err(TraceError::Shape(format!(
                "token index {bad} out of range for N={}",
                self.token_count
            )));
        }
        let mut data = Vec::with_capacity(self.layer_count * tokens.len() * self.dim);
        for l in 0..self.layer_count {
            for &t in tokens {
                data.extend_from_slice(self.point(l, t));
            }
        }
        let mut out = Self::new(self.layer_count, tokens.len(), self.dim, data)?;
        out.manifest = self.manifest.clone();
        Ok(out)
    }

    /// Keeps a seeded uniform random subset of `round(fraction * N)` tokens
    /// (at least one), preserving their original order.
    pub fn subsample_tokens(&self, fraction: f64, seed: u64) -> Result<Self, TraceError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(TraceError::Shape(format!(
                "token fraction must lie in (0, 1], got {fraction}"
            )));
        }
        let keep =
            ((fraction * self.token_count as f64).round() as usize).clamp(1, self.token_count);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tokens = index::sample(&mut rng, self.token_count, keep).into_vec();
        tokens.sort_unstable();
        self.select_tokens(&tokens)
    }

    fn check_finite(&self) -> Result<(), TraceError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            None => Ok(()),
            Some(pos) => {
                let dim = pos % self.dim;
                let token = (pos / self.dim) % self.token_count;
                let layer = pos / (self.dim * self.token_count);
                Err(TraceError::NonFinite { layer, token, dim })
            }
        }
    }

    /// Checks the shape and finiteness invariants.
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.layer_count < 2 {
            return Err(TraceError::Shape(format!(
                "layer_count must be at least 2, got {}",
                self.layer_count
            )));
        }
        if self.token_count < 1 {
            return Err(TraceError::Shape("token_count must be at least 1".into()));
        }
        if self.dim < 1 {
            return Err(TraceError::Shape("dim must be at least 1".into()));
        }
        let expected = self.layer_count * self.token_count * self.dim;
        if self.data.len() != expected {
            return Err(TraceError::Shape(format!(
                "expected {expected} coordinates for L={}, N={}, d={}, got {}",
                self.layer_count,
                self.token_count,
                self.dim,
                self.data.len()
            )));
        }
        self.check_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(LayerTrace::new(1, 1, 1, vec![0.0]).is_err());
        assert!(LayerTrace::new(2, 0, 1, vec![]).is_err());
        assert!(LayerTrace::new(2, 1, 1, vec![0.0]).is_err());
        assert!(LayerTrace::new(2, 1, 1, vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn non_finite_is_located() {
        let err = LayerTrace::new(2, 2, 2, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, f32::NAN, 0.0])
            .unwrap_err();
        assert!(matches!(
            err,
            TraceError::NonFinite {
                layer: 1,
                token: 1,
                dim: 0
            }
        ));
    }

    #[test]
    fn ragged_layers_rejected() {
        let layers = vec![vec![vec![0.0f32]], vec![vec![0.0], vec![1.0]]];
        assert!(LayerTrace::from_layers(&layers).is_err());
    }

    #[test]
    fn subsample_is_seeded_and_sized() {
        let data: Vec<f32> = (0..2 * 10 * 3).map(|x| x as f32).collect();
        let t = LayerTrace::new(2, 10, 3, data).unwrap();
        let a = t.subsample_tokens(0.5, 9).unwrap();
        let b = t.subsample_tokens(0.5, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.token_count(), 5);
        assert_eq!(t.subsample_tokens(1.0, 1).unwrap(), t);
        assert!(t.subsample_tokens(0.0, 1).is_err());
    }
}
