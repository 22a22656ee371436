use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::{EpiRaster, ScoringError};

/// Per-layer share of the image mass, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Activity<T> {
    pub values: Vec<T>,
    /// The normalizer: total column mass over layers and dimensions.
    pub z: T,
    /// Set when every column was empty and the uniform vector was returned.
    pub fallback: bool,
}

/// Column mass at every layer, summed over the given rasters and
/// normalized. If nothing has mass, falls back to `1 / L` everywhere.
pub fn activity<T: Scalar>(rasters: &[EpiRaster<T>]) -> Result<Activity<T>, ScoringError> {
    let Some(first) = rasters.first() else {
        return Err(ScoringError::InvalidParameter(
            "activity needs at least one raster".into(),
        ));
    };
    let l = first.layer_count();
    if let Some(r) = rasters
        .iter()
        .find(|r| r.layer_count() != l || r.resolution() != first.resolution())
    {
        return Err(ScoringError::LayerCountMismatch {
            expected: l,
            found: r.layer_count(),
        });
    }
    let raw: Vec<T> = (1..=l)
        .map(|layer| rasters.iter().map(|r| r.column_mass(layer)).sum())
        .collect();
    let z: T = raw.iter().copied().sum();
    if !(z.is_finite() && z > T::zero()) {
        log::warn!("all image columns are empty; activity falls back to uniform");
        let u = T::one() / T::of_usize(l);
        return Ok(Activity {
            values: vec![u; l],
            z: T::zero(),
            fallback: true,
        });
    }
    Ok(Activity {
        values: raw.into_iter().map(|x| x / z).collect(),
        z,
        fallback: false,
    })
}
