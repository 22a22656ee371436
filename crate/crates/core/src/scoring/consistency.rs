use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::{EpiRaster, ScoringError};

/// A row is undefined when its mass is at most this fraction of the largest
/// row mass. Gaussian tails never reach exactly zero, and normalizing a row
/// made only of far tails would turn noise into a confident distribution.
pub const UNDEFINED_ROW_RTOL: f64 = 1e-12;

/// Row-normalized layer-to-layer persistence for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyMatrix<T> {
    pub p: u8,
    /// Row `l - 1` is the distribution over target layers for features born
    /// near layer `l`; `None` where the row has no mass.
    pub rows: Vec<Option<Vec<T>>>,
}

impl<T: Scalar> ConsistencyMatrix<T> {
    pub fn layer_count(&self) -> usize {
        self.rows.len()
    }

    pub fn undefined_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(i, _)| i + 1)
            .collect()
    }
}

pub fn consistency_matrix<T: Scalar>(raster: &EpiRaster<T>) -> ConsistencyMatrix<T> {
    let l = raster.layer_count();
    let raw: Vec<Vec<T>> = (1..=l)
        .map(|from| (1..=l).map(|to| raster.layer_pair(from, to)).collect())
        .collect();
    let sums: Vec<T> = raw.iter().map(|r| r.iter().copied().sum()).collect();
    let max = sums.iter().copied().fold(T::zero(), T::max);
    let floor = max * T::of(UNDEFINED_ROW_RTOL);
    let rows = raw
        .into_iter()
        .zip(sums)
        .map(|(row, s)| {
            if s > T::zero() && s > floor {
                Some(row.into_iter().map(|x| x / s).collect())
            } else {
                None
            }
        })
        .collect();
    ConsistencyMatrix {
        p: raster.p(),
        rows,
    }
}

/// Distance-weighted off-diagonal row mass, one value per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedConsistency<T> {
    pub p: u8,
    pub alpha: T,
    pub values: Vec<T>,
    /// Layers whose row was undefined; their value is zero.
    pub undefined: Vec<usize>,
}

/// `sum_{l' != l} |l - l'|^a S(l, l') / sum_{l' != l} |l - l'|^a`.
pub fn aggregate_consistency<T: Scalar>(
    matrix: &ConsistencyMatrix<T>,
    alpha: T,
) -> Result<AggregatedConsistency<T>, ScoringError> {
    if !(alpha.is_finite() && alpha >= T::zero()) {
        return Err(ScoringError::InvalidParameter(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let l = matrix.layer_count();
    let values = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let Some(row) = row else { return T::zero() };
            let (mut num, mut den) = (T::zero(), T::zero());
            for (j, &s) in row.iter().enumerate().filter(|&(j, _)| j != i) {
                let w = T::of_usize(i.abs_diff(j)).powf(alpha);
                num = num + w * s;
                den = den + w;
            }
            if l < 2 {
                T::zero()
            } else {
                num / den
            }
        })
        .collect();
    Ok(AggregatedConsistency {
        p: matrix.p,
        alpha,
        values,
        undefined: matrix.undefined_rows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{build_epi, EffectiveInterval, EpiParams};

    fn raster(ivs: &[(usize, usize)], l: usize, sigma_scale: f64) -> EpiRaster<f64> {
        let ivs: Vec<_> = ivs
            .iter()
            .map(|&(birth, death)| EffectiveInterval { p: 0, birth, death })
            .collect();
        build_epi(
            &ivs,
            0,
            l,
            &EpiParams {
                resolution: 8,
                sigma_scale,
            },
        )
        .unwrap()
    }

    fn matrix(rows: Vec<Option<Vec<f64>>>) -> ConsistencyMatrix<f64> {
        ConsistencyMatrix { p: 0, rows }
    }

    #[test]
    fn rows_sum_to_one() {
        let s = consistency_matrix(&raster(&[(1, 3), (2, 4), (2, 2), (3, 4)], 4, 0.2));
        for row in s.rows.iter().flatten() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_feature_row_points_at_its_death() {
        let s = consistency_matrix(&raster(&[(1, 3)], 3, 0.1));
        let row = s.rows[0].as_ref().unwrap();
        assert!(row[2] > row[0] && row[2] > row[1], "{row:?}");
        // Nothing flows backwards.
        assert_eq!(s.rows[1].as_ref().unwrap()[0], 0.0);
        assert!(s.rows[2].is_none());
    }

    #[test]
    fn far_rows_are_undefined() {
        let s = consistency_matrix(&raster(&[(1, 2)], 9, 0.01));
        assert!(s.rows[0].is_some());
        assert_eq!(s.undefined_rows(), (2..=9).collect::<Vec<_>>());
        let a = aggregate_consistency(&s, 1.0).unwrap();
        assert_eq!(a.values[5], 0.0);
        assert_eq!(a.undefined.len(), 8);
    }

    #[test]
    fn empty_raster_has_no_defined_rows() {
        let s = consistency_matrix(&raster(&[], 3, 0.1));
        assert_eq!(s.undefined_rows(), vec![1, 2, 3]);
    }

    #[test]
    fn alpha_zero_is_off_diagonal_mean() {
        let m = matrix(vec![
            Some(vec![0.2, 0.3, 0.5]),
            Some(vec![0.0, 0.6, 0.4]),
            None,
        ]);
        let a = aggregate_consistency(&m, 0.0).unwrap();
        assert!((a.values[0] - 0.4).abs() < 1e-12);
        assert!((a.values[1] - 0.2).abs() < 1e-12);
        assert_eq!(a.values[2], 0.0);
    }

    #[test]
    fn point_mass_on_the_only_neighbour() {
        let m = matrix(vec![Some(vec![0.0, 1.0]), None]);
        for alpha in [0.0, 0.5, 1.0, 3.0] {
            assert_eq!(aggregate_consistency(&m, alpha).unwrap().values[0], 1.0);
        }
    }

    #[test]
    fn point_mass_among_several() {
        let m = matrix(vec![
            Some(vec![0.0, 1.0, 0.0]),
            Some(vec![0.0, 0.0, 1.0]),
            None,
        ]);
        for alpha in [0.0, 0.5, 1.0, 3.0] {
            let a = aggregate_consistency(&m, alpha).unwrap();
            // Row 1 has weights 1 and 2^alpha over l' = 2, 3 and all mass at l' = 2.
            assert!((a.values[0] - 1.0 / (1.0 + 2f64.powf(alpha))).abs() < 1e-12);
            assert!((a.values[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_favour_distant_mass() {
        let m = matrix(vec![Some(vec![0.0, 0.2, 0.8]), None, None]);
        let a0 = aggregate_consistency(&m, 0.0).unwrap().values[0];
        let a1 = aggregate_consistency(&m, 1.0).unwrap().values[0];
        assert!((a0 - 0.5).abs() < 1e-12);
        assert!((a1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_alpha() {
        assert!(aggregate_consistency(&matrix(vec![None]), -1.0).is_err());
    }
}
