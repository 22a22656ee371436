//! Effective persistence image: a Gaussian-smoothed, persistence-weighted
//! density over (birth layer, lifespan) coordinates.
//!
//! The kernel is a product of 1-D Gaussians, so every evaluation factors
//! into a u-part and a v-part. Coincident centers are merged up front; the
//! number of distinct centers is at most `L^2` whatever the number of
//! intervals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::scalar::Scalar;

use super::{EffectiveInterval, ScoringError};

/// Smallest kernel bandwidth, used when all features coincide.
pub const MIN_SIGMA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpiParams<T> {
    /// Grid cells per layer on both axes.
    pub resolution: usize,
    /// Bandwidth as a fraction of the birth-to-death span.
    pub sigma_scale: T,
}

impl<T: Scalar> Default for EpiParams<T> {
    fn default() -> Self {
        EpiParams {
            resolution: 8,
            sigma_scale: T::of(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpiCenter<T> {
    pub birth: usize,
    pub persistence: usize,
    /// Sum of the weights of all intervals at this center.
    pub weight: T,
}

/// Raster for one homology dimension. Grid nodes sit at
/// `u = 1 + (i - u_pad) / res` and `v = j / res`, so every layer falls on a
/// column exactly. The u-axis is padded by `4 sigma` past layers 1 and `L`;
/// the v-axis runs from 0 to at least `tau_max + 4 sigma` and at least
/// `L - 1`, so every layer pair `(l, l')` with `l' >= l` is on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EpiRaster<T> {
    p: u8,
    layer_count: usize,
    resolution: usize,
    sigma: T,
    tau_max: usize,
    centers: Vec<EpiCenter<T>>,
    // Column sum of each center's v-kernel times the cell height.
    v_mass: Vec<T>,
    u_pad: usize,
    v_cells: usize,
}

pub fn build_epi<T: Scalar>(
    intervals: &[EffectiveInterval],
    p: u8,
    layer_count: usize,
    params: &EpiParams<T>,
) -> Result<EpiRaster<T>, ScoringError> {
    if params.resolution == 0 {
        return Err(ScoringError::InvalidParameter(
            "grid resolution must be at least 1".into(),
        ));
    }
    if !(params.sigma_scale.is_finite() && params.sigma_scale > T::zero()) {
        return Err(ScoringError::InvalidParameter(format!(
            "sigma scale must be positive and finite, got {}",
            params.sigma_scale
        )));
    }
    if layer_count == 0 {
        return Err(ScoringError::InvalidParameter(
            "layer count must be at least 1".into(),
        ));
    }
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in intervals.iter().filter(|i| i.p == p) {
        if i.birth < 1 || i.death > layer_count || i.birth > i.death {
            return Err(ScoringError::IntervalOutOfRange {
                birth: i.birth,
                death: i.death,
                space_count: layer_count,
            });
        }
        *counts.entry((i.birth, i.persistence())).or_default() += 1;
    }
    let res = T::of_usize(params.resolution);

    let (sigma, tau_max) = if counts.is_empty() {
        (T::of(MIN_SIGMA), 0)
    } else {
        let b_min = counts.keys().map(|&(b, _)| b).min().unwrap_or(1);
        let d_max = counts.keys().map(|&(b, t)| b + t).max().unwrap_or(1);
        let tau_max = counts.keys().map(|&(_, t)| t).max().unwrap_or(0);
        let span = T::of_usize(d_max - b_min);
        ((params.sigma_scale * span).max(T::of(MIN_SIGMA)), tau_max)
    };
    let centers: Vec<EpiCenter<T>> = counts
        .into_iter()
        .map(|((birth, persistence), n)| {
            let w = if tau_max == 0 {
                T::one()
            } else {
                T::of_usize(persistence) / T::of_usize(tau_max)
            };
            EpiCenter {
                birth,
                persistence,
                weight: w * T::of_usize(n),
            }
        })
        .collect();

    let four_sigma = T::of(4.0) * sigma;
    let u_pad = (four_sigma * res).ceil().to_usize().unwrap_or(0);
    let v_max = (T::of_usize(tau_max) + four_sigma).max(T::of_usize(layer_count - 1));
    let v_cells = (v_max * res).ceil().to_usize().unwrap_or(0) + 1;

    let mut raster = EpiRaster {
        p,
        layer_count,
        resolution: params.resolution,
        sigma,
        tau_max,
        centers,
        v_mass: Vec::new(),
        u_pad,
        v_cells,
    };
    let dv = raster.cell_height();
    raster.v_mass = raster
        .centers
        .iter()
        .map(|c| {
            let tau = T::of_usize(c.persistence);
            (0..v_cells)
                .map(|j| raster.kernel(raster.v_at(j) - tau))
                .sum::<T>()
                * dv
        })
        .collect();
    Ok(raster)
}

impl<T: Scalar> EpiRaster<T> {
    #[inline]
    fn kernel(&self, x: T) -> T {
        (-(x * x) / (T::of(2.0) * self.sigma * self.sigma)).exp()
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn centers(&self) -> &[EpiCenter<T>] {
        &self.centers
    }

    /// True when no interval of this dimension was supplied; the raster is
    /// then identically zero.
    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn u_cells(&self) -> usize {
        (self.layer_count - 1) * self.resolution + 1 + 2 * self.u_pad
    }

    pub fn v_cells(&self) -> usize {
        self.v_cells
    }

    pub fn u_at(&self, i: usize) -> T {
        T::one() + (T::of_usize(i) - T::of_usize(self.u_pad)) / T::of_usize(self.resolution)
    }

    pub fn v_at(&self, j: usize) -> T {
        T::of_usize(j) / T::of_usize(self.resolution)
    }

    /// Column index of layer `l` (1-based).
    pub fn layer_column(&self, layer: usize) -> usize {
        self.u_pad + (layer - 1) * self.resolution
    }

    pub fn cell_width(&self) -> T {
        T::one() / T::of_usize(self.resolution)
    }

    pub fn cell_height(&self) -> T {
        self.cell_width()
    }

    pub fn cell_area(&self) -> T {
        self.cell_width() * self.cell_height()
    }

    /// The image evaluated at an arbitrary point.
    pub fn value(&self, u: T, v: T) -> T {
        self.centers
            .iter()
            .map(|c| {
                c.weight
                    * self.kernel(u - T::of_usize(c.birth))
                    * self.kernel(v - T::of_usize(c.persistence))
            })
            .sum()
    }

    /// All cells, row-major with one row per u-node.
    pub fn grid(&self) -> Vec<T> {
        let (nu, nv) = (self.u_cells(), self.v_cells);
        let mut out = vec![T::zero(); nu * nv];
        // Group centers by lifespan: cell(i, j) = sum_tau U_tau(i) * g(v_j - tau).
        let mut by_tau: BTreeMap<usize, Vec<T>> = BTreeMap::new();
        for c in &self.centers {
            let row = by_tau
                .entry(c.persistence)
                .or_insert_with(|| vec![T::zero(); nu]);
            let b = T::of_usize(c.birth);
            for (i, x) in row.iter_mut().enumerate() {
                *x = *x + c.weight * self.kernel(self.u_at(i) - b);
            }
        }
        for (tau, u_part) in by_tau {
            let tau = T::of_usize(tau);
            let v_part: Vec<T> = (0..nv).map(|j| self.kernel(self.v_at(j) - tau)).collect();
            for (i, &a) in u_part.iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (cell, &b) in out[i * nv..(i + 1) * nv].iter_mut().zip(&v_part) {
                    *cell = *cell + a * b;
                }
            }
        }
        out
    }

    /// Sum over all cells times the cell area.
    pub fn mass(&self) -> T {
        self.grid().into_iter().sum::<T>() * self.cell_area()
    }

    /// Integral of the image over the whole plane.
    pub fn analytic_mass(&self) -> T {
        let two_pi_s2 = T::of(2.0 * std::f64::consts::PI) * self.sigma * self.sigma;
        self.centers.iter().map(|c| c.weight).sum::<T>() * two_pi_s2
    }

    /// `sum_j EPI(u_l, v_j) * dv` along the column of layer `l`.
    pub fn column_mass(&self, layer: usize) -> T {
        let u = self.u_at(self.layer_column(layer));
        self.centers
            .iter()
            .zip(&self.v_mass)
            .map(|(c, &m)| c.weight * self.kernel(u - T::of_usize(c.birth)) * m)
            .sum()
    }

    /// The image read as a birth/target-layer map: the value at
    /// `u = from`, `v = to - from`, and zero when `to < from`.
    pub fn layer_pair(&self, from: usize, to: usize) -> T {
        if to < from {
            return T::zero();
        }
        self.value(T::of_usize(from), T::of_usize(to - from))
    }

    /// Grid indices and value of the largest cell.
    pub fn argmax(&self) -> (usize, usize, T) {
        let nv = self.v_cells;
        let grid = self.grid();
        let (k, &v) = grid.iter().enumerate().fold((0, &T::zero()), |best, cur| {
            if *cur.1 > *best.1 {
                cur
            } else {
                best
            }
        });
        (k / nv, k % nv, v)
    }

    /// CSV with a header row of v coordinates and one row per u-node.
    pub fn to_csv(&self) -> String {
        let nv = self.v_cells;
        let mut out = String::from("u\\v");
        for j in 0..nv {
            write!(out, ",{}", self.v_at(j)).expect("writing to a String");
        }
        out.push('\n');
        for (i, row) in self.grid().chunks(nv).enumerate() {
            write!(out, "{}", self.u_at(i)).expect("writing to a String");
            for x in row {
                write!(out, ",{:e}", x.to_f64_lossy()).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    /// Binary graymap, layers along x and lifespan up the y-axis, scaled to
    /// the maximum cell.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (nu, nv) = (self.u_cells(), self.v_cells);
        let grid = self.grid();
        let max = grid.iter().copied().fold(T::zero(), T::max);
        let mut out = format!("P5\n{nu} {nv}\n255\n").into_bytes();
        for j in (0..nv).rev() {
            for i in 0..nu {
                let x = grid[i * nv + j];
                let level = if max > T::zero() {
                    (x / max * T::of(255.0)).round()
                } else {
                    T::zero()
                };
                out.push(level.to_u8().unwrap_or(0));
            }
        }
        out
    }
}
