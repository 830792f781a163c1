//! k-nearest-neighbor density estimation and the density filtration.
//!
//! The distance from a point to its k-th nearest neighbor is inversely
//! related to the local density, so the filtration keeps the points with the
//! smallest such distances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointcloud::{Metric, MetricMode, PointCloud};
use crate::scalar::{cmp_scalar, Scalar};

/// Neighbor rank `k` and retained fraction `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiltrationParams<T> {
    pub k: usize,
    pub p: T,
}

impl<T: Scalar> FiltrationParams<T> {
    pub fn new(k: usize, p: T) -> Result<Self> {
        let params = Self { k, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.p > T::zero() && self.p <= T::one()) {
            return Err(Error::InvalidParameter(format!("p = {} must lie in (0, 1]", self.p)));
        }
        Ok(())
    }

    /// Number of points retained from a cloud of `n`: `max(1, floor(p·n))`.
    pub fn retained(&self, n: usize) -> usize {
        let exact = self.p.as_f64() * n as f64;
        // absorb the representation error of decimal fractions like 0.3
        let m = (exact + exact * 1e-12).floor() as usize;
        m.clamp(1, n.max(1))
    }
}

/// Distance from each point to its k-th nearest other point.
pub fn knn_distance<T: Scalar>(cloud: &PointCloud<T>, k: usize, mode: MetricMode) -> Result<Vec<T>> {
    let n = cloud.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k >= n {
        return Err(Error::KTooLarge { k, n });
    }
    let metric = Metric::new(cloud, mode)?;
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n - 1),
            |row: &mut Vec<T>, i| {
                row.clear();
                row.extend((0..n).filter(|&j| j != i).map(|j| {
                    if i < j { metric.distance(i, j) } else { metric.distance(j, i) }
                }));
                *row.select_nth_unstable_by(k - 1, |a, b| cmp_scalar(*a, *b)).1
            },
        )
        .collect())
}

/// Indices (ascending) of the points kept by the density filtration.
pub fn density_filtration_indices<T: Scalar>(
    cloud: &PointCloud<T>,
    params: FiltrationParams<T>,
    mode: MetricMode,
) -> Result<Vec<usize>> {
    params.validate()?;
    let dist = knn_distance(cloud, params.k, mode)?;
    let m = params.retained(cloud.len());
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| cmp_scalar(dist[a], dist[b]).then(a.cmp(&b)));
    order.truncate(m);
    order.sort_unstable();
    Ok(order)
}

/// Keeps the densest `max(1, floor(p·n))` points in their original order.
pub fn density_filtration<T: Scalar>(
    cloud: &PointCloud<T>,
    params: FiltrationParams<T>,
    mode: MetricMode,
) -> Result<PointCloud<T>> {
    let keep = density_filtration_indices(cloud, params, mode)?;
    Ok(cloud.select(&keep))
}
