//! Point clouds, per-point normalization, metrics and spatial-filter extraction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n` points of a common dimension `dim`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    dim: usize,
    data: Vec<T>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be at least 1".into()));
        }
        Ok(Self { dim, data: Vec::new(), labels: None })
    }

    /// Builds a cloud from a flat row-major buffer.
    pub fn from_flat(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be at least 1".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::ShapeError(format!(
                "{} values do not split into points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data, labels: None })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyCloud)?;
        let mut cloud = Self::new(first.as_ref().len())?;
        for row in rows {
            cloud.push(row.as_ref())?;
        }
        Ok(cloud)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::ShapeError(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn push(&mut self, point: &[T]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        if self.labels.is_some() {
            return Err(Error::InvalidParameter("use push_labeled on a labeled cloud".into()));
        }
        self.data.extend_from_slice(point);
        Ok(())
    }

    pub fn push_labeled(&mut self, point: &[T], label: String) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        if self.labels.is_none() {
            if !self.is_empty() {
                return Err(Error::InvalidParameter("cannot label a partially unlabeled cloud".into()));
            }
            self.labels = Some(Vec::new());
        }
        self.data.extend_from_slice(point);
        self.labels.as_mut().expect("labels present").push(label);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Sub-cloud of the given indices, in the given order; labels follow.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        Self { dim: self.dim, data, labels }
    }

    /// Converts every coordinate to another scalar type.
    pub fn cast<U: Scalar>(&self) -> PointCloud<U> {
        PointCloud {
            dim: self.dim,
            data: self.data.iter().map(|x| U::of(x.as_f64())).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Population mean and variance of every coordinate column.
    pub fn column_moments(&self) -> (Vec<T>, Vec<T>) {
        let n = T::of_usize(self.len().max(1));
        let mut mean = vec![T::zero(); self.dim];
        for p in self.points() {
            for (m, &x) in mean.iter_mut().zip(p) {
                *m = *m + x;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / n);
        let mut var = vec![T::zero(); self.dim];
        for p in self.points() {
            for ((v, &m), &x) in var.iter_mut().zip(&mean).zip(p) {
                *v = *v + (x - m) * (x - m);
            }
        }
        var.iter_mut().for_each(|v| *v = *v / n);
        (mean, var)
    }
}

/// Distance used for clustering, density estimation and persistence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricMode {
    Euclidean,
    /// Each column divided by its population variance before Euclidean distance.
    #[default]
    VneVariance,
    /// Each column divided by its population standard deviation.
    VneStddev,
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricMode::Euclidean => "euclidean",
            MetricMode::VneVariance => "vne_variance",
            MetricMode::VneStddev => "vne_stddev",
        })
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(MetricMode::Euclidean),
            "vne_variance" | "vne" => Ok(MetricMode::VneVariance),
            "vne_stddev" => Ok(MetricMode::VneStddev),
            other => Err(Error::InvalidParameter(format!("unknown metric mode {other:?}"))),
        }
    }
}

/// A metric bound to a cloud: column weights are fixed from the whole cloud.
#[derive(Clone, Debug)]
pub struct Metric<'a, T> {
    cloud: &'a PointCloud<T>,
    /// Per-column multiplier; `None` for plain Euclidean.
    weights: Option<Vec<T>>,
}

impl<'a, T: Scalar> Metric<'a, T> {
    pub fn new(cloud: &'a PointCloud<T>, mode: MetricMode) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let weights = match mode {
            MetricMode::Euclidean => None,
            MetricMode::VneVariance | MetricMode::VneStddev => {
                let (_, var) = cloud.column_moments();
                let mut w = Vec::with_capacity(var.len());
                for (j, v) in var.into_iter().enumerate() {
                    if !(v > T::zero()) {
                        return Err(Error::ZeroVarianceColumn(j));
                    }
                    w.push(match mode {
                        MetricMode::VneVariance => T::one() / v,
                        _ => T::one() / v.sqrt(),
                    });
                }
                Some(w)
            }
        };
        Ok(Self { cloud, weights })
    }

    pub fn cloud(&self) -> &'a PointCloud<T> {
        self.cloud
    }

    pub fn distance(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.cloud.point(i), self.cloud.point(j));
        let sq = match &self.weights {
            None => a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>(),
            Some(w) => a
                .iter()
                .zip(b)
                .zip(w)
                .map(|((&x, &y), &s)| {
                    let d = (x - y) * s;
                    d * d
                })
                .sum::<T>(),
        };
        sq.sqrt()
    }
}

/// Dense symmetric `n × n` distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry; zero for fewer than two points.
    pub fn diameter(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x))
    }
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Fills the matrix from a metric. Rows are computed in parallel; each
    /// entry is evaluated by the same sequential expression, so the result
    /// does not depend on the schedule.
    pub fn from_metric(metric: &Metric<'_, T>) -> Self {
        let n = metric.cloud().len();
        let mut data = vec![T::zero(); n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                if i != j {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    *slot = metric.distance(a, b);
                }
            }
        });
        Self { n, data }
    }
}

/// Mean-centers each point and scales it to unit Euclidean norm.
///
/// Fails on the first point that is constant.
pub fn center_normalize<T: Scalar>(cloud: &PointCloud<T>) -> Result<PointCloud<T>> {
    let mut out = cloud.clone();
    for (i, p) in out.data.chunks_exact_mut(cloud.dim).enumerate() {
        if !normalize_in_place(p) {
            return Err(Error::ConstantPoint(i));
        }
    }
    Ok(out)
}

/// Like [`center_normalize`] but drops constant points. Returns the cleaned
/// cloud and the original indices of the dropped points.
pub fn center_normalize_lossy<T: Scalar>(cloud: &PointCloud<T>) -> (PointCloud<T>, Vec<usize>) {
    let mut data = Vec::with_capacity(cloud.data.len());
    let mut labels = cloud.labels.as_ref().map(|_| Vec::new());
    let mut dropped = Vec::new();
    let mut buf = vec![T::zero(); cloud.dim];
    for (i, p) in cloud.points().enumerate() {
        buf.copy_from_slice(p);
        if normalize_in_place(&mut buf) {
            data.extend_from_slice(&buf);
            if let (Some(out), Some(src)) = (labels.as_mut(), cloud.labels.as_ref()) {
                out.push(src[i].clone());
            }
        } else {
            dropped.push(i);
        }
    }
    (PointCloud { dim: cloud.dim, data, labels }, dropped)
}

/// Centers and normalizes `p`; returns `false` for a constant point.
pub(crate) fn normalize_in_place<T: Scalar>(p: &mut [T]) -> bool {
    let n = T::of_usize(p.len());
    let mean = p.iter().copied().sum::<T>() / n;
    let scale = p.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    p.iter_mut().for_each(|x| *x = *x - mean);
    let norm = p.iter().map(|&x| x * x).sum::<T>().sqrt();
    // centering leaves rounding noise of order eps·|x| on a constant point
    if !(norm > T::epsilon() * scale * n) {
        return false;
    }
    p.iter_mut().for_each(|x| *x = *x / norm);
    true
}

pub fn pairwise_distances<T: Scalar>(
    cloud: &PointCloud<T>,
    mode: MetricMode,
) -> Result<DistanceMatrix<T>> {
    Ok(DistanceMatrix::from_metric(&Metric::new(cloud, mode)?))
}

/// Raw convolution weights with `dnum` output maps over `c` input channels,
/// stored map-major, then channel, then row, then column.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTensor<T> {
    pub w: usize,
    pub h: usize,
    pub c: usize,
    pub dnum: usize,
    values: Vec<T>,
}

impl<T: Scalar> WeightTensor<T> {
    pub fn new(w: usize, h: usize, c: usize, dnum: usize, values: Vec<T>) -> Result<Self> {
        if w == 0 || h == 0 || c == 0 || dnum == 0 {
            return Err(Error::ShapeError(format!(
                "tensor extents must be positive, got w={w} h={h} c={c} dnum={dnum}"
            )));
        }
        let expected = w * h * c * dnum;
        if values.len() != expected {
            return Err(Error::ShapeError(format!(
                "expected {expected} weights for {w}x{h}x{c}x{dnum}, got {}",
                values.len()
            )));
        }
        Ok(Self { w, h, c, dnum, values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The `w × h` slice of output map `map` at input channel `channel`.
    pub fn slice(&self, map: usize, channel: usize) -> &[T] {
        let size = self.w * self.h;
        let start = (map * self.c + channel) * size;
        &self.values[start..start + size]
    }
}

/// One point per (output map, input channel) pair, flattened row-major.
/// No normalization is applied.
pub fn extract_spatial_filters<T: Scalar>(tensor: &WeightTensor<T>) -> PointCloud<T> {
    let mut cloud = PointCloud::new(tensor.w * tensor.h).expect("tensor extents are positive");
    for map in 0..tensor.dnum {
        for channel in 0..tensor.c {
            cloud
                .push_labeled(tensor.slice(map, channel), format!("map{map}/chan{channel}"))
                .expect("slice has dimension w*h");
        }
    }
    cloud
}
