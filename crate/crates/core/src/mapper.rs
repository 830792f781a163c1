//! Mapper: PCA lens, overlapping cover, per-bin single-linkage clustering and
//! the shared-point graph on the resulting clusters.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::pointcloud::{Metric, MetricMode, PointCloud};
use crate::scalar::{cmp_scalar, Scalar};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapperParams<T> {
    /// Intervals per lens axis.
    pub resolution: usize,
    /// Interval length over spacing; adjacent overlap is `1 - 1/gain`.
    pub gain: T,
    pub metric: MetricMode,
    /// Number of PCA lens axes, 1 or 2.
    pub lens_dims: usize,
    /// Histogram bins for the single-linkage cut heuristic.
    pub slc_bins: usize,
}

impl<T: Scalar> Default for MapperParams<T> {
    fn default() -> Self {
        Self {
            resolution: 30,
            gain: T::of(3.0),
            metric: MetricMode::VneVariance,
            lens_dims: 2,
            slc_bins: 10,
        }
    }
}

impl<T: Scalar> MapperParams<T> {
    pub fn new(resolution: usize, gain: T) -> Self {
        Self { resolution, gain, ..Self::default() }
    }

    pub fn with_metric(mut self, metric: MetricMode) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_lens_dims(mut self, dims: usize) -> Self {
        self.lens_dims = dims;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::InvalidParameter("resolution must be at least 1".into()));
        }
        if !(self.gain > T::one()) || !self.gain.is_finite() {
            return Err(Error::InvalidParameter(format!("gain = {} must exceed 1", self.gain)));
        }
        if !(1..=2).contains(&self.lens_dims) {
            return Err(Error::InvalidParameter(format!(
                "lens_dims = {} must be 1 or 2",
                self.lens_dims
            )));
        }
        if self.slc_bins == 0 {
            return Err(Error::InvalidParameter("slc_bins must be at least 1".into()));
        }
        Ok(())
    }
}

/// Lens values, `n × dims`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Lens<T> {
    dims: usize,
    values: Vec<T>,
}

impl<T: Scalar> Lens<T> {
    pub fn from_flat(dims: usize, values: Vec<T>) -> Result<Self> {
        if dims == 0 || !values.len().is_multiple_of(dims) {
            return Err(Error::ShapeError(format!("{} lens values for {dims} axes", values.len())));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, point: usize, axis: usize) -> T {
        self.values[point * self.dims + axis]
    }

    /// Rows of the given points, in order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let values = indices
            .iter()
            .flat_map(|&i| self.values[i * self.dims..(i + 1) * self.dims].iter().copied())
            .collect();
        Self { dims: self.dims, values }
    }

    pub fn axis(&self, axis: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().skip(axis).step_by(self.dims).copied()
    }
}

/// Projects the column-centered cloud onto its top `dims` principal axes.
pub fn pca_lens<T: Scalar>(cloud: &PointCloud<T>, dims: usize) -> Result<Lens<T>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let d = cloud.dim();
    if dims == 0 || dims > d {
        return Err(Error::InvalidParameter(format!(
            "cannot take {dims} principal axes of {d}-dimensional points"
        )));
    }
    let (mean, _) = cloud.column_moments();
    let n = T::of_usize(cloud.len());
    let mut cov = vec![T::zero(); d * d];
    let mut centered = vec![T::zero(); d];
    for p in cloud.points() {
        for ((c, &x), &m) in centered.iter_mut().zip(p).zip(&mean) {
            *c = x - m;
        }
        for r in 0..d {
            for s in r..d {
                cov[r * d + s] = cov[r * d + s] + centered[r] * centered[s];
            }
        }
    }
    for r in 0..d {
        for s in r..d {
            let v = cov[r * d + s] / n;
            cov[r * d + s] = v;
            cov[s * d + r] = v;
        }
    }

    let eig = symmetric_eigen(&cov, d);
    let top = eig.values[0].max(T::zero());
    let tol = top * T::epsilon() * T::of(1e3) * T::of_usize(d);
    let rank = eig.values.iter().filter(|&&v| v > tol).count();
    if rank < dims {
        return Err(Error::DegenerateCovariance { rank, dims });
    }

    let mut values = Vec::with_capacity(cloud.len() * dims);
    for p in cloud.points() {
        for axis in &eig.vectors[..dims] {
            values.push(
                p.iter()
                    .zip(&mean)
                    .zip(axis)
                    .map(|((&x, &m), &a)| (x - m) * a)
                    .sum(),
            );
        }
    }
    Ok(Lens { dims, values })
}

/// Evenly spaced intervals of equal length over one lens axis.
///
/// Interval `i` is centered at `min + (i + ½)·s` with `s = range/resolution`
/// and has length `gain·s`. Membership is half-open, `[lo, hi)`, evaluated in
/// units of `s` so adjacent boundaries coincide exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisCover<T> {
    pub min: T,
    pub max: T,
    pub resolution: usize,
    pub gain: T,
}

impl<T: Scalar> AxisCover<T> {
    pub fn spacing(&self) -> T {
        (self.max - self.min) / T::of_usize(self.resolution)
    }

    pub fn length(&self) -> T {
        self.gain * self.spacing()
    }

    pub fn center(&self, i: usize) -> T {
        self.min + (T::of_usize(i) + T::of(0.5)) * self.spacing()
    }

    /// `(lo, hi)` of interval `i` in lens units.
    pub fn bounds(&self, i: usize) -> (T, T) {
        let (lo, hi) = self.unit_bounds(i);
        let s = self.spacing();
        (self.min + lo * s, self.min + hi * s)
    }

    /// `(center, length)` of every interval, in order.
    pub fn intervals(&self) -> Vec<(T, T)> {
        (0..self.resolution).map(|i| (self.center(i), self.length())).collect()
    }

    /// Overlap of intervals `i` and `i + 1` as a fraction of interval length.
    pub fn overlap_fraction(&self, i: usize) -> T {
        let (_, hi) = self.bounds(i);
        let (lo, _) = self.bounds(i + 1);
        (hi - lo) / self.length()
    }

    fn unit_bounds(&self, i: usize) -> (T, T) {
        let half = self.gain / T::of(2.0);
        let mid = T::of_usize(i) + T::of(0.5);
        (mid - half, mid + half)
    }

    /// Indices of the intervals containing `v`, ascending.
    pub fn containing(&self, v: T) -> impl Iterator<Item = usize> + '_ {
        let u = (v - self.min) / self.spacing();
        let half = self.gain / T::of(2.0);
        let first = (u - T::of(0.5) - half).floor().to_i64().unwrap_or(i64::MIN).max(0);
        let last = (u - T::of(0.5) + half)
            .floor()
            .to_i64()
            .unwrap_or(i64::MAX)
            .saturating_add(1)
            .min(self.resolution as i64 - 1);
        (first..=last).map(|i| i as usize).filter(move |&i| {
            let (lo, hi) = self.unit_bounds(i);
            lo <= u && u < hi
        })
    }
}

/// Product cover over all lens axes; bins are numbered row-major over axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover<T> {
    pub axes: Vec<AxisCover<T>>,
}

impl<T: Scalar> Cover<T> {
    pub fn bin_count(&self) -> usize {
        self.axes.iter().map(|a| a.resolution).product()
    }

    /// Bins whose product interval contains the lens point, ascending.
    pub fn bins_containing(&self, lens: &Lens<T>, point: usize) -> Vec<usize> {
        let mut bins = vec![0usize];
        for (axis, cover) in self.axes.iter().enumerate() {
            let hits: Vec<usize> = cover.containing(lens.value(point, axis)).collect();
            bins = bins
                .iter()
                .flat_map(|&b| hits.iter().map(move |&h| b * cover.resolution + h))
                .collect();
        }
        bins
    }
}

pub fn build_cover<T: Scalar>(lens: &Lens<T>, resolution: usize, gain: T) -> Result<Cover<T>> {
    if lens.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be at least 1".into()));
    }
    if !(gain > T::one()) {
        return Err(Error::InvalidParameter(format!("gain = {gain} must exceed 1")));
    }
    let axes = (0..lens.dims())
        .map(|axis| {
            let (min, max) = lens
                .axis(axis)
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if !(max > min) {
                return Err(Error::ZeroRange { axis });
            }
            Ok(AxisCover { min, max, resolution, gain })
        })
        .collect::<Result<_>>()?;
    Ok(Cover { axes })
}

/// Single-linkage clustering of `indices`, cut by the first-gap histogram rule.
///
/// The `m - 1` merge heights (minimum spanning tree edge weights) are binned
/// into `slc_bins` equal bins over `[0, diameter of the member set]`. The cut
/// threshold is the left edge of the first empty bin above the lowest occupied
/// one; points joined by merges strictly below it share a cluster. Without such a gap the
/// whole set is one cluster.
///
/// Clusters hold the original indices, sorted, and are ordered by their
/// smallest member.
pub fn single_linkage_clusters<T, F>(indices: &[usize], dist: F, slc_bins: usize) -> Vec<Vec<usize>>
where
    T: Scalar,
    F: Fn(usize, usize) -> T,
{
    let m = indices.len();
    if m <= 1 {
        return indices.iter().map(|&i| vec![i]).collect();
    }

    // Prim over the complete graph on the members
    let mut in_tree = vec![false; m];
    let mut best = vec![T::infinity(); m];
    let mut from = vec![0usize; m];
    let mut merges: Vec<(T, usize, usize)> = Vec::with_capacity(m - 1);
    // each unordered pair is evaluated exactly once, so the diameter is free
    let mut top = T::zero();
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..m {
        for j in 0..m {
            if !in_tree[j] {
                let d = dist(indices[current], indices[j]);
                top = top.max(d);
                if d < best[j] {
                    best[j] = d;
                    from[j] = current;
                }
            }
        }
        let next = (0..m)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| cmp_scalar(best[a], best[b]).then(a.cmp(&b)))
            .expect("at least one vertex outside the tree");
        in_tree[next] = true;
        merges.push((best[next], from[next], next));
        current = next;
    }

    let threshold = if top > T::zero() && slc_bins > 0 {
        let width = top / T::of_usize(slc_bins);
        let mut counts = vec![0usize; slc_bins];
        for &(w, _, _) in &merges {
            let bin = (w / width).floor().to_usize().unwrap_or(slc_bins - 1).min(slc_bins - 1);
            counts[bin] += 1;
        }
        let lowest = counts.iter().position(|&c| c > 0).expect("m - 1 ≥ 1 merges");
        counts[lowest..]
            .iter()
            .position(|&c| c == 0)
            .map(|offset| width * T::of_usize(lowest + offset))
    } else {
        None
    };

    let Some(threshold) = threshold else {
        let mut all = indices.to_vec();
        all.sort_unstable();
        return vec![all];
    };

    let mut uf = UnionFind::new(m);
    for &(w, a, b) in &merges {
        if w < threshold {
            uf.union(a, b);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (local, &global) in indices.iter().enumerate() {
        groups.entry(uf.find(local)).or_default().push(global);
    }
    let mut clusters: Vec<Vec<usize>> = groups
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    clusters
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapperNode<T> {
    pub id: usize,
    pub size: usize,
    pub members: Vec<usize>,
    /// Unit-normalized mean of the member points (zero if the mean vanishes).
    pub mean: Vec<T>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MapperGraph<T> {
    pub nodes: Vec<MapperNode<T>>,
    /// `[a, b]` with `a < b`, sorted.
    pub edges: Vec<[usize; 2]>,
}

impl<T: Scalar> MapperGraph<T> {
    /// Assembles a graph from clusters, joining every pair that shares a member.
    pub fn from_clusters(cloud: &PointCloud<T>, clusters: Vec<Vec<usize>>) -> Self {
        let mut containing: HashMap<usize, Vec<usize>> = HashMap::new();
        let nodes: Vec<MapperNode<T>> = clusters
            .into_iter()
            .enumerate()
            .map(|(id, members)| {
                for &m in &members {
                    containing.entry(m).or_default().push(id);
                }
                MapperNode { id, size: members.len(), mean: unit_mean(cloud, &members), members }
            })
            .collect();
        let mut edges = BTreeSet::new();
        for ids in containing.values() {
            for (x, &a) in ids.iter().enumerate() {
                for &b in &ids[x + 1..] {
                    edges.insert([a.min(b), a.max(b)]);
                }
            }
        }
        Self { nodes, edges: edges.into_iter().collect() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        uf.components()
    }
}

fn unit_mean<T: Scalar>(cloud: &PointCloud<T>, members: &[usize]) -> Vec<T> {
    let mut mean = vec![T::zero(); cloud.dim()];
    for &m in members {
        for (acc, &x) in mean.iter_mut().zip(cloud.point(m)) {
            *acc = *acc + x;
        }
    }
    let norm = mean.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        mean.iter_mut().for_each(|x| *x = *x / norm);
    }
    mean
}

/// Full Mapper construction; see the module docs.
pub fn mapper_graph<T: Scalar>(cloud: &PointCloud<T>, params: &MapperParams<T>) -> Result<MapperGraph<T>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    params.validate()?;
    let lens = pca_lens(cloud, params.lens_dims)?;
    mapper_graph_with_lens(cloud, &lens, params)
}

/// Mapper over precomputed lens values (one row per point of `cloud`).
pub fn mapper_graph_with_lens<T: Scalar>(
    cloud: &PointCloud<T>,
    lens: &Lens<T>,
    params: &MapperParams<T>,
) -> Result<MapperGraph<T>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    params.validate()?;
    if lens.len() != cloud.len() {
        return Err(Error::ShapeError(format!(
            "{} lens rows for {} points",
            lens.len(),
            cloud.len()
        )));
    }
    let cover = build_cover(lens, params.resolution, params.gain)?;
    let metric = Metric::new(cloud, params.metric)?;

    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); cover.bin_count()];
    for point in 0..cloud.len() {
        for b in cover.bins_containing(lens, point) {
            bins[b].push(point);
        }
    }
    let clusters: Vec<Vec<Vec<usize>>> = bins
        .par_iter()
        .map(|members| {
            single_linkage_clusters(members, |a, b| metric.distance(a.min(b), a.max(b)), params.slc_bins)
        })
        .collect();
    Ok(MapperGraph::from_clusters(cloud, clusters.into_iter().flatten().collect()))
}

/// First Betti number of the graph: `|E| - |V| + components`.
pub fn cycle_rank<T: Scalar>(graph: &MapperGraph<T>) -> usize {
    graph.edge_count() + graph.component_count() - graph.node_count()
}

/// Independent loops of the graph's clique complex over GF(2): the cycle rank
/// minus the rank of the triangle boundaries. Triangles produced by three-way
/// cover overlaps are filled in and do not count.
pub fn loop_rank<T: Scalar>(graph: &MapperGraph<T>) -> usize {
    let n = graph.node_count();
    let mut adjacency = vec![BTreeSet::new(); n];
    let mut edge_index = HashMap::with_capacity(graph.edges.len());
    for (k, &[a, b]) in graph.edges.iter().enumerate() {
        adjacency[a].insert(b);
        adjacency[b].insert(a);
        edge_index.insert((a, b), k);
    }

    // boundary columns as sorted edge lists, reduced left to right
    let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut rank = 0;
    for &[a, b] in &graph.edges {
        for &c in adjacency[a].intersection(&adjacency[b]).filter(|&&c| c > b) {
            let mut col = vec![edge_index[&(a, b)], edge_index[&(a, c)], edge_index[&(b, c)]];
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some(other) => col = symmetric_difference(&col, other),
                    None => {
                        pivots.insert(low, col);
                        rank += 1;
                        break;
                    }
                }
            }
        }
    }
    cycle_rank(graph) - rank
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
