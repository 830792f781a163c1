//! Vietoris–Rips persistent homology in dimensions 0 and 1 over GF(2).
//!
//! Simplices are ordered by filtration value, then dimension, then
//! lexicographically by their sorted vertex lists. Dimension 0 is computed by
//! union-find over the sorted edges. Dimension 1 reduces the coboundary matrix
//! of the edge/triangle filtration: the anti-transpose of the boundary matrix,
//! which yields the same persistence pairs. Columns are processed from the
//! last edge to the first; edges that merged components are cleared, apparent
//! pairs are taken without reduction, and reduced columns are kept implicitly
//! as the list of edges whose coboundaries they sum.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{pairwise_distances, DistanceMatrix, MetricMode, PointCloud};
use crate::scalar::{cmp_scalar, Scalar};
use crate::unionfind::UnionFind;

/// `[birth, death)`; `death` is `+∞` for classes alive at the end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub birth: T,
    pub death: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(birth: T, death: T) -> Self {
        Self { birth, death }
    }

    pub fn infinite(birth: T) -> Self {
        Self { birth, death: T::infinity() }
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }

    pub fn lifetime(&self) -> T {
        self.death - self.birth
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode<T> {
    pub dim0: Vec<Interval<T>>,
    pub dim1: Vec<Interval<T>>,
}

impl<T: Scalar> Barcode<T> {
    pub fn dim(&self, dim: usize) -> &[Interval<T>] {
        match dim {
            0 => &self.dim0,
            1 => &self.dim1,
            _ => &[],
        }
    }

    /// Finite lifetimes of one dimension, longest first.
    pub fn lifetimes(&self, dim: usize) -> Vec<T> {
        let mut l: Vec<T> = self.dim(dim).iter().filter(|i| i.is_finite()).map(|i| i.lifetime()).collect();
        l.sort_by(|a, b| cmp_scalar(*b, *a));
        l
    }

    /// Sorts each dimension by `(birth, death)`.
    pub fn normalize_order(&mut self) {
        for bars in [&mut self.dim0, &mut self.dim1] {
            bars.sort_by(|a, b| cmp_scalar(a.birth, b.birth).then(cmp_scalar(a.death, b.death)));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxScale<T> {
    /// The largest pairwise distance; the complex is then the full simplex.
    Diameter,
    Value(T),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RipsParams<T> {
    /// 0 or 1.
    pub maxdim: usize,
    pub maxscale: MaxScale<T>,
    /// Refuse complexes with more edges than this under `maxscale`.
    pub edge_cap: usize,
    /// Keep `birth == death` intervals (normally discarded).
    pub keep_zero_length: bool,
}

impl<T: Scalar> Default for RipsParams<T> {
    fn default() -> Self {
        Self {
            maxdim: 1,
            maxscale: MaxScale::Diameter,
            edge_cap: 2_000_000,
            keep_zero_length: false,
        }
    }
}

impl<T: Scalar> RipsParams<T> {
    pub fn with_maxscale(mut self, scale: T) -> Self {
        self.maxscale = MaxScale::Value(scale);
        self
    }

    pub fn with_maxdim(mut self, maxdim: usize) -> Self {
        self.maxdim = maxdim;
        self
    }
}

pub fn rips_barcodes<T: Scalar>(
    cloud: &PointCloud<T>,
    mode: MetricMode,
    params: &RipsParams<T>,
) -> Result<Barcode<T>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    rips_barcodes_from_distances(&pairwise_distances(cloud, mode)?, params)
}

#[derive(Clone, Copy, Debug)]
struct Edge<T> {
    value: T,
    a: u32,
    b: u32,
}

impl<T: Scalar> Edge<T> {
    fn cmp_key(&self, other: &Self) -> Ordering {
        cmp_scalar(self.value, other.value)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

#[derive(Clone, Copy, Debug)]
struct Triangle<T> {
    value: T,
    verts: [u32; 3],
}

impl<T: Scalar> PartialEq for Triangle<T> {
    fn eq(&self, other: &Self) -> bool {
        self.verts == other.verts
    }
}

impl<T: Scalar> Eq for Triangle<T> {}

impl<T: Scalar> PartialOrd for Triangle<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Triangle<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(self.value, other.value).then(self.verts.cmp(&other.verts))
    }
}

struct Complex<'a, T> {
    dist: &'a DistanceMatrix<T>,
    scale: T,
}

impl<T: Scalar> Complex<'_, T> {
    fn edge(&self, a: u32, b: u32) -> Edge<T> {
        let (a, b) = (a.min(b), a.max(b));
        Edge { value: self.dist.get(a as usize, b as usize), a, b }
    }

    fn coboundary(&self, e: &Edge<T>, mut visit: impl FnMut(Triangle<T>)) {
        let (a, b) = (e.a as usize, e.b as usize);
        let (row_a, row_b) = (self.dist.row(a), self.dist.row(b));
        for k in 0..self.dist.len() {
            if k == a || k == b {
                continue;
            }
            let (da, db) = (row_a[k], row_b[k]);
            if da <= self.scale && db <= self.scale {
                let mut verts = [e.a, e.b, k as u32];
                verts.sort_unstable();
                visit(Triangle { value: e.value.max(da).max(db), verts });
            }
        }
    }

    /// The facet of `t` that enters the filtration last.
    fn last_facet(&self, t: &Triangle<T>) -> Edge<T> {
        let [x, y, z] = t.verts;
        [self.edge(x, y), self.edge(x, z), self.edge(y, z)]
            .into_iter()
            .max_by(|p, q| p.cmp_key(q))
            .expect("three facets")
    }
}

/// Pops the smallest entry with odd multiplicity.
fn pop_pivot<T: Scalar>(heap: &mut BinaryHeap<Reverse<Triangle<T>>>) -> Option<Triangle<T>> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek().is_some_and(|Reverse(next)| *next == top) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
    None
}

/// Barcodes of the Rips filtration of a precomputed distance matrix.
pub fn rips_barcodes_from_distances<T: Scalar>(
    dist: &DistanceMatrix<T>,
    params: &RipsParams<T>,
) -> Result<Barcode<T>> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    if params.maxdim > 1 {
        return Err(Error::InvalidParameter(format!(
            "maxdim = {} unsupported (0 or 1)",
            params.maxdim
        )));
    }
    let scale = match params.maxscale {
        MaxScale::Diameter => dist.diameter(),
        MaxScale::Value(v) if v > T::zero() => v,
        MaxScale::Value(v) => {
            return Err(Error::InvalidParameter(format!("maxscale = {v} must be positive")));
        }
    };
    let keep = |birth: T, death: T| params.keep_zero_length || death > birth;

    let edge_count = (0..n)
        .map(|a| dist.row(a)[a + 1..].iter().filter(|&&d| d <= scale).count())
        .sum::<usize>();
    if edge_count > params.edge_cap {
        return Err(Error::ComplexTooLarge { edges: edge_count, cap: params.edge_cap });
    }
    let mut edges = Vec::with_capacity(edge_count);
    for a in 0..n {
        for b in a + 1..n {
            let value = dist.get(a, b);
            if value <= scale {
                edges.push(Edge { value, a: a as u32, b: b as u32 });
            }
        }
    }
    edges.sort_by(|p, q| p.cmp_key(q));

    let mut barcode = Barcode::default();
    let mut components = UnionFind::new(n);
    let mut merging = vec![false; edges.len()];
    for (k, e) in edges.iter().enumerate() {
        if components.union(e.a as usize, e.b as usize) {
            merging[k] = true;
            if keep(T::zero(), e.value) {
                barcode.dim0.push(Interval::new(T::zero(), e.value));
            }
        }
    }
    for _ in 0..components.components() {
        barcode.dim0.push(Interval::infinite(T::zero()));
    }

    if params.maxdim >= 1 {
        barcode.dim1 = reduce_dim1(&Complex { dist, scale }, &edges, &merging, &keep);
    }
    barcode.normalize_order();
    Ok(barcode)
}

fn reduce_dim1<T: Scalar>(
    complex: &Complex<'_, T>,
    edges: &[Edge<T>],
    merging: &[bool],
    keep: &impl Fn(T, T) -> bool,
) -> Vec<Interval<T>> {
    let mut bars = Vec::new();
    let mut pivot_owner: HashMap<[u32; 3], usize> = HashMap::new();
    let mut columns: Vec<Vec<u32>> = Vec::new();
    let mut heap = BinaryHeap::new();

    for (k, e) in edges.iter().enumerate().rev() {
        if merging[k] {
            continue;
        }

        let mut first: Option<Triangle<T>> = None;
        complex.coboundary(e, |t| {
            if first.is_none_or(|f| t < f) {
                first = Some(t);
            }
        });
        if let Some(t) = first {
            if t.value == e.value && complex.last_facet(&t).cmp_key(e) == Ordering::Equal {
                pivot_owner.insert(t.verts, columns.len());
                columns.push(vec![k as u32]);
                if keep(e.value, t.value) {
                    bars.push(Interval::new(e.value, t.value));
                }
                continue;
            }
        }

        heap.clear();
        complex.coboundary(e, |t| heap.push(Reverse(t)));
        let mut summed = vec![k as u32];
        loop {
            match pop_pivot(&mut heap) {
                None => {
                    bars.push(Interval::infinite(e.value));
                    break;
                }
                Some(t) => match pivot_owner.get(&t.verts) {
                    Some(&owner) => {
                        heap.push(Reverse(t));
                        for &f in &columns[owner] {
                            complex.coboundary(&edges[f as usize], |s| heap.push(Reverse(s)));
                        }
                        summed.extend_from_slice(&columns[owner]);
                    }
                    None => {
                        pivot_owner.insert(t.verts, columns.len());
                        columns.push(cancel_pairs(summed));
                        if keep(e.value, t.value) {
                            bars.push(Interval::new(e.value, t.value));
                        }
                        break;
                    }
                },
            }
        }
    }
    bars
}

/// Sorts and removes entries occurring an even number of times.
fn cancel_pairs(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Longest finite lifetime in dimension `dim`; zero when there is none.
/// Infinite intervals are excluded.
pub fn max_lifetime<T: Scalar>(barcode: &Barcode<T>, dim: usize) -> T {
    barcode
        .dim(dim)
        .iter()
        .filter(|i| i.is_finite())
        .map(|i| i.lifetime())
        .fold(T::zero(), |acc, l| acc.max(l))
}
