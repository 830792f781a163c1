//! Synthetic point clouds with known topology.
//!
//! With `noise = 0` the circle and filter-space shapes are evaluated on evenly
//! spaced parameter grids, so samples lie exactly on the ideal shape. Noise is
//! isotropic Gaussian with standard deviation `noise`, drawn from
//! `ChaCha8Rng::seed_from_u64(seed)`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::filterbank::{klein_filter, primary_filter};
use crate::pointcloud::PointCloud;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// Unit circle in the plane.
    Circle2d,
    /// Unit circles centered at `(±0.5, 0)`; they meet at `(0, ±√3/2)`.
    TwoCircles2d,
    /// The primary-circle filters, 9-dimensional.
    PrimaryCircle9d,
    /// The Klein-bottle filters on a `θ × φ` grid, 9-dimensional.
    Klein9d,
    /// Isotropic Gaussian blob; always random (seeded).
    GaussianBlob { dim: usize, sigma: f64 },
}

impl std::str::FromStr for Shape {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Ok(match s {
            "circle2d" => Shape::Circle2d,
            "two_circles2d" => Shape::TwoCircles2d,
            "primary_circle9d" => Shape::PrimaryCircle9d,
            "klein9d" => Shape::Klein9d,
            other => {
                // gaussian_blob or gaussian_blob:<dim>:<sigma>
                let mut parts = other.split(':');
                if parts.next() != Some("gaussian_blob") {
                    return Err(crate::Error::InvalidParameter(format!("unknown shape {other:?}")));
                }
                let bad = || crate::Error::InvalidParameter(format!("bad blob spec {other:?}"));
                let dim = parts.next().map(|d| d.parse().map_err(|_| bad())).transpose()?.unwrap_or(2);
                let sigma = parts.next().map(|s| s.parse().map_err(|_| bad())).transpose()?.unwrap_or(1.0);
                Shape::GaussianBlob { dim, sigma }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeSpec {
    pub shape: Shape,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn new(shape: Shape, n: usize) -> Self {
        Self { shape, n, noise: 0.0, seed: 0 }
    }

    pub fn noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `(n_theta, n_phi)` grid with at least `n` cells, about twice as many `φ`
/// steps as `θ` steps (θ spans a half turn, φ a full turn).
pub fn klein_grid(n: usize) -> (usize, usize) {
    let n_theta = ((n as f64 / 2.0).sqrt().round() as usize).max(1);
    (n_theta, n.div_ceil(n_theta).max(1))
}

pub fn sample<T: Scalar>(spec: &ShapeSpec) -> PointCloud<T> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows: Vec<Vec<f64>> = match spec.shape {
        Shape::Circle2d => (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        Shape::TwoCircles2d => {
            let left = n.div_ceil(2);
            let right = n - left;
            (0..left)
                .map(|i| (-0.5, i, left))
                .chain((0..right).map(|i| (0.5, i, right)))
                .map(|(cx, i, m)| {
                    let t = 2.0 * PI * i as f64 / m as f64;
                    vec![cx + t.cos(), t.sin()]
                })
                .collect()
        }
        Shape::PrimaryCircle9d => (0..n)
            .map(|i| primary_filter::<f64>(2.0 * PI * i as f64 / n as f64).to_vec())
            .collect(),
        Shape::Klein9d => {
            let (n_theta, n_phi) = klein_grid(n);
            (0..n)
                .map(|k| {
                    let theta = PI * (k / n_phi) as f64 / n_theta as f64;
                    let phi = 2.0 * PI * (k % n_phi) as f64 / n_phi as f64;
                    klein_filter::<f64>(theta, phi).to_vec()
                })
                .collect()
        }
        Shape::GaussianBlob { dim, sigma } => {
            let normal = Normal::new(0.0, sigma).expect("sigma is finite and nonnegative");
            (0..n).map(|_| (0..dim).map(|_| normal.sample(&mut rng)).collect()).collect()
        }
    };

    let dim = match spec.shape {
        Shape::GaussianBlob { dim, .. } => dim,
        Shape::Circle2d | Shape::TwoCircles2d => 2,
        _ => 9,
    };
    let mut data = Vec::with_capacity(n * dim);
    for row in rows {
        for x in row {
            let jitter = if spec.noise > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                spec.noise * z
            } else {
                0.0
            };
            data.push(T::of(x + jitter));
        }
    }
    PointCloud::from_flat(dim.max(1), data).expect("rows have the shape dimension")
}
