//! Idealized 3×3 filter banks and the patch-response feature transform.
//!
//! Filters are sampled on the grid `(x, y) ∈ {-1, 0, 1}²`, stored row-major
//! with `y = row - 1` and `x = column - 1`, then mean-centered and scaled to
//! unit norm.
//!
//! * primary circle: `F = cos θ·x + sin θ·y`, rotating linear edges;
//! * Klein bottle: `F = cos φ·u + sin φ·(2u² - 1)` with `u = cos θ·x + sin θ·y`,
//!   mixing the edge with a line of the same orientation. `(θ + π, φ)` and
//!   `(θ, π - φ)` give the same filter, so θ only spans a half turn;
//! * Gaussian: i.i.d. standard normal entries from `ChaCha8Rng`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pointcloud::{normalize_in_place, PointCloud, WeightTensor};
use crate::scalar::Scalar;

pub type Filter<T> = [T; 9];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BankKind {
    PrimaryCircle,
    KleinBottle,
    Gaussian,
    /// Read from a weight file; no generation invariants are assumed.
    External,
}

impl std::str::FromStr for BankKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary_circle" => Ok(BankKind::PrimaryCircle),
            "klein_bottle" => Ok(BankKind::KleinBottle),
            "gaussian" => Ok(BankKind::Gaussian),
            other => Err(Error::InvalidParameter(format!("unknown filter bank kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BankParams {
    pub n: usize,
    pub seed: Option<u64>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    /// Grid filters dropped as duplicates of earlier ones.
    pub duplicates_removed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank<T> {
    pub kind: BankKind,
    pub filters: Vec<Filter<T>>,
    pub params: BankParams,
}

impl<T: Scalar> FilterBank<T> {
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn to_point_cloud(&self) -> PointCloud<T> {
        PointCloud::from_flat(9, self.filters.iter().flatten().copied().collect())
            .expect("filters are 9-dimensional")
    }

    /// As a `3 × 3 × 1 × n` weight tensor.
    pub fn to_weight_tensor(&self) -> Result<WeightTensor<T>> {
        WeightTensor::new(3, 3, 1, self.len(), self.filters.iter().flatten().copied().collect())
    }

    /// Every `3 × 3` slice of the tensor, map-major then channel.
    pub fn from_weight_tensor(tensor: &WeightTensor<T>) -> Result<Self> {
        if tensor.w != 3 || tensor.h != 3 {
            return Err(Error::ShapeError(format!(
                "filter banks are 3x3, tensor is {}x{}",
                tensor.w, tensor.h
            )));
        }
        let filters: Vec<Filter<T>> = tensor
            .values()
            .chunks_exact(9)
            .map(|c| c.try_into().expect("chunk of nine"))
            .collect();
        Ok(Self {
            kind: BankKind::External,
            params: BankParams { n: filters.len(), ..BankParams::default() },
            filters,
        })
    }
}

fn sample_grid<T: Scalar>(f: impl Fn(f64, f64) -> f64) -> Filter<T> {
    let mut out = [0.0f64; 9];
    for row in 0..3 {
        for col in 0..3 {
            out[row * 3 + col] = f(col as f64 - 1.0, row as f64 - 1.0);
        }
    }
    let ok = normalize_in_place(&mut out);
    debug_assert!(ok, "idealized filters are never constant");
    out.map(T::of)
}

pub(crate) fn primary_filter<T: Scalar>(theta: f64) -> Filter<T> {
    let (s, c) = theta.sin_cos();
    sample_grid(|x, y| c * x + s * y)
}

pub(crate) fn klein_filter<T: Scalar>(theta: f64, phi: f64) -> Filter<T> {
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    sample_grid(|x, y| {
        let u = c * x + s * y;
        cp * u + sp * (2.0 * u * u - 1.0)
    })
}

/// `n` edge filters at angles `θᵢ = 2πi/n`.
pub fn primary_circle_bank<T: Scalar>(n: usize) -> Result<FilterBank<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("filter bank needs n ≥ 1".into()));
    }
    Ok(FilterBank {
        kind: BankKind::PrimaryCircle,
        filters: (0..n).map(|i| primary_filter(2.0 * PI * i as f64 / n as f64)).collect(),
        params: BankParams { n, ..BankParams::default() },
    })
}

/// Klein-bottle filters on the grid `θᵢ = πi/n_theta`, `φⱼ = 2πj/n_phi`
/// (θ outer), dropping filters within `1e-9` of an earlier one.
pub fn klein_bottle_bank<T: Scalar>(n_theta: usize, n_phi: usize) -> Result<FilterBank<T>> {
    let grid: Vec<(f64, f64)> = (0..n_theta)
        .flat_map(|i| {
            (0..n_phi).map(move |j| (PI * i as f64 / n_theta as f64, 2.0 * PI * j as f64 / n_phi as f64))
        })
        .collect();
    klein_bank_from_angles(&grid, n_theta, n_phi)
}

/// Klein-bottle filters at explicit `(θ, φ)` pairs, deduplicated.
pub fn klein_bank_from_angles<T: Scalar>(
    angles: &[(f64, f64)],
    n_theta: usize,
    n_phi: usize,
) -> Result<FilterBank<T>> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter("filter bank needs at least one filter".into()));
    }
    let mut kept: Vec<Filter<f64>> = Vec::with_capacity(angles.len());
    for &(theta, phi) in angles {
        let f = klein_filter::<f64>(theta, phi);
        let duplicate = kept.iter().any(|g| {
            f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < 1e-9
        });
        if !duplicate {
            kept.push(f);
        }
    }
    Ok(FilterBank {
        kind: BankKind::KleinBottle,
        params: BankParams {
            n: kept.len(),
            seed: None,
            n_theta: Some(n_theta),
            n_phi: Some(n_phi),
            duplicates_removed: angles.len() - kept.len(),
        },
        filters: kept.into_iter().map(|f| f.map(T::of)).collect(),
    })
}

/// The primary circle plus the two secondary circles through the horizontal
/// and vertical edges: `φ ∈ {0, π}` for every grid `θ`, and every grid `φ`
/// at `θ ∈ {0, π/2}`. `n_theta` must be even so that `π/2` is on the grid.
pub fn three_circle_bank<T: Scalar>(n_theta: usize, n_phi: usize) -> Result<FilterBank<T>> {
    if !n_theta.is_multiple_of(2) || !n_phi.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "three-circle subset needs even n_theta and n_phi".into(),
        ));
    }
    let mut angles = Vec::new();
    for i in 0..n_theta {
        let theta = PI * i as f64 / n_theta as f64;
        angles.push((theta, 0.0));
        angles.push((theta, PI));
    }
    for theta in [0.0, PI / 2.0] {
        for j in 0..n_phi {
            angles.push((theta, 2.0 * PI * j as f64 / n_phi as f64));
        }
    }
    klein_bank_from_angles(&angles, n_theta, n_phi)
}

pub fn gaussian_bank<T: Scalar>(n: usize, seed: u64) -> Result<FilterBank<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("filter bank needs n ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut filters = Vec::with_capacity(n);
    while filters.len() < n {
        let mut f = [0.0f64; 9];
        f.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
        if normalize_in_place(&mut f) {
            filters.push(f.map(T::of));
        }
    }
    Ok(FilterBank {
        kind: BankKind::Gaussian,
        filters,
        params: BankParams { n, seed: Some(seed), ..BankParams::default() },
    })
}

/// `height × width × channels` image, row-major with channels innermost.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageTensor<T> {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    values: Vec<T>,
}

impl<T: Scalar> ImageTensor<T> {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::ShapeError(format!(
                "image extents must be positive, got {height}x{width}x{channels}"
            )));
        }
        if values.len() != height * width * channels {
            return Err(Error::ShapeError(format!(
                "expected {} values for {height}x{width}x{channels}, got {}",
                height * width * channels,
                values.len()
            )));
        }
        Ok(Self { height, width, channels, values })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self> {
        Self::new(height, width, channels, vec![T::zero(); height * width * channels])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> T {
        self.values[(row * self.width + col) * self.channels + channel]
    }

    pub fn set(&mut self, row: usize, col: usize, channel: usize, value: T) {
        self.values[(row * self.width + col) * self.channels + channel] = value;
    }
}

/// Appends one channel per filter: the inner product of the filter with the
/// zero-padded 3×3 patch centered on each pixel. Channel 0 is the input.
pub fn append_filter_features<T: Scalar>(
    image: &ImageTensor<T>,
    bank: &FilterBank<T>,
) -> Result<ImageTensor<T>> {
    if image.channels != 1 {
        return Err(Error::ChannelMismatch { expected: 1, found: image.channels });
    }
    let (h, w) = (image.height, image.width);
    let out_channels = 1 + bank.len();
    let mut values = Vec::with_capacity(h * w * out_channels);
    let mut patch = [T::zero(); 9];
    for r in 0..h {
        for c in 0..w {
            for (k, slot) in patch.iter_mut().enumerate() {
                let (pr, pc) = ((r + k / 3).checked_sub(1), (c + k % 3).checked_sub(1));
                *slot = match (pr, pc) {
                    (Some(pr), Some(pc)) if pr < h && pc < w => image.get(pr, pc, 0),
                    _ => T::zero(),
                };
            }
            values.push(image.get(r, c, 0));
            values.extend(
                bank.filters
                    .iter()
                    .map(|f| f.iter().zip(&patch).map(|(&a, &b)| a * b).sum::<T>()),
            );
        }
    }
    ImageTensor::new(h, w, out_channels, values)
}
