//! Topological analysis of spaces of convolutional spatial filters.
//!
//! The pipeline treats every `w × h` slice of a convolutional weight tensor as
//! a point, mean-centers and normalizes it, optionally keeps only the densest
//! fraction of points, and then summarizes the shape of the cloud two ways:
//!
//! * a Mapper graph ([`mapper`]): PCA lens, overlapping interval cover,
//!   per-bin single-linkage clustering, shared-point edges;
//! * Vietoris–Rips barcodes in dimensions 0 and 1 ([`persistence`]), with the
//!   longest finite 1-dimensional lifetime as a scalar summary.
//!
//! [`filterbank`] generates idealized 3×3 filter banks (primary circle, Klein
//! bottle, Gaussian) and appends their patch responses to images as extra
//! channels. [`synth`] produces ground-truth point clouds with known topology.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the file formats and the CLI use.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod export;
pub mod filterbank;
pub mod io;
mod linalg;
pub mod mapper;
pub mod persistence;
pub mod pipeline;
pub mod pointcloud;
pub mod scalar;
pub mod synth;
mod unionfind;

pub use density::{density_filtration, density_filtration_indices, knn_distance, FiltrationParams};
pub use error::{Error, Result};
pub use filterbank::{
    append_filter_features, gaussian_bank, klein_bottle_bank, primary_circle_bank, three_circle_bank, BankKind,
    FilterBank, ImageTensor,
};
pub use mapper::{
    build_cover, cycle_rank, loop_rank, mapper_graph, mapper_graph_with_lens, pca_lens, single_linkage_clusters, Cover,
    Lens, MapperGraph, MapperNode, MapperParams,
};
pub use persistence::{max_lifetime, rips_barcodes, Barcode, Interval, MaxScale, RipsParams};
pub use pointcloud::{
    center_normalize, center_normalize_lossy, extract_spatial_filters, pairwise_distances,
    DistanceMatrix, Metric, MetricMode, PointCloud, WeightTensor,
};
pub use scalar::Scalar;
pub use synth::{klein_grid, sample, Shape, ShapeSpec};

pub type PointCloud64 = PointCloud<f64>;
pub type PointCloud32 = PointCloud<f32>;
pub type WeightTensor32 = WeightTensor<f32>;
pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type MapperGraph64 = MapperGraph<f64>;
pub type MapperParams64 = MapperParams<f64>;
pub type Barcode64 = Barcode<f64>;
pub type RipsParams64 = RipsParams<f64>;
pub type FilterBank64 = FilterBank<f64>;
pub type ImageTensor64 = ImageTensor<f64>;
pub type FiltrationParams64 = FiltrationParams<f64>;
