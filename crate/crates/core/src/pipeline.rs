//! End-to-end analysis: load, normalize, filter, then Mapper and/or Rips
//! persistence, writing every artifact into one output directory.

use std::fmt;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;

use crate::density::{density_filtration_indices, FiltrationParams};
use crate::error::Error;
use crate::export::{export_barcode, export_graph, ExportFormat};
use crate::io::{format_csv, load_point_cloud, write_atomic, InputFormat};
use crate::mapper::{cycle_rank, loop_rank, mapper_graph, mapper_graph_with_lens, pca_lens, MapperParams};
use crate::persistence::{max_lifetime, rips_barcodes, RipsParams};
use crate::pointcloud::{center_normalize_lossy, MetricMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Analysis {
    Mapper,
    Persistence,
    Both,
}

impl std::str::FromStr for Analysis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "mapper" => Ok(Analysis::Mapper),
            "persistence" => Ok(Analysis::Persistence),
            "both" => Ok(Analysis::Both),
            other => Err(Error::InvalidParameter(format!("unknown analysis {other:?}"))),
        }
    }
}

impl Analysis {
    fn mapper(self) -> bool {
        matches!(self, Analysis::Mapper | Analysis::Both)
    }

    fn persistence(self) -> bool {
        matches!(self, Analysis::Persistence | Analysis::Both)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    /// Mean-center and unit-normalize every point, dropping constant ones.
    pub normalize: bool,
    /// Metric for the density filtration and Mapper clustering.
    pub metric: MetricMode,
    /// Metric for the Rips filtration.
    pub rips_metric: MetricMode,
    pub filtration: Option<FiltrationParams<f64>>,
    pub analysis: Analysis,
    pub mapper: MapperParams<f64>,
    pub rips: RipsParams<f64>,
    pub out_dir: PathBuf,
    pub formats: Vec<ExportFormat>,
    /// Fit the PCA lens on the unfiltered cloud instead of the filtered one.
    pub lens_before_filtration: bool,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        let input = input.into();
        Self {
            format: InputFormat::from_path(&input).unwrap_or(InputFormat::Csv),
            input,
            normalize: true,
            metric: MetricMode::VneVariance,
            rips_metric: MetricMode::Euclidean,
            filtration: None,
            analysis: Analysis::Both,
            mapper: MapperParams::default(),
            rips: RipsParams::default(),
            out_dir: out_dir.into(),
            formats: vec![ExportFormat::Json, ExportFormat::Dot, ExportFormat::Svg],
            lens_before_filtration: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Load,
    Normalize,
    Filtration,
    Mapper,
    Persistence,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Normalize => "normalize",
            Stage::Filtration => "filtration",
            Stage::Mapper => "mapper",
            Stage::Persistence => "persistence",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait StageContext<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T> StageContext<T> for Result<T, Error> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapperSummary {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub cycle_rank: usize,
    pub loop_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceSummary {
    pub dim0_intervals: usize,
    pub dim0_infinite: usize,
    pub dim1_intervals: usize,
    pub max_lifetime_dim1: f64,
    /// Second longest finite dimension-1 lifetime, 0 if absent.
    pub second_lifetime_dim1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub input_points: usize,
    pub dropped_constant: usize,
    pub normalized_points: usize,
    pub filtered_points: usize,
    pub mapper: Option<MapperSummary>,
    pub persistence: Option<PersistenceSummary>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

fn write(dir: &Path, name: String, bytes: &[u8], outputs: &mut Vec<String>) -> Result<(), PipelineError> {
    write_atomic(&dir.join(&name), bytes).stage(Stage::Export)?;
    outputs.push(name);
    Ok(())
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<Summary, PipelineError> {
    let raw = load_point_cloud(&config.input, config.format).stage(Stage::Load)?;
    let input_points = raw.len();

    let (cloud, dropped) = if config.normalize {
        center_normalize_lossy(&raw)
    } else {
        (raw, Vec::new())
    };
    if !dropped.is_empty() {
        warn!("dropped {} constant point(s)", dropped.len());
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud).stage(Stage::Normalize);
    }
    let normalized_points = cloud.len();

    let kept = match &config.filtration {
        Some(params) => Some(density_filtration_indices(&cloud, *params, config.metric).stage(Stage::Filtration)?),
        None => None,
    };
    let filtered = kept.as_ref().map_or_else(|| cloud.clone(), |k| cloud.select(k));
    info!("points: {input_points} loaded, {normalized_points} normalized, {} retained", filtered.len());

    std::fs::create_dir_all(&config.out_dir).map_err(Error::from).stage(Stage::Export)?;
    let mut outputs = Vec::new();

    let mapper = if config.analysis.mapper() {
        let graph = match (&kept, config.lens_before_filtration) {
            (Some(kept), true) => {
                let lens = pca_lens(&cloud, config.mapper.lens_dims).stage(Stage::Mapper)?;
                mapper_graph_with_lens(&filtered, &lens.select(kept), &config.mapper)
            }
            _ => mapper_graph(&filtered, &config.mapper),
        }
        .stage(Stage::Mapper)?;
        for &format in config.formats.iter().filter(|f| **f != ExportFormat::Csv) {
            let bytes = export_graph(&graph, format).stage(Stage::Export)?;
            write(&config.out_dir, format!("graph.{}", format.extension()), &bytes, &mut outputs)?;
        }
        Some(MapperSummary {
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            components: graph.component_count(),
            cycle_rank: cycle_rank(&graph),
            loop_rank: loop_rank(&graph),
        })
    } else {
        None
    };

    let persistence = if config.analysis.persistence() {
        let barcode = rips_barcodes(&filtered, config.rips_metric, &config.rips).stage(Stage::Persistence)?;
        for &format in config.formats.iter().filter(|f| **f != ExportFormat::Dot) {
            let bytes = export_barcode(&barcode, format).stage(Stage::Export)?;
            write(&config.out_dir, format!("barcode.{}", format.extension()), &bytes, &mut outputs)?;
        }
        let lifetimes = barcode.lifetimes(1);
        Some(PersistenceSummary {
            dim0_intervals: barcode.dim0.len(),
            dim0_infinite: barcode.dim0.iter().filter(|i| !i.is_finite()).count(),
            dim1_intervals: barcode.dim1.len(),
            max_lifetime_dim1: max_lifetime(&barcode, 1),
            second_lifetime_dim1: lifetimes.get(1).copied().unwrap_or(0.0),
        })
    } else {
        None
    };

    if config.formats.contains(&ExportFormat::Csv) {
        write(&config.out_dir, "points.csv".into(), format_csv(&filtered).as_bytes(), &mut outputs)?;
    }

    let mut summary = Summary {
        input_points,
        dropped_constant: dropped.len(),
        normalized_points,
        filtered_points: filtered.len(),
        mapper,
        persistence,
        outputs,
    };
    summary.outputs.push("summary.json".into());
    let json = serde_json::to_vec_pretty(&summary).map_err(Error::from).stage(Stage::Export)?;
    write_atomic(&config.out_dir.join("summary.json"), &json).stage(Stage::Export)?;
    Ok(summary)
}
