use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use filtertop::export::ExportFormat;
use filtertop::filterbank::{append_filter_features, BankKind, FilterBank};
use filtertop::io::{decode_img1, decode_wts1, encode_img1, encode_wts1, format_csv, load_point_cloud, write_atomic, InputFormat};
use filtertop::pipeline::{run_pipeline, Analysis, PipelineConfig};
use filtertop::{
    gaussian_bank, klein_bottle_bank, klein_grid, primary_circle_bank, sample, FiltrationParams, MapperParams, MaxScale,
    MetricMode, RipsParams, Shape, ShapeSpec,
};

#[derive(Parser)]
#[command(name = "filtertop", version, about = "Topology of convolutional filter spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic point cloud to CSV.
    Synth {
        #[arg(long, default_value = "circle2d")]
        shape: Shape,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "cloud.csv")]
        out: PathBuf,
    },
    /// Slice a WTS1 weight dump into 9-dimensional spatial filters.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "filters.csv")]
        out: PathBuf,
    },
    /// Run density filtration, Mapper and Rips persistence.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// wts1, csv or img1; guessed from the extension when omitted.
        #[arg(long)]
        format: Option<InputFormat>,
        /// Skip per-point mean-centering and normalization.
        #[arg(long)]
        no_normalize: bool,
        #[arg(long, default_value = "vne_variance")]
        metric: MetricMode,
        #[arg(long, default_value = "euclidean")]
        rips_metric: MetricMode,
        #[arg(long, requires = "p")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        p: Option<f64>,
        #[arg(long, default_value = "both")]
        mode: Analysis,
        #[arg(long, default_value_t = 30)]
        resolution: usize,
        #[arg(long, default_value_t = 3.0)]
        gain: f64,
        #[arg(long, default_value_t = 2)]
        lens_dims: usize,
        /// A positive number or `diameter`.
        #[arg(long, default_value = "diameter")]
        maxscale: String,
        #[arg(long, default_value_t = 1)]
        maxdim: usize,
        #[arg(long, default_value_t = 2_000_000)]
        edge_cap: usize,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        #[arg(long, default_value = "json,dot,svg", value_delimiter = ',')]
        formats: Vec<ExportFormat>,
        /// Fit the PCA lens before density filtration.
        #[arg(long)]
        lens_before_filtration: bool,
    },
    /// Generate an idealized or random 3×3 filter bank as WTS1.
    Filterbank {
        #[arg(long, default_value = "primary_circle")]
        kind: BankKind,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Klein grid size; defaults derive from `n`.
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
        #[arg(long, default_value = "bank.wts1")]
        out: PathBuf,
    },
    /// Append filter-response channels to a single-channel IMG1 image.
    Preprocess {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long, default_value = "augmented.img1")]
        out: PathBuf,
    },
}

fn parse_maxscale(s: &str) -> Result<MaxScale<f64>> {
    if s == "diameter" {
        return Ok(MaxScale::Diameter);
    }
    let v: f64 = s.parse().with_context(|| format!("invalid --maxscale {s:?}"))?;
    if !(v > 0.0 && v.is_finite()) {
        bail!("--maxscale must be positive, got {v}");
    }
    Ok(MaxScale::Value(v))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { shape, n, noise, seed, out } => {
            let cloud = sample::<f64>(&ShapeSpec::new(shape, n).noise(noise).seed(seed));
            write_atomic(&out, format_csv(&cloud).as_bytes())?;
            info!("wrote {} points to {}", cloud.len(), out.display());
        }
        Command::Extract { input, out } => {
            let cloud = load_point_cloud(&input, InputFormat::Wts1).with_context(|| format!("reading {}", input.display()))?;
            write_atomic(&out, format_csv(&cloud).as_bytes())?;
            info!("extracted {} filters to {}", cloud.len(), out.display());
        }
        Command::Analyze {
            input,
            format,
            no_normalize,
            metric,
            rips_metric,
            k,
            p,
            mode,
            resolution,
            gain,
            lens_dims,
            maxscale,
            maxdim,
            edge_cap,
            out_dir,
            formats,
            lens_before_filtration,
        } => {
            let mut config = PipelineConfig::new(&input, out_dir);
            if let Some(format) = format {
                config.format = format;
            } else if InputFormat::from_path(&input).is_none() {
                bail!("cannot guess the format of {}; pass --format", input.display());
            }
            config.normalize = !no_normalize;
            config.metric = metric;
            config.rips_metric = rips_metric;
            if let (Some(k), Some(p)) = (k, p) {
                config.filtration = Some(FiltrationParams::new(k, p)?);
            }
            config.analysis = mode;
            config.mapper = MapperParams::new(resolution, gain).with_metric(metric).with_lens_dims(lens_dims);
            config.mapper.validate()?;
            config.rips = RipsParams { maxdim, maxscale: parse_maxscale(&maxscale)?, edge_cap, ..RipsParams::default() };
            config.formats = formats;
            config.lens_before_filtration = lens_before_filtration;
            let summary = run_pipeline(&config)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Filterbank { kind, n, seed, n_theta, n_phi, out } => {
            let bank: FilterBank<f64> = match kind {
                BankKind::PrimaryCircle => primary_circle_bank(n)?,
                BankKind::KleinBottle => {
                    let (t, f) = klein_grid(n);
                    klein_bottle_bank(n_theta.unwrap_or(t), n_phi.unwrap_or(f))?
                }
                BankKind::Gaussian => gaussian_bank(n, seed)?,
                BankKind::External => bail!("external banks are read, not generated"),
            };
            write_atomic(&out, &encode_wts1(&bank.to_weight_tensor()?))?;
            info!("wrote {} filters to {}", bank.len(), out.display());
        }
        Command::Preprocess { image, bank, out } => {
            let img = decode_img1(&fs::read(&image).with_context(|| format!("reading {}", image.display()))?)?;
            let tensor = decode_wts1(&fs::read(&bank).with_context(|| format!("reading {}", bank.display()))?)?;
            let bank = FilterBank::from_weight_tensor(&tensor)?;
            let augmented = append_filter_features(&img, &bank)?;
            write_atomic(&out, &encode_img1(&augmented))?;
            info!("wrote {}×{}×{} image to {}", augmented.height, augmented.width, augmented.channels, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
