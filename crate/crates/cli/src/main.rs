//! `hermite-qrs`: synthesize ECG records, extract Hermite-domain QRS features,
//! train and apply the SVM, score predictions and emit plot data.

mod commands;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hermite_qrs::pipeline::{DetectorConfig, Interpolation, PeakSource, PipelineConfig};
use hermite_qrs::svm::{KernelSpec, SolverConfig};

#[derive(Debug, Parser)]
#[command(
    name = "hermite-qrs",
    version,
    about = "Hermite-transform QRS features and SVM beat classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labelled synthetic ECG record.
    Synth(SynthArgs),
    /// Locate R peaks in a signal.
    Detect(DetectArgs),
    /// Extract per-beat Hermite coefficients.
    Transform(TransformArgs),
    /// Train an SVM on labelled features.
    Train(TrainArgs),
    /// Classify beats with a trained model.
    Predict(PredictArgs),
    /// Confusion matrix, accuracy, TPR and FPR.
    Evaluate(EvaluateArgs),
    /// Scatter plot of two coefficients with the decision boundary.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Signal CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Annotation CSV to write [default: <out>.annotations.csv].
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Beats per class.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Signal-to-noise ratio in dB; `inf` disables noise.
    #[arg(long, default_value_t = 15.0)]
    pub snr: f64,
    #[arg(long, default_value_t = 360.0)]
    pub sample_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Where the signal comes from and how to read it.
#[derive(Debug, Args, Clone)]
pub struct SignalArgs {
    /// Signal CSV (`# sample_rate=` header, one value per line or `time,value`).
    #[arg(long)]
    pub signal: PathBuf,
    /// Annotation CSV (`index,label`).
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Sampling rate in Hz, overriding the file header.
    #[arg(long)]
    pub sample_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InterpolationArg {
    Cubic,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PeaksArg {
    /// Run the R-peak detector.
    Detect,
    /// Use the annotation indices as beat positions.
    Annotations,
}

#[derive(Debug, Args, Clone)]
pub struct PipelineArgs {
    /// Hermite order M (number of coefficients per beat).
    #[arg(long, default_value_t = 15)]
    pub order: usize,
    /// Beat window length in milliseconds.
    #[arg(long, default_value_t = 140.0)]
    pub window_ms: f64,
    /// Node scale in seconds [default: outermost node at 95% of the half window].
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, value_enum, default_value_t = InterpolationArg::Cubic)]
    pub interpolation: InterpolationArg,
    /// Largest peak-to-annotation distance for a beat to take a label.
    #[arg(long, default_value_t = 75.0)]
    pub label_tolerance_ms: f64,
    #[arg(long, value_enum, default_value_t = PeaksArg::Detect)]
    pub peaks: PeaksArg,
    /// Detector refractory period.
    #[arg(long, default_value_t = 250.0)]
    pub refractory_ms: f64,
    /// Detector threshold as a fraction of the local envelope.
    #[arg(long, default_value_t = 0.3)]
    pub threshold: f64,
}

impl PipelineArgs {
    pub fn config(&self) -> PipelineConfig {
        PipelineConfig {
            order: self.order,
            window_ms: self.window_ms,
            scale: self.scale,
            detector: DetectorConfig {
                refractory_ms: self.refractory_ms,
                threshold_fraction: self.threshold,
                ..DetectorConfig::default()
            },
            interpolation: match self.interpolation {
                InterpolationArg::Cubic => Interpolation::Cubic,
                InterpolationArg::Linear => Interpolation::Linear,
            },
            label_tolerance_ms: self.label_tolerance_ms,
            peaks: match self.peaks {
                PeaksArg::Detect => PeakSource::Detect,
                PeaksArg::Annotations => PeakSource::Annotations,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Linear,
    Polynomial,
    Rbf,
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = KernelArg::Rbf)]
    pub kernel: KernelArg,
    /// RBF width [default: 1 / feature dimension].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial degree.
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// Polynomial offset.
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
    /// Box constraint P.
    #[arg(long, default_value_t = 10.0)]
    pub regularization: f64,
    /// KKT tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_passes: usize,
    /// Seed for working-pair tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train on raw features instead of standardized ones.
    #[arg(long)]
    pub no_standardize: bool,
}

impl SolverArgs {
    pub fn kernel(&self, dimension: usize) -> KernelSpec {
        match self.kernel {
            KernelArg::Linear => KernelSpec::Linear,
            KernelArg::Polynomial => KernelSpec::Polynomial {
                degree: self.degree,
                offset: self.offset,
            },
            KernelArg::Rbf => KernelSpec::Rbf {
                gamma: self.gamma.unwrap_or(1.0 / dimension.max(1) as f64),
            },
        }
    }

    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            regularization: self.regularization,
            tolerance: self.tolerance,
            max_passes: self.max_passes,
            seed: self.seed,
            standardize: !self.no_standardize,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: SignalArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Peak CSV to write (`index` column).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: SignalArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Feature CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-beat reconstruction error report [default: <out>.errors.csv].
    #[arg(long)]
    pub errors: Option<PathBuf>,
    /// Per-class coefficient summary [default: <out>.summary.csv].
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// Labelled features, given directly or extracted from a record.
#[derive(Debug, Args, Clone)]
pub struct FeatureSource {
    /// Feature CSV (`r_index,label,C0,...`).
    #[arg(long, conflicts_with = "signal")]
    pub features: Option<PathBuf>,
    /// Signal CSV to extract features from.
    #[arg(long, requires = "annotations")]
    pub signal: Option<PathBuf>,
    /// Annotation CSV supplying labels for `--signal`.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub sample_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: FeatureSource,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Model file to write.
    #[arg(long)]
    pub model: PathBuf,
    /// Training report CSV [default: <model>.report.csv].
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature CSV to classify.
    #[arg(long)]
    pub features: PathBuf,
    /// Prediction CSV to write (`r_index,truth,predicted,decision`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model to score; requires `--features`.
    #[arg(long, requires = "features", conflicts_with = "predictions")]
    pub model: Option<PathBuf>,
    /// Labelled feature CSV.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Prediction CSV with `truth` and `predicted` columns, scored as is.
    #[arg(long, required_unless_present = "model")]
    pub predictions: Option<PathBuf>,
    /// Metrics CSV to write (`key,value`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Directory for plot.svg, points.csv, grid.csv and boundary.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Coefficient indices for the horizontal and vertical axes [default: 0,1; 0,0 for 1-D models].
    #[arg(long, value_delimiter = ',')]
    pub axes: Option<Vec<usize>>,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let message = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error[{}]: {message}", error::Category::Usage);
            return error::Category::Usage.exit_code();
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Detect(a) => commands::detect(&a),
        Command::Transform(a) => commands::transform(&a),
        Command::Train(a) => commands::train(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Plot(a) => plot::plot(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            e.category.exit_code()
        }
    }
}
