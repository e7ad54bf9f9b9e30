//! From a raw ECG record to labeled Hermite-domain feature vectors.
//!
//! R peaks are detected (or taken from annotations), a fixed-length window is
//! cut around each, the window is interpolated at the scaled Hermite nodes
//! `σ t_z`, and the forward transform of those samples gives the features.

mod detect;
mod io;
mod record;
mod resample;
mod segment;
mod synth;

pub use detect::{detect_r_peaks, DetectorConfig};
pub use io::{
    read_annotations_csv, read_features_csv, read_signal_csv, write_annotations_csv, write_features_csv,
    write_signal_csv, FeatureRow,
};
pub use record::{Annotation, BeatLabel, EcgRecord};
pub use resample::{extract_features, interpolate, node_scale, resample_at_roots, Interpolation};
pub use segment::{segment_beats, window_length, QrsSegment, Segmentation};
pub use synth::{synthesize_dataset, BeatShape, GaussianWave, SynthConfig};

use thiserror::Error;

use crate::hermite::{CoefficientVector, HermiteBasis, HermiteError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid synthesis parameters: {0}")]
    InvalidSynthesis(String),
    #[error("node scale {scale} s places nodes outside the window; largest allowed is {limit} s")]
    ScaleTooLarge { scale: f64, limit: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no sample rate given (use a `# sample_rate=` header or pass one explicitly)")]
    MissingSampleRate,
    #[error("record has no annotations to take beat positions from")]
    MissingAnnotations,
    #[error(transparent)]
    Hermite(#[from] HermiteError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Where beat positions come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakSource {
    #[default]
    Detect,
    /// Use annotation indices directly, bypassing the detector.
    Annotations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Hermite order `M`, also the feature count.
    pub order: usize,
    /// Beat window length.
    pub window_ms: f64,
    /// Node scale `σ` in seconds; `None` puts the outermost node at 95% of
    /// the half window.
    pub scale: Option<f64>,
    pub detector: DetectorConfig,
    pub interpolation: Interpolation,
    /// Maximum distance from a peak to the annotation it takes its label from.
    pub label_tolerance_ms: f64,
    pub peaks: PeakSource,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            order: 15,
            window_ms: 140.0,
            scale: None,
            detector: DetectorConfig::default(),
            interpolation: Interpolation::Cubic,
            label_tolerance_ms: 75.0,
            peaks: PeakSource::Detect,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.order > crate::hermite::MAX_ORDER {
            return Err(PipelineError::InvalidConfig(format!(
                "order must be in 1..={}, got {}",
                crate::hermite::MAX_ORDER,
                self.order
            )));
        }
        if !(self.window_ms.is_finite() && self.window_ms > 0.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "window_ms must be positive, got {}",
                self.window_ms
            )));
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(PipelineError::InvalidConfig(format!("scale must be positive, got {s}")));
            }
        }
        let d = &self.detector;
        if !(d.threshold_fraction > 0.0 && d.threshold_fraction <= 1.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "threshold fraction must be in (0, 1], got {}",
                d.threshold_fraction
            )));
        }
        for (name, v) in [
            ("refractory_ms", d.refractory_ms),
            ("integration_ms", d.integration_ms),
            ("envelope_ms", d.envelope_ms),
            ("search_ms", d.search_ms),
            ("smoothing_ms", d.smoothing_ms),
            ("label_tolerance_ms", self.label_tolerance_ms),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PipelineError::InvalidConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Features of one beat with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeature {
    pub features: CoefficientVector,
    /// `Irregular` maps to class `+1`, `Regular` to `−1`.
    pub label: Option<BeatLabel>,
    pub record_id: String,
    pub r_index: usize,
}

impl LabeledFeature {
    pub fn class(&self) -> Option<i32> {
        self.label.map(BeatLabel::class)
    }
}

/// Everything the pipeline produced for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordFeatures {
    pub peaks: Vec<usize>,
    pub features: Vec<LabeledFeature>,
    /// Beats discarded because their window crossed a record edge.
    pub dropped: usize,
    /// Node samples of each beat, parallel to `features`.
    pub node_samples: Vec<Vec<f64>>,
}

/// Runs detection (or annotation lookup), segmentation, resampling and the
/// forward transform over a record.
pub fn process_record(
    record: &EcgRecord,
    record_id: &str,
    basis: &HermiteBasis,
    config: &PipelineConfig,
) -> Result<RecordFeatures> {
    config.validate()?;
    if basis.order() != config.order {
        return Err(PipelineError::InvalidConfig(format!(
            "basis order {} does not match configured order {}",
            basis.order(),
            config.order
        )));
    }
    let peaks = match config.peaks {
        PeakSource::Detect => detect_r_peaks(record, config),
        PeakSource::Annotations => record
            .annotations()
            .ok_or(PipelineError::MissingAnnotations)?
            .iter()
            .map(|a| a.index)
            .collect(),
    };
    let Segmentation { segments, dropped } = segment_beats(record, &peaks, config);
    let mut features = Vec::with_capacity(segments.len());
    let mut node_samples = Vec::with_capacity(segments.len());
    for seg in &segments {
        let samples = resample_at_roots(seg, basis, config)?;
        let coeffs = basis.forward(&samples)?;
        features.push(LabeledFeature {
            features: coeffs,
            label: seg.label,
            record_id: record_id.to_string(),
            r_index: seg.r_index,
        });
        node_samples.push(samples);
    }
    Ok(RecordFeatures {
        peaks,
        features,
        dropped,
        node_samples,
    })
}
