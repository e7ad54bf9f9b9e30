use std::fmt;
use std::str::FromStr;

use super::{PipelineError, Result};

/// Beat class. Irregular beats are the positive class (`+1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BeatLabel {
    Regular,
    Irregular,
}

impl BeatLabel {
    pub fn class(self) -> i32 {
        match self {
            BeatLabel::Regular => -1,
            BeatLabel::Irregular => 1,
        }
    }

    pub fn from_class(class: i32) -> Option<Self> {
        match class {
            1 => Some(BeatLabel::Irregular),
            -1 => Some(BeatLabel::Regular),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BeatLabel::Regular => "regular",
            BeatLabel::Irregular => "irregular",
        }
    }
}

impl fmt::Display for BeatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeatLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regular" | "-1" => Ok(BeatLabel::Regular),
            "irregular" | "1" | "+1" => Ok(BeatLabel::Irregular),
            other => Err(format!("unknown beat label `{other}` (expected regular or irregular)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Annotation {
    pub index: usize,
    pub label: BeatLabel,
}

/// A uniformly sampled single-lead ECG in millivolts.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    sample_rate: f64,
    samples: Vec<f64>,
    annotations: Option<Vec<Annotation>>,
}

impl EcgRecord {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(PipelineError::InvalidRecord(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if samples.len() < 2 {
            return Err(PipelineError::InvalidRecord(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(PipelineError::InvalidRecord(format!("sample {i} is not finite")));
        }
        Ok(Self {
            sample_rate,
            samples,
            annotations: None,
        })
    }

    /// Attaches annotations; indices must be in range and strictly increasing.
    pub fn with_annotations(mut self, annotations: Vec<Annotation>) -> Result<Self> {
        for (k, a) in annotations.iter().enumerate() {
            if a.index >= self.samples.len() {
                return Err(PipelineError::InvalidRecord(format!(
                    "annotation index {} beyond record length {}",
                    a.index,
                    self.samples.len()
                )));
            }
            if k > 0 && annotations[k - 1].index >= a.index {
                return Err(PipelineError::InvalidRecord(format!(
                    "annotation indices not strictly increasing at {}",
                    a.index
                )));
            }
        }
        self.annotations = Some(annotations);
        Ok(self)
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn annotations(&self) -> Option<&[Annotation]> {
        self.annotations.as_deref()
    }

    /// Copy with every sample multiplied by `factor`; annotations kept.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sample_rate: self.sample_rate,
            samples: self.samples.iter().map(|v| v * factor).collect(),
            annotations: self.annotations.clone(),
        }
    }
}
