use super::{BeatLabel, EcgRecord, PipelineConfig};

/// One beat window centred on its R peak.
#[derive(Debug, Clone, PartialEq)]
pub struct QrsSegment {
    /// `W` uniformly spaced samples, `W` odd, R peak at index `(W - 1) / 2`.
    pub window: Vec<f64>,
    pub r_index: usize,
    pub sample_rate: f64,
    pub label: Option<BeatLabel>,
}

impl QrsSegment {
    /// Window duration `T = W / fs` in seconds.
    pub fn duration(&self) -> f64 {
        self.window.len() as f64 / self.sample_rate
    }

    pub fn half_width(&self) -> usize {
        (self.window.len() - 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub segments: Vec<QrsSegment>,
    /// Peaks whose window would cross a record edge.
    pub dropped: usize,
}

/// Nearest odd integer to `window_ms · fs / 1000`, never below 1.
pub fn window_length(window_ms: f64, sample_rate: f64) -> usize {
    let raw = window_ms * sample_rate / 1000.0;
    let half = ((raw - 1.0) / 2.0).round().max(0.0) as usize;
    2 * half + 1
}

/// Label of the nearest annotation within `tolerance` samples of `index`.
fn nearest_label(record: &EcgRecord, index: usize, tolerance: usize) -> Option<BeatLabel> {
    let annotations = record.annotations()?;
    let pos = annotations.partition_point(|a| a.index < index);
    let mut best: Option<(usize, BeatLabel)> = None;
    for a in annotations[pos.saturating_sub(1)..(pos + 1).min(annotations.len())].iter() {
        let d = a.index.abs_diff(index);
        if d <= tolerance && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, a.label));
        }
    }
    best.map(|(_, l)| l)
}

/// Cuts one window per peak. Windows that would leave the record are dropped
/// and counted rather than padded.
pub fn segment_beats(record: &EcgRecord, peaks: &[usize], config: &PipelineConfig) -> Segmentation {
    let fs = record.sample_rate();
    let w = window_length(config.window_ms, fs);
    let half = (w - 1) / 2;
    let tolerance = (config.label_tolerance_ms * fs / 1000.0).round() as usize;
    let x = record.samples();
    let mut segments = Vec::with_capacity(peaks.len());
    let mut dropped = 0;
    for &p in peaks {
        if p < half || p + half >= x.len() {
            dropped += 1;
            continue;
        }
        segments.push(QrsSegment {
            window: x[p - half..=p + half].to_vec(),
            r_index: p,
            sample_rate: fs,
            label: nearest_label(record, p, tolerance),
        });
    }
    Segmentation { segments, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Annotation;

    fn config_with_window(samples: usize, fs: f64) -> PipelineConfig {
        PipelineConfig {
            window_ms: samples as f64 * 1000.0 / fs,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn window_length_is_nearest_odd() {
        assert_eq!(window_length(140.0, 360.0), 51);
        assert_eq!(window_length(100.0, 350.0), 35);
        assert_eq!(window_length(100.0, 340.0), 35);
        assert_eq!(window_length(0.1, 360.0), 1);
    }

    #[test]
    fn boundary_rule() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let r = EcgRecord::new(350.0, x).unwrap();
        let config = config_with_window(35, 350.0);
        let seg = segment_beats(&r, &[500, 3, 16, 17, 982, 983], &config);
        assert_eq!(seg.dropped, 3);
        let starts: Vec<f64> = seg.segments.iter().map(|s| s.window[0]).collect();
        assert_eq!(starts, vec![483.0, 0.0, 965.0]);
        assert!(seg.segments.iter().all(|s| s.window.len() == 35));
        assert_eq!(seg.segments[0].window[17], 500.0);
        assert_eq!(seg.segments[0].duration(), 0.1);
    }

    #[test]
    fn labels_from_nearest_annotation() {
        let fs = 400.0; // 75 ms = 30 samples
        let ann = vec![
            Annotation {
                index: 100,
                label: BeatLabel::Regular,
            },
            Annotation {
                index: 150,
                label: BeatLabel::Irregular,
            },
            Annotation {
                index: 400,
                label: BeatLabel::Irregular,
            },
        ];
        let r = EcgRecord::new(fs, vec![0.0; 1000])
            .unwrap()
            .with_annotations(ann)
            .unwrap();
        let config = config_with_window(21, fs);
        let seg = segment_beats(&r, &[110, 130, 200, 430, 431, 600], &config);
        let labels: Vec<_> = seg.segments.iter().map(|s| s.label).collect();
        assert_eq!(
            labels,
            vec![
                Some(BeatLabel::Regular),
                Some(BeatLabel::Irregular),
                None,
                Some(BeatLabel::Irregular),
                None,
                None
            ]
        );
        let unannotated = EcgRecord::new(fs, vec![0.0; 1000]).unwrap();
        assert!(segment_beats(&unannotated, &[110], &config).segments[0].label.is_none());
    }
}
