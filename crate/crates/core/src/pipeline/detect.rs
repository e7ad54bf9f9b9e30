//! R-peak detection: smoothing, a centered five-point derivative, squaring,
//! moving-window integration, and a threshold relative to the local peak
//! envelope of the integrated signal. Candidates are refined to the raw-signal
//! maximum within a short search radius.

use std::collections::VecDeque;

use super::{EcgRecord, PipelineConfig};

/// Detector settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Minimum distance between accepted peaks.
    pub refractory_ms: f64,
    /// Candidates must reach this fraction of the local envelope.
    pub threshold_fraction: f64,
    /// Moving-window integration length.
    pub integration_ms: f64,
    /// Half-width of the local envelope window.
    pub envelope_ms: f64,
    /// Raw-signal refinement radius.
    pub search_ms: f64,
    /// Pre-smoothing moving-average length.
    pub smoothing_ms: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            refractory_ms: 250.0,
            threshold_fraction: 0.3,
            integration_ms: 150.0,
            envelope_ms: 2000.0,
            search_ms: 50.0,
            smoothing_ms: 15.0,
        }
    }
}

fn ms_to_samples(ms: f64, fs: f64) -> usize {
    (ms * fs / 1000.0).round().max(0.0) as usize
}

/// Centered moving average of odd length `2 * half + 1`, truncated at the
/// edges.
fn centered_mean(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Sliding maximum over `[i - half, i + half]`.
fn centered_max(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let hi = (i + half).min(n - 1);
        while next <= hi {
            while window.back().is_some_and(|&b| x[b] <= x[next]) {
                window.pop_back();
            }
            window.push_back(next);
            next += 1;
        }
        while window.front().is_some_and(|&f| f + half < i) {
            window.pop_front();
        }
        *o = x[*window.front().unwrap()];
    }
    out
}

/// Greedy left-to-right refractory filter: within a refractory span only the
/// candidate with the larger score survives.
fn enforce_refractory(candidates: &[(usize, f64)], refractory: usize) -> Vec<(usize, f64)> {
    let mut kept: Vec<(usize, f64)> = Vec::new();
    for &(idx, score) in candidates {
        match kept.last_mut() {
            Some(last) if idx <= last.0 + refractory => {
                if score > last.1 {
                    *last = (idx, score);
                }
            }
            _ => kept.push((idx, score)),
        }
    }
    kept
}

/// Indices of R peaks, strictly increasing and at least one refractory period
/// apart. Flat or very short records yield an empty result.
pub fn detect_r_peaks(record: &EcgRecord, config: &PipelineConfig) -> Vec<usize> {
    let det = &config.detector;
    let fs = record.sample_rate();
    let x = record.samples();
    let n = x.len();
    if n < 5 {
        return Vec::new();
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = hi - lo;
    if range <= 0.0 {
        return Vec::new();
    }
    // Rounding residue of the smoothing stage must never count as energy.
    let floor = (1e-6 * range).powi(2);

    let smooth = centered_mean(x, ms_to_samples(det.smoothing_ms, fs) / 2);
    let at = |i: isize| smooth[i.clamp(0, n as isize - 1) as usize];
    let energy: Vec<f64> = (0..n as isize)
        .map(|i| {
            let d = (2.0 * at(i + 2) + at(i + 1) - at(i - 1) - 2.0 * at(i - 2)) / 8.0;
            d * d
        })
        .collect();
    let integrated = centered_mean(&energy, ms_to_samples(det.integration_ms, fs) / 2);
    let envelope = centered_max(&integrated, ms_to_samples(det.envelope_ms, fs));

    let mut candidates = Vec::new();
    for i in 1..n - 1 {
        let v = integrated[i];
        if v > floor && v > integrated[i - 1] && v >= integrated[i + 1] && v >= det.threshold_fraction * envelope[i] {
            candidates.push((i, v));
        }
    }
    let refractory = ms_to_samples(det.refractory_ms, fs);
    let coarse = enforce_refractory(&candidates, refractory);

    let radius = ms_to_samples(det.search_ms, fs);
    let refined: Vec<(usize, f64)> = coarse
        .iter()
        .map(|&(i, _)| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(n - 1);
            // First maximum wins on ties.
            let mut best = lo;
            for k in lo..=hi {
                if x[k] > x[best] {
                    best = k;
                }
            }
            (best, x[best])
        })
        .collect();
    enforce_refractory(&refined, refractory)
        .into_iter()
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_signal_has_no_peaks() {
        let r = EcgRecord::new(360.0, vec![0.0; 3600]).unwrap();
        assert!(detect_r_peaks(&r, &PipelineConfig::default()).is_empty());
        let c = EcgRecord::new(360.0, vec![0.7; 3600]).unwrap();
        assert!(detect_r_peaks(&c, &PipelineConfig::default()).is_empty());
        let short = EcgRecord::new(360.0, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(detect_r_peaks(&short, &PipelineConfig::default()).is_empty());
    }

    #[test]
    fn gaussian_beats_found_exactly() {
        let fs = 360.0;
        let truth: Vec<usize> = (0..10).map(|k| 200 + k * 290 + (k * 37) % 23).collect();
        let mut x = vec![0.0; 3300];
        for &p in &truth {
            for (i, v) in x.iter_mut().enumerate() {
                let t = (i as f64 - p as f64) / fs;
                *v += (-(t * t) / (2.0 * 0.01f64.powi(2))).exp();
            }
        }
        let r = EcgRecord::new(fs, x).unwrap();
        let found = detect_r_peaks(&r, &PipelineConfig::default());
        assert_eq!(found.len(), 10);
        for (f, t) in found.iter().zip(&truth) {
            assert!(f.abs_diff(*t) <= 2, "{f} vs {t}");
        }
    }

    #[test]
    fn sliding_max_matches_brute_force() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 17) % 11) as f64).collect();
        let fast = centered_max(&x, 3);
        for (i, &got) in fast.iter().enumerate() {
            let lo = i.saturating_sub(3);
            let hi = (i + 3).min(49);
            let slow = x[lo..=hi].iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(got, slow);
        }
    }

    #[test]
    fn refractory_keeps_larger() {
        let kept = enforce_refractory(&[(10, 1.0), (12, 3.0), (40, 2.0), (41, 1.0)], 5);
        assert_eq!(kept, vec![(12, 3.0), (40, 2.0)]);
    }
}
