//! Evaluation of a uniformly sampled beat window at the scaled Hermite nodes.

use crate::hermite::{CoefficientVector, HermiteBasis};

use super::{PipelineConfig, PipelineError, QrsSegment, Result};

/// Interpolation used to read a window between its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Four-point cubic through the neighbouring samples.
    #[default]
    Cubic,
    Linear,
}

/// Value of `x` at fractional index `u`. Positions outside `[0, len-1]` use
/// the edge stencil.
///
/// Both schemes are written in Newton difference form, so a constant window
/// comes back exactly and scaling the window by a power of two scales the
/// result by exactly the same factor.
pub fn interpolate(x: &[f64], u: f64, method: Interpolation) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0];
    }
    if u.fract() == 0.0 && u >= 0.0 && u < n as f64 {
        return x[u as usize];
    }
    match method {
        Interpolation::Cubic if n >= 4 => {
            // Nodes k-1, k, k+1, k+2 with the stencil kept inside the window.
            let k = (u.floor() as isize).clamp(1, n as isize - 3) as usize;
            let s = u - (k as f64 - 1.0);
            let (y0, y1, y2, y3) = (x[k - 1], x[k], x[k + 1], x[k + 2]);
            let d1 = y1 - y0;
            let d2 = (y2 - y1) - d1;
            let d3 = ((y3 - y2) - (y2 - y1)) - d2;
            y0 + s * (d1 + (s - 1.0) * (d2 / 2.0 + (s - 2.0) * d3 / 6.0))
        }
        _ => {
            let k = (u.floor() as isize).clamp(0, n as isize - 2) as usize;
            let s = u - k as f64;
            x[k] + s * (x[k + 1] - x[k])
        }
    }
}

/// Scale `σ` in seconds: explicit from the config, or chosen so the outermost
/// node lands at 95% of the half window.
pub fn node_scale(duration: f64, basis: &HermiteBasis, config: &PipelineConfig) -> f64 {
    if let Some(s) = config.scale {
        return s;
    }
    let max_root = basis.roots().last().copied().unwrap_or(0.0).abs();
    let half = 0.95 * duration / 2.0;
    if max_root > 0.0 {
        half / max_root
    } else {
        half
    }
}

/// Window values at times `σ t_z` (seconds from the window centre), ordered
/// by increasing `t_z`.
pub fn resample_at_roots(segment: &QrsSegment, basis: &HermiteBasis, config: &PipelineConfig) -> Result<Vec<f64>> {
    let duration = segment.duration();
    let sigma = node_scale(duration, basis, config);
    let max_root = basis.roots().last().copied().unwrap_or(0.0).abs();
    let limit = if max_root > 0.0 {
        duration / 2.0 / max_root
    } else {
        f64::INFINITY
    };
    if !(sigma.is_finite() && sigma > 0.0) || sigma * max_root > duration / 2.0 * (1.0 + 1e-12) {
        return Err(PipelineError::ScaleTooLarge { scale: sigma, limit });
    }
    let center = segment.half_width() as f64;
    let fs = segment.sample_rate;
    Ok(basis
        .roots()
        .iter()
        .map(|&t| interpolate(&segment.window, center + sigma * t * fs, config.interpolation))
        .collect())
}

/// Hermite coefficients of one beat.
pub fn extract_features(
    segment: &QrsSegment,
    basis: &HermiteBasis,
    config: &PipelineConfig,
) -> Result<CoefficientVector> {
    let samples = resample_at_roots(segment, basis, config)?;
    Ok(basis.forward(&samples)?)
}
