use super::solver::{solve_dual, DualSolution};
use super::{KernelSpec, Result, SolverConfig, SvmError, TrainingSet};

/// Multipliers at or below this are treated as zero.
pub const SUPPORT_VECTOR_THRESHOLD: f64 = 1e-8;

/// Per-dimension affine map `(x − mean) / scale` fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    /// Population mean and standard deviation; constant dimensions get scale 1.
    pub fn fit(points: &[Vec<f64>]) -> Self {
        let dim = points[0].len();
        let n = points.len() as f64;
        let mut mean = vec![0.0; dim];
        for p in points {
            for (m, v) in mean.iter_mut().zip(p) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for p in points {
            for ((s, v), m) in var.iter_mut().zip(p).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// A trained classifier: support vectors (in input space), their multipliers
/// and labels, the bias, and the feature standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    kernel: KernelSpec,
    regularization: f64,
    standardizer: Standardizer,
    support_vectors: Vec<Vec<f64>>,
    multipliers: Vec<f64>,
    sv_labels: Vec<i32>,
    bias: f64,
    /// Support vectors after standardization, cached for evaluation.
    scaled_svs: Vec<Vec<f64>>,
}

impl SvmModel {
    /// Assembles a model from its parts, checking shapes and multiplier bounds.
    pub fn from_parts(
        kernel: KernelSpec,
        regularization: f64,
        standardizer: Standardizer,
        support_vectors: Vec<Vec<f64>>,
        multipliers: Vec<f64>,
        sv_labels: Vec<i32>,
        bias: f64,
    ) -> Result<Self> {
        kernel.validate()?;
        if !(regularization.is_finite() && regularization > 0.0) {
            return Err(SvmError::InvalidConfig(format!(
                "regularization must be positive, got {regularization}"
            )));
        }
        let dim = standardizer.dimension();
        if dim == 0 || standardizer.scale.len() != dim {
            return Err(SvmError::ZeroDimension);
        }
        if support_vectors.len() != multipliers.len() || support_vectors.len() != sv_labels.len() {
            return Err(SvmError::LabelCountMismatch {
                points: support_vectors.len(),
                labels: sv_labels.len().min(multipliers.len()),
            });
        }
        for (i, sv) in support_vectors.iter().enumerate() {
            if sv.len() != dim {
                return Err(SvmError::DimensionMismatch {
                    index: i,
                    expected: dim,
                    actual: sv.len(),
                });
            }
            if sv.iter().any(|v| !v.is_finite()) {
                return Err(SvmError::NonFinite(i));
            }
        }
        if let Some(&bad) = sv_labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(SvmError::InvalidLabel(bad));
        }
        if let Some(bad) = multipliers.iter().find(|&&a| !(a > 0.0 && a <= regularization)) {
            return Err(SvmError::InvalidConfig(format!(
                "multiplier {bad} outside (0, {regularization}]"
            )));
        }
        if !bias.is_finite() {
            return Err(SvmError::InvalidConfig(format!("bias must be finite, got {bias}")));
        }
        let scaled_svs = support_vectors.iter().map(|sv| standardizer.apply(sv)).collect();
        Ok(Self {
            kernel,
            regularization,
            standardizer,
            support_vectors,
            multipliers,
            sv_labels,
            bias,
            scaled_svs,
        })
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn dimension(&self) -> usize {
        self.standardizer.dimension()
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn sv_labels(&self) -> &[i32] {
        &self.sv_labels
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    fn check_dim(&self, d: &[f64]) -> Result<()> {
        if d.len() == self.dimension() {
            Ok(())
        } else {
            Err(SvmError::DimensionMismatch {
                index: 0,
                expected: self.dimension(),
                actual: d.len(),
            })
        }
    }

    /// `f(d) = Σ η_sv c_sv K(d_sv, d) + b`.
    pub fn decision_value(&self, d: &[f64]) -> Result<f64> {
        self.check_dim(d)?;
        let x = self.standardizer.apply(d);
        let s: f64 = self
            .scaled_svs
            .iter()
            .zip(&self.multipliers)
            .zip(&self.sv_labels)
            .map(|((sv, a), &c)| a * c as f64 * self.kernel.apply(sv, &x))
            .sum();
        Ok(s + self.bias)
    }

    /// Sign of the decision value; an exact zero maps to `+1`.
    pub fn predict(&self, d: &[f64]) -> Result<i32> {
        Ok(if self.decision_value(d)? >= 0.0 { 1 } else { -1 })
    }

    /// `2 / ‖w‖` with `w = Σ η c d` expressed in input coordinates.
    pub fn margin_width(&self) -> Result<f64> {
        if self.kernel != KernelSpec::Linear {
            return Err(SvmError::NonLinearKernel);
        }
        let mut w = vec![0.0; self.dimension()];
        for ((sv, a), &c) in self.scaled_svs.iter().zip(&self.multipliers).zip(&self.sv_labels) {
            for (wk, v) in w.iter_mut().zip(sv) {
                *wk += a * c as f64 * v;
            }
        }
        // f(x) = w·((x − μ)/s) + b, so the input-space normal is w / s.
        let norm = w
            .iter()
            .zip(&self.standardizer.scale)
            .map(|(wk, s)| (wk / s) * (wk / s))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            Err(SvmError::ZeroWeight)
        } else {
            Ok(2.0 / norm)
        }
    }
}

/// Result of [`train`]: the model plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub model: SvmModel,
    /// Multiplier of every training point, including the zero ones.
    pub multipliers: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Maximal pairwise KKT violation when the solver stopped.
    pub final_violation: f64,
    pub converged: bool,
}

/// Trains a soft-margin SVM on `data`.
///
/// A run that exhausts `max_passes` still returns its model, with
/// `converged = false` and the remaining violation.
pub fn train(data: &TrainingSet, config: &SolverConfig, kernel: KernelSpec) -> Result<Training> {
    config.validate()?;
    kernel.validate()?;
    let standardizer = if config.standardize {
        Standardizer::fit(data.points())
    } else {
        Standardizer::identity(data.dimension())
    };
    let scaled: Vec<Vec<f64>> = data.points().iter().map(|p| standardizer.apply(p)).collect();
    let n = scaled.len();
    let mut gram = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let v = kernel.apply(&scaled[a], &scaled[b]);
            gram[a * n + b] = v;
            gram[b * n + a] = v;
        }
    }
    let DualSolution {
        multipliers,
        bias,
        objective,
        iterations,
        gap,
        converged,
    } = solve_dual(&gram, data.labels(), config)?;

    let mut svs = Vec::new();
    let mut etas = Vec::new();
    let mut labels = Vec::new();
    for (i, &a) in multipliers.iter().enumerate() {
        if a > SUPPORT_VECTOR_THRESHOLD {
            svs.push(data.points()[i].clone());
            etas.push(a);
            labels.push(data.labels()[i]);
        }
    }
    let model = SvmModel::from_parts(kernel, config.regularization, standardizer, svs, etas, labels, bias)?;
    Ok(Training {
        model,
        multipliers,
        objective,
        iterations,
        final_violation: gap.max(0.0),
        converged,
    })
}

/// Free-function form of [`SvmModel::margin_width`].
pub fn margin_width(model: &SvmModel) -> Result<f64> {
    model.margin_width()
}

/// Per-point KKT check of a model against its training data.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub max_violation: f64,
    /// Points whose violation exceeds the tolerance.
    pub offenders: usize,
    pub points: usize,
}

impl KktReport {
    pub fn satisfied(&self) -> bool {
        self.offenders == 0
    }
}

/// Checks complementary slackness on every training point:
///
/// * `η = 0` requires `c f(d) ≥ 1 − tol`,
/// * `0 < η < P` requires `|c f(d) − 1| ≤ tol`,
/// * `η = P` requires `c f(d) ≤ 1 + tol`.
///
/// Multipliers are recovered by matching training points to stored support
/// vectors (bitwise equal vector and label); unmatched points have `η = 0`.
pub fn kkt_report(model: &SvmModel, data: &TrainingSet, tolerance: f64) -> Result<KktReport> {
    let mut used = vec![false; model.support_vectors.len()];
    let cap = model.regularization;
    let mut max_violation: f64 = 0.0;
    let mut offenders = 0;
    for (d, &c) in data.points().iter().zip(data.labels()) {
        let eta = model
            .support_vectors
            .iter()
            .enumerate()
            .find(|(k, sv)| !used[*k] && model.sv_labels[*k] == c && sv.as_slice() == d.as_slice())
            .map(|(k, _)| {
                used[k] = true;
                model.multipliers[k]
            })
            .unwrap_or(0.0);
        let margin = c as f64 * model.decision_value(d)?;
        let violation = if eta <= SUPPORT_VECTOR_THRESHOLD {
            (1.0 - margin).max(0.0)
        } else if eta >= cap - SUPPORT_VECTOR_THRESHOLD {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        if violation > tolerance {
            offenders += 1;
        }
        max_violation = max_violation.max(violation);
    }
    Ok(KktReport {
        max_violation,
        offenders,
        points: data.len(),
    })
}
