//! Soft-margin kernel support vector machine.
//!
//! Training maximizes the dual
//!
//! ```text
//! Σ η_n − ½ Σ_n Σ_m η_n η_m c_n c_m K(d_n, d_m)
//! subject to 0 ≤ η_n ≤ P,  Σ η_n c_n = 0
//! ```
//!
//! with a pairwise (two-multiplier) coordinate ascent. The slack variables of
//! the primal soft-margin problem never appear explicitly; they live in the
//! upper bound `P` on every multiplier.

mod format;
mod kernel;
mod model;
mod solver;

pub use format::{load_model, save_model, ModelFormatError, MODEL_FORMAT_VERSION};
pub use kernel::{kernel_eval, KernelSpec};
pub use model::{
    kkt_report, margin_width, train, KktReport, Standardizer, SvmModel, Training, SUPPORT_VECTOR_THRESHOLD,
};
pub use solver::{dual_objective, solve_dual, DualSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{points} points but {labels} labels")]
    LabelCountMismatch { points: usize, labels: usize },
    #[error("label {0} is not +1 or -1")]
    InvalidLabel(i32),
    #[error("training set needs both classes (got {positive} positive, {negative} negative)")]
    SingleClass { positive: usize, negative: usize },
    #[error("point {index} has dimension {actual}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("feature vectors must have at least one dimension")]
    ZeroDimension,
    #[error("non-finite feature value in point {0}")]
    NonFinite(usize),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("margin width is only defined for the linear kernel")]
    NonLinearKernel,
    #[error("weight vector is zero; margin is unbounded")]
    ZeroWeight,
    #[error("gram matrix is {actual} entries, expected {expected}")]
    GramShape { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, SvmError>;

/// Feature vectors `d_n` with class labels `c_n ∈ {+1, −1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    points: Vec<Vec<f64>>,
    labels: Vec<i32>,
}

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<i32>) -> Result<Self> {
        if points.is_empty() {
            return Err(SvmError::EmptyTrainingSet);
        }
        if points.len() != labels.len() {
            return Err(SvmError::LabelCountMismatch {
                points: points.len(),
                labels: labels.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(SvmError::ZeroDimension);
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(SvmError::DimensionMismatch {
                    index: i,
                    expected: dim,
                    actual: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(SvmError::NonFinite(i));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(SvmError::InvalidLabel(bad));
        }
        let positive = labels.iter().filter(|&&l| l == 1).count();
        let negative = labels.len() - positive;
        if positive == 0 || negative == 0 {
            return Err(SvmError::SingleClass { positive, negative });
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }
}

/// Settings for [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Box bound `P` on every multiplier (soft-margin penalty).
    pub regularization: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    /// Iteration budget in units of `n` pair updates.
    pub max_passes: usize,
    /// Seeds the scan order that breaks ties in working-pair selection.
    pub seed: u64,
    /// Standardize each feature on the training data before the kernel.
    pub standardize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            regularization: 10.0,
            tolerance: 1e-6,
            max_passes: 1000,
            seed: 0,
            standardize: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.regularization.is_finite() && self.regularization > 0.0) {
            return Err(SvmError::InvalidConfig(format!(
                "regularization must be positive, got {}",
                self.regularization
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SvmError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(SvmError::InvalidConfig("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}
