use std::fmt;

use super::{Result, SvmError};

/// Kernel function `K(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `⟨a, b⟩`
    Linear,
    /// `(⟨a, b⟩ + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
    /// `exp(−gamma ‖a − b‖²)`
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree, offset } => {
                if degree < 1 {
                    Err(SvmError::InvalidKernel(format!(
                        "polynomial degree must be >= 1, got {degree}"
                    )))
                } else if !offset.is_finite() {
                    Err(SvmError::InvalidKernel(format!(
                        "polynomial offset must be finite, got {offset}"
                    )))
                } else {
                    Ok(())
                }
            }
            KernelSpec::Rbf { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    Err(SvmError::InvalidKernel(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )))
                }
            }
        }
    }

    /// Evaluates the kernel on two equal-length slices. Length is not checked.
    pub(crate) fn apply(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Polynomial { degree, offset } => (dot(a, b) + offset).powi(degree as i32),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { degree, offset } => write!(f, "polynomial(degree={degree}, offset={offset})"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checked kernel evaluation.
pub fn kernel_eval(kernel: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    kernel.validate()?;
    if a.len() != b.len() {
        return Err(SvmError::DimensionMismatch {
            index: 1,
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(kernel.apply(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        let rbf1 = KernelSpec::Rbf { gamma: 1.0 };
        assert_eq!(kernel_eval(&rbf1, &[0.3, -2.0], &[0.3, -2.0]).unwrap(), 1.0);
        let rbf = KernelSpec::Rbf { gamma: 0.5 };
        assert_relative_eq!(
            kernel_eval(&rbf, &[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            0.36787944117144233,
            max_relative = 1e-15
        );
        let poly = KernelSpec::Polynomial { degree: 3, offset: 1.0 };
        assert_eq!(kernel_eval(&poly, &[1.0, 2.0], &[0.5, 0.25]).unwrap(), 8.0);
    }

    #[test]
    fn kernel_rejections() {
        assert!(kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]).is_err());
        assert!(kernel_eval(&KernelSpec::Rbf { gamma: 0.0 }, &[1.0], &[1.0]).is_err());
        assert!(kernel_eval(&KernelSpec::Rbf { gamma: f64::NAN }, &[1.0], &[1.0]).is_err());
        assert!(kernel_eval(&KernelSpec::Polynomial { degree: 0, offset: 1.0 }, &[1.0], &[1.0]).is_err());
    }
}
