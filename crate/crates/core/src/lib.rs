//! Hermite-domain features for ECG QRS complexes and a soft-margin kernel SVM
//! that separates regular from irregular beats.
//!
//! * [`hermite`] – Hermite polynomials/functions, roots, Gauss–Hermite weights
//!   and the finite discrete Hermite transform.
//! * [`svm`] – dual-problem SVM trained by pairwise coordinate ascent.
//! * [`pipeline`] – R-peak detection, beat windowing, resampling at the
//!   Hermite nodes, feature extraction and a synthetic ECG generator.
//! * [`metrics`] – confusion matrix, accuracy, TPR and FPR.

pub mod hermite;
pub mod metrics;
pub mod pipeline;
pub mod svm;
