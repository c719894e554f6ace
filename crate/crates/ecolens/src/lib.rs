//! Ecosystem-level statistics for machine-learning evaluation.
//!
//! Most benchmark tooling scores one model at a time. `ecolens` collects the
//! quantitative machinery needed to study a *population* of models and the
//! ecosystem around them:
//!
//! - [`pbdist`]: Poisson-Binomial reference distributions for counts of
//!   independent, non-identical Bernoulli events.
//! - [`homogenization`]: observed failure-outcome profiles for subjects
//!   evaluated by several models, compared against the independence baseline.
//! - [`metrics`]: per-scenario evaluation metrics (accuracy, calibration,
//!   selective prediction, robustness, fairness, bias, toxicity, ranking
//!   quality, text overlap) plus cross-model win rates and metric
//!   correlations.
//! - [`efficiency`]: training energy and emissions estimates, idealized and
//!   denoised inference runtimes.
//! - [`index`]: rubric-based transparency and compliance scoring with
//!   inter-rater agreement, score aggregation, and cohort analysis.
//! - [`scaling`]: emergence detection on scale-performance curves.
//! - [`ingest`]: strict, validating loaders for the dataset formats the CLI
//!   understands.
//! - [`report`]: deterministic table emission (CSV, JSON, Markdown).
//! - [`cli`]: the run configuration and entry point behind the `ecolens`
//!   binary.
//!
//! # Quick start
//!
//! ```
//! use ecolens::homogenization::FailureMatrix;
//!
//! // Two models that always fail together, half the time.
//! let matrix = FailureMatrix::new(
//!     vec!["a".into(), "b".into(), "c".into(), "d".into()],
//!     vec!["m1".into(), "m2".into()],
//!     vec![vec![1, 1], vec![0, 0], vec![1, 1], vec![0, 0]],
//! )?;
//! let report = matrix.analyze()?;
//! // Both models fail at rate 0.5 ...
//! assert_eq!(report.model_failure_rates[0].1, 0.5);
//! // ... and joint failure is four times the independence baseline.
//! assert_eq!(report.systemic_failure_rate, 0.5);
//! assert_eq!(report.baseline.at(2), 0.25);
//! # Ok::<(), ecolens::Error>(())
//! ```

pub mod cli;
pub mod efficiency;
mod error;
pub mod homogenization;
pub mod index;
pub mod ingest;
pub mod metrics;
pub mod pbdist;
pub mod report;
pub mod scaling;

pub use error::{Error, Result};
