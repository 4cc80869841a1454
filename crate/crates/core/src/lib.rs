//! Robust estimation of low-rank coefficient matrices in trace regression
//! with heavy-tailed data.
//!
//! The trace regression model `Y = <X, Theta*> + eps` covers four problem
//! families through the structure of the design `X`: sparse linear models
//! (diagonal designs), matrix compressed sensing (dense random designs),
//! matrix completion (singleton designs) and multi-task regression
//! (rank-one row designs). When the noise or the design has only a few
//! bounded moments, the classical penalized least-squares estimator is
//! dominated by outliers. This crate implements the shrinkage remedy:
//! truncate scalar responses, or shrink vector data to a norm ball, before
//! forming the quadratic loss, then solve the nuclear-norm (or l1)
//! penalized problem with the matching splitting method.
//!
//! Modules:
//! - [`shrinkage`]: the truncation/shrinkage operators and threshold rate rules;
//! - [`dataset`]: the four structural encodings of observations;
//! - [`moments`]: robust cross/second-moment estimators in factored form,
//!   plus the stand-alone shrinkage covariance estimators;
//! - [`solvers`]: singular-value soft-thresholding, contractive PRSM,
//!   ADMM for box-constrained completion, and coordinate-descent lasso;
//! - [`estimators`]: per-problem front-ends binding shrinkage, moments,
//!   penalty-level rules and solvers;
//! - [`simulation`]: data generators and the Monte Carlo harness for the
//!   robust-vs-standard comparisons.

pub mod dataset;
pub mod error;
pub mod estimators;
pub mod moments;
pub mod shrinkage;
pub mod simulation;
pub mod solvers;

pub use dataset::TraceDataset;
pub use error::{Error, Result};
pub use estimators::{estimate, lambda_for, LambdaForm, LambdaRule, ProblemKind, ProblemSpec};
pub use moments::{GramMatrix, Regime, RobustMoments};
pub use shrinkage::{RateFormula, ShrinkKind, ShrinkageRule};
pub use solvers::{AdmmConfig, CdConfig, FitResult, PrsmConfig, SolverConfig};
