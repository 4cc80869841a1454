//! Optimization kernels for the penalized quadratic problems.
//!
//! All solvers are deterministic: identical inputs and configurations
//! produce bit-identical iterate sequences. Non-convergence within the
//! iteration budget is reported through [`FitResult::converged`], never
//! raised as an error.

mod admm;
mod lasso;
mod prsm;
mod svt;

pub use admm::{admm_matrix_completion, admm_matrix_completion_observed};
pub use lasso::cd_lasso;
pub use prsm::{prsm_compressed_sensing, prsm_multitask};
pub use svt::{nuclear_norm, operator_norm, project_box, project_psd, svd_soft_threshold};

use nalgebra::DMatrix;

/// Contractive Peaceman-Rachford splitting parameters.
#[derive(Debug, Clone, Copy)]
pub struct PrsmConfig {
    /// Relaxation factor in (0, 1].
    pub alpha: f64,
    /// Quadratic penalty, must be positive.
    pub beta: f64,
    /// Nuclear-norm weight, non-negative.
    pub lambda: f64,
    /// Stop once the primal gap between the two blocks falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PrsmConfig {
    fn default() -> Self {
        PrsmConfig { alpha: 0.9, beta: 1.0, lambda: 0.0, tol: 1e-7, max_iter: 10_000 }
    }
}

impl PrsmConfig {
    pub(crate) fn validate(&self) -> crate::Result<()> {
        crate::error::require_positive(self.alpha, "prsm alpha")?;
        if self.alpha > 1.0 {
            return Err(crate::Error::invalid("prsm alpha must lie in (0, 1]"));
        }
        crate::error::require_positive(self.beta, "prsm beta")?;
        crate::error::require_non_negative(self.lambda, "prsm lambda")?;
        crate::error::require_positive(self.tol, "prsm tol")?;
        if self.max_iter == 0 {
            return Err(crate::Error::invalid("prsm needs max_iter >= 1"));
        }
        Ok(())
    }
}

/// ADMM parameters for the box-constrained completion problem.
#[derive(Debug, Clone, Copy)]
pub struct AdmmConfig {
    /// Quadratic penalty, positive.
    pub rho: f64,
    /// Multiplier step length.
    pub gamma: f64,
    /// Max-norm box radius for the coefficient block (0 collapses the box).
    pub box_radius: f64,
    /// Nuclear-norm weight, non-negative.
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            rho: 0.1,
            gamma: 1.618,
            box_radius: 1.0,
            lambda: 0.0,
            tol: 1e-7,
            max_iter: 10_000,
        }
    }
}

impl AdmmConfig {
    pub(crate) fn validate(&self) -> crate::Result<()> {
        crate::error::require_positive(self.rho, "admm rho")?;
        crate::error::require_positive(self.gamma, "admm gamma")?;
        crate::error::require_non_negative(self.box_radius, "admm box radius")?;
        crate::error::require_non_negative(self.lambda, "admm lambda")?;
        crate::error::require_positive(self.tol, "admm tol")?;
        if self.max_iter == 0 {
            return Err(crate::Error::invalid("admm needs max_iter >= 1"));
        }
        Ok(())
    }
}

/// Coordinate-descent parameters for the l1 problem.
#[derive(Debug, Clone, Copy)]
pub struct CdConfig {
    /// l1 weight, non-negative.
    pub lambda: f64,
    /// Stop once the largest coordinate change in a full cycle falls below
    /// this and the KKT residual is within `10 * tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CdConfig {
    fn default() -> Self {
        CdConfig { lambda: 0.0, tol: 1e-7, max_iter: 10_000 }
    }
}

/// Shared solver settings used by the problem-level front-ends; the
/// per-solver configs are assembled from these plus the penalty level.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub prsm_alpha: f64,
    pub prsm_beta: f64,
    pub admm_rho: f64,
    pub admm_gamma: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-7,
            max_iter: 10_000,
            prsm_alpha: 0.9,
            prsm_beta: 1.0,
            admm_rho: 0.1,
            admm_gamma: 1.618,
        }
    }
}

impl SolverConfig {
    pub fn prsm(&self, lambda: f64) -> PrsmConfig {
        PrsmConfig {
            alpha: self.prsm_alpha,
            beta: self.prsm_beta,
            lambda,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn admm(&self, lambda: f64, box_radius: f64) -> AdmmConfig {
        AdmmConfig {
            rho: self.admm_rho,
            gamma: self.admm_gamma,
            box_radius,
            lambda,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn cd(&self, lambda: f64) -> CdConfig {
        CdConfig { lambda, tol: self.tol, max_iter: self.max_iter }
    }
}

/// Extra facts about a solve, for reproducing experiment rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Realized response threshold (infinite for the identity rule).
    pub tau_response: Option<f64>,
    /// Realized design threshold.
    pub tau_design: Option<f64>,
    /// Penalty level `lambda_N` of the estimator formulation.
    pub lambda: Option<f64>,
    /// Penalty actually passed to the solver after the objective-scaling
    /// translation for the problem at hand.
    pub solver_lambda: Option<f64>,
    /// KKT residual at termination (coordinate descent only).
    pub kkt_residual: Option<f64>,
    /// Coordinates pinned to zero because of vanishing curvature.
    pub pinned: Vec<usize>,
}

/// A solver's output: the estimate plus convergence bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// The estimated coefficient matrix (`d x 1` for the linear model).
    pub estimate: DMatrix<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    /// True only if the residual criterion was met within the budget;
    /// implies `final_residual <= tol`.
    pub converged: bool,
    /// Objective value per iteration (per cycle for coordinate descent).
    /// For the completion ADMM the trace is shifted by a data constant.
    pub objective_trace: Vec<f64>,
    pub diagnostics: Diagnostics,
}
