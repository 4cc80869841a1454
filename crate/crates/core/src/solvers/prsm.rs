//! Contractive Peaceman-Rachford splitting for the nuclear-norm penalized
//! least-squares problems.
//!
//! Both solvers minimize `f1(theta) + lambda * ||theta||_*` where `f1` is
//! the mean squared residual, by alternating a ridge-type linear solve
//! with singular-value soft-thresholding, and two half-step multiplier
//! updates with factor `alpha * beta` in between.

use super::svt::svt_with_nuclear;
use super::{Diagnostics, FitResult, PrsmConfig};
use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Solves `min (1/N) ||Y - X theta||_2^2 + lambda ||mat(theta)||_*` over
/// `theta in R^(d1*d2)`, given the vectorized design rows `X` (`N x d1*d2`).
///
/// The ridge system `(2 X^T X / N + beta I)` is factored once. When
/// `N < d1*d2` the solve is routed through the matrix-inversion identity
/// against the `N x N` system instead.
pub fn prsm_compressed_sensing(
    design: &DMatrix<f64>,
    responses: &DVector<f64>,
    dims: (usize, usize),
    config: &PrsmConfig,
) -> Result<FitResult> {
    config.validate()?;
    let (d1, d2) = dims;
    let p = d1 * d2;
    let n = design.nrows();
    if design.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "design has {} columns, expected d1*d2 = {p}",
            design.ncols()
        )));
    }
    if responses.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} design rows vs {} responses",
            responses.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyDataset("prsm_compressed_sensing".into()));
    }

    let n_f = n as f64;
    let beta = config.beta;
    let b0 = design.tr_mul(responses) * (2.0 / n_f);
    let solve = RidgeSolve::prepare(design, n_f, beta, p, n)?;
    let y_sq = responses.dot(responses) / n_f;

    let mut theta_y = DVector::<f64>::zeros(p);
    let mut multiplier = DVector::<f64>::zeros(p);
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        iterations += 1;
        let rhs = &theta_y * beta + &multiplier + &b0;
        let theta_x = solve.apply(&rhs);
        let half = &multiplier - (&theta_x - &theta_y) * (config.alpha * beta);
        let target = DMatrix::from_column_slice(d1, d2, (&theta_x - &half).as_slice());
        let (thresholded, nuclear) = svt_with_nuclear(&target, config.lambda / beta)?;
        theta_y = DVector::from_column_slice(thresholded.as_slice());
        multiplier = &half - (&theta_x - &theta_y) * (config.alpha * beta);

        residual = (&theta_x - &theta_y).norm();
        let data_term = match &solve {
            RidgeSolve::Dense { gram2, .. } => {
                y_sq - b0.dot(&theta_y) + 0.5 * theta_y.dot(&(gram2 * &theta_y))
            }
            RidgeSolve::Woodbury { .. } => {
                let fitted = design * &theta_y;
                (responses - fitted).norm_squared() / n_f
            }
        };
        trace.push(data_term + config.lambda * nuclear);
        if residual <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        estimate: DMatrix::from_column_slice(d1, d2, theta_y.as_slice()),
        iterations,
        final_residual: residual,
        converged,
        objective_trace: trace,
        diagnostics: Diagnostics { solver_lambda: Some(config.lambda), ..Default::default() },
    })
}

/// Solves `min (1/n) ||Y - X Theta||_F^2 + lambda ||Theta||_*` for the
/// multi-task problem, with `X` of shape `n x d1` and `Y` of shape `n x d2`.
pub fn prsm_multitask(
    design: &DMatrix<f64>,
    responses: &DMatrix<f64>,
    config: &PrsmConfig,
) -> Result<FitResult> {
    config.validate()?;
    let n = design.nrows();
    let d1 = design.ncols();
    let d2 = responses.ncols();
    if responses.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} covariate rows vs {} response rows",
            responses.nrows()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyDataset("prsm_multitask".into()));
    }

    let n_f = n as f64;
    let beta = config.beta;
    let gram2 = design.tr_mul(design) * (2.0 / n_f);
    let system = &gram2 + DMatrix::<f64>::identity(d1, d1) * beta;
    let chol = Cholesky::new(system)
        .ok_or_else(|| Error::invalid("ridge system not positive definite"))?;
    let b0 = design.tr_mul(responses) * (2.0 / n_f);
    let y_sq = responses.iter().map(|v| v * v).sum::<f64>() / n_f;

    let mut theta_y = DMatrix::<f64>::zeros(d1, d2);
    let mut multiplier = DMatrix::<f64>::zeros(d1, d2);
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        iterations += 1;
        let rhs = &theta_y * beta + &multiplier + &b0;
        let theta_x = chol.solve(&rhs);
        let half = &multiplier - (&theta_x - &theta_y) * (config.alpha * beta);
        let (thresholded, nuclear) = svt_with_nuclear(&(&theta_x - &half), config.lambda / beta)?;
        theta_y = thresholded;
        multiplier = &half - (&theta_x - &theta_y) * (config.alpha * beta);

        residual = (&theta_x - &theta_y).norm();
        let quad = 0.5 * theta_y.dot(&(&gram2 * &theta_y));
        let data_term = y_sq - b0.dot(&theta_y) + quad;
        trace.push(data_term + config.lambda * nuclear);
        if residual <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        estimate: theta_y,
        iterations,
        final_residual: residual,
        converged,
        objective_trace: trace,
        diagnostics: Diagnostics { solver_lambda: Some(config.lambda), ..Default::default() },
    })
}

/// The fixed ridge solve `(2 X^T X / N + beta I)^{-1} z`, in whichever of
/// the two algebraically identical forms is cheaper.
enum RidgeSolve {
    Dense { chol: Cholesky<f64, Dyn>, gram2: DMatrix<f64> },
    Woodbury { design: DMatrix<f64>, chol: Cholesky<f64, Dyn>, beta: f64 },
}

impl RidgeSolve {
    fn prepare(design: &DMatrix<f64>, n_f: f64, beta: f64, p: usize, n: usize) -> Result<Self> {
        if n >= p {
            let gram2 = design.tr_mul(design) * (2.0 / n_f);
            let system = &gram2 + DMatrix::<f64>::identity(p, p) * beta;
            let chol = Cholesky::new(system)
                .ok_or_else(|| Error::invalid("ridge system not positive definite"))?;
            Ok(RidgeSolve::Dense { chol, gram2 })
        } else {
            // (beta I + 2 X^T X / N)^{-1} z
            //   = z / beta - X^T ((N/2) I + X X^T / beta)^{-1} X z / beta^2
            let mut inner = design * design.transpose() / beta;
            for i in 0..n {
                inner[(i, i)] += n_f / 2.0;
            }
            let chol = Cholesky::new(inner)
                .ok_or_else(|| Error::invalid("woodbury system not positive definite"))?;
            Ok(RidgeSolve::Woodbury { design: design.clone(), chol, beta })
        }
    }

    fn apply(&self, z: &DVector<f64>) -> DVector<f64> {
        match self {
            RidgeSolve::Dense { chol, .. } => chol.solve(z),
            RidgeSolve::Woodbury { design, chol, beta } => {
                let projected = design * z;
                let solved = chol.solve(&projected);
                z / *beta - design.tr_mul(&solved) / (beta * beta)
            }
        }
    }
}
