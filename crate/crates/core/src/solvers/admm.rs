//! ADMM for the spikiness-constrained matrix completion problem.
//!
//! The coefficient matrix is embedded as the off-diagonal block of a
//! `(d1+d2) x (d1+d2)` PSD matrix, so the nuclear norm becomes a trace
//! penalty. Each iteration projects one block variable onto the PSD cone,
//! solves the entry-wise data subproblem in closed form under the max-norm
//! box, and takes a relaxed multiplier step. The fixed point minimizes
//! `(1/N) sum_i (Y_i - Theta_{j(i)k(i)})^2 + lambda ||Theta||_*` subject to
//! `||Theta||_max <= box_radius`.

use super::svt::{nuclear_norm, project_box, project_psd};
use super::{AdmmConfig, Diagnostics, FitResult};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Runs the completion ADMM on the per-entry tallies: `counts[(j,k)]` is
/// the number of observations of entry `(j,k)` and `sums[(j,k)]` the sum
/// of their (already robustified) responses; `n_obs` is the total sample
/// count `N`.
pub fn admm_matrix_completion(
    counts: &DMatrix<f64>,
    sums: &DMatrix<f64>,
    n_obs: usize,
    config: &AdmmConfig,
) -> Result<FitResult> {
    admm_matrix_completion_observed(counts, sums, n_obs, config, |_, _| {})
}

/// Same as [`admm_matrix_completion`], invoking `observer(L, R12)` after
/// every iteration. Used to check iterate feasibility from tests.
pub fn admm_matrix_completion_observed(
    counts: &DMatrix<f64>,
    sums: &DMatrix<f64>,
    n_obs: usize,
    config: &AdmmConfig,
    mut observer: impl FnMut(&DMatrix<f64>, &DMatrix<f64>),
) -> Result<FitResult> {
    config.validate()?;
    let (d1, d2) = (counts.nrows(), counts.ncols());
    if sums.nrows() != d1 || sums.ncols() != d2 {
        return Err(Error::DimensionMismatch(format!(
            "counts {}x{} vs sums {}x{}",
            d1,
            d2,
            sums.nrows(),
            sums.ncols()
        )));
    }
    if n_obs == 0 {
        return Err(Error::EmptyDataset("admm_matrix_completion".into()));
    }
    let n_f = n_obs as f64;
    let d = d1 + d2;
    let rho = config.rho;

    let mut r = DMatrix::<f64>::zeros(d, d);
    let mut w = DMatrix::<f64>::zeros(d, d);
    let mut r12 = DMatrix::<f64>::zeros(d1, d2);
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        iterations += 1;

        // L-update: PSD projection of R - (W + lambda I) / rho
        let mut shifted = &r - &w / rho;
        for i in 0..d {
            shifted[(i, i)] -= config.lambda / rho;
        }
        let l = project_psd(&shifted)?;

        // C = L + W / rho, split into blocks
        let c = &l + &w / rho;

        // R12-update: entry-wise closed form under the box constraint
        for j in 0..d1 {
            for k in 0..d2 {
                let c12 = c[(j, d1 + k)];
                let numer = rho * c12 + 2.0 * sums[(j, k)] / n_f;
                let denom = rho + 2.0 * counts[(j, k)] / n_f;
                r12[(j, k)] = project_box(numer / denom, config.box_radius);
            }
        }

        // reassemble R from the free diagonal blocks and the solved block
        let mut r_next = DMatrix::<f64>::zeros(d, d);
        r_next.view_mut((0, 0), (d1, d1)).copy_from(&c.view((0, 0), (d1, d1)));
        r_next.view_mut((d1, d1), (d2, d2)).copy_from(&c.view((d1, d1), (d2, d2)));
        r_next.view_mut((0, d1), (d1, d2)).copy_from(&r12);
        r_next.view_mut((d1, 0), (d2, d1)).copy_from(&r12.transpose());

        // relaxed multiplier step
        w += (&l - &r_next) * (config.gamma * rho);

        let primal = (&l - &r_next).norm();
        let dual = rho * (&r_next - &r).norm();
        residual = primal.max(dual) / r_next.norm().max(1.0);
        r = r_next;

        // objective up to the constant sum of squared responses
        let data_term = (0..d1)
            .flat_map(|j| (0..d2).map(move |k| (j, k)))
            .map(|(j, k)| {
                let v = r12[(j, k)];
                (counts[(j, k)] * v * v - 2.0 * sums[(j, k)] * v) / n_f
            })
            .sum::<f64>();
        trace.push(data_term + config.lambda * nuclear_norm(&r12));

        observer(&l, &r12);
        if residual <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        estimate: r12,
        iterations,
        final_residual: residual,
        converged,
        objective_trace: trace,
        diagnostics: Diagnostics { solver_lambda: Some(config.lambda), ..Default::default() },
    })
}
