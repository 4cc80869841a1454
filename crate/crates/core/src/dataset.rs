//! Structural encodings of trace regression observations.
//!
//! All four problem families share the scalar model `Y_i = <X_i, Theta*> + eps_i`;
//! what differs is how the design `X_i` is stored. Keeping the structure
//! explicit lets every downstream estimator work in a factored
//! representation instead of materializing `d1*d2 x d1*d2` matrices.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Observations in one of the four structural encodings.
///
/// Vectorization follows the column-stacking convention: `vec(X)` lists the
/// columns of `X` in order, matching `DMatrix`'s column-major storage.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceDataset {
    /// Linear model: diagonal designs, stored as rows `x_i` of an `N x d`
    /// matrix with scalar responses.
    Diagonal { xs: DMatrix<f64>, ys: DVector<f64> },
    /// Compressed sensing: dense designs, stored as rows `vec(X_i)` of an
    /// `N x (d1*d2)` matrix with scalar responses.
    Dense { design: DMatrix<f64>, ys: DVector<f64>, d1: usize, d2: usize },
    /// Matrix completion: each observation is one (row, col) entry index
    /// plus a scalar response. Indices are zero-based.
    Singleton { rows: Vec<usize>, cols: Vec<usize>, ys: DVector<f64>, d1: usize, d2: usize },
    /// Multi-task regression: `n` covariate rows (`n x d1`) paired with
    /// response rows (`n x d2`).
    MultiResponse { xs: DMatrix<f64>, ys: DMatrix<f64> },
}

impl TraceDataset {
    pub fn diagonal(xs: DMatrix<f64>, ys: DVector<f64>) -> Result<Self> {
        if xs.nrows() != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} design rows vs {} responses",
                xs.nrows(),
                ys.len()
            )));
        }
        Ok(TraceDataset::Diagonal { xs, ys })
    }

    pub fn dense(design: DMatrix<f64>, ys: DVector<f64>, d1: usize, d2: usize) -> Result<Self> {
        if design.ncols() != d1 * d2 {
            return Err(Error::DimensionMismatch(format!(
                "design has {} columns, expected d1*d2 = {}",
                design.ncols(),
                d1 * d2
            )));
        }
        if design.nrows() != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} design rows vs {} responses",
                design.nrows(),
                ys.len()
            )));
        }
        Ok(TraceDataset::Dense { design, ys, d1, d2 })
    }

    pub fn singleton(
        rows: Vec<usize>,
        cols: Vec<usize>,
        ys: DVector<f64>,
        d1: usize,
        d2: usize,
    ) -> Result<Self> {
        if rows.len() != ys.len() || cols.len() != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} row indices, {} col indices, {} responses",
                rows.len(),
                cols.len(),
                ys.len()
            )));
        }
        if let Some(&j) = rows.iter().find(|&&j| j >= d1) {
            return Err(Error::IndexOutOfRange(format!("row index {j} with d1 = {d1}")));
        }
        if let Some(&k) = cols.iter().find(|&&k| k >= d2) {
            return Err(Error::IndexOutOfRange(format!("col index {k} with d2 = {d2}")));
        }
        Ok(TraceDataset::Singleton { rows, cols, ys, d1, d2 })
    }

    pub fn multi_response(xs: DMatrix<f64>, ys: DMatrix<f64>) -> Result<Self> {
        if xs.nrows() != ys.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate rows vs {} response rows",
                xs.nrows(),
                ys.nrows()
            )));
        }
        Ok(TraceDataset::MultiResponse { xs, ys })
    }

    /// Number of observations (`N`, or `n` row samples for multi-task).
    pub fn len(&self) -> usize {
        match self {
            TraceDataset::Diagonal { ys, .. } => ys.len(),
            TraceDataset::Dense { ys, .. } => ys.len(),
            TraceDataset::Singleton { ys, .. } => ys.len(),
            TraceDataset::MultiResponse { xs, .. } => xs.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficient dimensions `(d1, d2)` of the problem this dataset encodes.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            TraceDataset::Diagonal { xs, .. } => (xs.ncols(), 1),
            TraceDataset::Dense { d1, d2, .. } => (*d1, *d2),
            TraceDataset::Singleton { d1, d2, .. } => (*d1, *d2),
            TraceDataset::MultiResponse { xs, ys } => (xs.ncols(), ys.ncols()),
        }
    }
}
