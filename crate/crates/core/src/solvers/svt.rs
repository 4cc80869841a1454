//! Proximal and projection primitives: singular-value soft-thresholding,
//! the PSD cone projection, and box clamping.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen, SVD};

/// Singular-value soft-thresholding `S_tau`: subtracts `tau` from every
/// singular value and clips at zero. This is the proximal operator of
/// `tau * ||.||_*`, so the nuclear norm and the rank never increase.
pub fn svd_soft_threshold(a: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    svt_with_nuclear(a, tau).map(|(m, _)| m)
}

/// Soft-thresholding that also reports the nuclear norm of the result,
/// which solvers reuse for their objective traces.
pub(crate) fn svt_with_nuclear(a: &DMatrix<f64>, tau: f64) -> Result<(DMatrix<f64>, f64)> {
    crate::error::require_non_negative(tau, "svt threshold")?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("svt input must be finite"));
    }
    if tau == 0.0 {
        return Ok((a.clone(), nuclear_norm(a)));
    }
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let mut nuclear = 0.0;
    let mut scaled_u = u;
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        let thresholded = (sigma - tau).max(0.0);
        nuclear += thresholded;
        scaled_u.column_mut(i).scale_mut(thresholded);
    }
    Ok((scaled_u * v_t, nuclear))
}

/// Sum of singular values.
pub fn nuclear_norm(a: &DMatrix<f64>) -> f64 {
    SVD::new_unordered(a.clone(), false, false).singular_values.sum()
}

/// Largest singular value. For symmetric input this is the largest
/// absolute eigenvalue.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    SVD::new_unordered(a.clone(), false, false).singular_values.max()
}

/// Projects a symmetric matrix onto the PSD cone by clipping negative
/// eigenvalues. Inputs asymmetric beyond `1e-8` are rejected; smaller
/// asymmetry is symmetrized away first.
pub fn project_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "psd projection needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut max_gap: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            max_gap = max_gap.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if max_gap > 1e-8 {
        return Err(Error::Asymmetric(format!("max |M_ij - M_ji| = {max_gap:.3e}")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eigen = SymmetricEigen::new(sym);
    let mut scaled = eigen.eigenvectors.clone();
    for (i, &value) in eigen.eigenvalues.iter().enumerate() {
        scaled.column_mut(i).scale_mut(value.max(0.0));
    }
    Ok(&scaled * eigen.eigenvectors.transpose())
}

/// Clamps a scalar to `[-radius, radius]`.
pub fn project_box(v: f64, radius: f64) -> f64 {
    v.clamp(-radius, radius)
}
