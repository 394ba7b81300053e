//! Thin wrappers around the SVD backend.
//!
//! Public types are nalgebra's; faer is used internally because its SVD
//! is much faster on large blocks.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Thin SVD `a = U diag(s) V^T` with `U: rows x k`, `V: cols x k`,
/// `k = min(rows, cols)`, singular values in descending order.
pub fn svd_thin(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let (rows, cols) = a.shape();
    let m = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = m.thin_svd().map_err(|_| Error::SvdFailed { rows, cols })?;
    let k = rows.min(cols);
    let u = DMatrix::from_fn(rows, k, |i, j| svd.U()[(i, j)]);
    let v = DMatrix::from_fn(cols, k, |i, j| svd.V()[(i, j)]);
    let s = DVector::from_fn(k, |i, _| svd.S().column_vector()[i]);
    Ok((u, s, v))
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &DMatrix<f64>) -> Result<f64> {
    let (_, s, _) = svd_thin(a)?;
    Ok(if s.is_empty() { 0.0 } else { s[0] })
}
