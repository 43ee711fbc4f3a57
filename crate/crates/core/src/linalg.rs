//! Dense symmetric eigendecomposition and SVD, backed by faer.

use nalgebra::DMatrix;

fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Eigenvalues in ascending order with eigenvectors as columns, or `None`
/// if the iteration fails (non-finite input).
pub(crate) fn symmetric_eigen(a: &DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let eig = to_faer(a).self_adjoint_eigen(faer::Side::Lower).ok()?;
    let s = eig.S().column_vector();
    let values = (0..a.nrows()).map(|i| s[i]).collect();
    let u = eig.U();
    Some((values, DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| u[(i, j)])))
}

/// Orthogonal factor U Vᵀ of the SVD of a square matrix, or `None` if the
/// iteration fails.
pub(crate) fn polar_rotation(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = to_faer(a).svd().ok()?;
    let w = svd.U() * svd.V().transpose();
    Some(DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| w[(i, j)]))
}
