use super::{linalg, Matrix, Tolerance};
use crate::error::{Error, Result};

/// Signed maximal minors of an `(r-1) x r` matrix `c`.
///
/// Returns `w` such that `det([x; c]) == x . w` for every row vector `x`,
/// i.e. `w_j = (-1)^j det(c without column j)`.
pub fn signed_minor_vector(c: &Matrix) -> Vec<f64> {
    let r = c.cols();
    assert_eq!(c.rows() + 1, r, "expected an (r-1) x r matrix");
    (0..r)
        .map(|j| {
            let keep: Vec<usize> = (0..r).filter(|&k| k != j).collect();
            let sub = Matrix::wrap(c.as_dmatrix().select_columns(keep.iter()));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * linalg::det(&sub)
        })
        .collect()
}

/// An `(r-1) x r` matrix whose signed minor vector is `g`.
///
/// The rows span the orthogonal complement of `g` (taken from a Householder
/// reflector), and the first row is rescaled so the minor vector, which is
/// always parallel to `g`, matches it exactly.
pub fn complement_to_minors(g: &[f64], tol: &Tolerance) -> Result<Matrix> {
    let r = g.len();
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0 || gnorm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if r == 1 {
        // the empty minor is 1
        if (g[0] - 1.0).abs() > tol.det_tol {
            return Err(Error::DimensionMismatch(
                "a 0 x 1 complement only realizes the minor vector (1)".into(),
            ));
        }
        return Ok(Matrix::zeros(0, 1));
    }
    let sign = if g[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = g.to_vec();
    v[0] += sign * gnorm;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    // columns 1..r of I - 2 v v^T / (v^T v), stored as rows
    let mut rows = vec![vec![0.0; r]; r - 1];
    for (k, row) in rows.iter_mut().enumerate() {
        let col = k + 1;
        for (i, entry) in row.iter_mut().enumerate() {
            let id = if i == col { 1.0 } else { 0.0 };
            *entry = id - 2.0 * v[i] * v[col] / vv;
        }
    }
    let c = Matrix::from_rows(&rows)?;
    let w = signed_minor_vector(&c);
    let lambda = w.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / (gnorm * gnorm);
    if lambda.abs() <= f64::EPSILON {
        return Err(Error::SingularMatrix);
    }
    rows[0].iter_mut().for_each(|x| *x /= lambda);
    Matrix::from_rows(&rows)
}
