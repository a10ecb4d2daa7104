use nalgebra::DMatrix;

use super::{Matrix, Polynomial};
use crate::error::{Error, Result};

/// Characteristic polynomial of a square matrix together with the matrix
/// coefficients of its resolvent adjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct Faddeev {
    /// `det(sI - a)`, monic of degree `m`.
    pub charpoly: Polynomial,
    /// `B_0, ..., B_{m-1}` with `adj(sI - a) = sum_k s^k B_k`.
    pub adj_coeffs: Vec<Matrix>,
}

/// Faddeev–LeVerrier recursion.
///
/// With `N_1 = I`, `c_{m-1} = -tr(a)` and
/// `N_{j+1} = a N_j + c_{m-j} I`, `c_{m-j-1} = -tr(a N_{j+1}) / (j+1)`,
/// the matrices `N_j` are the adjugate coefficients `B_{m-j}`.
pub fn faddeev(a: &Matrix) -> Result<Faddeev> {
    if !a.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let m = a.rows();
    let a = a.as_dmatrix();
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    // descending: adj_desc[j] = B_{m-1-j}
    let mut adj_desc: Vec<DMatrix<f64>> = Vec::with_capacity(m);
    let mut n_j = DMatrix::<f64>::identity(m, m);
    for j in 1..=m {
        let an = a * &n_j;
        c[m - j] = -an.trace() / j as f64;
        adj_desc.push(n_j);
        n_j = an + DMatrix::identity(m, m) * c[m - j];
    }
    let adj_coeffs = adj_desc.into_iter().rev().map(Matrix::wrap).collect();
    Ok(Faddeev {
        charpoly: Polynomial::new(c),
        adj_coeffs,
    })
}

/// Evaluates `p(a)` by Horner's scheme.
pub fn poly_of_matrix(p: &Polynomial, a: &Matrix) -> Matrix {
    let m = a.rows();
    let a = a.as_dmatrix();
    let mut acc = DMatrix::<f64>::zeros(m, m);
    for &c in p.coeffs().iter().rev() {
        acc = a * acc + DMatrix::identity(m, m) * c;
    }
    Matrix::wrap(acc)
}
