//! Strict system equivalence machinery.
//!
//! A row permutation `M` brings `B` to `[B1; B2]` with `B2` nonsingular, and
//! `N = [[I, -B1 B2^{-1}], [0, I]]` then annihilates the upper block:
//! `N M B = [0; B2]`. Every quantity downstream is expressed in the
//! coordinates `x_bar = N_bar x` with `N_bar = N M`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{inverse, rank, CMatrix, Matrix, Tolerance};

/// The transform `N_bar = N M` and the blocks of `N_bar A N_bar^{-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformBundle {
    pub m_perm: Matrix,
    pub n_mat: Matrix,
    pub b1_tilde: Matrix,
    pub b2_tilde: Matrix,
    pub a11_bar: Matrix,
    pub a12_bar: Matrix,
    pub a21_bar: Matrix,
    pub a22_bar: Matrix,
    /// `B1 B2^{-1}`.
    #[serde(skip)]
    ratio: Matrix,
}

/// Row order chosen by greedy complete pivoting on `b`: the `r` pivot rows
/// go to the bottom, everything else keeps its relative order on top.
fn select_rows(b: &Matrix, tol: &Tolerance) -> Result<Vec<usize>> {
    let (n, r) = (b.rows(), b.cols());
    let rk = rank(b, tol);
    if rk < r {
        return Err(Error::RankDeficientB {
            rank: rk,
            inputs: r,
        });
    }
    let mut work = b.as_dmatrix().clone();
    let floor = tol.rank_tol * b.max_abs();
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; r];
    for _ in 0..r {
        let mut best = (0.0_f64, 0, 0);
        for i in (0..n).filter(|&i| !row_used[i]) {
            for j in (0..r).filter(|&j| !col_used[j]) {
                if work[(i, j)].abs() > best.0 {
                    best = (work[(i, j)].abs(), i, j);
                }
            }
        }
        let (pivot, pi, pj) = best;
        if pivot <= floor {
            return Err(Error::RankDeficientB {
                rank: rk,
                inputs: r,
            });
        }
        row_used[pi] = true;
        col_used[pj] = true;
        for i in (0..n).filter(|&i| !row_used[i]) {
            let factor = work[(i, pj)] / work[(pi, pj)];
            for j in 0..r {
                let v = work[(pi, j)];
                work[(i, j)] -= factor * v;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !row_used[i]).collect();
    order.extend((0..n).filter(|&i| row_used[i]));
    Ok(order)
}

fn permutation_matrix(order: &[usize]) -> Matrix {
    let n = order.len();
    let mut m = Matrix::zeros(n, n).into_dmatrix();
    for (i, &src) in order.iter().enumerate() {
        m[(i, src)] = 1.0;
    }
    Matrix::wrap(m)
}

fn is_permutation(m: &Matrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let entries_ok = m.as_dmatrix().iter().all(|&x| x == 0.0 || x == 1.0);
    let rows_ok = (0..n).all(|i| (0..n).filter(|&j| m[(i, j)] == 1.0).count() == 1);
    let cols_ok = (0..n).all(|j| (0..n).filter(|&i| m[(i, j)] == 1.0).count() == 1);
    entries_ok && rows_ok && cols_ok
}

/// Permutation `M` such that the bottom `r` rows of `M b` are nonsingular.
pub fn select_permutation(b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    select_rows(b, tol).map(|order| permutation_matrix(&order))
}

/// Computes `B1`, `B2`, `N` and the blocks of `N_bar A N_bar^{-1}`.
pub fn build_transform(
    a: &Matrix,
    b: &Matrix,
    m_perm: &Matrix,
    tol: &Tolerance,
) -> Result<TransformBundle> {
    let (n, r) = (b.rows(), b.cols());
    if !a.is_square() || a.rows() != n || m_perm.rows() != n {
        return Err(Error::DimensionMismatch(
            "A, B and M must share the state dimension".into(),
        ));
    }
    if !is_permutation(m_perm) {
        return Err(Error::DimensionMismatch(
            "M is not a permutation matrix".into(),
        ));
    }
    let k = n - r;
    let mb = m_perm * b;
    let b1_tilde = mb.block(0, 0, k, r);
    let b2_tilde = mb.block(k, 0, r, r);
    let b2_inv = inverse(&b2_tilde, tol).map_err(|_| Error::SingularB2)?;
    let ratio = &b1_tilde * &b2_inv;

    let n_mat = upper_unit(&ratio.scale(-1.0), k, r);
    let n_inv = upper_unit(&ratio, k, r);
    let n_bar = &n_mat * m_perm;
    let n_bar_inv = &m_perm.transpose() * &n_inv;
    let a_bar = &(&n_bar * a) * &n_bar_inv;

    Ok(TransformBundle {
        a11_bar: a_bar.block(0, 0, k, k),
        a12_bar: a_bar.block(0, k, k, r),
        a21_bar: a_bar.block(k, 0, r, k),
        a22_bar: a_bar.block(k, k, r, r),
        m_perm: m_perm.clone(),
        n_mat,
        b1_tilde,
        b2_tilde,
        ratio,
    })
}

/// `[[I_k, upper], [0, I_r]]`.
fn upper_unit(upper: &Matrix, k: usize, r: usize) -> Matrix {
    let top = Matrix::identity(k).hstack(upper);
    let bottom = Matrix::zeros(r, k).hstack(&Matrix::identity(r));
    top.vstack(&bottom)
}

/// Output matrix in original coordinates:
/// `H = [H1_bar, H2_bar - H1_bar B1 B2^{-1}] M`.
pub fn recover_h(h1_bar: &Matrix, h2_bar: &Matrix, bundle: &TransformBundle) -> Result<Matrix> {
    let (k, r) = (bundle.split(), bundle.inputs());
    if h1_bar.cols() != k || h2_bar.cols() != r || h1_bar.rows() != h2_bar.rows() {
        return Err(Error::DimensionMismatch(format!(
            "H1_bar must be l x {k} and H2_bar l x {r}"
        )));
    }
    let right = h2_bar - &(h1_bar * &bundle.ratio);
    Ok(&h1_bar.hstack(&right) * &bundle.m_perm)
}

impl TransformBundle {
    /// `n - r`.
    pub fn split(&self) -> usize {
        self.a11_bar.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b2_tilde.rows()
    }

    /// `B1 B2^{-1}`.
    pub fn ratio(&self) -> &Matrix {
        &self.ratio
    }

    /// `N_bar = N M`.
    pub fn n_bar(&self) -> Matrix {
        &self.n_mat * &self.m_perm
    }

    /// `N_bar^{-1} = M^T N^{-1}`.
    pub fn n_bar_inv(&self) -> Matrix {
        let n_inv = upper_unit(&self.ratio, self.split(), self.inputs());
        &self.m_perm.transpose() * &n_inv
    }

    /// The full transformed state matrix, reassembled from its blocks.
    pub fn a_bar(&self) -> Matrix {
        self.a11_bar
            .hstack(&self.a12_bar)
            .vstack(&self.a21_bar.hstack(&self.a22_bar))
    }

    /// `[0; B2]`, the transformed input matrix.
    pub fn b_bar(&self) -> Matrix {
        Matrix::zeros(self.split(), self.inputs()).vstack(&self.b2_tilde)
    }

    /// `H N_bar^{-1}` split as `(H1_bar, H2_bar)`.
    pub fn forward_h(&self, h: &Matrix) -> (Matrix, Matrix) {
        let hb = h * &self.n_bar_inv();
        let k = self.split();
        (
            hb.block(0, 0, h.rows(), k),
            hb.block(0, k, h.rows(), self.inputs()),
        )
    }

    /// The transformed system matrix `[[sI - A_bar, -N_bar B], [H_bar, 0]]`.
    pub fn transformed_rosenbrock_at(&self, h_bar: &Matrix, s: Complex64) -> CMatrix {
        crate::sysmodel::rosenbrock(&self.a_bar(), &self.b_bar(), h_bar, s)
    }
}
