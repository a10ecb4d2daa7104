use num_complex::Complex64;

use super::eigenvalues;
use crate::error::{Error, Result};
use crate::numkit::linalg::rank_generic;
use crate::numkit::{polymat_det, CMatrix, Matrix, Polynomial, Tolerance};

/// Descriptor system `E w' = F w + G v` with
/// `E = diag(I_{n-r}, 0)`, `F = [[A11, A12], [0, 0]]`, `G = [0; -I_r]`.
///
/// Under the feedback `v = K w` with `K = [H1, H2]`, the closed-loop pencil
/// `sE - F - GK` is exactly `[[sI - A11, -A12], [H1, H2]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorTriple {
    e: Matrix,
    f: Matrix,
    g: Matrix,
    split: usize,
}

impl DescriptorTriple {
    /// Builds the triple from the transformed blocks `a11` (`m x m`) and
    /// `a12` (`m x r`).
    pub fn from_blocks(a11: &Matrix, a12: &Matrix) -> Result<Self> {
        let m = a11.rows();
        if !a11.is_square() || a12.rows() != m {
            return Err(Error::DimensionMismatch(format!(
                "blocks {}x{} and {}x{} do not partition a state matrix",
                a11.rows(),
                a11.cols(),
                a12.rows(),
                a12.cols()
            )));
        }
        let r = a12.cols();
        let n = m + r;
        let mut e = Matrix::zeros(n, n).into_dmatrix();
        let mut f = Matrix::zeros(n, n).into_dmatrix();
        let mut g = Matrix::zeros(n, r).into_dmatrix();
        for i in 0..m {
            e[(i, i)] = 1.0;
            for j in 0..m {
                f[(i, j)] = a11[(i, j)];
            }
            for j in 0..r {
                f[(i, m + j)] = a12[(i, j)];
            }
        }
        for i in 0..r {
            g[(m + i, i)] = -1.0;
        }
        Ok(DescriptorTriple {
            e: Matrix::wrap(e),
            f: Matrix::wrap(f),
            g: Matrix::wrap(g),
            split: m,
        })
    }

    /// Accepts an explicit `(E, F, G)` only if it has the special structure.
    pub fn from_parts(e: Matrix, f: Matrix, g: Matrix) -> Result<Self> {
        let n = e.rows();
        let r = g.cols();
        if !e.is_square() || f.rows() != n || f.cols() != n || g.rows() != n || r > n {
            return Err(Error::DimensionMismatch("descriptor triple shapes".into()));
        }
        let m = n - r;
        let expected = Self::from_blocks(&f.block(0, 0, m, m), &f.block(0, m, m, r))?;
        if expected.e != e || expected.g != g || f.block(m, 0, r, n).max_abs() != 0.0 {
            return Err(Error::DimensionMismatch(
                "E, F, G lack the block structure diag(I, 0), [F1; 0], [0; -I]".into(),
            ));
        }
        Ok(expected)
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn order(&self) -> usize {
        self.e.rows()
    }

    /// `s E - F - G K` at a point.
    pub fn closed_loop_at(&self, k: &Matrix, s: Complex64) -> CMatrix {
        let fgk = &self.f + &(&self.g * k);
        CMatrix::from_fn(self.order(), self.order(), |i, j| {
            s * self.e[(i, j)] - fgk[(i, j)]
        })
    }

    /// `det(sE - F - GK)`; its degree never exceeds `rank E = n - r`.
    pub fn closed_loop_det(&self, k: &Matrix, tol: &Tolerance) -> Result<Polynomial> {
        assert_eq!(
            (k.rows(), k.cols()),
            (self.g.cols(), self.order()),
            "K must be r x n"
        );
        polymat_det(|s| self.closed_loop_at(k, s), self.split, tol)
    }

    /// Finite eigenvalues are controllable iff `rank [sE - F, G] = n` for
    /// all `s`; the rank can only drop at eigenvalues of the `A11` block.
    pub fn finite_modes_controllable(&self, tol: &Tolerance) -> Result<bool> {
        let n = self.order();
        let r = self.g.cols();
        let a11 = self.f.block(0, 0, self.split, self.split);
        Ok(eigenvalues(&a11)?.iter().all(|&s| {
            let m = CMatrix::from_fn(n, n + r, |i, j| {
                if j < n {
                    s * self.e[(i, j)] - self.f[(i, j)]
                } else {
                    Complex64::new(self.g[(i, j - n)], 0.0)
                }
            });
            rank_generic(m, tol.rank_tol) == n
        }))
    }

    /// `rank [E, G] = n`.
    pub fn infinite_modes_controllable(&self, tol: &Tolerance) -> bool {
        let eg = self.e.hstack(&self.g);
        rank_generic(eg.as_dmatrix().clone(), tol.rank_tol) == self.order()
    }
}
