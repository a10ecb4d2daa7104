use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Numerical thresholds shared by every decision the library makes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative threshold on singular values for rank decisions.
    pub rank_tol: f64,
    /// Absolute distance allowed when matching roots.
    pub root_tol: f64,
    /// Relative threshold for determinant and coefficient comparisons.
    pub det_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: 1e-9,
            root_tol: 1e-6,
            det_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_tol: f64, root_tol: f64, det_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("rank_tol", rank_tol),
            ("root_tol", root_tol),
            ("det_tol", det_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTarget(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(Tolerance {
            rank_tol,
            root_tol,
            det_tol,
        })
    }
}

/// Numerical rank: number of singular values above `rank_tol * sigma_max`.
pub fn rank(m: &Matrix, tol: &Tolerance) -> usize {
    rank_generic(m.as_dmatrix().clone(), tol.rank_tol)
}

/// Rank of a real or complex dense matrix at relative threshold `rel_tol`.
pub(crate) fn rank_generic<T: ComplexField<RealField = f64>>(m: DMatrix<T>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = super::svd::singular_values(&m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Inverse of a square matrix; [`Error::SingularMatrix`] when the numerical
/// rank is short.
pub fn inverse(m: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if rank(m, tol) < m.rows() {
        return Err(Error::SingularMatrix);
    }
    m.as_dmatrix()
        .clone()
        .lu()
        .try_inverse()
        .map(Matrix::wrap)
        .ok_or(Error::SingularMatrix)
}

/// Solves `m x = rhs` for square nonsingular `m`.
pub fn solve(m: &Matrix, rhs: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if !m.is_square() || m.rows() != rhs.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot solve {}x{} system with {} right-hand rows",
            m.rows(),
            m.cols(),
            rhs.rows()
        )));
    }
    if rank(m, tol) < m.rows() {
        return Err(Error::SingularMatrix);
    }
    m.as_dmatrix()
        .clone()
        .lu()
        .solve(rhs.as_dmatrix())
        .map(Matrix::wrap)
        .ok_or(Error::SingularMatrix)
}

/// Determinant via LU.
pub fn det(m: &Matrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.rows() == 0 {
        return 1.0;
    }
    m.as_dmatrix().clone().lu().determinant()
}

/// Spectral norm.
pub fn norm2(m: &Matrix) -> f64 {
    if m.as_dmatrix().is_empty() {
        return 0.0;
    }
    super::svd::singular_values(m.as_dmatrix())[0]
}

const EIG_RESTARTS: usize = 8;

/// Eigenvalues of a real square matrix, unsorted.
///
/// The shifted QR iteration can cycle on some structured inputs, so each
/// run is capped and a stalled one is restarted on `Q^T m Q` for a seeded
/// random orthogonal `Q`.
pub(crate) fn eigenvalues_of(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    let max_iter = 60 * n.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut work = m.clone();
    for _ in 0..=EIG_RESTARTS {
        if let Some(schur) = work.try_schur(f64::EPSILON, max_iter) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
        let q = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
            .qr()
            .q();
        work = q.transpose() * m * &q;
    }
    Err(Error::NoConvergence {
        attempts: EIG_RESTARTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn eigenvalues_of_every_small_sign_matrix() {
        // several of these make the uncapped QR iteration cycle forever
        for code in 0..3usize.pow(9) {
            let mut c = code;
            let m = DMatrix::from_fn(3, 3, |_, _| {
                let v = (c % 3) as f64 - 1.0;
                c /= 3;
                v
            });
            let ev = eigenvalues_of(&m).unwrap();
            let cp = crate::numkit::faddeev(&Matrix::wrap(m.clone()))
                .unwrap()
                .charpoly;
            for z in ev {
                assert!(cp.eval(z).norm() < 1e-9, "{m} {z}");
            }
        }
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(rank(&Matrix::identity(4), &tol()), 4);
        assert_eq!(rank(&Matrix::zeros(3, 3), &tol()), 0);
    }

    #[test]
    fn rank_of_example_input_matrix() {
        let b = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(rank(&b, &tol()), 2);
    }

    #[test]
    fn inverse_examples() {
        let i2 = Matrix::identity(2);
        assert_eq!(inverse(&i2, &tol()).unwrap(), i2);
        let d = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let di = inverse(&d, &tol()).unwrap();
        assert_eq!(di.to_rows(), vec![vec![0.5, 0.0], vec![0.0, 0.25]]);
        let s = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(inverse(&s, &tol()).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn inverse_residual_is_small() {
        let m = Matrix::from_rows(&[[4.0, -2.0, 1.0], [3.0, 6.0, -4.0], [2.0, 1.0, 8.0]]).unwrap();
        let mi = inverse(&m, &tol()).unwrap();
        let r = &(&m * &mi) - &Matrix::identity(3);
        assert!(r.max_abs() < 1e-14);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, 1.0, 1.0).is_err());
        assert!(Tolerance::new(1e-9, 1e-6, f64::NAN).is_err());
    }
}
