//! System-level types and analyses.

mod descriptor;
mod io;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::linalg::rank_generic;
use crate::numkit::{self, poly_roots, polymat_det, CMatrix, Matrix, Polynomial, Tolerance};
use crate::serde_util;

pub use descriptor::DescriptorTriple;
pub use io::{load_system, save_system};

/// `x' = A x + B u`, `y = H x`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceSystem {
    a: Matrix,
    b: Matrix,
    h: Option<Matrix>,
    name: Option<String>,
}

impl StateSpaceSystem {
    pub fn new(a: Matrix, b: Matrix, h: Option<Matrix>) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "A must be square and nonempty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if b.rows() != n || b.cols() == 0 || b.cols() > n {
            return Err(Error::DimensionMismatch(format!(
                "B must be {n} x r with 1 <= r <= {n}, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        if let Some(h) = &h {
            if h.cols() != n || h.rows() == 0 || h.rows() > n {
                return Err(Error::DimensionMismatch(format!(
                    "H must be l x {n} with 1 <= l <= {n}, got {}x{}",
                    h.rows(),
                    h.cols()
                )));
            }
        }
        Ok(StateSpaceSystem {
            a,
            b,
            h,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Same system with the output matrix replaced.
    pub fn with_output(&self, h: Matrix) -> Result<Self> {
        let mut sys = StateSpaceSystem::new(self.a.clone(), self.b.clone(), Some(h))?;
        sys.name = self.name.clone();
        Ok(sys)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn h(&self) -> Option<&Matrix> {
        self.h.as_ref()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    /// The Rosenbrock system matrix `[[sI - A, -B], [H, 0]]` at `s`.
    pub fn rosenbrock_at(&self, s: Complex64) -> Result<CMatrix> {
        let h = self.h.as_ref().ok_or(Error::MissingOutput)?;
        Ok(rosenbrock(&self.a, &self.b, h, s))
    }
}

pub(crate) fn rosenbrock(a: &Matrix, b: &Matrix, h: &Matrix, s: Complex64) -> CMatrix {
    let n = a.rows();
    let r = b.cols();
    let l = h.rows();
    let (a, b, h) = (a.as_dmatrix(), b.as_dmatrix(), h.as_dmatrix());
    let mut p = CMatrix::zeros(n + l, n + r);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { s } else { Complex64::new(0.0, 0.0) };
            p[(i, j)] = d - a[(i, j)];
        }
        for j in 0..r {
            p[(i, n + j)] = Complex64::new(-b[(i, j)], 0.0);
        }
    }
    for i in 0..l {
        for j in 0..n {
            p[(n + i, j)] = Complex64::new(h[(i, j)], 0.0);
        }
    }
    p
}

/// Finite and infinite invariant zeros of a square system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroReport {
    #[serde(serialize_with = "serde_util::zeros")]
    pub finite_zeros: Vec<Complex64>,
    pub finite_count: usize,
    pub infinite_count: usize,
    pub zero_polynomial: Polynomial,
    pub scalar_factor_note: String,
}

/// Dimension of the Krylov space generated by `(a, b)`, i.e. the rank of
/// `[b, ab, ..., a^{n-1} b]`.
///
/// Computed by orthogonal staircase reduction: each new block `a Q_k` is
/// projected against the basis found so far and only directions with
/// singular value above `rank_tol` times the norm of the generating matrix
/// are kept.
pub(crate) fn krylov_rank(a: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64) -> usize {
    let n = a.nrows();
    if n == 0 || b.ncols() == 0 {
        return 0;
    }
    let norm = |m: &DMatrix<f64>| {
        numkit::svd::singular_values(m)
            .first()
            .copied()
            .unwrap_or(0.0)
    };
    let a_norm = norm(a);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut block = b.clone();
    let mut threshold = rank_tol * norm(b);
    while basis.len() < n {
        for _ in 0..2 {
            for q in &basis {
                for mut col in block.column_iter_mut() {
                    let proj = q.dot(&col);
                    col.axpy(-proj, q, 1.0);
                }
            }
        }
        if block.ncols() == 0 {
            break;
        }
        let fresh: Vec<DVector<f64>> = numkit::svd::left_singular(&block)
            .into_iter()
            .filter(|(s, _)| *s > threshold)
            .take(n - basis.len())
            .map(|(_, u)| u)
            .collect();
        if fresh.is_empty() {
            break;
        }
        let fresh_mat = DMatrix::from_columns(&fresh);
        basis.extend(fresh);
        block = a * fresh_mat;
        threshold = rank_tol * a_norm;
    }
    basis.len()
}

/// Kalman controllability test; returns the flag and the rank of the
/// controllability matrix.
pub fn controllable(a: &Matrix, b: &Matrix, tol: &Tolerance) -> (bool, usize) {
    assert!(a.is_square() && a.rows() == b.rows(), "incompatible (A, B)");
    let rank = krylov_rank(a.as_dmatrix(), b.as_dmatrix(), tol.rank_tol);
    (rank == a.rows(), rank)
}

/// Observability of `(a, h)` as controllability of the dual pair.
pub fn observable(a: &Matrix, h: &Matrix, tol: &Tolerance) -> bool {
    controllable(&a.transpose(), &h.transpose(), tol).0
}

/// PBH test: `rank [lambda I - a, b] = n` at every eigenvalue of `a`.
pub fn pbh_controllable(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<bool> {
    let n = a.rows();
    let eig = eigenvalues(a)?;
    // defective eigenvalues come back scattered around the true value;
    // the mean of each cluster is accurate
    let radius = tol.root_tol.sqrt() * a.norm_fro().max(1.0);
    let mut points = eig.clone();
    for z in &eig {
        let cluster: Vec<Complex64> = eig
            .iter()
            .copied()
            .filter(|w| (w - z).norm() <= radius)
            .collect();
        if cluster.len() > 1 {
            points.push(cluster.iter().sum::<Complex64>() / cluster.len() as f64);
        }
    }
    Ok(points.iter().all(|&lambda| {
        let m = CMatrix::from_fn(n, n + b.cols(), |i, j| {
            if j < n {
                let d = if i == j {
                    lambda
                } else {
                    Complex64::new(0.0, 0.0)
                };
                d - a[(i, j)]
            } else {
                Complex64::new(b[(i, j - n)], 0.0)
            }
        });
        rank_generic(m, tol.rank_tol) == n
    }))
}

/// Eigenvalues with multiplicity, sorted by real then imaginary part.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.as_dmatrix().clone();
    nalgebra::linalg::balancing::balance_parlett_reinsch(&mut m);
    let mut ev = numkit::linalg::eigenvalues_of(&m)?;
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(ev)
}

/// Zero polynomial `det P(s)` of a square system and its roots.
pub fn invariant_zeros(sys: &StateSpaceSystem, tol: &Tolerance) -> Result<ZeroReport> {
    let h = sys.h().ok_or(Error::MissingOutput)?;
    let (n, r, l) = (sys.states(), sys.inputs(), h.rows());
    if l != r {
        return Err(Error::NotSquare {
            outputs: l,
            inputs: r,
        });
    }
    // true degree is at most n - r; the headroom lets the interpolant confirm it
    let psi = polymat_det(|s| rosenbrock(sys.a(), sys.b(), h, s), n, tol)?;
    if psi.is_zero() {
        return Err(Error::DegenerateSystem);
    }
    let finite_zeros = poly_roots(&psi)?;
    let finite_count = finite_zeros.len();
    Ok(ZeroReport {
        infinite_count: (n - r).saturating_sub(finite_count),
        finite_count,
        scalar_factor_note: format!(
            "zero polynomial is defined up to a nonzero constant; leading coefficient {}",
            numkit::format_sig(psi.leading(), 6)
        ),
        zero_polynomial: psi,
        finite_zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn published_ab() -> (Matrix, Matrix) {
        (
            m(&[
                &[2., 1., 0., 0.],
                &[0., 1., 0., 1.],
                &[0., 2., 0., 0.],
                &[1., 1., 0., 0.],
            ]),
            m(&[&[1., 0.], &[0., 0.], &[0., 1.], &[0., 1.]]),
        )
    }

    #[test]
    fn controllability_examples() {
        let (a, b) = published_ab();
        assert_eq!(controllable(&a, &b, &tol()), (true, 4));
        assert_eq!(
            controllable(&Matrix::zeros(2, 2), &Matrix::zeros(2, 1), &tol()),
            (false, 0)
        );
        let n = 5;
        let mut shift = Matrix::zeros(n, n).into_dmatrix();
        for i in 0..n - 1 {
            shift[(i, i + 1)] = 1.0;
        }
        let mut e_n = vec![0.0; n];
        e_n[n - 1] = 1.0;
        assert_eq!(
            controllable(&Matrix::wrap(shift), &Matrix::column(&e_n), &tol()),
            (true, n)
        );
    }

    #[test]
    fn uncontrollable_diagonal_mode() {
        let a = m(&[&[1., 0.], &[0., 2.]]);
        let b = m(&[&[1.], &[0.]]);
        assert_eq!(controllable(&a, &b, &tol()), (false, 1));
        assert!(!pbh_controllable(&a, &b, &tol()).unwrap());
    }

    #[test]
    fn observability_examples() {
        let (a, _) = published_ab();
        assert!(observable(&a, &Matrix::identity(4), &tol()));
        assert!(!observable(&a, &Matrix::zeros(2, 4), &tol()));
        let h = m(&[&[1., 0., 1., -1.], &[0., 5., 6., -5.]]);
        assert!(observable(&a, &h, &tol()));
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = eigenvalues(&m(&[&[1., 0., 0.], &[0., 2., 0.], &[0., 0., 3.]])).unwrap();
        for (z, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-14);
        }
        let ev = eigenvalues(&m(&[&[0., 1.], &[0., 0.]])).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-12));
        let (a, _) = published_ab();
        let ev = eigenvalues(&a).unwrap();
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        assert!((sum - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(prod.norm() < 1e-12);
    }

    #[test]
    fn zeros_of_example_systems() {
        let (a, b) = published_ab();
        let h1 = m(&[&[1., 0., 1., -1.], &[0., 5., 6., -5.]]);
        let z = invariant_zeros(
            &StateSpaceSystem::new(a.clone(), b.clone(), Some(h1)).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!((z.finite_count, z.infinite_count), (2, 0));
        let want = [Complex64::new(-2.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert!(numkit::pair_roots(&z.finite_zeros, &want).unwrap() < 1e-10);

        let h2 = m(&[&[0., 2., 0., 1.], &[0., 0., 1., -1.]]);
        let z = invariant_zeros(&StateSpaceSystem::new(a, b, Some(h2)).unwrap(), &tol()).unwrap();
        assert_eq!((z.finite_count, z.infinite_count), (1, 1));
        assert!((z.finite_zeros[0] + 1.0).norm() < 1e-10);
    }

    #[test]
    fn hand_computed_three_by_three() {
        // det [[s-1, 0, 0], [0, s-2, -1], [0, 1, 0]] = s - 1
        let sys = StateSpaceSystem::new(
            m(&[&[1., 0.], &[0., 2.]]),
            m(&[&[0.], &[1.]]),
            Some(m(&[&[0., 1.]])),
        )
        .unwrap();
        let z = invariant_zeros(&sys, &tol()).unwrap();
        let (c, resid) = z
            .zero_polynomial
            .scalar_match(&Polynomial::new(vec![-1.0, 1.0]))
            .unwrap();
        assert!(c != 0.0 && resid < 1e-12);
        assert!((z.finite_zeros[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn non_square_and_degenerate() {
        let (a, b) = published_ab();
        let h = m(&[&[1., 0., 0., 0.]]);
        let sys = StateSpaceSystem::new(a.clone(), b.clone(), Some(h)).unwrap();
        assert_eq!(
            invariant_zeros(&sys, &tol()).unwrap_err(),
            Error::NotSquare {
                outputs: 1,
                inputs: 2
            }
        );
        let sys = StateSpaceSystem::new(a, b, Some(Matrix::zeros(2, 4))).unwrap();
        assert_eq!(
            invariant_zeros(&sys, &tol()).unwrap_err(),
            Error::DegenerateSystem
        );
    }

    #[test]
    fn constructor_checks_dimensions() {
        let (a, _) = published_ab();
        assert!(StateSpaceSystem::new(a.clone(), Matrix::zeros(3, 1), None).is_err());
        assert!(StateSpaceSystem::new(a, Matrix::zeros(4, 1), Some(Matrix::zeros(1, 3))).is_err());
    }
}
