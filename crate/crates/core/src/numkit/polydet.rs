use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Polynomial, Tolerance};
use crate::error::{Error, Result};

/// Complex dense matrix, the value type returned by polynomial-matrix
/// evaluators.
pub type CMatrix = DMatrix<Complex64>;

/// Angular offset of the sample grid, keeps samples off the real axis.
const GRID_PHASE: f64 = 0.5;

/// Determinant of a square polynomial matrix, recovered as a polynomial.
///
/// `evaluate(s)` must return the matrix value at `s`. The determinant is
/// sampled at `degree_bound + 1` points on the unit circle and interpolated
/// by an inverse DFT; one extra point off the grid is used to check the
/// interpolant. Coefficients below `COEFF_FLOOR` of the largest one are
/// flushed to zero. If every sample is below `rank_tol` times the
/// Hadamard bound of its matrix, the zero polynomial is returned.
pub fn polymat_det<F>(evaluate: F, degree_bound: usize, tol: &Tolerance) -> Result<Polynomial>
where
    F: Fn(Complex64) -> CMatrix,
{
    polymat_det_on_circle(evaluate, degree_bound, 1.0, tol)
}

/// [`polymat_det`] with the sample circle radius chosen by the caller.
pub fn polymat_det_on_circle<F>(
    evaluate: F,
    degree_bound: usize,
    radius: f64,
    tol: &Tolerance,
) -> Result<Polynomial>
where
    F: Fn(Complex64) -> CMatrix,
{
    assert!(
        radius > 0.0 && radius.is_finite(),
        "radius must be positive"
    );
    let npts = degree_bound + 1;
    let step = 2.0 * PI / npts as f64;
    let phase = GRID_PHASE * step;
    let mut hadamard = 0.0f64;
    let values: Vec<Complex64> = (0..npts)
        .map(|j| {
            let z = Complex64::from_polar(radius, phase + step * j as f64);
            let m = evaluate(z);
            hadamard = hadamard.max(hadamard_bound(&m));
            det_complex(m)
        })
        .collect();
    // numerically singular at every sample: the determinant vanishes identically
    if values.iter().all(|v| v.norm() <= tol.rank_tol * hadamard) {
        return Ok(Polynomial::zero());
    }

    let mut coeffs = Vec::with_capacity(npts);
    for k in 0..npts {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -step * (j * k % npts) as f64);
        }
        let scale = Complex64::from_polar(radius.powi(k as i32), phase * k as f64);
        coeffs.push((acc / npts as f64 / scale).re);
    }
    let raw = Polynomial::new(coeffs);

    // held-out point: different radius, angle not on the grid
    let z = Complex64::from_polar(0.83 * radius, 0.7 + phase);
    let actual = det_complex(evaluate(z));
    let predicted = raw.eval(z);
    let magnitude: f64 = raw
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * z.norm().powi(k as i32))
        .sum::<f64>()
        .max(actual.norm());
    let residual = if magnitude == 0.0 {
        0.0
    } else {
        (actual - predicted).norm() / magnitude
    };
    if residual > tol.det_tol {
        return Err(Error::DegreeOverflow { residual });
    }
    Ok(raw.normalized())
}

/// Product of row norms, an upper bound on `|det m|`.
fn hadamard_bound(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}

fn det_complex(m: CMatrix) -> Complex64 {
    assert!(m.is_square(), "polynomial matrix must be square");
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.lu().determinant()
}

/// `s*e - a` evaluated at `s`, for real `e` and `a`.
pub fn pencil_at(e: &DMatrix<f64>, a: &DMatrix<f64>, s: Complex64) -> CMatrix {
    assert_eq!(e.shape(), a.shape(), "pencil shape mismatch");
    CMatrix::from_fn(e.nrows(), e.ncols(), |i, j| s * e[(i, j)] - a[(i, j)])
}
