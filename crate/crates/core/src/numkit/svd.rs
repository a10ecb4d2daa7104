//! One-sided Jacobi singular value decomposition.
//!
//! Columns are rotated pairwise until they are mutually orthogonal; the
//! resulting column norms are the singular values and the normalized
//! columns are left singular vectors.

use nalgebra::{ComplexField, DMatrix, DVector};

const MAX_SWEEPS: usize = 80;

/// `m V` for a unitary `V` chosen so that the columns are orthogonal.
fn orthogonalize<T: ComplexField<RealField = f64>>(mut a: DMatrix<T>) -> DMatrix<T> {
    let (rows, n) = a.shape();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.clone().modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate a_p against e^{-i arg gamma} a_q, whose inner product is real
                let phase = gamma.unscale(g).conjugate();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let ap = a[(i, p)].clone();
                    let aq = phase.clone() * a[(i, q)].clone();
                    a[(i, p)] = ap.clone().scale(c) - aq.clone().scale(s);
                    a[(i, q)] = ap.scale(s) + aq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    a
}

fn sorted_norms<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Vec<(f64, usize)> {
    let mut norms: Vec<(f64, usize)> = a.column_iter().map(|c| c.norm()).zip(0..).collect();
    norms.sort_by(|x, y| y.0.total_cmp(&x.0));
    norms
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub(crate) fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    let k = m.nrows().min(m.ncols());
    let work = if m.ncols() > m.nrows() {
        m.adjoint()
    } else {
        m.clone()
    };
    sorted_norms(&orthogonalize(work))
        .into_iter()
        .take(k)
        .map(|(s, _)| s)
        .collect()
}

/// Singular values in descending order with their unit left singular
/// vectors; zero singular values are dropped.
pub(crate) fn left_singular<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
) -> Vec<(f64, DVector<T>)> {
    let a = orthogonalize(m.clone());
    sorted_norms(&a)
        .into_iter()
        .take(m.nrows())
        .filter(|&(s, _)| s > 0.0)
        .map(|(s, j)| (s, a.column(j).unscale(s)))
        .collect()
}
