use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Polynomial;
use crate::error::{Error, Result};

/// All complex roots of `p` with multiplicity.
///
/// Roots are the eigenvalues of the balanced companion matrix of the
/// normalized polynomial, refined by a few guarded Newton steps, and
/// returned sorted by real then imaginary part.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let p = p.normalized();
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = p.leading();
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i - 1, i)] = 1.0;
    }
    for k in 0..degree {
        companion[(degree - 1, k)] = -p.coeff(k) / lead;
    }
    balance_parlett_reinsch(&mut companion);
    let dp = p.derivative();
    let mut roots: Vec<Complex64> = super::linalg::eigenvalues_of(&companion)?
        .into_iter()
        .map(|z| polish(&p, &dp, z))
        .collect();
    for z in roots.iter_mut() {
        if z.im.abs() <= 1e-14 * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn polish(p: &Polynomial, dp: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut fz = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let fc = p.eval(cand).norm();
        if fc.partial_cmp(&fz) != Some(std::cmp::Ordering::Less) {
            break;
        }
        z = cand;
        fz = fc;
    }
    z
}

/// Pairs two root multisets by repeatedly matching the globally closest
/// remaining pair. Returns the largest paired distance, or `None` when the
/// multisets differ in size.
pub fn pair_roots(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for _ in 0..a.len() {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, za) in a.iter().enumerate().filter(|(i, _)| !used_a[*i]) {
            for (j, zb) in b.iter().enumerate().filter(|(j, _)| !used_b[*j]) {
                let d = (za - zb).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        used_a[best.1] = true;
        used_b[best.2] = true;
        worst = worst.max(best.0);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_from_example_one() {
        let r = poly_roots(&Polynomial::new(vec![2.0, 3.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn monomial_and_perfect_square() {
        assert_eq!(
            poly_roots(&Polynomial::new(vec![0.0, 1.0])).unwrap(),
            vec![c(0.0, 0.0)]
        );
        let r = poly_roots(&Polynomial::new(vec![1.0, -2.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-7));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(
            poly_roots(&Polynomial::zero()).unwrap_err(),
            Error::ZeroPolynomial
        );
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(poly_roots(&Polynomial::constant(4.0)).unwrap().is_empty());
    }

    #[test]
    fn complex_pair() {
        let r = poly_roots(&Polynomial::new(vec![5.0, -2.0, 1.0])).unwrap();
        assert!(pair_roots(&r, &[c(1.0, 2.0), c(1.0, -2.0)]).unwrap() < 1e-14);
    }

    #[test]
    fn pairing() {
        let a = [c(1.0, 0.0), c(2.0, 0.0)];
        let b = [c(2.1, 0.0), c(0.95, 0.0)];
        assert!((pair_roots(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(pair_roots(&a, &b[..1]), None);
    }
}
