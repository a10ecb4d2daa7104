#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zeroassign::numkit::{rank, Matrix, Tolerance};
use zeroassign::sysmodel::{controllable, eigenvalues, StateSpaceSystem};

pub fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

pub fn published_a() -> Matrix {
    m(&[
        &[2., 1., 0., 0.],
        &[0., 1., 0., 1.],
        &[0., 2., 0., 0.],
        &[1., 1., 0., 0.],
    ])
}

pub fn published_b() -> Matrix {
    m(&[&[1., 0.], &[0., 0.], &[0., 1.], &[0., 1.]])
}

pub fn published_m() -> Matrix {
    m(&[
        &[0., 0., 1., 0.],
        &[0., 1., 0., 0.],
        &[1., 0., 0., 0.],
        &[0., 0., 0., 1.],
    ])
}

pub fn published_h1() -> Matrix {
    m(&[&[1., 0., 1., -1.], &[0., 5., 6., -5.]])
}

pub fn published_h2() -> Matrix {
    m(&[&[0., 2., 0., 1.], &[0., 0., 1., -1.]])
}

pub fn example_system() -> StateSpaceSystem {
    StateSpaceSystem::new(published_a(), published_b(), None).unwrap()
}

pub fn real(z: &[f64]) -> Vec<Complex64> {
    z.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_dmatrix(DMatrix::from_fn(rows, cols, |_, _| {
        rng.gen_range(-1.0..1.0)
    }))
    .unwrap()
}

pub fn integer(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i32, hi: i32) -> Matrix {
    Matrix::from_dmatrix(DMatrix::from_fn(rows, cols, |_, _| {
        rng.gen_range(lo..=hi) as f64
    }))
    .unwrap()
}

/// Controllable integer system with entries in [-3, 3] and full-rank B.
pub fn random_controllable(rng: &mut ChaCha8Rng, n: usize, r: usize) -> StateSpaceSystem {
    let tol = Tolerance::default();
    loop {
        let a = integer(rng, n, n, -3, 3);
        let b = integer(rng, n, r, -3, 3);
        if rank(&b, &tol) == r && controllable(&a, &b, &tol).0 {
            return StateSpaceSystem::new(a, b, None).unwrap();
        }
    }
}

/// `count` distinct integer zeros in [-6, 6], each at least 0.5 away from
/// every eigenvalue of `a`.
pub fn random_zero_set(rng: &mut ChaCha8Rng, a: &Matrix, count: usize) -> Vec<Complex64> {
    let eig = eigenvalues(a).unwrap();
    let mut pool: Vec<f64> = (-6..=6)
        .map(f64::from)
        .filter(|&z| eig.iter().all(|l| (l - z).norm() >= 0.5))
        .collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(0..pool.len());
        out.push(Complex64::new(pool.swap_remove(k), 0.0));
    }
    out
}

/// Brute-force Leibniz determinant.
pub fn leibniz_det(m: &Matrix) -> f64 {
    fn perms(k: usize) -> Vec<(Vec<usize>, f64)> {
        if k == 0 {
            return vec![(vec![], 1.0)];
        }
        let mut out = Vec::new();
        for (p, sign) in perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                // inserting at pos moves the new element past (len - pos) others
                let flips = p.len() - pos;
                out.push((q, if flips % 2 == 0 { sign } else { -sign }));
            }
        }
        out
    }
    let n = m.rows();
    perms(n)
        .into_iter()
        .map(|(p, sign)| sign * (0..n).map(|i| m[(i, p[i])]).product::<f64>())
        .sum()
}
