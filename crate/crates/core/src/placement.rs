//! Pole assignment engines behind zero assignment.
//!
//! Both engines produce `H1_bar, H2_bar` such that
//!
//! ```text
//! det [[sI - A11, -A12], [H1_bar, H2_bar]] = psi(s)
//! ```
//!
//! The regular engine (`deg psi = n - r`) fixes a nonsingular `H2_bar` and
//! solves a state-feedback pole placement for `(A11, A12 H2_bar^{-1})`. The
//! deficient engine (`deg psi < n - r`) uses a rank-deficient `H2_bar`,
//! which is pole placement in the descriptor system with the remaining
//! eigenvalues at infinity.
//!
//! Multi-input problems are reduced to a single input `b = A12 g`. When no
//! direction `g` makes `(A11, b)` controllable (a non-cyclic `A11`), a random
//! preliminary feedback `A11 - A12 K0` is applied first and folded back in
//! through the unimodular column operation `H1_bar += H2_bar K0`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    complement_to_minors, faddeev, poly_of_matrix, rank, Matrix, Polynomial, Tolerance,
};
use crate::sysmodel::{controllable, krylov_rank, DescriptorTriple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlacementPath {
    Regular,
    Deficient,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlacementResult {
    pub h1_bar: Matrix,
    pub h2_bar: Matrix,
    /// `det [[sI - A11, -A12], [H1_bar, H2_bar]]` as computed.
    pub achieved_poly: Polynomial,
    /// `c` with `achieved_poly = c * psi`.
    pub scalar_factor: f64,
    pub path: PlacementPath,
    pub seed_used: u64,
}

/// Source of the input directions tried by the engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RandomPolicy {
    pub seed: u64,
    /// Directions tried per preliminary feedback, and number of
    /// preliminary feedbacks tried.
    pub max_attempts: usize,
    /// Try `e_1, ..., e_r` before random directions.
    pub deterministic_first: bool,
}

impl Default for RandomPolicy {
    fn default() -> Self {
        RandomPolicy {
            seed: 0,
            max_attempts: 16,
            deterministic_first: true,
        }
    }
}

impl RandomPolicy {
    pub fn with_seed(seed: u64) -> Self {
        RandomPolicy {
            seed,
            ..Default::default()
        }
    }

    fn check(&self, inputs: usize) -> Result<()> {
        if self.max_attempts == 0 || self.max_attempts < inputs {
            return Err(Error::InvalidPolicy(format!(
                "max_attempts = {} must be at least the input count {inputs}",
                self.max_attempts
            )));
        }
        Ok(())
    }
}

/// Matrix whose columns are `B_k b` for the adjugate coefficients of
/// `sI - a`, so that `coeff_map(a, b)^T f` lists the coefficients of
/// `f^T adj(sI - a) b` in ascending order.
pub fn coeff_map(a: &Matrix, b: &[f64]) -> Result<Matrix> {
    let m = a.rows();
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries, expected {m}",
            b.len()
        )));
    }
    let fad = faddeev(a)?;
    let bv = DVector::from_column_slice(b);
    let cols: Vec<DVector<f64>> = fad
        .adj_coeffs
        .iter()
        .map(|bk| bk.as_dmatrix() * &bv)
        .collect();
    if cols.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Ok(Matrix::wrap(DMatrix::from_columns(&cols)))
}

fn kalman(a: &DMatrix<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let mut cols = Vec::with_capacity(m);
    let mut v = b.clone();
    for _ in 0..m {
        let next = a * &v;
        cols.push(v);
        v = next;
    }
    DMatrix::from_columns(&cols)
}

/// Ackermann's formula: `f^T = e_m^T C^{-1} psi(a)` with `C` the Kalman
/// matrix of `(a, b)`, so that `charpoly(a - b f^T) = psi`. A non-monic
/// `psi` is divided by its leading coefficient.
pub fn ackermann(a: &Matrix, b: &[f64], psi: &Polynomial, tol: &Tolerance) -> Result<Vec<f64>> {
    let m = a.rows();
    if b.len() != m || psi.degree() != Some(m) {
        return Err(Error::DimensionMismatch(format!(
            "ackermann needs b of length {m} and a degree-{m} target"
        )));
    }
    let bv = DVector::from_column_slice(b);
    let rank = krylov_rank(
        a.as_dmatrix(),
        &DMatrix::from_column_slice(m, 1, b),
        tol.rank_tol,
    );
    if rank < m {
        return Err(Error::Uncontrollable { rank, n: m });
    }
    let ctrb = kalman(a.as_dmatrix(), &bv);
    let mut e_m = DVector::zeros(m);
    e_m[m - 1] = 1.0;
    let ct = ctrb.transpose();
    let lu = ct.clone().lu();
    let mut y = lu
        .solve(&e_m)
        .ok_or(Error::Uncontrollable { rank: m - 1, n: m })?;
    // one step of iterative refinement
    if let Some(dy) = lu.solve(&(&e_m - &ct * &y)) {
        y += dy;
    }
    let target = poly_of_matrix(&psi.monic()?, a);
    let f = target.as_dmatrix().transpose() * y;
    Ok(f.iter().copied().collect())
}

/// Enumerates candidate input directions: the standard basis first (when
/// asked), then seeded random draws.
struct Directions {
    rng: ChaCha8Rng,
    inputs: usize,
    next_basis: usize,
    deterministic_first: bool,
}

impl Directions {
    fn new(policy: &RandomPolicy, inputs: usize, round: usize) -> Self {
        let seed = policy.seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        Directions {
            rng: ChaCha8Rng::seed_from_u64(seed),
            inputs,
            next_basis: 0,
            deterministic_first: policy.deterministic_first,
        }
    }

    fn next(&mut self) -> Vec<f64> {
        if self.inputs == 1 {
            return vec![1.0];
        }
        if self.deterministic_first && self.next_basis < self.inputs {
            let mut g = vec![0.0; self.inputs];
            g[self.next_basis] = 1.0;
            self.next_basis += 1;
            return g;
        }
        (0..self.inputs)
            .map(|_| self.rng.gen_range(-1.0..1.0))
            .collect()
    }
}

/// Preliminary feedback for round `round`; zero in round 0. Entries are
/// drawn from {-2, -1, 1, 2} and scaled by `|A11| / |A12|`.
fn preliminary_feedback(policy: &RandomPolicy, a11: &Matrix, a12: &Matrix, round: usize) -> Matrix {
    let (m, r) = (a11.rows(), a12.cols());
    if round == 0 {
        return Matrix::zeros(r, m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed.wrapping_add(0xC0FF_EE00 + round as u64));
    let (na, nb) = (a11.norm_fro(), a12.norm_fro());
    let scale = if na > 0.0 && nb > 0.0 { na / nb } else { 1.0 };
    let choices = [-2.0, -1.0, 1.0, 2.0];
    let entries: Vec<f64> = (0..r * m)
        .map(|_| choices[rng.gen_range(0..choices.len())] * scale)
        .collect();
    Matrix::wrap(DMatrix::from_row_slice(r, m, &entries))
}

/// Accepted candidates compared within one round.
const CANDIDATES: usize = 4;

/// Keeps the accepted candidate with the smallest `|H1_bar|`.
#[derive(Default)]
struct Best {
    result: Option<PlacementResult>,
    seen: usize,
}

impl Best {
    /// Returns true once enough candidates have been seen.
    fn offer(&mut self, candidate: PlacementResult) -> bool {
        let better = self
            .result
            .as_ref()
            .is_none_or(|b| candidate.h1_bar.norm_fro() < b.h1_bar.norm_fro());
        if better {
            self.result = Some(candidate);
        }
        self.seen += 1;
        self.seen >= CANDIDATES
    }
}

/// `A12 g`, or `None` when it is negligible next to `|A12| |g|`, which
/// would drive the solved gain to roundoff-sized pivots.
fn project_input(a12: &Matrix, g: &[f64], tol: &Tolerance) -> Option<Vec<f64>> {
    let b: Vec<f64> = (a12 * &Matrix::column(g))
        .as_dmatrix()
        .iter()
        .copied()
        .collect();
    let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    (bn > tol.rank_tol * a12.norm_fro() * gn).then_some(b)
}

fn check_blocks(a11: &Matrix, a12: &Matrix) -> Result<()> {
    if !a11.is_square() || a12.rows() != a11.rows() || a12.cols() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "A11 must be m x m and A12 m x r, got {}x{} and {}x{}",
            a11.rows(),
            a11.cols(),
            a12.rows(),
            a12.cols()
        )));
    }
    Ok(())
}

fn require_controllable(a11: &Matrix, a12: &Matrix, tol: &Tolerance) -> Result<()> {
    let (ok, rank) = controllable(a11, a12, tol);
    if ok || a11.rows() == 0 {
        Ok(())
    } else {
        Err(Error::Uncontrollable {
            rank,
            n: a11.rows(),
        })
    }
}

fn achieved(
    a11: &Matrix,
    a12: &Matrix,
    h1: &Matrix,
    h2: &Matrix,
    psi: &Polynomial,
    tol: &Tolerance,
) -> Result<(Polynomial, f64, f64)> {
    let triple = DescriptorTriple::from_blocks(a11, a12)?;
    let poly = triple.closed_loop_det(&h1.hstack(h2), tol)?;
    let (c, resid) = poly.scalar_match(psi)?;
    Ok((poly, c, resid))
}

/// Regular engine: `deg psi = m`.
///
/// `H2_bar = diag(c, 1, ..., 1)` with `c` the leading coefficient of `psi`,
/// and `H1_bar = H2_bar K` where `det(sI - A11 + A12 K) = psi / c`.
/// Among the accepted candidates of a round, the smallest `H1_bar` wins.
pub fn place_regular(
    a11: &Matrix,
    a12: &Matrix,
    psi: &Polynomial,
    policy: &RandomPolicy,
    tol: &Tolerance,
) -> Result<PlacementResult> {
    check_blocks(a11, a12)?;
    let (m, r) = (a11.rows(), a12.cols());
    policy.check(r)?;
    let psi = psi.normalized();
    if psi.is_zero() {
        return Err(Error::ZeroTargetPolynomial);
    }
    if psi.degree() != Some(m) {
        return Err(Error::DimensionMismatch(format!(
            "regular placement needs a degree-{m} target, got degree {}",
            psi.degree().unwrap_or(0)
        )));
    }
    require_controllable(a11, a12, tol)?;
    let lead = psi.leading();
    let monic = psi.monic()?;
    let mut h2 = Matrix::identity(r).into_dmatrix();
    h2[(0, 0)] = lead;
    let h2 = Matrix::wrap(h2);

    if m == 0 {
        return Ok(PlacementResult {
            h1_bar: Matrix::zeros(r, 0),
            h2_bar: h2,
            achieved_poly: Polynomial::constant(lead),
            scalar_factor: 1.0,
            path: PlacementPath::Regular,
            seed_used: policy.seed,
        });
    }

    for round in 0..policy.max_attempts {
        let k0 = preliminary_feedback(policy, a11, a12, round);
        let a_eff = a11 - &(a12 * &k0);
        let mut dirs = Directions::new(policy, r, round);
        let mut best = Best::default();
        for _ in 0..policy.max_attempts {
            let g = dirs.next();
            let Some(b) = project_input(a12, &g, tol) else {
                continue;
            };
            let f = match ackermann(&a_eff, &b, &monic, tol) {
                Ok(f) => f,
                Err(Error::Uncontrollable { .. }) => continue,
                Err(e) => return Err(e),
            };
            let gain = &k0 + &(&Matrix::column(&g) * &Matrix::row(&f));
            let h1 = &h2 * &gain;
            let (poly, c, resid) = achieved(a11, a12, &h1, &h2, &psi, tol)?;
            if resid > tol.det_tol {
                continue;
            }
            let done = best.offer(PlacementResult {
                h1_bar: h1,
                h2_bar: h2.clone(),
                achieved_poly: poly,
                scalar_factor: c,
                path: PlacementPath::Regular,
                seed_used: policy.seed,
            });
            if done || r == 1 {
                break;
            }
        }
        if let Some(result) = best.result {
            return Ok(result);
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: policy.max_attempts * policy.max_attempts,
    })
}

/// Deficient engine: `deg psi < m`.
///
/// With `b = A12 g` and `f` solving `f^T adj(sI - A11) b = psi`, the choice
/// `H1_bar = [f^T; 0]`, `H2_bar = [0; C]` where `C` has signed minor vector
/// `g` makes the block determinant equal `f^T adj(sI - A11) A12 g` by
/// Laplace expansion along the first output row.
pub fn place_deficient(
    a11: &Matrix,
    a12: &Matrix,
    psi: &Polynomial,
    policy: &RandomPolicy,
    tol: &Tolerance,
) -> Result<PlacementResult> {
    check_blocks(a11, a12)?;
    let (m, r) = (a11.rows(), a12.cols());
    policy.check(r)?;
    let psi = psi.normalized();
    let degree = psi.degree().ok_or(Error::ZeroTargetPolynomial)?;
    if degree >= m {
        return Err(Error::DimensionMismatch(format!(
            "deficient placement needs degree < {m}, got {degree}"
        )));
    }
    require_controllable(a11, a12, tol)?;
    let rhs = DVector::from_fn(m, |k, _| psi.coeff(k));

    for round in 0..policy.max_attempts {
        let k0 = preliminary_feedback(policy, a11, a12, round);
        let a_eff = a11 - &(a12 * &k0);
        let mut dirs = Directions::new(policy, r, round);
        let mut best = Best::default();
        for _ in 0..policy.max_attempts {
            let g = dirs.next();
            let Some(b) = project_input(a12, &g, tol) else {
                continue;
            };
            let bmat = DMatrix::from_column_slice(m, 1, &b);
            if krylov_rank(a_eff.as_dmatrix(), &bmat, tol.rank_tol) < m {
                continue;
            }
            let map = coeff_map(&a_eff, &b)?;
            let Some(f) = map.as_dmatrix().transpose().lu().solve(&rhs) else {
                continue;
            };
            let c = if r == 1 {
                Matrix::zeros(0, 1)
            } else {
                complement_to_minors(&g, tol)?
            };
            let top = Matrix::row(f.as_slice()).vstack(&Matrix::zeros(r - 1, m));
            let h2 = Matrix::zeros(1, r).vstack(&c);
            let h1 = &top + &(&h2 * &k0);
            let (poly, scale, resid) = achieved(a11, a12, &h1, &h2, &psi, tol)?;
            if resid > tol.det_tol || rank(&h1.hstack(&h2), tol) < r {
                continue;
            }
            let done = best.offer(PlacementResult {
                h1_bar: h1,
                h2_bar: h2,
                achieved_poly: poly,
                scalar_factor: scale,
                path: PlacementPath::Deficient,
                seed_used: policy.seed,
            });
            if done || r == 1 {
                break;
            }
        }
        if let Some(result) = best.result {
            return Ok(result);
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: policy.max_attempts * policy.max_attempts,
    })
}
