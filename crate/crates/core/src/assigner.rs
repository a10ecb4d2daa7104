//! End-to-end zero assignment.
//!
//! Given a controllable `(A, B)` with `rank B = r` and a target polynomial
//! of degree `mu <= n - r`, [`assign_zeros`] returns an `r x n` output
//! matrix `H` whose square system has exactly the target as its zero
//! polynomial, up to a nonzero constant. Every result is checked against
//! an independent determinant computation before it is returned.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    self, pair_roots, poly_roots, polymat_det, rank, Matrix, Polynomial, Tolerance,
};
use crate::placement::{place_deficient, place_regular, PlacementResult, RandomPolicy};
use crate::sysmodel::{
    controllable, eigenvalues, invariant_zeros, observable, StateSpaceSystem, ZeroReport,
};
use crate::transform::{build_transform, recover_h, select_permutation, TransformBundle};

/// What the caller wants the zeros to be.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Polynomial(Polynomial),
    /// Converted to the monic polynomial with these roots; complex zeros
    /// must come in conjugate pairs.
    Zeros(Vec<Complex64>),
}

impl Target {
    fn polynomial(&self) -> Result<Polynomial> {
        match self {
            Target::Polynomial(p) => Ok(p.clone()),
            Target::Zeros(z) => Polynomial::from_roots(z),
        }
    }
}

/// What to do when a target zero equals an eigenvalue of `A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum CollisionPolicy {
    #[default]
    Reject,
    Warn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentRequest {
    pub system: StateSpaceSystem,
    pub target: Target,
    pub policy: RandomPolicy,
    pub tol: Tolerance,
    pub eig_collision_policy: CollisionPolicy,
}

impl AssignmentRequest {
    pub fn new(system: StateSpaceSystem, target: Target) -> Self {
        AssignmentRequest {
            system,
            target,
            policy: RandomPolicy::default(),
            tol: Tolerance::default(),
            eig_collision_policy: CollisionPolicy::Reject,
        }
    }
}

/// Outcome of comparing a system's zero polynomial with a target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub zeros: ZeroReport,
    /// `c` with `det P(s) ~ c * target(s)`.
    pub scalar_factor: f64,
    /// `max_k |psi_k - c target_k| / max_k |psi_k|`.
    pub coefficient_error: f64,
    /// Largest distance between paired computed and target roots; `None`
    /// when roots were not compared (multiplicity above two).
    pub root_error: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssignmentReport {
    pub h: Matrix,
    pub target: Polynomial,
    pub bundle: TransformBundle,
    pub placement: PlacementResult,
    pub verification: Verification,
    pub observability: bool,
    pub rank_h: usize,
    /// Relative coefficient gap between `det P(s)` and the determinant of
    /// the transformed system matrix.
    pub equivalence_error: f64,
    pub warnings: Vec<String>,
}

impl AssignmentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Largest multiplicity among clustered roots.
fn max_multiplicity(roots: &[Complex64], tol: f64) -> usize {
    roots
        .iter()
        .map(|z| {
            roots
                .iter()
                .filter(|w| (*w - z).norm() <= tol * z.norm().max(1.0))
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Compares the zero polynomial of `sys` with `psi`.
pub fn verify_assignment(
    sys: &StateSpaceSystem,
    psi: &Polynomial,
    tol: &Tolerance,
) -> Result<Verification> {
    let target = psi.normalized();
    if target.is_zero() {
        return Err(Error::ZeroTargetPolynomial);
    }
    let zeros = invariant_zeros(sys, tol)?;
    let (scalar_factor, coefficient_error) = zeros.zero_polynomial.scalar_match(&target)?;
    let target_roots = poly_roots(&target)?;
    let root_error = match max_multiplicity(&target_roots, tol.root_tol) {
        0 | 1 => pair_roots(&zeros.finite_zeros, &target_roots).map(|e| (e, tol.root_tol)),
        2 => pair_roots(&zeros.finite_zeros, &target_roots).map(|e| (e, tol.root_tol.sqrt())),
        _ => None,
    };
    let roots_ok = match root_error {
        Some((e, limit)) => e <= limit,
        None => zeros.finite_count == target_roots.len(),
    };
    let passed = zeros.zero_polynomial.degree() == target.degree()
        && scalar_factor != 0.0
        && coefficient_error <= tol.det_tol
        && roots_ok;
    Ok(Verification {
        zeros,
        scalar_factor,
        coefficient_error,
        root_error: root_error.map(|(e, _)| e),
        passed,
    })
}

/// Eigenvalue of `a` that `z` coincides with, if any: `zI - a` is
/// numerically singular at `root_tol`.
pub fn eigenvalue_collision(a: &Matrix, z: Complex64, tol: &Tolerance) -> Option<Complex64> {
    let n = a.rows();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
        d - a[(i, j)]
    });
    let sv = numkit::svd::singular_values(&m);
    let smax = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin > tol.root_tol * smax {
        return None;
    }
    let nearest = eigenvalues(a).ok().and_then(|ev| {
        ev.into_iter()
            .min_by(|x, y| (x - z).norm().total_cmp(&(y - z).norm()))
    });
    Some(nearest.unwrap_or(z))
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        numkit::format_sig(z.re, 6)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!(
            "{}{sign}{}i",
            numkit::format_sig(z.re, 6),
            numkit::format_sig(z.im.abs(), 6)
        )
    }
}

/// Synthesizes `H` so that `(A, B, H)` has the requested zeros.
///
/// 1. `(A, B)` must be controllable and `B` of full column rank.
/// 2. Target zeros must avoid the eigenvalues of `A` (or be waved through
///    with a warning under [`CollisionPolicy::Warn`]).
/// 3. Pick `M`, build `N` and the transformed blocks.
/// 4. Solve for `H1_bar, H2_bar`: the regular engine when `mu = n - r`,
///    otherwise the deficient engine.
/// 5. Map back to `H` and verify.
pub fn assign_zeros(req: &AssignmentRequest) -> Result<AssignmentReport> {
    let tol = &req.tol;
    let sys = &req.system;
    let (n, r) = (sys.states(), sys.inputs());
    let mut warnings = Vec::new();
    if sys.h().is_some() {
        warnings.push("input system already has an output matrix; it is ignored".to_string());
    }

    let raw = req.target.polynomial()?;
    let psi = raw.normalized();
    if psi.is_zero() {
        return Err(Error::ZeroTargetPolynomial);
    }
    if psi.degree() < raw.degree() {
        warnings.push(format!(
            "target coefficients at the flush floor were dropped; degree reduced from {} to {}",
            raw.degree().unwrap_or(0),
            psi.degree().unwrap_or(0)
        ));
    }
    let mu = psi.degree().unwrap_or(0);
    if mu > n - r {
        return Err(Error::DegreeTooHigh {
            degree: mu,
            max: n - r,
        });
    }

    // step 1
    let rank_b = rank(sys.b(), tol);
    if rank_b < r {
        return Err(Error::RankDeficientB {
            rank: rank_b,
            inputs: r,
        });
    }
    let (ok, crank) = controllable(sys.a(), sys.b(), tol);
    if !ok {
        return Err(Error::Uncontrollable { rank: crank, n });
    }

    // step 2
    let target_roots = poly_roots(&psi)?;
    let mut collided = false;
    for &z in &target_roots {
        if let Some(lambda) = eigenvalue_collision(sys.a(), z, tol) {
            collided = true;
            match req.eig_collision_policy {
                CollisionPolicy::Reject => {
                    return Err(Error::EigenvalueCollision {
                        zero: fmt_complex(z),
                        eigenvalue: fmt_complex(lambda),
                    })
                }
                CollisionPolicy::Warn => warnings.push(format!(
                    "target zero {} coincides with eigenvalue {} of A; observability is not guaranteed",
                    fmt_complex(z),
                    fmt_complex(lambda)
                )),
            }
        }
    }

    // steps 3-4
    let m_perm = select_permutation(sys.b(), tol)?;
    let bundle = build_transform(sys.a(), sys.b(), &m_perm, tol)?;

    // step 5
    let placement = if mu < n - r {
        place_deficient(&bundle.a11_bar, &bundle.a12_bar, &psi, &req.policy, tol)?
    } else {
        place_regular(&bundle.a11_bar, &bundle.a12_bar, &psi, &req.policy, tol)?
    };

    // step 6
    let h = recover_h(&placement.h1_bar, &placement.h2_bar, &bundle)?;
    let closed = sys.with_output(h.clone())?;

    let verification = verify_assignment(&closed, &psi, tol)?;
    let observability = observable(sys.a(), &h, tol);
    let rank_h = rank(&h, tol);
    let equivalence_error = equivalence_gap(&closed, &bundle, tol)?;

    let mut problems = Vec::new();
    if !verification.passed {
        problems.push(format!(
            "zero polynomial {} does not match target {} (coefficient error {:e}, root error {:?})",
            verification.zeros.zero_polynomial,
            psi,
            verification.coefficient_error,
            verification.root_error
        ));
    }
    if rank_h != r {
        problems.push(format!("rank H = {rank_h}, expected {r}"));
    }
    if !observability {
        if collided {
            warnings.push("synthesized system is not observable".to_string());
        } else {
            problems.push("synthesized system is not observable".to_string());
        }
    }
    if equivalence_error > tol.det_tol {
        problems.push(format!(
            "det P and det P_bar differ by {equivalence_error:e}"
        ));
    }
    if !problems.is_empty() {
        return Err(Error::VerificationFailed(format!(
            "{}; H = {:?}; M = {:?}; H1_bar = {:?}; H2_bar = {:?}",
            problems.join("; "),
            h.to_rows(),
            bundle.m_perm.to_rows(),
            placement.h1_bar.to_rows(),
            placement.h2_bar.to_rows()
        )));
    }

    Ok(AssignmentReport {
        h,
        target: psi,
        bundle,
        placement,
        verification,
        observability,
        rank_h,
        equivalence_error,
        warnings,
    })
}

/// Relative coefficient gap between `det P(s)` and `det P_bar(s)`. The
/// transform multiplies `P(s)` by `diag(N_bar, I)` on the left and its
/// inverse on the right, so the two determinants are equal.
pub fn equivalence_gap(
    sys: &StateSpaceSystem,
    bundle: &TransformBundle,
    tol: &Tolerance,
) -> Result<f64> {
    let h = sys.h().ok_or(Error::MissingOutput)?;
    let n = sys.states();
    let original = polymat_det(
        |s| crate::sysmodel::rosenbrock(sys.a(), sys.b(), h, s),
        n,
        tol,
    )?;
    let (h1, h2) = bundle.forward_h(h);
    let h_bar = h1.hstack(&h2);
    let transformed = polymat_det(|s| bundle.transformed_rosenbrock_at(&h_bar, s), n, tol)?;
    Ok(transformed.relative_diff(&original))
}
