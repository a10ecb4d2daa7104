//! Zero assignment for linear systems.
//!
//! Given a controllable `(A, B)` with `rank B = r` and a target polynomial
//! of degree at most `n - r`, [`assigner::assign_zeros`] builds an output
//! matrix `H` so that the square system `(A, B, H)` has exactly the target
//! as its zero polynomial.
//!
//! ```
//! use zeroassign::assigner::{assign_zeros, AssignmentRequest, Target};
//! use zeroassign::numkit::{Matrix, Polynomial};
//! use zeroassign::sysmodel::{invariant_zeros, StateSpaceSystem};
//!
//! let a = Matrix::from_rows(&[&[0., 1., 0.], &[0., 0., 1.], &[-6., -11., -6.]])?;
//! let b = Matrix::from_rows(&[&[0.], &[0.], &[1.]])?;
//! let sys = StateSpaceSystem::new(a, b, None)?;
//!
//! // a single zero at -4, one zero at infinity
//! let req = AssignmentRequest::new(sys.clone(), Target::Polynomial(Polynomial::new(vec![4.0, 1.0])));
//! let report = assign_zeros(&req)?;
//!
//! let zeros = invariant_zeros(&sys.with_output(report.h)?, &req.tol)?;
//! assert_eq!((zeros.finite_count, zeros.infinite_count), (1, 1));
//! assert!((zeros.finite_zeros[0].re + 4.0).abs() < 1e-8);
//! # Ok::<(), zeroassign::Error>(())
//! ```
//!
//! Modules, bottom up: [`numkit`] (matrices, polynomials, determinants,
//! roots), [`sysmodel`] (systems, zeros, controllability),
//! [`transform`] (coordinate reduction), [`placement`] (the two
//! placement engines), [`assigner`] (pipeline and verification) and
//! [`cli`].

pub mod assigner;
pub mod cli;
pub mod error;
pub mod numkit;
pub mod placement;
mod serde_util;
pub mod sysmodel;
pub mod transform;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/zeros.md")]
    pub mod zeros {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    pub mod reduction {}
    #[doc = include_str!("../../../book/src/placement.md")]
    pub mod placement {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
