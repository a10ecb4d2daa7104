//! Dense real matrix and polynomial kernel.

mod faddeev;
pub mod linalg;
mod matrix;
mod minors;
mod poly;
mod polydet;
mod roots;
pub(crate) mod svd;

pub use faddeev::{faddeev, poly_of_matrix, Faddeev};
pub use linalg::{det, inverse, norm2, rank, solve, Tolerance};
pub use matrix::{format_sig, Matrix};
pub use minors::{complement_to_minors, signed_minor_vector};
pub use poly::{Polynomial, COEFF_FLOOR};
pub use polydet::{pencil_at, polymat_det, polymat_det_on_circle, CMatrix};
pub use roots::{pair_roots, poly_roots};
