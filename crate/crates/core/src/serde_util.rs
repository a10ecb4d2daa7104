//! Serialization shapes for the report format: matrices as arrays of rows,
//! polynomials as ascending coefficient arrays, complex numbers as
//! `[re, im]` pairs.

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::numkit::{Matrix, Polynomial};

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

pub(crate) fn zeros<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}
