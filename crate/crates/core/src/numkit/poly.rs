use std::fmt;

use num_complex::Complex64;

use super::matrix::format_sig;
use crate::error::{Error, Result};

/// Relative floor below which coefficients are flushed to zero when a
/// polynomial is normalized.
pub const COEFF_FLOOR: f64 = 1e-9;

/// Real polynomial with coefficients in ascending degree order.
///
/// Exact trailing zeros are always trimmed, so the zero polynomial has an
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// Monic polynomial with the given roots. Complex roots must appear in
    /// conjugate pairs, otherwise [`Error::InvalidTarget`] is returned.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for &z in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (k, &c) in acc.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * z;
            }
            acc = next;
        }
        let scale = acc.iter().map(|c| c.norm()).fold(1.0_f64, f64::max);
        if acc.iter().any(|c| c.im.abs() > 1e-12 * scale) {
            return Err(Error::InvalidTarget(
                "complex zeros must come in conjugate pairs".into(),
            ));
        }
        Ok(Polynomial::new(acc.iter().map(|c| c.re).collect()))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()))
    }

    /// Flushes coefficients whose magnitude is at most `floor` times the
    /// largest one and trims the result.
    pub fn normalized_with(&self, floor: f64) -> Polynomial {
        let cap = self.max_abs_coeff();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c.abs() <= floor * cap { 0.0 } else { c })
            .collect();
        Polynomial::new(coeffs)
    }

    /// [`Self::normalized_with`] at [`COEFF_FLOOR`].
    pub fn normalized(&self) -> Polynomial {
        self.normalized_with(COEFF_FLOOR)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(1.0 / self.leading()))
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficient `k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Least-squares scalar `c` minimising `|self - c * other|`, together
    /// with the residual `max_k |self_k - c * other_k| / max_k |self_k|`.
    pub fn scalar_match(&self, other: &Polynomial) -> Result<(f64, f64)> {
        if other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..len {
            num += self.coeff(k) * other.coeff(k);
            den += other.coeff(k) * other.coeff(k);
        }
        let c = num / den;
        let cap = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        let resid = (0..len)
            .map(|k| (self.coeff(k) - c * other.coeff(k)).abs())
            .fold(0.0, f64::max)
            / cap;
        Ok((c, resid))
    }

    /// Largest coefficient difference relative to the largest coefficient
    /// magnitude of `reference`.
    pub fn relative_diff(&self, reference: &Polynomial) -> f64 {
        let len = self.coeffs.len().max(reference.coeffs.len());
        let cap = reference.max_abs_coeff().max(f64::MIN_POSITIVE);
        (0..len)
            .map(|k| (self.coeff(k) - reference.coeff(k)).abs())
            .fold(0.0, f64::max)
            / cap
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = format_sig(c.abs(), 6);
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag == "1" && k > 0 {
                String::new()
            } else {
                mag
            };
            match k {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}s")?,
                _ => write!(f, "{coef}s^{k}")?,
            }
        }
        Ok(())
    }
}
