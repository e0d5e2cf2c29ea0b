use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::C64;

/// Polynomial over the complex numbers in the monomial basis, coefficients
/// ascending. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial, dropping exactly-zero trailing coefficients.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `p(z) = z`.
    pub fn identity() -> Self {
        Self::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    /// `p(z) = z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        Self { coeffs: c }
    }

    /// `p(z) = s z + c`.
    pub fn affine(s: C64, c: C64) -> Self {
        Self::new(vec![c, s])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `p(A) b` by Horner's scheme on vectors.
    pub fn eval_matrix_vector(&self, a: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
        self.coeffs
            .iter()
            .rev()
            .fold(DVector::zeros(b.len()), |acc, &c| a * acc + b * c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(q(z))`.
    pub fn compose(&self, inner: &ComplexPolynomial) -> Self {
        let mut acc = Self::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c);
        }
        acc
    }

    /// `p(z)^k`.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(C64::new(1.0, 0.0));
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `max |p(z)|` over the given points.
    pub fn max_abs_on(&self, points: &[C64]) -> f64 {
        points.iter().map(|&z| self.eval(z).norm()).fold(0.0, f64::max)
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Self) -> ComplexPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

/// Finite Laurent polynomial `Σ_{k=lo}^{hi} c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial {
    lowest: i64,
    coeffs: Vec<C64>,
}

impl LaurentPolynomial {
    /// `coeffs[j]` multiplies `z^{lowest + j}`.
    pub fn new(lowest: i64, coeffs: Vec<C64>) -> Self {
        Self { lowest, coeffs }
    }

    pub fn lowest_power(&self) -> i64 {
        self.lowest
    }

    pub fn highest_power(&self) -> i64 {
        self.lowest + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> C64 {
        usize::try_from(k - self.lowest)
            .ok()
            .and_then(|j| self.coeffs.get(j).copied())
            .unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let head = self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c);
        head * z.powi(self.lowest as i32)
    }

    /// Terms with `k ≥ 0`, as an ordinary polynomial in `z`.
    pub fn nonnegative_part(&self) -> ComplexPolynomial {
        let top = self.highest_power();
        if top < 0 {
            return ComplexPolynomial::zero();
        }
        ComplexPolynomial::new((0..=top).map(|k| self.coeff(k)).collect())
    }

    /// Terms with `k < 0`, as a polynomial in `w = 1/z` without constant term.
    pub fn negative_part(&self) -> ComplexPolynomial {
        if self.lowest >= 0 {
            return ComplexPolynomial::zero();
        }
        let depth = (-self.lowest) as usize;
        let mut c = vec![C64::new(0.0, 0.0); depth + 1];
        for (j, slot) in c.iter_mut().enumerate().skip(1) {
            *slot = self.coeff(-(j as i64));
        }
        ComplexPolynomial::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn horner_matches_definition() {
        let p = ComplexPolynomial::new(vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(-1.0, 0.5)]);
        let z = c64(0.3, -0.7);
        let direct = p.coeffs()[0] + p.coeffs()[1] * z + p.coeffs()[2] * z * z;
        assert!((p.eval(z) - direct).norm() < 1e-15);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = ComplexPolynomial::new(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(ComplexPolynomial::new(vec![c64(0.0, 0.0)]).is_zero());
        assert_eq!(ComplexPolynomial::zero().degree(), None);
    }

    #[test]
    fn composition_and_power() {
        // (1 + w) ∘ (z^2) = 1 + z^2
        let p = ComplexPolynomial::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let q = ComplexPolynomial::monomial(2);
        let r = p.compose(&q);
        assert_eq!(r.coeffs(), &[c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let s = p.pow(3);
        assert_eq!(s.coeffs(), &[c64(1.0, 0.0), c64(3.0, 0.0), c64(3.0, 0.0), c64(1.0, 0.0)]);
    }

    #[test]
    fn matrix_evaluation() {
        let a = DMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0)]);
        let b = DVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
        let p = ComplexPolynomial::new(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let direct = &b + &a * &a * &a * &b;
        assert!((p.eval_matrix_vector(&a, &b) - direct).norm() < 1e-14);
    }

    #[test]
    fn laurent_split() {
        let l = LaurentPolynomial::new(-2, vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0), c64(4.0, 0.0)]);
        let z = c64(0.6, 0.8);
        let direct = z.powi(-2) + z.inv() * 2.0 + 3.0 + z * 4.0;
        assert!((l.eval(z) - direct).norm() < 1e-13);
        let pos = l.nonnegative_part();
        let neg = l.negative_part();
        assert!((pos.eval(z) + neg.eval(z.inv()) - direct).norm() < 1e-13);
        assert_eq!(neg.coeff(0), c64(0.0, 0.0));
        assert_eq!(l.coeff(-3), c64(0.0, 0.0));
    }
}
