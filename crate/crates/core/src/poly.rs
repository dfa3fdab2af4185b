//! Dense univariate polynomials over a [`Scalar`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Real, Scalar};

/// Polynomial with coefficients stored in ascending degree.
///
/// Trailing zeros are always stripped, so the zero polynomial has an empty
/// coefficient vector and [`Polynomial::degree`] returns `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(S::one())
    }

    /// `x`
    pub fn x() -> Self {
        Polynomial::new(vec![S::zero(), S::one()])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = S::one();
        Polynomial { coeffs }
    }

    /// `x - r`
    pub fn linear_root(r: S) -> Self {
        Polynomial::new(vec![-r, S::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| S::from_int(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Polynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Polynomial::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = a.clone() * b.clone();
                let slot = &mut coeffs[i + j];
                *slot = slot.clone() + prod;
            }
        }
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: &S) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn differentiate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * S::from_int(k as i64))
            .collect();
        Polynomial::new(coeffs)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => {
                let inv = S::one() / lead.clone();
                self.scale(&inv)
            }
            None => Polynomial::zero(),
        }
    }

    /// Coefficient-wise conversion to the extended-precision backend.
    pub fn to_real(&self) -> Polynomial<Real> {
        Polynomial::new(self.coeffs.iter().map(Scalar::to_real).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }

    /// Evaluates at an `f64` point in extended precision and rounds the
    /// result. Avoids the cancellation a plain `f64` Horner loop suffers on
    /// high-degree polynomials with large coefficients.
    pub fn evaluate_f64(&self, x: f64) -> f64 {
        self.evaluate_real(&Real::from_f64(x)).to_f64()
    }

    pub fn evaluate_real(&self, x: &Real) -> Real {
        self.coeffs
            .iter()
            .rev()
            .fold(Real::zero(), |acc, c| acc * x.clone() + c.to_real())
    }
}

impl Polynomial<Rational> {
    /// Conversion of exact coefficients to any backend.
    pub fn convert<T: Scalar>(&self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(T::from_rational).collect())
    }
}

impl<S: Scalar> Add for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: Self) -> Polynomial<S> {
        Polynomial::add(self, rhs)
    }
}

impl<S: Scalar> Sub for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: Self) -> Polynomial<S> {
        Polynomial::sub(self, rhs)
    }
}

impl<S: Scalar> Mul for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: Self) -> Polynomial<S> {
        Polynomial::mul(self, rhs)
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

/// Space-separated ascending coefficients; the zero polynomial prints as `0`.
impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Polynomial<Rational> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<Rational>>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = Polynomial<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn add_examples() {
        assert!(P::from_ints(&[1, 1]).add(&P::from_ints(&[-1, -1])).is_zero());
        assert_eq!(P::x().add(&P::monomial(2)), P::from_ints(&[0, 1, 1]));
        assert_eq!(P::one().add(&P::zero()), P::one());
    }

    #[test]
    fn mul_examples() {
        let c = q(3, 7);
        let lhs = P::linear_root(c.clone()).mul(&P::linear_root(-c.clone()));
        let rhs = P::new(vec![-(c.clone() * c), Rational::zero(), Rational::one()]);
        assert_eq!(lhs, rhs);
        let p = P::from_ints(&[2, -1, 5]);
        assert_eq!(p.mul(&P::one()), p);
        assert!(p.mul(&P::zero()).is_zero());
    }

    #[test]
    fn differentiate_examples() {
        assert_eq!(P::linear_root(q(5, 2)).differentiate(), P::one());
        assert_eq!(P::monomial(2).differentiate(), P::from_ints(&[0, 2]));
        assert!(P::constant(q(9, 4)).differentiate().is_zero());
    }

    #[test]
    fn evaluate_examples() {
        let c = q(-3, 1);
        assert!(P::linear_root(c.clone()).evaluate(&c).is_zero());
        let p = P::from_ints(&[-1, 0, 1]);
        assert!(p.evaluate(&Rational::one()).is_zero());
        assert!(p.evaluate(&-Rational::one()).is_zero());
        assert_eq!(P::one().evaluate(&q(17, 3)), Rational::one());
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        assert_eq!(P::zero().degree(), None);
        assert_eq!(P::new(vec![Rational::zero(); 4]).degree(), None);
        assert_eq!(P::from_ints(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(P::zero().monic().is_zero());
    }

    #[test]
    fn text_format() {
        let p = P::new(vec![q(1, 2), q(-3, 1), Rational::zero(), q(7, 5)]);
        assert_eq!(p.to_string(), "1/2 -3 0 7/5");
        assert_eq!("1/2 -3 0 7/5".parse::<P>().unwrap(), p);
        assert_eq!(P::zero().to_string(), "0");
        assert!("0".parse::<P>().unwrap().is_zero());
        assert!("1 x".parse::<P>().is_err());
    }

    #[test]
    fn extended_evaluation_matches_exact() {
        let p = P::new(vec![q(1, 3), q(-7, 2), q(5, 9), q(11, 4)]);
        let x = 0.3125;
        let exact = p.evaluate(&"0.3125".parse().unwrap()).to_f64();
        assert_eq!(p.evaluate_f64(x), exact);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn poly() -> impl Strategy<Value = P> {
        prop::collection::vec(small_rational(), 0..7).prop_map(P::new)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly(), b in poly(), c in poly()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn degree_is_additive(a in poly(), b in poly()) {
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!(a.mul(&b).degree(), Some(da + db));
            }
        }

        #[test]
        fn product_rule(a in poly(), b in poly()) {
            let lhs = a.mul(&b).differentiate();
            let rhs = a.differentiate().mul(&b).add(&a.mul(&b.differentiate()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn text_round_trip(a in poly()) {
            prop_assert_eq!(a.to_string().parse::<P>().unwrap(), a);
        }
    }
}
