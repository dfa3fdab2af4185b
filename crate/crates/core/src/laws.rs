//! Closed-form eigenvalue laws `lambda_n` for the index convention
//! "eigenpolynomial of degree n + 1".
//!
//! Two laws are registered. `note` is `n(alpha + beta + n)`. `shifted` is
//! `n(alpha + beta + n + 1)`, which is what the leading coefficient of the
//! eigen-equation forces for a degree-(n+1) solution. The pencil spectrum
//! decides between them; see [`crate::eigensolve::compare_law`].

use crate::params::ParameterSet;
use crate::registry::{Named, Registry};
use crate::scalar::Scalar;

/// Name of the law used when none is requested.
pub const DEFAULT_LAW: &str = "shifted";

pub trait EigenvalueLaw<S: Scalar>: Named + Send + Sync {
    /// Human readable closed form.
    fn formula(&self) -> &'static str;

    fn lambda(&self, ps: &ParameterSet<S>, n: u32) -> S;
}

/// `lambda_n = n(alpha + beta + n)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoteLaw;

/// `lambda_n = n(alpha + beta + n + 1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShiftedLaw;

impl Named for NoteLaw {
    fn name(&self) -> &'static str {
        "note"
    }

    fn describe(&self) -> String {
        "note: lambda_n = n(alpha+beta+n)".into()
    }
}

impl<S: Scalar> EigenvalueLaw<S> for NoteLaw {
    fn formula(&self) -> &'static str {
        "n(alpha+beta+n)"
    }

    fn lambda(&self, ps: &ParameterSet<S>, n: u32) -> S {
        lambda_formula(ps, n)
    }
}

impl Named for ShiftedLaw {
    fn name(&self) -> &'static str {
        "shifted"
    }

    fn describe(&self) -> String {
        "shifted: lambda_n = n(alpha+beta+n+1)".into()
    }
}

impl<S: Scalar> EigenvalueLaw<S> for ShiftedLaw {
    fn formula(&self) -> &'static str {
        "n(alpha+beta+n+1)"
    }

    fn lambda(&self, ps: &ParameterSet<S>, n: u32) -> S {
        let n = S::from_int(i64::from(n));
        n.clone() * (ps.alpha().clone() + ps.beta().clone() + n + S::one())
    }
}

/// `n(alpha + beta + n)`.
pub fn lambda_formula<S: Scalar>(ps: &ParameterSet<S>, n: u32) -> S {
    let n = S::from_int(i64::from(n));
    n.clone() * (ps.alpha().clone() + ps.beta().clone() + n)
}

/// All built-in laws, in a stable order.
pub fn law_registry<S: Scalar>() -> Registry<dyn EigenvalueLaw<S>> {
    Registry::<dyn EigenvalueLaw<S>>::new("eigenvalue law")
        .with(Box::new(NoteLaw))
        .with(Box::new(ShiftedLaw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;
    use crate::scalar::Rational;

    fn ps(a: (i64, i64), b: (i64, i64)) -> ParameterSet<Rational> {
        validate(Rational::new(a.0, a.1), Rational::new(b.0, b.1)).unwrap()
    }

    #[test]
    fn formula_examples() {
        let p13 = ps((1, 1), (3, 1));
        let p2 = ps((-1, 2), (-3, 4));
        assert_eq!(lambda_formula(&p13, 0), Rational::zero());
        assert_eq!(lambda_formula(&p2, 0), Rational::zero());
        assert_eq!(lambda_formula(&p13, 1), Rational::from_int(5));
        assert_eq!(lambda_formula(&p2, 2), Rational::new(3, 2));
    }

    #[test]
    fn shifted_law_values() {
        let p13 = ps((1, 1), (3, 1));
        let p2 = ps((-1, 2), (-3, 4));
        let law = ShiftedLaw;
        let got: Vec<_> = (0..5).map(|n| law.lambda(&p13, n)).collect();
        assert_eq!(got, [0, 6, 14, 24, 36].map(Rational::from_int));
        let got: Vec<_> = (0..5).map(|n| law.lambda(&p2, n)).collect();
        let want = [(0, 1), (3, 4), (7, 2), (33, 4), (15, 1)].map(|(p, q)| Rational::new(p, q));
        assert_eq!(got, want);
    }

    #[test]
    fn registry_lookup() {
        let reg = law_registry::<Rational>();
        assert_eq!(reg.names(), vec!["note", "shifted"]);
        assert!(reg.get(DEFAULT_LAW).is_ok());
        assert_eq!(reg.get("note").unwrap().formula(), "n(alpha+beta+n)");
        assert!(reg.get("gkm").is_err());
    }
}
