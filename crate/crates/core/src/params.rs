//! Admissible `(alpha, beta)` pairs and the derived constants `a`, `b`, `c`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// The two parameter regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// `beta > alpha > 0`: both endpoints singular.
    Case1,
    /// `-1 < beta < alpha < 0`: both endpoints regular.
    Case2,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Case1 => "Case1",
            Case::Case2 => "Case2",
        })
    }
}

/// A validated parameter pair.
///
/// Fields are private so a `ParameterSet` can only come out of [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet<S> {
    alpha: S,
    beta: S,
    a: S,
    b: S,
    c: S,
    case: Case,
}

/// Checks `alpha, beta > -1`, `alpha != beta` and `sgn(alpha) = sgn(beta) != 0`,
/// requires the ordering of one of the two cases, then derives
/// `a = (beta - alpha)/2`, `b = (beta + alpha)/(beta - alpha)` and `c = b + 1/a`.
pub fn validate<S: Scalar>(alpha: S, beta: S) -> Result<ParameterSet<S>> {
    let minus_one = -S::one();
    for (name, value) in [("alpha", &alpha), ("beta", &beta)] {
        if *value <= minus_one {
            return Err(Error::Range {
                name,
                value: value.to_string(),
            });
        }
    }
    if alpha == beta {
        return Err(Error::Equality {
            value: alpha.to_string(),
        });
    }
    let both_positive = alpha > S::zero() && beta > S::zero();
    let both_negative = alpha.is_negative() && beta.is_negative();
    if !(both_positive || both_negative) {
        return Err(Error::Sign {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
        });
    }

    let case = if both_positive {
        Case::Case1
    } else {
        Case::Case2
    };
    let ordered = match case {
        Case::Case1 => beta > alpha,
        Case::Case2 => beta < alpha,
    };
    if !ordered {
        return Err(Error::Order {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
        });
    }

    let two = S::from_int(2);
    let a = (beta.clone() - alpha.clone()) / two;
    let b = (beta.clone() + alpha.clone()) / (beta.clone() - alpha.clone());
    let c = b.clone() + S::one() / a.clone();
    Ok(ParameterSet {
        alpha,
        beta,
        a,
        b,
        c,
        case,
    })
}

/// Parses two decimal or `p/q` strings and validates them exactly.
pub fn validate_str(alpha: &str, beta: &str) -> Result<ParameterSet<Rational>> {
    validate(alpha.parse::<Rational>()?, beta.parse::<Rational>()?)
}

/// Case tag of a validated set.
pub fn case_of<S>(ps: &ParameterSet<S>) -> Case {
    ps.case
}

impl<S: Scalar> ParameterSet<S> {
    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    pub fn case(&self) -> Case {
        self.case
    }

    /// `f64` snapshot for the floating point modules.
    pub fn to_f64(&self) -> FloatParams {
        FloatParams {
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            c: self.c.to_f64(),
            case: self.case,
        }
    }

    /// Re-validates the same `(alpha, beta)` in another backend.
    pub fn convert<T: Scalar>(&self) -> ParameterSet<T>
    where
        S: Into<Rational>,
    {
        let alpha = T::from_rational(&self.alpha.clone().into());
        let beta = T::from_rational(&self.beta.clone().into());
        validate(alpha, beta).expect("conversion preserves validity")
    }
}

impl ParameterSet<Rational> {
    /// Same parameters in the extended-precision backend.
    pub fn to_real(&self) -> ParameterSet<crate::scalar::Real> {
        self.convert()
    }
}

/// Plain `f64` copy of a parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub case: Case,
}
