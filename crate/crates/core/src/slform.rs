//! The Sturm-Liouville coefficients `p`, `q`, `w`, exact application of the
//! polynomialised differential operator, and the symplectic form.
//!
//! The eigen-equation
//!
//! ```text
//! (x^2 - 1) y'' + 2a (1 - b x)/(b - x) [(x - c) y' - y] = lambda y
//! ```
//!
//! is multiplied through by `b - x` so that both sides are polynomial in `x`:
//! `T[y] = lambda B[y]` with `B[y] = (b - x) y`. Multiplying it by the weight
//! `w` instead gives the divergence form `-(p y')' + q y = lambda w y`, where
//!
//! ```text
//! w = (1-x)^alpha (1+x)^beta / (x-b)^2
//! p = (1-x)^(alpha+1) (1+x)^(beta+1) / (x-b)^2
//! q = 2a (1 - b x) (1-x)^alpha (1+x)^beta / (x-b)^3
//! ```
//!
//! The historical printed potential carries an extra factor `(x - c)` and a
//! sign flip; it is kept as [`PotentialForm::Printed`] so reports can show
//! that it does not satisfy the identity.

use crate::error::{Error, Result};
use crate::params::{FloatParams, ParameterSet};
use crate::poly::Polynomial;
use crate::scalar::{precision_bits, Real, Scalar};

/// `prefactor(x) (1-x)^e1 (1+x)^e2 (x-b)^e3`
#[derive(Clone, Debug, PartialEq)]
pub struct PowerFactor<S> {
    pub exponent_one_minus_x: S,
    pub exponent_one_plus_x: S,
    pub exponent_x_minus_b: i32,
    pub prefactor: Polynomial<S>,
}

impl<S: Scalar> PowerFactor<S> {
    /// Pointwise value in extended precision. At `x = +-1` the factor vanishes
    /// if the matching exponent is positive and is a domain error otherwise.
    pub fn evaluate(&self, b: &S, x: &Real) -> Result<Real> {
        let one = Real::one();
        let one_minus_x = one.clone() - x.clone();
        let one_plus_x = one + x.clone();
        if one_minus_x.is_negative() || one_plus_x.is_negative() {
            return Err(domain(x, "a power factor"));
        }
        let e1 = self.exponent_one_minus_x.to_real();
        let e2 = self.exponent_one_plus_x.to_real();
        let left = endpoint_power(&one_minus_x, &e1, x)?;
        let right = endpoint_power(&one_plus_x, &e2, x)?;
        let pole = (x.clone() - b.to_real()).powi(self.exponent_x_minus_b);
        Ok(self.prefactor.evaluate_real(x) * left * right * pole)
    }
}

fn endpoint_power(base: &Real, exponent: &Real, x: &Real) -> Result<Real> {
    if base.is_zero() {
        return if exponent.is_negative() {
            Err(domain(x, "a negative endpoint exponent"))
        } else if exponent.is_zero() {
            Ok(Real::one())
        } else {
            Ok(Real::zero())
        };
    }
    Ok(base.powf(exponent))
}

fn domain(x: &Real, what: &'static str) -> Error {
    Error::Domain {
        x: x.to_decimal_string(20),
        what,
    }
}

/// Which of the three coefficient functions to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    P,
    Q,
    W,
}

/// Which potential `q` to use in the divergence form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialForm {
    /// `q = 2a(1 - bx)(1-x)^alpha(1+x)^beta/(x-b)^3`, obtained by multiplying
    /// the `-y` term of the eigen-equation by `w`.
    Corrected,
    /// `q = 2a((1 - bx)/(b - x))(x - c) w`, the historical printed form.
    Printed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTriple<S> {
    pub b: S,
    pub p: PowerFactor<S>,
    pub q: PowerFactor<S>,
    pub w: PowerFactor<S>,
}

pub fn coefficient_triple<S: Scalar>(ps: &ParameterSet<S>) -> CoefficientTriple<S> {
    CoefficientTriple {
        b: ps.b().clone(),
        p: PowerFactor {
            exponent_one_minus_x: ps.alpha().clone() + S::one(),
            exponent_one_plus_x: ps.beta().clone() + S::one(),
            exponent_x_minus_b: -2,
            prefactor: Polynomial::one(),
        },
        q: potential(ps, PotentialForm::Corrected),
        w: PowerFactor {
            exponent_one_minus_x: ps.alpha().clone(),
            exponent_one_plus_x: ps.beta().clone(),
            exponent_x_minus_b: -2,
            prefactor: Polynomial::one(),
        },
    }
}

/// The potential in the requested form.
pub fn potential<S: Scalar>(ps: &ParameterSet<S>, form: PotentialForm) -> PowerFactor<S> {
    let two_a = S::from_int(2) * ps.a().clone();
    // 2a (1 - b x)
    let base = Polynomial::new(vec![two_a.clone(), -(two_a * ps.b().clone())]);
    let prefactor = match form {
        PotentialForm::Corrected => base,
        // (1 - bx)/(b - x) = -(1 - bx)/(x - b)
        PotentialForm::Printed => -&base.mul(&Polynomial::linear_root(ps.c().clone())),
    };
    PowerFactor {
        exponent_one_minus_x: ps.alpha().clone(),
        exponent_one_plus_x: ps.beta().clone(),
        exponent_x_minus_b: -3,
        prefactor,
    }
}

impl<S: Scalar> CoefficientTriple<S> {
    pub fn get(&self, which: Coefficient) -> &PowerFactor<S> {
        match which {
            Coefficient::P => &self.p,
            Coefficient::Q => &self.q,
            Coefficient::W => &self.w,
        }
    }
}

/// Value of `p`, `q` or `w` at `x`.
pub fn eval_coefficient<S: Scalar>(
    ct: &CoefficientTriple<S>,
    which: Coefficient,
    x: &Real,
) -> Result<Real> {
    ct.get(which).evaluate(&ct.b, x)
}

/// `T[y]` and `B[y]` of the polynomialised operator.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorImage<S> {
    pub t: Polynomial<S>,
    pub b: Polynomial<S>,
}

/// Fixed polynomial factors of the operator for one parameter set.
#[derive(Clone, Debug)]
pub(crate) struct OperatorFactors<S> {
    /// (x^2 - 1)(b - x)
    second: Polynomial<S>,
    /// 2a (1 - b x)
    drift: Polynomial<S>,
    /// x - c
    x_minus_c: Polynomial<S>,
    /// b - x
    b_minus_x: Polynomial<S>,
}

impl<S: Scalar> OperatorFactors<S> {
    pub(crate) fn new(ps: &ParameterSet<S>) -> Self {
        let b_minus_x = Polynomial::new(vec![ps.b().clone(), -S::one()]);
        let x2m1 = Polynomial::new(vec![-S::one(), S::zero(), S::one()]);
        let two_a = S::from_int(2) * ps.a().clone();
        OperatorFactors {
            second: x2m1.mul(&b_minus_x),
            drift: Polynomial::new(vec![two_a.clone(), -(two_a * ps.b().clone())]),
            x_minus_c: Polynomial::linear_root(ps.c().clone()),
            b_minus_x,
        }
    }

    pub(crate) fn apply(&self, y: &Polynomial<S>) -> OperatorImage<S> {
        let dy = y.differentiate();
        let d2y = dy.differentiate();
        let bracket = self.x_minus_c.mul(&dy).sub(y);
        let t = self.second.mul(&d2y).add(&self.drift.mul(&bracket));
        OperatorImage {
            t,
            b: self.b_minus_x.mul(y),
        }
    }
}

/// `T[y] = (x^2-1)(b-x) y'' + 2a(1-bx)[(x-c) y' - y]` and `B[y] = (b-x) y`,
/// computed exactly in polynomial arithmetic.
pub fn apply_operator<S: Scalar>(ps: &ParameterSet<S>, y: &Polynomial<S>) -> OperatorImage<S> {
    OperatorFactors::new(ps).apply(y)
}

/// `p'(x) = 2a(1 - bx)(x - c) w(x)/(x - b)`, the identity that turns the
/// eigen-equation into divergence form.
pub fn p_derivative<S: Scalar>(ps: &ParameterSet<S>, x: &Real) -> Result<Real> {
    let ct = coefficient_triple(ps);
    let w = ct.w.evaluate(&ct.b, x)?;
    let a = ps.a().to_real();
    let b = ps.b().to_real();
    let c = ps.c().to_real();
    let two = Real::from_int(2);
    Ok(two * a * (Real::one() - b.clone() * x.clone()) * (x.clone() - c) * w / (x.clone() - b))
}

/// Fourth-order central difference in extended precision. The step is tied
/// to the working precision so truncation and round-off stay balanced.
pub fn central_difference<F>(f: F, x: &Real) -> Result<Real>
where
    F: Fn(&Real) -> Result<Real>,
{
    let h = Real::pow2(-((precision_bits() / 5) as isize));
    let two_h = h.clone() * Real::from_int(2);
    let f_p1 = f(&(x.clone() + h.clone()))?;
    let f_m1 = f(&(x.clone() - h.clone()))?;
    let f_p2 = f(&(x.clone() + two_h.clone()))?;
    let f_m2 = f(&(x.clone() - two_h))?;
    let eight = Real::from_int(8);
    let numer = f_m2 - f_p2 + eight * (f_p1 - f_m1);
    Ok(numer / (Real::from_int(12) * h))
}

/// `r(x) = [-(p y')' + q y](x) - w(x) [(x^2-1) y'' + 2a (1-bx)/(b-x) ((x-c) y' - y)](x)`
///
/// `(p y')'` is differentiated numerically, so this is an independent check
/// that the divergence form and the eigen-equation agree for the chosen
/// potential. With [`PotentialForm::Corrected`] the result vanishes up to the
/// working precision.
pub fn sl_identity_residual<S: Scalar>(
    ps: &ParameterSet<S>,
    y: &Polynomial<S>,
    x: &Real,
    form: PotentialForm,
) -> Result<Real> {
    if x.abs() >= Real::one() {
        return Err(domain(x, "sl_identity_residual"));
    }
    let ct = coefficient_triple(ps);
    let q = potential(ps, form);
    let y = y.to_real();
    let dy = y.differentiate();
    let d2y = dy.differentiate();

    let flux = |t: &Real| -> Result<Real> { Ok(ct.p.evaluate(&ct.b, t)? * dy.evaluate(t)) };
    let divergence = -central_difference(flux, x)? + q.evaluate(&ct.b, x)? * y.evaluate(x);

    let a = ps.a().to_real();
    let b = ps.b().to_real();
    let c = ps.c().to_real();
    let one = Real::one();
    let ratio = (one.clone() - b.clone() * x.clone()) / (b - x.clone());
    let bracket = (x.clone() - c) * dy.evaluate(x) - y.evaluate(x);
    let eigen_lhs = (x.clone() * x.clone() - one) * d2y.evaluate(x)
        + Real::from_int(2) * a * ratio * bracket;
    Ok(divergence - ct.w.evaluate(&ct.b, x)? * eigen_lhs)
}

/// `[f, g](x) = f(x) p(x) g'(x) - p(x) f'(x) g(x)` for real-valued `f`, `g`.
pub fn symplectic_form<S: Scalar>(
    ps: &ParameterSet<S>,
    f_val: f64,
    f_der: f64,
    g_val: f64,
    g_der: f64,
    x: f64,
) -> Result<f64> {
    let fp = ps.to_f64();
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(Error::Domain {
            x: x.to_string(),
            what: "symplectic_form",
        });
    }
    let p = fp.p(x);
    // Grouped so that swapping f and g negates the result exactly.
    Ok(p * (f_val * g_der) - p * (f_der * g_val))
}

/// `f64` versions of the coefficients, used by the quadrature-based modules.
impl FloatParams {
    pub fn w(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta) / (x - self.b).powi(2)
    }

    pub fn p(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha + 1.0) * (1.0 + x).powf(self.beta + 1.0) / (x - self.b).powi(2)
    }

    pub fn q(&self, x: f64) -> f64 {
        2.0 * self.a * (1.0 - self.b * x) * (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta)
            / (x - self.b).powi(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};

    fn ps13() -> ParameterSet<Rational> {
        validate(Rational::new(1, 1), Rational::new(3, 1)).unwrap()
    }

    fn ps_case2() -> ParameterSet<Rational> {
        validate(Rational::new(-1, 2), Rational::new(-3, 4)).unwrap()
    }

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn coefficient_values_at_zero() {
        let ct = coefficient_triple(&ps13());
        let zero = Real::zero();
        let w = eval_coefficient(&ct, Coefficient::W, &zero).unwrap();
        let p = eval_coefficient(&ct, Coefficient::P, &zero).unwrap();
        let q = eval_coefficient(&ct, Coefficient::Q, &zero).unwrap();
        assert!(close(&w, 0.25, 1e-60));
        assert!(close(&p, 0.25, 1e-60));
        assert!(close(&q, -0.25, 1e-60));

        let ct2 = coefficient_triple(&ps_case2());
        let w2 = eval_coefficient(&ct2, Coefficient::W, &zero).unwrap();
        assert!(close(&w2, 1.0 / 25.0, 1e-17));
        assert!((w2 - Real::from_ratio(1, 25)).abs().to_f64() < 1e-60);
    }

    #[test]
    fn triple_structure() {
        let ps = ps13();
        let ct = coefficient_triple(&ps);
        assert_eq!(ct.w.exponent_one_minus_x, Rational::new(1, 1));
        assert_eq!(ct.p.exponent_one_plus_x, Rational::new(4, 1));
        assert_eq!(ct.q.exponent_x_minus_b, -3);
        assert_eq!(ct.q.prefactor, Polynomial::from_ints(&[2, -4]));
        assert_eq!(ct.p.prefactor, Polynomial::one());
    }

    #[test]
    fn weight_vanishes_towards_plus_one() {
        let ct = coefficient_triple(&ps13());
        let near = Real::one() - Real::pow2(-30);
        let w = eval_coefficient(&ct, Coefficient::W, &near).unwrap();
        assert!(w.to_f64() < 1e-8);
        let at_one = eval_coefficient(&ct, Coefficient::W, &Real::one()).unwrap();
        assert!(at_one.is_zero());
    }

    #[test]
    fn domain_errors_at_and_beyond_endpoints() {
        let ct = coefficient_triple(&ps_case2());
        // alpha < 0: w is not defined at +1.
        assert!(matches!(
            eval_coefficient(&ct, Coefficient::W, &Real::one()),
            Err(Error::Domain { .. })
        ));
        // p has positive exponents and vanishes.
        assert!(eval_coefficient(&ct, Coefficient::P, &Real::one()).unwrap().is_zero());
        assert!(matches!(
            eval_coefficient(&ct, Coefficient::P, &Real::from_ratio(3, 2)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn operator_examples() {
        let ps = ps13();
        let phi1 = Polynomial::linear_root(ps.c().clone());
        let image = apply_operator(&ps, &phi1);
        assert!(image.t.is_zero());

        let one = apply_operator(&ps, &Polynomial::one());
        // -2a(1 - bx) = -2 + 4x; b - x = 2 - x
        assert_eq!(one.t, Polynomial::from_ints(&[-2, 4]));
        assert_eq!(one.b, Polynomial::from_ints(&[2, -1]));

        let zero = apply_operator(&ps, &Polynomial::zero());
        assert!(zero.t.is_zero() && zero.b.is_zero());
    }

    fn random_poly(rng: &mut impl Rng, degree: usize) -> Polynomial<Rational> {
        Polynomial::new(
            (0..=degree)
                .map(|_| Rational::new(rng.gen_range(-50..=50), rng.gen_range(1..=9)))
                .collect(),
        )
    }

    #[test]
    fn operator_is_linear_and_raises_degree_by_one() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for ps in [ps13(), ps_case2()] {
            for _ in 0..20 {
                let d1 = rng.gen_range(0..40);
                let d2 = rng.gen_range(0..40);
                let y1 = random_poly(&mut rng, d1);
                let y2 = random_poly(&mut rng, d2);
                let s1 = Rational::new(rng.gen_range(-9..=9), 7);
                let s2 = Rational::new(rng.gen_range(-9..=9), 5);
                let combo = y1.scale(&s1).add(&y2.scale(&s2));
                let lhs = apply_operator(&ps, &combo);
                let i1 = apply_operator(&ps, &y1);
                let i2 = apply_operator(&ps, &y2);
                assert_eq!(lhs.t, i1.t.scale(&s1).add(&i2.t.scale(&s2)));
                assert_eq!(lhs.b, i1.b.scale(&s1).add(&i2.b.scale(&s2)));
                if let Some(d) = y1.degree() {
                    assert!(i1.t.degree().is_none_or(|dt| dt <= d + 1));
                    assert_eq!(i1.b.degree(), Some(d + 1));
                }
            }
        }
    }

    #[test]
    fn analytic_p_derivative_matches_numerical_differentiation() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for ps in [ps13(), ps_case2()] {
            let ct = coefficient_triple(&ps);
            for _ in 0..100 {
                let x = Real::from_f64(rng.gen_range(-0.95..0.95));
                let numeric = central_difference(|t| ct.p.evaluate(&ct.b, t), &x).unwrap();
                let analytic = p_derivative(&ps, &x).unwrap();
                let scale = analytic.abs().to_f64().max(1.0);
                assert!((numeric - analytic).abs().to_f64() < 1e-40 * scale);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let ps = ps13();
        let phi1 = Polynomial::linear_root(ps.c().clone());
        for x in [-0.7, 0.0, 1.0 / 3.0, 0.9] {
            let r = sl_identity_residual(&ps, &phi1, &Real::from_f64(x), PotentialForm::Corrected)
                .unwrap();
            assert!(r.abs().to_f64() < 1e-30, "x = {x}: {r}");
        }
        let r = sl_identity_residual(
            &ps,
            &Polynomial::zero(),
            &Real::from_ratio(1, 3),
            PotentialForm::Corrected,
        )
        .unwrap();
        assert!(r.is_zero());
        assert!(matches!(
            sl_identity_residual(&ps, &phi1, &Real::one(), PotentialForm::Corrected),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn printed_potential_fails_the_identity() {
        let ps = ps13();
        let y = Polynomial::from_ints(&[1, -2, 0, 3]);
        let x = Real::from_ratio(1, 3);
        let good = sl_identity_residual(&ps, &y, &x, PotentialForm::Corrected).unwrap();
        let bad = sl_identity_residual(&ps, &y, &x, PotentialForm::Printed).unwrap();
        assert!(good.abs().to_f64() < 1e-25);
        assert!(bad.abs().to_f64() > 1e-3);
    }

    #[test]
    fn symplectic_examples() {
        let ps = ps13();
        assert_eq!(symplectic_form(&ps, 0.3, -1.2, 0.3, -1.2, 0.1).unwrap(), 0.0);
        let x = 0.4;
        let (v, d) = (x - 3.0, 1.0);
        assert_eq!(symplectic_form(&ps, v, d, v, d, x).unwrap(), 0.0);
        let p0 = symplectic_form(&ps, 1.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        assert!((p0 - 0.25).abs() < 1e-16);
        assert!(symplectic_form(&ps, 1.0, 0.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn symplectic_form_is_antisymmetric() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let ps = ps_case2();
        for _ in 0..200 {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
            let x = rng.gen_range(-0.99..0.99);
            let fg = symplectic_form(&ps, v[0], v[1], v[2], v[3], x).unwrap();
            let gf = symplectic_form(&ps, v[2], v[3], v[0], v[1], x).unwrap();
            assert_eq!(fg, -gf);
        }
    }

    #[test]
    fn minimal_conditions_on_dense_sample() {
        for ps in [ps13(), ps_case2()] {
            let fp = ps.to_f64();
            for i in 1..2000 {
                let x = -1.0 + i as f64 / 1000.0;
                assert!(fp.w(x) > 0.0 && fp.w(x).is_finite());
                assert!(fp.p(x) > 0.0 && (1.0 / fp.p(x)).is_finite());
                assert!(fp.q(x).is_finite());
            }
        }
    }

    #[test]
    fn float_coefficients_match_extended() {
        let ps = ps_case2();
        let ct = coefficient_triple(&ps);
        let fp = ps.to_f64();
        for x in [-0.9, -0.2, 0.5, 0.97] {
            let xr = Real::from_f64(x);
            for (which, v) in [
                (Coefficient::P, fp.p(x)),
                (Coefficient::Q, fp.q(x)),
                (Coefficient::W, fp.w(x)),
            ] {
                let exact = eval_coefficient(&ct, which, &xr).unwrap().to_f64();
                assert!((exact - v).abs() <= 1e-14 * exact.abs());
            }
        }
    }
}
