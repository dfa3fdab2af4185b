//! Eigenpolynomials as null vectors of the pencil `A - lambda B`.
//!
//! Column `j` of `A` holds the coefficients of `T[x^j]`, column `j` of `B`
//! those of `B[x^j] = (b - x) x^j`. Because `T` raises degree by at most one,
//! `A` is upper Hessenberg, and the entry `A[m+1][m] / B[m+1][m]` is the only
//! value of `lambda` for which a solution of exact degree `m` can exist. This
//! gives a finite candidate list that is checked exactly.

use std::fmt;

use crate::error::{Error, Result};
use crate::laws::{law_registry, EigenvalueLaw, DEFAULT_LAW};
use crate::linalg::{Matrix, NullSpace};
use crate::params::ParameterSet;
use crate::poly::Polynomial;
use crate::scalar::{cmp_scalars, Scalar};
use crate::slform::OperatorFactors;

/// Real eigenvalues closer than this relative distance are merged.
pub const MERGE_TOLERANCE_DENOMINATOR: i64 = 1_000_000_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Leading coefficient one.
    Monic,
    /// Unit weighted norm, positive leading coefficient.
    UnitWeightedNorm,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Monic => "monic",
            Normalization::UnitWeightedNorm => "unit",
        })
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monic" => Ok(Normalization::Monic),
            "unit" => Ok(Normalization::UnitWeightedNorm),
            other => Err(Error::Parse(format!(
                "unknown normalization `{other}` (expected monic or unit)"
            ))),
        }
    }
}

/// The `n`-th eigenpolynomial, of degree `n + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<S> {
    pub n: u32,
    pub lambda: S,
    pub poly: Polynomial<S>,
    pub normalization: Normalization,
}

/// Matrix form of `T` and `B` on polynomials of degree at most `degree_cap`.
#[derive(Clone)]
pub struct PencilMatrix<S> {
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub degree_cap: usize,
}

pub fn build_pencil<S: Scalar>(ps: &ParameterSet<S>, degree_cap: usize) -> Result<PencilMatrix<S>> {
    if degree_cap < 1 {
        return Err(Error::Invalid("degree_cap must be at least 1".into()));
    }
    let ops = OperatorFactors::new(ps);
    let mut a = Matrix::zeros(degree_cap + 2, degree_cap + 1);
    let mut b = Matrix::zeros(degree_cap + 2, degree_cap + 1);
    for j in 0..=degree_cap {
        let image = ops.apply(&Polynomial::monomial(j));
        for (i, v) in image.t.coeffs().iter().enumerate() {
            a.set(i, j, v.clone());
        }
        for (i, v) in image.b.coeffs().iter().enumerate() {
            b.set(i, j, v.clone());
        }
    }
    Ok(PencilMatrix { a, b, degree_cap })
}

impl<S: NullSpace> PencilMatrix<S> {
    /// Null space of `A - lambda B` as polynomials.
    pub fn null_polynomials(&self, lambda: &S) -> Vec<Polynomial<S>> {
        let m = self.a.sub_scaled(lambda, &self.b);
        S::null_space(&m).into_iter().map(Polynomial::new).collect()
    }

    /// The only eigenvalue compatible with a solution of exact degree `m`.
    pub fn degree_candidate(&self, m: usize) -> S {
        self.a.get(m + 1, m).clone() / self.b.get(m + 1, m).clone()
    }
}

/// `n`-th eigenpair under the default law.
pub fn solve_eigenpoly<S: NullSpace>(ps: &ParameterSet<S>, n: u32) -> Result<EigenPair<S>> {
    let registry = law_registry::<S>();
    let law = registry.get(DEFAULT_LAW)?;
    solve_eigenpoly_with(ps, n, law)
}

/// `n`-th eigenpair with `lambda_n` taken from `law`.
pub fn solve_eigenpoly_with<S: NullSpace>(
    ps: &ParameterSet<S>,
    n: u32,
    law: &dyn EigenvalueLaw<S>,
) -> Result<EigenPair<S>> {
    solve_at_lambda(ps, n, law.lambda(ps, n))
}

/// Monic degree-(n+1) null vector of `A - lambda B`; the null space must be
/// one-dimensional.
pub fn solve_at_lambda<S: NullSpace>(ps: &ParameterSet<S>, n: u32, lambda: S) -> Result<EigenPair<S>> {
    let cap = n as usize + 1;
    let pencil = build_pencil(ps, cap)?;
    let mut null = pencil.null_polynomials(&lambda);
    if null.len() != 1 {
        return Err(Error::Nullity {
            nullity: null.len(),
            lambda: lambda.to_string(),
        });
    }
    let poly = null.pop().expect("nullity checked").monic();
    if poly.degree() != Some(cap) {
        return Err(Error::Invalid(format!(
            "eigenpolynomial at lambda = {lambda} has degree {:?}, expected {cap}",
            poly.degree()
        )));
    }
    Ok(EigenPair {
        n,
        lambda,
        poly,
        normalization: Normalization::Monic,
    })
}

fn same_eigenvalue<S: Scalar>(x: &S, y: &S) -> bool {
    if S::EXACT {
        return x == y;
    }
    let scale = [x.abs(), y.abs(), S::one()]
        .into_iter()
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc });
    (x.clone() - y.clone()).abs() <= scale * S::from_ratio(1, MERGE_TOLERANCE_DENOMINATOR)
}

/// Every `lambda` admitting a polynomial solution of degree at most
/// `degree_cap`, with a monic basis of its eigenspace, sorted by `lambda`.
pub fn discover_spectrum<S: NullSpace>(
    ps: &ParameterSet<S>,
    degree_cap: usize,
) -> Result<Vec<(S, Polynomial<S>)>> {
    let pencil = build_pencil(ps, degree_cap)?;
    let mut candidates: Vec<S> = Vec::new();
    for m in 0..=degree_cap {
        let lambda = pencil.degree_candidate(m);
        if !candidates.iter().any(|c| same_eigenvalue(c, &lambda)) {
            candidates.push(lambda);
        }
    }
    candidates.sort_by(cmp_scalars);
    let mut out = Vec::new();
    for lambda in candidates {
        let mut polys: Vec<_> = pencil
            .null_polynomials(&lambda)
            .into_iter()
            .map(|p| p.monic())
            .collect();
        polys.sort_by_key(|p| p.degree());
        out.extend(polys.into_iter().map(|p| (lambda.clone(), p)));
    }
    Ok(out)
}

/// True iff no `lambda` makes the constant `1` an eigenfunction.
///
/// `T[1] = -2a(1 - bx)` and `B[1] = b - x`; proportionality of the two
/// linear polynomials is a 2x2 determinant condition.
pub fn verify_no_degree_zero<S: Scalar>(ps: &ParameterSet<S>) -> bool {
    let image = OperatorFactors::new(ps).apply(&Polynomial::one());
    let (t0, t1) = (image.t.coeff(0), image.t.coeff(1));
    let (b0, b1) = (image.b.coeff(0), image.b.coeff(1));
    let det = t0 * b1 - t1 * b0;
    if S::EXACT {
        !det.is_zero()
    } else {
        det.abs().to_f64() > 1e-40
    }
}

/// Outcome of checking a closed-form law against the pencil spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct LawComparison<S> {
    pub law: &'static str,
    pub formula: &'static str,
    pub n_max: u32,
    /// `(n, lambda_n)` from the law.
    pub formula_values: Vec<(u32, S)>,
    /// Distinct pencil eigenvalues in `[0, max lambda_n]`.
    pub pencil_values: Vec<S>,
    /// Law values with no polynomial eigenfunction.
    pub missing_from_pencil: Vec<(u32, S)>,
    /// Pencil values the law does not produce.
    pub unexplained: Vec<S>,
}

impl<S> LawComparison<S> {
    pub fn matches(&self) -> bool {
        self.missing_from_pencil.is_empty() && self.unexplained.is_empty()
    }
}

/// Compares `{lambda_n : n <= n_max}` with the pencil spectrum at degree cap
/// `n_max + 1`, as sets.
pub fn compare_law<S: NullSpace>(
    ps: &ParameterSet<S>,
    n_max: u32,
    law: &dyn EigenvalueLaw<S>,
) -> Result<LawComparison<S>> {
    let formula_values: Vec<(u32, S)> = (0..=n_max).map(|n| (n, law.lambda(ps, n))).collect();
    let top = formula_values
        .iter()
        .map(|(_, v)| v.clone())
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc });
    let mut pencil_values: Vec<S> = Vec::new();
    for (lambda, _) in discover_spectrum(ps, n_max as usize + 1)? {
        let in_range = !lambda.is_negative() && (lambda <= top || same_eigenvalue(&lambda, &top));
        if in_range && !pencil_values.iter().any(|v| same_eigenvalue(v, &lambda)) {
            pencil_values.push(lambda);
        }
    }
    let missing_from_pencil = formula_values
        .iter()
        .filter(|(_, v)| !pencil_values.iter().any(|p| same_eigenvalue(p, v)))
        .cloned()
        .collect();
    let unexplained = pencil_values
        .iter()
        .filter(|p| !formula_values.iter().any(|(_, v)| same_eigenvalue(*p, v)))
        .cloned()
        .collect();
    Ok(LawComparison {
        law: law.name(),
        formula: law.formula(),
        n_max,
        formula_values,
        pencil_values,
        missing_from_pencil,
        unexplained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{NoteLaw, ShiftedLaw};
    use crate::params::validate;
    use crate::scalar::Rational;
    use crate::slform::apply_operator;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn case1() -> ParameterSet<Rational> {
        validate(q(1, 1), q(3, 1)).unwrap()
    }

    fn case2() -> ParameterSet<Rational> {
        validate(q(-1, 2), q(-3, 4)).unwrap()
    }

    fn is_eigen<S: Scalar>(ps: &ParameterSet<S>, pair: &EigenPair<S>) -> bool {
        let img = apply_operator(ps, &pair.poly);
        img.t.sub(&img.b.scale(&pair.lambda)).is_zero()
    }

    #[test]
    fn pencil_columns() {
        let ps = case1();
        let pencil = build_pencil(&ps, 3).unwrap();
        assert_eq!((pencil.a.rows(), pencil.a.cols()), (5, 4));
        // T[1] = -2a(1 - bx) = -2 + 4x
        assert_eq!(pencil.a.column(0), [-2, 4, 0, 0, 0].map(Rational::from_int));
        assert_eq!(pencil.b.column(0), [2, -1, 0, 0, 0].map(Rational::from_int));
        // x - c spans the null space at lambda = 0
        let v = [-3, 1, 0, 0].map(Rational::from_int);
        assert!(pencil.a.mul_vec(&v).iter().all(Scalar::is_zero));
        assert!(build_pencil(&ps, 0).is_err());
    }

    #[test]
    fn ground_state_is_x_minus_c() {
        let pair = solve_eigenpoly(&case1(), 0).unwrap();
        assert_eq!(pair.lambda, Rational::zero());
        assert_eq!(pair.poly, Polynomial::from_ints(&[-3, 1]));
        let pair = solve_eigenpoly(&case2(), 0).unwrap();
        assert_eq!(pair.poly, Polynomial::from_ints(&[3, 1]));
    }

    #[test]
    fn first_excited_state_case1() {
        let pair = solve_eigenpoly(&case1(), 1).unwrap();
        assert_eq!(pair.lambda, Rational::from_int(6));
        assert_eq!(pair.poly, Polynomial::from_ints(&[1, -3, 1]));
        assert!(is_eigen(&case1(), &pair));
    }

    #[test]
    fn note_law_has_no_solution_beyond_ground_state() {
        for ps in [case1(), case2()] {
            assert!(solve_eigenpoly_with(&ps, 0, &NoteLaw).is_ok());
            for n in 1..5 {
                let err = solve_eigenpoly_with(&ps, n, &NoteLaw).unwrap_err();
                assert_eq!(
                    err,
                    Error::Nullity {
                        nullity: 0,
                        lambda: NoteLaw.lambda(&ps, n).to_string()
                    }
                );
            }
        }
    }

    #[test]
    fn exact_eigen_identity_up_to_twelve() {
        for ps in [case1(), case2()] {
            for n in 0..=12 {
                let pair = solve_eigenpoly_with(&ps, n, &ShiftedLaw).unwrap();
                assert_eq!(pair.poly.degree(), Some(n as usize + 1));
                assert!(is_eigen(&ps, &pair), "n = {n}");
            }
        }
    }

    #[test]
    fn real_backend_matches_rational() {
        let exact = solve_eigenpoly(&case2(), 4).unwrap();
        let approx = solve_eigenpoly(&case2().to_real(), 4).unwrap();
        for (e, r) in exact.poly.coeffs().iter().zip(approx.poly.coeffs()) {
            let err = (e.to_real() - r.clone()).abs().to_f64();
            assert!(err < 1e-40, "{err}");
        }
        let img = apply_operator(&case2().to_real(), &approx.poly);
        let res = img.t.sub(&img.b.scale(&approx.lambda));
        let scale = img.t.coeffs().iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max);
        assert!(res.coeffs().iter().all(|c| c.abs().to_f64() <= 1e-25 * scale));
    }

    #[test]
    fn discover_small_caps() {
        let ps = case1();
        let spec = discover_spectrum(&ps, 1).unwrap();
        assert_eq!(spec, vec![(Rational::zero(), Polynomial::from_ints(&[-3, 1]))]);
        let spec = discover_spectrum(&ps, 4).unwrap();
        let lambdas: Vec<_> = spec.iter().map(|(l, _)| l.clone()).collect();
        assert_eq!(lambdas, [0, 6, 14, 24].map(Rational::from_int));
        assert!(spec.iter().all(|(_, p)| p.degree() != Some(0)));
    }

    #[test]
    fn discover_matches_shifted_law_not_note_law() {
        for ps in [case1(), case2()] {
            let shifted = compare_law(&ps, 12, &ShiftedLaw).unwrap();
            assert!(shifted.matches(), "{shifted:?}");
            assert_eq!(shifted.pencil_values.len(), 13);
            let note = compare_law(&ps, 12, &NoteLaw).unwrap();
            assert!(!note.matches());
            assert_eq!(note.missing_from_pencil.len(), 12);
        }
    }

    #[test]
    fn discover_in_real_mode() {
        let spec = discover_spectrum(&case2().to_real(), 5).unwrap();
        let want = [0.0, 0.75, 3.5, 8.25, 15.0];
        assert_eq!(spec.len(), 5);
        for ((l, p), w) in spec.iter().zip(want) {
            assert!((l.to_f64() - w).abs() < 1e-14);
            assert!(p.degree().unwrap() >= 1);
        }
    }

    #[test]
    fn no_degree_zero_reference_sets() {
        assert!(verify_no_degree_zero(&case1()));
        assert!(verify_no_degree_zero(&case2()));
        assert!(verify_no_degree_zero(&case2().to_real()));
    }

    #[test]
    fn no_degree_zero_random_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut count = 0;
        while count < 100 {
            let x = rng.gen_range(1..1000);
            let y = rng.gen_range(1..1000);
            let (lo, hi) = (x.min(y), x.max(y));
            if lo == hi {
                continue;
            }
            let ps = if count % 2 == 0 {
                validate(q(lo, 100), q(hi, 100))
            } else {
                validate(q(-lo, 1000), q(-hi, 1000))
            };
            let ps = ps.unwrap();
            assert!(verify_no_degree_zero(&ps));
            count += 1;
        }
    }

    #[test]
    fn normalization_parses() {
        assert_eq!("monic".parse::<Normalization>().unwrap(), Normalization::Monic);
        assert_eq!("unit".parse::<Normalization>().unwrap(), Normalization::UnitWeightedNorm);
        assert!("l2".parse::<Normalization>().is_err());
    }
}
