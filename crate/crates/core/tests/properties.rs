//! Properties of the public API on randomly drawn admissible parameters.

use proptest::prelude::*;

use x1jacobi::classify::{classify_endpoint, table_classification, Endpoint};
use x1jacobi::eigensolve::{compare_law, discover_spectrum, solve_eigenpoly};
use x1jacobi::laws::{law_registry, ShiftedLaw, DEFAULT_LAW};
use x1jacobi::oracle::solve_spectrum;
use x1jacobi::quadrature::{gram, inner_product, max_off_diagonal, normalize_gram};
use x1jacobi::slform::{apply_operator, symplectic_form};
use x1jacobi::{validate, Case, ParameterSet, Polynomial, Rational, Scalar};

/// Case 1 or Case 2 parameters with denominators up to 97.
fn admissible() -> impl Strategy<Value = ParameterSet<Rational>> {
    let case1 = (1i64..400, 1i64..400, 2i64..98)
        .prop_filter("distinct", |(x, y, _)| x != y)
        .prop_map(|(x, y, d)| validate(Rational::new(x.min(y), d), Rational::new(x.max(y), d)).unwrap());
    let case2 = (1i64..97, 1i64..97)
        .prop_filter("distinct", |(x, y)| x != y)
        .prop_map(|(x, y)| validate(Rational::new(-x.min(y), 97), Rational::new(-x.max(y), 97)).unwrap());
    prop_oneof![case1, case2]
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::new(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polynomial_text_round_trips(coeffs in prop::collection::vec(rational(), 0..8)) {
        let p = Polynomial::new(coeffs);
        let back: Polynomial<Rational> = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn eigenpolynomials_satisfy_the_equation_exactly(ps in admissible(), n in 0u32..6) {
        let pair = solve_eigenpoly(&ps, n).unwrap();
        prop_assert_eq!(pair.poly.degree(), Some(n as usize + 1));
        prop_assert_eq!(pair.poly.leading().cloned(), Some(Rational::one()));
        let image = apply_operator(&ps, &pair.poly);
        prop_assert!(image.t.sub(&image.b.scale(&pair.lambda)).is_zero());
    }

    #[test]
    fn default_law_is_the_pencil_spectrum(ps in admissible()) {
        prop_assert!(compare_law(&ps, 4, &ShiftedLaw).unwrap().matches());
        let registry = law_registry::<Rational>();
        let default = registry.get(DEFAULT_LAW).unwrap();
        let spectrum = discover_spectrum(&ps, 5).unwrap();
        for (n, (lambda, _)) in spectrum.iter().enumerate() {
            prop_assert_eq!(lambda, &default.lambda(&ps, n as u32));
        }
    }

    #[test]
    fn analytic_classification_follows_the_table(ps in admissible()) {
        for e in Endpoint::BOTH {
            let r = classify_endpoint(&ps, e);
            prop_assert_eq!(r.classification, table_classification(&ps, e));
            prop_assert_eq!(r.regular, ps.case() == Case::Case2);
        }
    }

    #[test]
    fn symplectic_form_is_antisymmetric(
        f in (-5.0f64..5.0, -5.0f64..5.0),
        g in (-5.0f64..5.0, -5.0f64..5.0),
        x in -0.99f64..0.99,
    ) {
        let ps = validate(Rational::new(1, 3), Rational::new(5, 2)).unwrap();
        let fg = symplectic_form(&ps, f.0, f.1, g.0, g.1, x).unwrap();
        let gf = symplectic_form(&ps, g.0, g.1, f.0, f.1, x).unwrap();
        prop_assert_eq!(fg, -gf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigenpolynomials_are_orthogonal(ps in admissible()) {
        let polys: Vec<_> = (0..5).map(|n| solve_eigenpoly(&ps, n).unwrap().poly).collect();
        let g = normalize_gram(&gram(&ps, &polys, 1e-12).unwrap());
        prop_assert!(max_off_diagonal(&g) < 1e-10, "{}", max_off_diagonal(&g));
    }

    #[test]
    fn collocation_reproduces_the_pencil(ps in admissible()) {
        let exact = discover_spectrum(&ps, 4).unwrap();
        let colloc = solve_spectrum(&ps, 80, 4).unwrap();
        for ((lambda, _), c) in exact.iter().zip(&colloc) {
            let l = lambda.to_f64();
            prop_assert!((l - c).abs() <= 1e-6 * l.abs().max(1.0), "{l} vs {c}");
        }
    }
}

#[test]
fn inner_product_is_symmetric_and_positive() {
    let ps = validate(Rational::new(-1, 2), Rational::new(-3, 4)).unwrap();
    let f = Polynomial::from_ints(&[1, 2, -1]);
    let g = Polynomial::from_ints(&[0, -3, 0, 1]);
    let fg = inner_product(&ps, &f, &g, 1e-12).unwrap().to_f64();
    let gf = inner_product(&ps, &g, &f, 1e-12).unwrap().to_f64();
    assert!((fg - gf).abs() <= 1e-14 * fg.abs().max(1.0));
    assert!(inner_product(&ps, &f, &f, 1e-12).unwrap().to_f64() > 0.0);
}
