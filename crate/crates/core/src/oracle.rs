//! Floating point cross-check of the spectrum by Chebyshev collocation.
//!
//! The eigen-equation is used in its polynomial-coefficient form
//! `(x^2-1)(b-x) y'' + 2a(1-bx)(x-c) y' - 2a(1-bx) y = lambda (b-x) y`
//! on Chebyshev-Gauss-Lobatto points, with no boundary rows. Polynomial
//! eigenfunctions of degree below the node count are reproduced exactly.
//! Every other mode depends on the resolution, so eigenvalues are kept only
//! if a second run with 16 more nodes reproduces them.

use nalgebra::{Complex, DMatrix, DVector};

use crate::eigensolve::discover_spectrum;
use crate::error::{Error, Result};
use crate::laws::EigenvalueLaw;
use crate::params::ParameterSet;
use crate::registry::{Named, Registry};
use crate::scalar::{Rational, Scalar};

/// Extra nodes of the second, filtering run.
pub const FILTER_EXTRA_NODES: usize = 16;
/// Relative agreement required between the two runs.
pub const FILTER_REL_TOL: f64 = 1e-6;
/// Eigenvalues whose imaginary part exceeds this fraction of
/// `max(1, |re|)` are discarded; smaller imaginary parts are dropped.
pub const IMAG_REL_TOL: f64 = 1e-6;
/// Relative distance within which a collocation eigenvalue counts as matched.
pub const MATCH_REL_TOL: f64 = 1e-4;
/// Largest node count accepted by the dense solver.
pub const MAX_NODE_COUNT: usize = 512;

/// Collocation matrices on `node_count` Chebyshev-Gauss-Lobatto points.
#[derive(Clone, Debug)]
pub struct CollocationProblem {
    pub node_count: usize,
    pub nodes: Vec<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    pub a_coll: DMatrix<f64>,
    /// Diagonal of `B_coll = diag(b - x)`.
    pub b_coll: DVector<f64>,
}

/// Chebyshev-Gauss-Lobatto points `cos(pi j / N)`, `j = 0..=N`, and the
/// first-derivative matrix, with diagonal entries from negative row sums.
pub fn chebyshev_differentiation(node_count: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = node_count - 1;
    let nf = n as f64;
    let nodes: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * (nf - 2.0 * j as f64) / (2.0 * nf)).sin())
        .collect();
    let weight = |i: usize| {
        let c = if i == 0 || i == n { 2.0 } else { 1.0 };
        if i.is_multiple_of(2) {
            c
        } else {
            -c
        }
    };
    let mut d = DMatrix::zeros(node_count, node_count);
    for i in 0..node_count {
        let mut row_sum = 0.0;
        for j in 0..node_count {
            if i != j {
                let v = weight(i) / weight(j) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    (nodes, d)
}

impl CollocationProblem {
    pub fn new<S: Scalar>(ps: &ParameterSet<S>, node_count: usize) -> Result<Self> {
        if !(2..=MAX_NODE_COUNT).contains(&node_count) {
            return Err(Error::Invalid(format!(
                "node_count must lie in 2..={MAX_NODE_COUNT} (got {node_count})"
            )));
        }
        let fp = ps.to_f64();
        let (nodes, d1) = chebyshev_differentiation(node_count);
        let d2 = &d1 * &d1;
        let mut a_coll = DMatrix::zeros(node_count, node_count);
        for (i, &x) in nodes.iter().enumerate() {
            let second = (x * x - 1.0) * (fp.b - x);
            let drift = 2.0 * fp.a * (1.0 - fp.b * x);
            for j in 0..node_count {
                a_coll[(i, j)] = second * d2[(i, j)] + drift * (x - fp.c) * d1[(i, j)];
            }
            a_coll[(i, i)] -= drift;
        }
        let b_coll = DVector::from_iterator(node_count, nodes.iter().map(|&x| fp.b - x));
        Ok(CollocationProblem {
            node_count,
            nodes,
            d1,
            d2,
            a_coll,
            b_coll,
        })
    }

    /// `B^-1 A`, well defined because `b > 1`.
    fn reduced(&self) -> DMatrix<f64> {
        let mut m = self.a_coll.clone();
        for (i, bi) in self.b_coll.iter().enumerate() {
            m.row_mut(i).scale_mut(1.0 / bi);
        }
        m
    }

    /// All eigenvalues of the pencil `(A_coll, B_coll)`.
    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.reduced().complex_eigenvalues().iter().copied().collect()
    }

    /// Eigenvector for the eigenvalue nearest `shift` by inverse iteration,
    /// normalised to unit Euclidean length.
    pub fn eigenvector_near(&self, shift: f64) -> Result<DVector<f64>> {
        let n = self.node_count;
        let mut m = self.reduced();
        // Offset so the shifted matrix is not exactly singular.
        let sigma = shift + 1e-7 * shift.abs().max(1.0);
        for i in 0..n {
            m[(i, i)] -= sigma;
        }
        let lu = m.lu();
        let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        for _ in 0..8 {
            let w = lu
                .solve(&v)
                .ok_or_else(|| Error::Convergence("inverse iteration hit a singular matrix".into()))?;
            v = &w / w.norm();
        }
        Ok(v)
    }
}

/// Spectrum with spurious modes filtered out.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredSpectrum {
    /// Retained real eigenvalues, ascending.
    pub retained: Vec<f64>,
    /// Largest `|im| / max(1, |re|)` among retained eigenvalues.
    pub max_imag_ratio: f64,
}

fn real_candidates(values: &[Complex<f64>]) -> Vec<(f64, f64)> {
    values
        .iter()
        .filter_map(|z| {
            let ratio = z.im.abs() / z.re.abs().max(1.0);
            (ratio <= IMAG_REL_TOL).then_some((z.re, ratio))
        })
        .collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Eigenvalues at `node_count` that reappear at `node_count + 16`.
pub fn filtered_spectrum<S: Scalar>(ps: &ParameterSet<S>, node_count: usize) -> Result<FilteredSpectrum> {
    let coarse = real_candidates(&CollocationProblem::new(ps, node_count)?.eigenvalues());
    let fine = real_candidates(&CollocationProblem::new(ps, node_count + FILTER_EXTRA_NODES)?.eigenvalues());
    let mut retained: Vec<(f64, f64)> = coarse
        .into_iter()
        .filter(|(re, _)| fine.iter().any(|(f, _)| close(*re, *f, FILTER_REL_TOL)))
        .collect();
    retained.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Collapse numerically repeated copies of one eigenvalue.
    retained.dedup_by(|p, q| close(p.0, q.0, FILTER_REL_TOL));
    Ok(FilteredSpectrum {
        max_imag_ratio: retained.iter().map(|r| r.1).fold(0.0, f64::max),
        retained: retained.into_iter().map(|r| r.0).collect(),
    })
}

/// The `k` smallest eigenvalues that survive the two-resolution filter.
pub fn solve_spectrum<S: Scalar>(ps: &ParameterSet<S>, node_count: usize, k: usize) -> Result<Vec<f64>> {
    if node_count < 4 * k + 20 {
        return Err(Error::Invalid(format!(
            "node_count must be at least 4k + 20 = {} (got {node_count})",
            4 * k + 20
        )));
    }
    let spectrum = filtered_spectrum(ps, node_count)?;
    if spectrum.retained.len() < k {
        return Err(Error::Convergence(format!(
            "only {} of {k} eigenvalues survived the resolution filter",
            spectrum.retained.len()
        )));
    }
    Ok(spectrum.retained[..k].to_vec())
}

/// One collocation eigenvalue with its nearest reference values.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMatch {
    pub collocation: f64,
    /// `(n, lambda_n)` of the law closest to the collocation value.
    pub nearest_formula: (u32, f64),
    pub nearest_pencil: f64,
    pub formula_matched: bool,
    pub pencil_matched: bool,
}

/// Pairing of the collocation spectrum with a closed-form law and with the
/// exact pencil spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumComparison {
    pub law: &'static str,
    pub formula: &'static str,
    pub node_count: usize,
    pub matches: Vec<SpectrumMatch>,
    /// Collocation eigenvalues without a formula value within tolerance.
    pub unmatched: Vec<f64>,
    /// `(n, lambda_n)`, `n < k`, not found among the collocation values.
    pub missing_formula: Vec<(u32, f64)>,
    /// Collocation eigenvalues without a pencil value within tolerance.
    pub unmatched_pencil: Vec<f64>,
}

impl SpectrumComparison {
    /// No extras and nothing missing at this resolution.
    pub fn clean(&self) -> bool {
        self.unmatched.is_empty() && self.missing_formula.is_empty()
    }
}

fn nearest<T: Copy>(items: &[(T, f64)], x: f64) -> (T, f64) {
    *items
        .iter()
        .min_by(|p, q| (p.1 - x).abs().total_cmp(&(q.1 - x).abs()))
        .expect("nonempty reference list")
}

/// Matches the `k` lowest collocation eigenvalues against `law` and against
/// the exact pencil spectrum.
pub fn compare_to_formula(
    ps: &ParameterSet<Rational>,
    k: usize,
    node_count: usize,
    law: &dyn EigenvalueLaw<Rational>,
) -> Result<SpectrumComparison> {
    let colloc = solve_spectrum(ps, node_count, k)?;
    // Formula values well past the k-th, so the nearest one is meaningful.
    let formula: Vec<(u32, f64)> = (0..(2 * k as u32 + 2)).map(|n| (n, law.lambda(ps, n).to_f64())).collect();
    let pencil: Vec<((), f64)> = discover_spectrum(ps, 2 * k + 2)?
        .into_iter()
        .map(|(l, _)| ((), l.to_f64()))
        .collect();
    let matches: Vec<SpectrumMatch> = colloc
        .iter()
        .map(|&c| {
            let nearest_formula = nearest(&formula, c);
            let nearest_pencil = nearest(&pencil, c).1;
            SpectrumMatch {
                collocation: c,
                nearest_formula,
                nearest_pencil,
                formula_matched: close(c, nearest_formula.1, MATCH_REL_TOL),
                pencil_matched: close(c, nearest_pencil, MATCH_REL_TOL),
            }
        })
        .collect();
    let unmatched = matches.iter().filter(|m| !m.formula_matched).map(|m| m.collocation).collect();
    let unmatched_pencil = matches.iter().filter(|m| !m.pencil_matched).map(|m| m.collocation).collect();
    let missing_formula = formula[..k]
        .iter()
        .filter(|(_, v)| !colloc.iter().any(|c| close(*c, *v, MATCH_REL_TOL)))
        .copied()
        .collect();
    Ok(SpectrumComparison {
        law: law.name(),
        formula: law.formula(),
        node_count,
        matches,
        unmatched,
        missing_formula,
        unmatched_pencil,
    })
}

/// Cosine similarity between the collocation eigenvector nearest `0` and
/// `x - c` sampled at the nodes.
pub fn ground_state_correlation<S: Scalar>(ps: &ParameterSet<S>, node_count: usize) -> Result<f64> {
    let problem = CollocationProblem::new(ps, node_count)?;
    let v = problem.eigenvector_near(0.0)?;
    let c = ps.c().to_f64();
    let phi = DVector::from_iterator(node_count, problem.nodes.iter().map(|&x| x - c));
    Ok((v.dot(&phi) / phi.norm()).abs())
}

/// A method for computing the lowest `k` eigenvalues.
pub trait SpectrumSolver: Named + Send + Sync {
    /// `node_count` is a resolution hint, ignored by exact methods.
    fn lowest(&self, ps: &ParameterSet<Rational>, k: usize, node_count: usize) -> Result<Vec<f64>>;
}

/// Exact rational pencil spectrum.
#[derive(Clone, Copy, Debug, Default)]
pub struct PencilSolver;

/// Chebyshev collocation with the two-resolution filter.
#[derive(Clone, Copy, Debug, Default)]
pub struct CollocationSolver;

impl Named for PencilSolver {
    fn name(&self) -> &'static str {
        "pencil"
    }

    fn describe(&self) -> String {
        "pencil: exact null spaces of the polynomial pencil (rational arithmetic)".into()
    }
}

impl SpectrumSolver for PencilSolver {
    fn lowest(&self, ps: &ParameterSet<Rational>, k: usize, _node_count: usize) -> Result<Vec<f64>> {
        let mut values: Vec<Rational> = Vec::new();
        for (lambda, _) in discover_spectrum(ps, k)? {
            if values.last() != Some(&lambda) {
                values.push(lambda);
            }
        }
        if values.len() < k {
            return Err(Error::Convergence(format!(
                "pencil produced {} of {k} eigenvalues",
                values.len()
            )));
        }
        Ok(values[..k].iter().map(Scalar::to_f64).collect())
    }
}

impl Named for CollocationSolver {
    fn name(&self) -> &'static str {
        "collocation"
    }

    fn describe(&self) -> String {
        "collocation: Chebyshev-Gauss-Lobatto collocation, two-resolution filter".into()
    }
}

impl SpectrumSolver for CollocationSolver {
    fn lowest(&self, ps: &ParameterSet<Rational>, k: usize, node_count: usize) -> Result<Vec<f64>> {
        solve_spectrum(ps, node_count, k)
    }
}

/// All built-in spectrum solvers, in a stable order.
pub fn solver_registry() -> Registry<dyn SpectrumSolver> {
    Registry::<dyn SpectrumSolver>::new("spectrum solver")
        .with(Box::new(PencilSolver))
        .with(Box::new(CollocationSolver))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{NoteLaw, ShiftedLaw};
    use crate::params::validate;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn case1() -> ParameterSet<Rational> {
        validate(q(1, 1), q(3, 1)).unwrap()
    }

    fn case2() -> ParameterSet<Rational> {
        validate(q(-1, 2), q(-3, 4)).unwrap()
    }

    #[test]
    fn differentiation_is_exact_on_cubics() {
        let (x, d) = chebyshev_differentiation(9);
        let f = DVector::from_iterator(9, x.iter().map(|t| t * t * t - 2.0 * t));
        let df = &d * f;
        for (i, t) in x.iter().enumerate() {
            assert!((df[i] - (3.0 * t * t - 2.0)).abs() < 1e-12);
        }
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[8] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ground_state_eigenvalue() {
        let got = solve_spectrum(&case1(), 64, 1).unwrap();
        assert!(got[0].abs() < 1e-8, "{got:?}");
    }

    #[test]
    fn reproduces_pencil_eigenvalues() {
        let want1 = [0.0, 6.0, 14.0, 24.0, 36.0];
        let want2 = [0.0, 0.75, 3.5, 8.25, 15.0];
        for (ps, want) in [(case1(), want1), (case2(), want2)] {
            let got = solve_spectrum(&ps, 200, 5).unwrap();
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 1e-6 * w.max(1.0), "{got:?}");
            }
        }
    }

    #[test]
    fn converged_under_refinement() {
        let a = solve_spectrum(&case1(), 200, 5).unwrap();
        let b = solve_spectrum(&case1(), 400, 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() / (1.0 + x.abs()) < 1e-8, "{x} {y}");
        }
        let s = filtered_spectrum(&case1(), 200).unwrap();
        assert!(s.max_imag_ratio < 1e-8);
    }

    #[test]
    fn ground_state_vector_is_phi1() {
        for ps in [case1(), case2()] {
            let cos = ground_state_correlation(&ps, 120).unwrap();
            assert!(cos > 1.0 - 1e-8, "{cos}");
        }
    }

    #[test]
    fn comparison_with_laws() {
        for ps in [case1(), case2()] {
            let shifted = compare_to_formula(&ps, 5, 200, &ShiftedLaw).unwrap();
            assert!(shifted.clean(), "{shifted:?}");
            assert!(shifted.unmatched_pencil.is_empty());
            // negative control: the unshifted law misses every excited state
            let note = compare_to_formula(&ps, 5, 200, &NoteLaw).unwrap();
            assert!(!note.clean());
            assert_eq!(note.unmatched.len(), 4);
        }
    }

    #[test]
    fn solvers_agree() {
        let reg = solver_registry();
        assert_eq!(reg.names(), vec!["pencil", "collocation"]);
        let exact = reg.get("pencil").unwrap().lowest(&case2(), 5, 0).unwrap();
        let colloc = reg.get("collocation").unwrap().lowest(&case2(), 5, 64).unwrap();
        for (e, c) in exact.iter().zip(&colloc) {
            assert!((e - c).abs() <= 1e-8 * e.max(1.0));
        }
        assert!(reg.get("qz").is_err());
    }

    #[test]
    fn node_count_preconditions() {
        assert!(solve_spectrum(&case1(), 30, 5).is_err());
        assert!(CollocationProblem::new(&case1(), 1000).is_err());
    }
}
