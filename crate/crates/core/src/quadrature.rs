//! Gauss-Jacobi rules and weighted inner products on `(-1, 1)`.
//!
//! The inner product uses the weight `w(x) = (1-x)^alpha (1+x)^beta / (x-b)^2`.
//! Since `b > 1`, the factor `1/(x-b)^2` is analytic on `[-1, 1]`. It is
//! folded into the integrand, and the endpoint behaviour is left to a
//! Gauss-Jacobi rule for `(1-x)^alpha (1+x)^beta`.
//!
//! Rules are built in `f64` by Golub-Welsch and cached. Integrands are
//! evaluated and accumulated in extended precision, so the only `f64` error
//! is in the nodes and weights themselves.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use crate::eigensolve::{EigenPair, Normalization};
use crate::error::{Error, Result};
use crate::linalg::{solve_dense, Matrix};
use crate::params::ParameterSet;
use crate::poly::Polynomial;
use crate::scalar::{Real, Scalar};

/// Node count of the first level of adaptive doubling.
pub const INITIAL_NODES: usize = 16;
/// Largest node count tried before giving up.
pub const MAX_NODES: usize = 1 << 14;
/// Default relative tolerance for adaptive inner products.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Smallest relative tolerance honoured by [`adaptive_legendre`].
pub const LEGENDRE_TOL_FLOOR: f64 = 100.0 * f64::EPSILON;
const MAX_PANELS: usize = 100_000;
const MAX_QL_ITERATIONS: usize = 60;

/// Gauss-Jacobi rule for `(1-x)^alpha (1+x)^beta` on `(-1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl QuadratureRule {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `sum w_i f(x_i)` in `f64`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `int_{-1}^{1} (1-x)^alpha (1+x)^beta dx = 2^(alpha+beta+1) B(alpha+1, beta+1)`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    let ln = (alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0);
    ln.exp()
}

/// Diagonal and squared off-diagonal of the Jacobi matrix for the monic
/// Jacobi recurrence.
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let t = 2.0 * k + ab;
                (beta * beta - alpha * alpha) / (t * (t + 2.0))
            }
        })
        .collect();
    let off = (1..n)
        .map(|k| {
            let kf = k as f64;
            if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let t = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (t * t * (t + 1.0) * (t - 1.0))
            }
        })
        .collect();
    (diag, off)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` by implicit QL,
/// tracking only the first component of each eigenvector.
///
/// `e[i]` couples `i` and `i + 1`; `e` must have length `d.len()`, with the
/// last entry ignored.
fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::Precision(format!(
                    "tridiagonal QL iteration did not converge for eigenvalue {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss-Jacobi rule with `node_count` nodes via Golub-Welsch.
pub fn gauss_jacobi(node_count: usize, alpha: f64, beta: f64) -> Result<QuadratureRule> {
    if node_count == 0 {
        return Err(Error::Invalid("node_count must be at least 1".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Invalid(format!(
            "Gauss-Jacobi needs alpha, beta > -1 (got {alpha}, {beta})"
        )));
    }
    let (mut d, off) = jacobi_recurrence(node_count, alpha, beta);
    let mut e: Vec<f64> = off.iter().map(|v| v.sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0; node_count];
    z[0] = 1.0;
    tridiagonal_eigen(&mut d, &mut e, &mut z)?;
    let mass = jacobi_mass(alpha, beta);
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z).map(|(x, v)| (x, mass * v * v)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        alpha,
        beta,
    })
}

type RuleKey = (usize, u64, u64);

/// Shared, memoised Gauss-Jacobi rule.
pub fn cached_gauss_jacobi(node_count: usize, alpha: f64, beta: f64) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    let key = (node_count, alpha.to_bits(), beta.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(node_count, alpha, beta)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// The weight `w` discretised on one Gauss-Jacobi rule, in extended precision.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

impl DiscreteMeasure {
    pub fn new<S: Scalar>(ps: &ParameterSet<S>, node_count: usize) -> Result<Self> {
        let fp = ps.to_f64();
        let rule = cached_gauss_jacobi(node_count, fp.alpha, fp.beta)?;
        let b = ps.b().to_real();
        let nodes: Vec<Real> = rule.nodes.iter().map(|&x| Real::from_f64(x)).collect();
        let weights = nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, &w)| {
                let dx = x.clone() - b.clone();
                Real::from_f64(w) / (dx.clone() * dx)
            })
            .collect();
        Ok(DiscreteMeasure { nodes, weights })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Values of `f` at the nodes.
    pub fn values<S: Scalar>(&self, f: &Polynomial<S>) -> Vec<Real> {
        let f = f.to_real();
        self.nodes.iter().map(|x| f.evaluate(x)).collect()
    }

    /// `sum w_i f_i g_i`.
    pub fn integrate(&self, f: &[Real], g: &[Real]) -> Real {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .fold(Real::zero(), |acc, (w, (a, b))| acc + w.clone() * a.clone() * b.clone())
    }

    /// `sum w_i |f_i g_i|`.
    pub fn integrate_abs(&self, f: &[Real], g: &[Real]) -> Real {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .fold(Real::zero(), |acc, (w, (a, b))| acc + w.clone() * (a.clone() * b.clone()).abs())
    }

    pub fn inner<S: Scalar>(&self, f: &Polynomial<S>, g: &Polynomial<S>) -> Real {
        self.integrate(&self.values(f), &self.values(g))
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("rel_tol must be positive (got {rel_tol})")))
    }
}

/// Adaptive `int f g w` with node count doubled from 16.
///
/// Convergence is declared when successive values differ by less than
/// `rel_tol * int |f g| w`; the absolute-value scale keeps the test
/// meaningful for inner products that vanish by orthogonality.
pub fn inner_product<S: Scalar>(
    ps: &ParameterSet<S>,
    f: &Polynomial<S>,
    g: &Polynomial<S>,
    rel_tol: f64,
) -> Result<Real> {
    check_rel_tol(rel_tol)?;
    let tol = Real::from_f64(rel_tol);
    let mut n = INITIAL_NODES;
    let mut previous: Option<Real> = None;
    while n <= MAX_NODES {
        let measure = DiscreteMeasure::new(ps, n)?;
        let (fv, gv) = (measure.values(f), measure.values(g));
        let value = measure.integrate(&fv, &gv);
        let scale = measure.integrate_abs(&fv, &gv);
        if let Some(prev) = previous {
            if (value.clone() - prev).abs() <= tol.clone() * scale {
                return Ok(value);
            }
        }
        previous = Some(value);
        n *= 2;
    }
    Err(Error::Convergence(format!(
        "inner product did not reach rel_tol {rel_tol} with {MAX_NODES} nodes"
    )))
}

/// Symmetric matrix of pairwise inner products.
pub fn gram<S: Scalar>(ps: &ParameterSet<S>, polys: &[Polynomial<S>], rel_tol: f64) -> Result<Matrix<Real>> {
    let k = polys.len();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = inner_product(ps, &polys[i], &polys[j], rel_tol).map_err(|e| match e {
                Error::Convergence(msg) => Error::Convergence(format!("entry ({i}, {j}): {msg}")),
                other => other,
            })?;
            g.set(i, j, v.clone());
            g.set(j, i, v);
        }
    }
    Ok(g)
}

/// `G_ij / sqrt(G_ii G_jj)`.
pub fn normalize_gram(g: &Matrix<Real>) -> Matrix<Real> {
    let k = g.rows();
    let d: Vec<Real> = (0..k).map(|i| g.get(i, i).sqrt()).collect();
    let mut out = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out.set(i, j, g.get(i, j).clone() / (d[i].clone() * d[j].clone()));
        }
    }
    out
}

/// Largest `|G_ij|`, `i != j`, of a normalised Gram matrix.
pub fn max_off_diagonal(g: &Matrix<Real>) -> f64 {
    let k = g.rows();
    (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| g.get(i, j).abs().to_f64())
        .fold(0.0, f64::max)
}

/// Smallest node count at which the weighted norms of all `polys` have
/// converged to `rel_tol`.
fn converged_measure<S: Scalar>(
    ps: &ParameterSet<S>,
    polys: &[&Polynomial<S>],
    rel_tol: f64,
) -> Result<DiscreteMeasure> {
    check_rel_tol(rel_tol)?;
    let tol = Real::from_f64(rel_tol);
    let mut n = INITIAL_NODES;
    let mut previous: Option<Vec<Real>> = None;
    while n <= MAX_NODES {
        let measure = DiscreteMeasure::new(ps, n)?;
        let norms: Vec<Real> = polys.iter().map(|p| measure.inner(p, p)).collect();
        if let Some(prev) = &previous {
            let done = norms
                .iter()
                .zip(prev)
                .all(|(v, p)| (v.clone() - p.clone()).abs() <= tol.clone() * v.abs());
            if done {
                return Ok(measure);
            }
        }
        previous = Some(norms);
        n *= 2;
    }
    Err(Error::Convergence(format!(
        "weighted norms did not reach rel_tol {rel_tol} with {MAX_NODES} nodes"
    )))
}

/// Weighted-norm distance from `f` to `span(basis)` on a fixed discrete
/// measure, by solving the normal equations of the first `k` basis vectors.
fn residual_on(measure: &DiscreteMeasure, fv: &[Real], basis: &[Vec<Real>], k: usize) -> Result<Real> {
    let mut g = Matrix::zeros(k, k);
    let mut rhs = Vec::with_capacity(k);
    for i in 0..k {
        for j in i..k {
            let v = measure.integrate(&basis[i], &basis[j]);
            g.set(i, j, v.clone());
            g.set(j, i, v);
        }
        rhs.push(measure.integrate(fv, &basis[i]));
    }
    let coeffs = solve_dense(&g, &rhs)
        .ok_or_else(|| Error::Invalid("projection basis is linearly dependent".into()))?;
    let r: Vec<Real> = (0..fv.len())
        .map(|node| {
            coeffs
                .iter()
                .zip(basis)
                .fold(fv[node].clone(), |acc, (c, e)| acc - c.clone() * e[node].clone())
        })
        .collect();
    Ok(measure.integrate(&r, &r).sqrt())
}

/// `|| f - proj_{span(basis)} f ||_w`.
pub fn project_residual<S: Scalar>(
    ps: &ParameterSet<S>,
    f: &Polynomial<S>,
    basis: &[Polynomial<S>],
    rel_tol: f64,
) -> Result<Real> {
    if basis.is_empty() {
        return Err(Error::Invalid("projection basis must be nonempty".into()));
    }
    let series = density_series(ps, f, basis, rel_tol)?;
    Ok(series.last().expect("basis nonempty").clone())
}

/// Residuals of projecting `f` onto `span(basis[..=N])` for every `N`, all on
/// one discrete measure so the sequence is exactly non-increasing.
pub fn density_series<S: Scalar>(
    ps: &ParameterSet<S>,
    f: &Polynomial<S>,
    basis: &[Polynomial<S>],
    rel_tol: f64,
) -> Result<Vec<Real>> {
    let mut all: Vec<&Polynomial<S>> = basis.iter().collect();
    all.push(f);
    let measure = converged_measure(ps, &all, rel_tol)?;
    let fv = measure.values(f);
    let bv: Vec<Vec<Real>> = basis.iter().map(|e| measure.values(e)).collect();
    (1..=basis.len()).map(|k| residual_on(&measure, &fv, &bv, k)).collect()
}

/// Rescales an eigenpair to unit weighted norm with positive leading
/// coefficient.
pub fn unit_normalize<S: Scalar>(
    ps: &ParameterSet<S>,
    pair: &EigenPair<S>,
    rel_tol: f64,
) -> Result<EigenPair<Real>> {
    let norm = inner_product(ps, &pair.poly, &pair.poly, rel_tol)?.sqrt();
    let mut scale = Real::one() / norm;
    if pair.poly.leading().is_some_and(Scalar::is_negative) {
        scale = -scale;
    }
    Ok(EigenPair {
        n: pair.n,
        lambda: pair.lambda.to_real(),
        poly: pair.poly.to_real().scale(&scale),
        normalization: Normalization::UnitWeightedNorm,
    })
}

/// Adaptive composite Gauss-Legendre integral of `f` over `[lo, hi]`.
///
/// A panel is accepted when its 16-point and 32-point values agree to
/// `rel_tol` times the larger of its own magnitude and its length-share of
/// the whole integral's magnitude. Panels at the floating point resolution
/// of the interval are accepted as they are. Tolerances below
/// [`LEGENDRE_TOL_FLOOR`] are raised to it, since panel sums cannot resolve
/// smaller differences.
pub fn adaptive_legendre<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    let rel_tol = rel_tol.max(LEGENDRE_TOL_FLOOR);
    let mut budget = MAX_PANELS;
    let coarse = cached_gauss_jacobi(16, 0.0, 0.0)?;
    let fine = cached_gauss_jacobi(32, 0.0, 0.0)?;
    let panel = |rule: &QuadratureRule, a: f64, b: f64, g: &dyn Fn(f64) -> f64| {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * rule.integrate(|t| g(mid + half * t))
    };
    let length = hi - lo;
    let scale = panel(&fine, lo, hi, &|x| f(x).abs());
    let min_width = 64.0 * f64::EPSILON * length.abs().max(lo.abs()).max(hi.abs());
    let mut stack = vec![(lo, hi)];
    let mut total = 0.0;
    while let Some((a, b)) = stack.pop() {
        let c = panel(&coarse, a, b, f);
        let v = panel(&fine, a, b, f);
        if !v.is_finite() {
            return Err(Error::Convergence(format!(
                "non-finite integrand on panel [{a}, {b}]"
            )));
        }
        let local = panel(&fine, a, b, &|x| f(x).abs()).max(scale * (b - a) / length);
        if (v - c).abs() <= rel_tol * local || (b - a).abs() <= min_width {
            total += v;
        } else if budget == 0 {
            return Err(Error::Convergence(format!(
                "adaptive Gauss-Legendre exceeded {MAX_PANELS} panels on [{lo}, {hi}]"
            )));
        } else {
            budget -= 1;
            let m = 0.5 * (a + b);
            stack.push((m, b));
            stack.push((a, m));
        }
    }
    Ok(total)
}
