//! The `lambda = 0` solution pair and endpoint classification.
//!
//! `phi1 = x - c` solves the equation at `lambda = 0`. Reduction of order
//! gives `phi2 = phi1 * I`, where `I(x) = int_0^x dt / (p phi1^2)`, with
//! unit Wronskian `p (phi1 phi2' - phi1' phi2) = 1`.
//!
//! At `+1`, `1/p ~ (1-x)^-(alpha+1)`, so `phi2 ~ (1-x)^-alpha` when
//! `alpha > 0`, and `phi2` is bounded when `alpha < 0`. The square-integrability
//! of `phi2` against `w ~ (1-x)^alpha` then decides limit-circle versus
//! limit-point. The `-1` endpoint mirrors this with `beta`.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::{Case, FloatParams, ParameterSet};
use crate::poly::Polynomial;
use crate::quadrature::{adaptive_legendre, cached_gauss_jacobi, QuadratureRule};
use crate::scalar::{Real, Scalar};
use crate::slform::coefficient_triple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    PlusOne,
    MinusOne,
}

impl Endpoint {
    pub const BOTH: [Endpoint; 2] = [Endpoint::PlusOne, Endpoint::MinusOne];

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Endpoint::PlusOne => 1.0,
            Endpoint::MinusOne => -1.0,
        }
    }

    /// The parameter governing this endpoint: `alpha` at `+1`, `beta` at `-1`.
    pub fn exponent_of<S: Scalar>(self, ps: &ParameterSet<S>) -> &S {
        match self {
            Endpoint::PlusOne => ps.alpha(),
            Endpoint::MinusOne => ps.beta(),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::PlusOne => "+1",
            Endpoint::MinusOne => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    LimitCircle,
    LimitPoint,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::LimitCircle => "LC",
            Classification::LimitPoint => "LP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solution {
    Phi1,
    Phi2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointReport {
    pub endpoint: Endpoint,
    pub regular: bool,
    pub classification: Classification,
    /// Exponent `e` with `|phi2|^2 w ~ (1 -+ x)^e`.
    pub analytic_exponent: f64,
    /// Slab-fit estimate of `analytic_exponent`, when requested and defined.
    pub numeric_exponent: Option<f64>,
    pub boundary_condition_required: bool,
}

/// First slab index of the tail fits.
pub const TAIL_K_MIN: u32 = 4;
/// Last slab index of the tail fits.
pub const TAIL_K_MAX: u32 = 20;
/// Exponent fits are skipped within this distance of the LC/LP threshold.
pub const THRESHOLD_MARGIN: f64 = 0.1;
/// Approach points `1 - 2^-k` of the boundary decay fit.
pub const DECAY_K: std::ops::RangeInclusive<u32> = 6..=40;

const SLAB_NODES: usize = 32;

/// `(x - c, 1)`.
pub fn phi1_eval<S: Scalar>(ps: &ParameterSet<S>, x: &S) -> (S, S) {
    (x.clone() - ps.c().clone(), S::one())
}

/// `1 / (p phi1^2)`, the reduction-of-order integrand, for `x = sign (1 - u)`.
///
/// Written in the distance `u` to the endpoint so that `1 - |x|` keeps full
/// relative precision.
fn order_reduction_integrand(fp: &FloatParams, endpoint: Endpoint, u: f64) -> f64 {
    let sigma = endpoint.sign();
    let x = sigma * (1.0 - u);
    let (one_minus, one_plus) = match endpoint {
        Endpoint::PlusOne => (u, 2.0 - u),
        Endpoint::MinusOne => (2.0 - u, u),
    };
    let xb = x - fp.b;
    let xc = x - fp.c;
    xb * xb / (one_minus.powf(fp.alpha + 1.0) * one_plus.powf(fp.beta + 1.0) * xc * xc)
}

fn weight_at(fp: &FloatParams, endpoint: Endpoint, u: f64) -> f64 {
    let x = endpoint.sign() * (1.0 - u);
    let (one_minus, one_plus) = match endpoint {
        Endpoint::PlusOne => (u, 2.0 - u),
        Endpoint::MinusOne => (2.0 - u, u),
    };
    let xb = x - fp.b;
    one_minus.powf(fp.alpha) * one_plus.powf(fp.beta) / (xb * xb)
}

fn integrand(fp: &FloatParams, t: f64) -> f64 {
    let tb = t - fp.b;
    let tc = t - fp.c;
    tb * tb / ((1.0 - t).powf(fp.alpha + 1.0) * (1.0 + t).powf(fp.beta + 1.0) * tc * tc)
}

/// `I(x) = int_0^x dt / (p phi1^2)`.
fn reduction_integral(fp: &FloatParams, x: f64, rel_tol: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| integrand(fp, t);
    if x > 0.0 {
        adaptive_legendre(&f, 0.0, x, rel_tol)
    } else {
        Ok(-adaptive_legendre(&f, x, 0.0, rel_tol)?)
    }
}

/// `(phi2(x), phi2'(x))` with `phi2 = (x - c) I(x)` and
/// `phi2' = I(x) + 1/(p phi1)`.
pub fn phi2_eval<S: Scalar>(ps: &ParameterSet<S>, x: f64, rel_tol: f64) -> Result<(f64, f64)> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain {
            x: x.to_string(),
            what: "phi2",
        });
    }
    let fp = ps.to_f64();
    let i = reduction_integral(&fp, x, rel_tol).map_err(|e| match e {
        Error::Convergence(msg) => Error::Convergence(format!("phi2 at x = {x}: {msg}")),
        other => other,
    })?;
    let phi1 = x - fp.c;
    Ok((phi1 * i, i + 1.0 / (fp.p(x) * phi1)))
}

/// Whether `1/p` is integrable at the endpoint: `alpha < 0` at `+1`,
/// `beta < 0` at `-1`.
pub fn one_over_p_integrable<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> bool {
    endpoint.exponent_of(ps).is_negative()
}

/// Exponent `e` with `|phi2|^2 w ~ (1 -+ x)^e`: `-alpha` when `alpha > 0`,
/// `alpha` when `alpha < 0` (mirrored with `beta` at `-1`).
pub fn l2_exponent_phi2<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> S {
    let e = endpoint.exponent_of(ps).clone();
    if e.is_negative() {
        e
    } else {
        -e
    }
}

/// Exponent of `|phi1|^2 w`, which is `alpha` (resp. `beta`) since `phi1`
/// does not vanish at the endpoints.
pub fn l2_exponent_phi1<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> S {
    endpoint.exponent_of(ps).clone()
}

/// Analytic classification of one endpoint.
pub fn classify_endpoint<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> EndpointReport {
    let exponent = l2_exponent_phi2(ps, endpoint);
    let classification = if exponent > -S::one() {
        Classification::LimitCircle
    } else {
        Classification::LimitPoint
    };
    EndpointReport {
        endpoint,
        regular: one_over_p_integrable(ps, endpoint),
        classification,
        analytic_exponent: exponent.to_f64(),
        numeric_exponent: None,
        boundary_condition_required: classification == Classification::LimitCircle,
    }
}

/// Analytic classification plus the slab-fit exponent of `|phi2|^2 w`,
/// which is left empty within [`THRESHOLD_MARGIN`] of the threshold.
pub fn classify_endpoint_numeric<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> Result<EndpointReport> {
    let mut report = classify_endpoint(ps, endpoint);
    report.numeric_exponent = match numeric_tail_exponent(ps, endpoint, Solution::Phi2) {
        Ok(e) => Some(e),
        Err(Error::Threshold(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `int_{lo}^{hi} f` on one fixed Gauss-Legendre panel.
fn panel(rule: &QuadratureRule, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    half * rule.integrate(|t| f(mid + half * t))
}

/// Fits `log2` of the slab integrals `int_{2^-(k+1)}^{2^-k} g(u) du` against
/// `k` and returns the exponent `e` with `g ~ u^e`.
fn slab_exponent(slabs: &[f64]) -> Result<f64> {
    if let Some(bad) = slabs.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Convergence(format!("slab integral is not positive and finite: {bad}")));
    }
    let ks: Vec<f64> = (TAIL_K_MIN..=TAIL_K_MAX).map(f64::from).collect();
    let logs: Vec<f64> = slabs.iter().map(|v| v.log2()).collect();
    Ok(-fit_slope(&ks, &logs) - 1.0)
}

/// Slab integrals of `g(u)` for `k = TAIL_K_MIN..=TAIL_K_MAX`.
fn slab_integrals(g: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let rule = cached_gauss_jacobi(SLAB_NODES, 0.0, 0.0)?;
    Ok((TAIL_K_MIN..=TAIL_K_MAX)
        .map(|k| {
            let hi = (-f64::from(k)).exp2();
            panel(&rule, &g, 0.5 * hi, hi)
        })
        .collect())
}

/// Slab integrals of `|phi2|^2 w` toward `endpoint`.
///
/// `I` is carried inward slab by slab: from its value at the outer edge of a
/// slab, a second Gauss-Legendre panel gives it at each node of that slab.
fn phi2_slab_integrals(fp: &FloatParams, endpoint: Endpoint) -> Result<Vec<f64>> {
    let rule = cached_gauss_jacobi(SLAB_NODES, 0.0, 0.0)?;
    let sigma = endpoint.sign();
    let g = |u: f64| order_reduction_integrand(fp, endpoint, u);
    let u_start = (-f64::from(TAIL_K_MIN)).exp2();
    let mut i_edge = reduction_integral(fp, sigma * (1.0 - u_start), 1e-14)?;
    let mut out = Vec::new();
    for k in TAIL_K_MIN..=TAIL_K_MAX {
        let hi = (-f64::from(k)).exp2();
        let lo = 0.5 * hi;
        let tail = |u: f64| {
            let i = i_edge + sigma * panel(&rule, g, u, hi);
            let phi2 = (sigma * (1.0 - u) - fp.c) * i;
            phi2 * phi2 * weight_at(fp, endpoint, u)
        };
        out.push(panel(&rule, tail, lo, hi));
        i_edge += sigma * panel(&rule, g, lo, hi);
    }
    Ok(out)
}

/// Slab-fit exponent of `|phi|^2 w` at the endpoint.
pub fn numeric_tail_exponent<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint, which: Solution) -> Result<f64> {
    let fp = ps.to_f64();
    match which {
        Solution::Phi1 => slab_exponent(&slab_integrals(|u| {
            let phi1 = endpoint.sign() * (1.0 - u) - fp.c;
            phi1 * phi1 * weight_at(&fp, endpoint, u)
        })?),
        Solution::Phi2 => {
            let e = endpoint.exponent_of(ps).to_f64();
            if (e - 1.0).abs() <= THRESHOLD_MARGIN {
                return Err(Error::Threshold(format!(
                    "exponent {e} at {endpoint} is within {THRESHOLD_MARGIN} of the LC/LP threshold 1"
                )));
            }
            slab_exponent(&phi2_slab_integrals(&fp, endpoint)?)
        }
    }
}

/// Slab-fit exponent of `1/p` at the endpoint; `1/p` is integrable iff the
/// result exceeds `-1`.
pub fn numeric_one_over_p_exponent<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> Result<f64> {
    let fp = ps.to_f64();
    slab_exponent(&slab_integrals(|u| {
        let x = endpoint.sign() * (1.0 - u);
        let (one_minus, one_plus) = match endpoint {
            Endpoint::PlusOne => (u, 2.0 - u),
            Endpoint::MinusOne => (2.0 - u, u),
        };
        let xb = x - fp.b;
        xb * xb / (one_minus.powf(fp.alpha + 1.0) * one_plus.powf(fp.beta + 1.0))
    })?)
}

/// Samples of `|[f, phi1](x)|` approaching both endpoints, with fitted decay
/// exponents.
#[derive(Clone, Debug)]
pub struct BoundaryDecay {
    /// `(x, |[f, phi1](x)|)` at `x = 1 - 2^-k`.
    pub plus: Vec<(Real, Real)>,
    /// `(x, |[f, phi1](x)|)` at `x = -1 + 2^-k`.
    pub minus: Vec<(Real, Real)>,
    pub exp_plus: f64,
    pub exp_minus: f64,
}

/// `[f, phi1] = p (f phi1' - f' phi1) = p g` with `g = f - f' (x - c)` exact.
///
/// Evaluates `|p g|` in extended precision at `x = +-(1 - 2^-k)`,
/// `k = 6..=40`, and fits `|[f, phi1]| ~ (1 -+ x)^e`.
pub fn boundary_decay<S: Scalar>(ps: &ParameterSet<S>, f: &Polynomial<S>) -> Result<BoundaryDecay> {
    let g = f.sub(&f.differentiate().mul(&Polynomial::linear_root(ps.c().clone())));
    if g.is_zero() {
        return Err(Error::Degenerate {
            endpoint: Endpoint::PlusOne,
        });
    }
    let g = g.to_real();
    let ct = coefficient_triple(ps);
    let sample = |endpoint: Endpoint| -> Result<(Vec<(Real, Real)>, f64)> {
        let mut points = Vec::new();
        let (mut ks, mut logs) = (Vec::new(), Vec::new());
        for k in DECAY_K {
            let u = Real::pow2(-(k as isize));
            let x = match endpoint {
                Endpoint::PlusOne => Real::one() - u,
                Endpoint::MinusOne => u - Real::one(),
            };
            let value = (ct.p.evaluate(&ct.b, &x)? * g.evaluate(&x)).abs();
            if value.is_zero() {
                return Err(Error::Degenerate { endpoint });
            }
            ks.push(f64::from(k));
            logs.push(value.ln().to_f64() / std::f64::consts::LN_2);
            points.push((x, value));
        }
        Ok((points, -fit_slope(&ks, &logs)))
    };
    let (plus, exp_plus) = sample(Endpoint::PlusOne)?;
    let (minus, exp_minus) = sample(Endpoint::MinusOne)?;
    Ok(BoundaryDecay {
        plus,
        minus,
        exp_plus,
        exp_minus,
    })
}

/// `(exp_plus, exp_minus)` of [`boundary_decay`].
pub fn boundary_decay_check<S: Scalar>(ps: &ParameterSet<S>, f: &Polynomial<S>) -> Result<(f64, f64)> {
    boundary_decay(ps, f).map(|d| (d.exp_plus, d.exp_minus))
}

/// The tabulated expectation: Case 2 is LC at both ends; in Case 1 an endpoint
/// is LC iff its parameter is below 1.
pub fn table_classification<S: Scalar>(ps: &ParameterSet<S>, endpoint: Endpoint) -> Classification {
    match ps.case() {
        Case::Case2 => Classification::LimitCircle,
        Case::Case1 if *endpoint.exponent_of(ps) < S::one() => Classification::LimitCircle,
        Case::Case1 => Classification::LimitPoint,
    }
}
