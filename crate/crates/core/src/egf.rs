//! Entropy generating functions of lifetime distributions.
//!
//! | quantity | definition |
//! |---|---|
//! | `egf`           | `B_s(X)     = ∫ f^s(x) dx` |
//! | `egf_residual`  | `B_s(X;t)   = ∫_t^∞ (f(x)/S(t))^s dx` |
//! | `wegf`          | `B_s(W,X)   = ∫ x f^s(x) dx` |
//! | `wregf`         | `B_s(W,X;t) = ∫_t^∞ x (f(x)/S(t))^s dx` |
//!
//! Closed forms are used where they are known to be correct; everything else
//! goes through adaptive quadrature. Orders `s <= 0` and `s = 1` are
//! rejected.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_error, Interval, Quadrature};

/// Relative tolerance used for generating-function quadrature.
pub const QUAD_REL_TOL: f64 = 1e-10;
/// Tighter tolerance for values fed into finite differences.
const DERIVATIVE_REL_TOL: f64 = 1e-12;

/// Order `s` and threshold `t` at which a residual generating function is
/// evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgfQuery {
    pub s: f64,
    pub t: f64,
}

impl EgfQuery {
    pub fn new(s: f64, t: f64) -> Self {
        EgfQuery { s, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgfValue {
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}

impl EgfValue {
    fn closed(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("closed form is not finite: {value}")));
        }
        Ok(EgfValue {
            value,
            method: Method::ClosedForm,
            est_error: 0.0,
        })
    }

    fn quadrature(q: Quadrature) -> Self {
        EgfValue {
            value: q.value,
            method: Method::Quadrature,
            est_error: q.error,
        }
    }
}

fn check_order(s: f64) -> Result<()> {
    if s == 1.0 {
        return Err(Error::OrderOne);
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("order s must be positive, got {s}")));
    }
    Ok(())
}

/// Verifies that `∫ f^s` (or `∫ x f^s` when `weighted`) converges for `dist`.
pub fn convergence(dist: &DistributionSpec, s: f64, weighted: bool) -> Result<()> {
    check_order(s)?;
    let p = dist.params.first().copied().unwrap_or(0.0);
    let fail = |cond: String| Err(Error::Convergence(cond));
    let need = if weighted { 2.0 } else { 1.0 };
    match dist.family {
        Family::ParetoI => {
            let v = (p + 1.0) * s;
            if v <= need {
                return fail(format!("(alpha+1)s > {need}, got (alpha+1)s = {v}"));
            }
        }
        Family::Lomax => {
            let v = (1.0 + p) * s;
            if v <= need {
                return fail(format!("(1+m)s > {need}, got (1+m)s = {v}"));
            }
        }
        Family::Power | Family::Weibull => {
            let v = (p - 1.0) * s;
            if v <= -need {
                return fail(format!("(c-1)s > -{need}, got (c-1)s = {v}"));
            }
        }
        Family::GammaShifted | Family::BetaExponentialShifted => {
            let v = (p - 1.0) * s;
            if v <= -1.0 {
                return fail(format!("(lambda-1)s > -1, got (lambda-1)s = {v}"));
            }
        }
        Family::TiltedPareto | Family::InverseBeta => {
            let v = 2.0 * s;
            if v <= need {
                return fail(format!("2s > {need}, got 2s = {v}"));
            }
        }
        Family::Exponential
        | Family::Uniform
        | Family::Benini
        | Family::HalfNormal
        | Family::LogNormal => {}
    }
    Ok(())
}

/// Integrates `g(x, f(x))` over `[from, upper)` of the support, in
/// coordinates offset from the lower support bound.
fn integrate_density<G>(dist: &DistributionSpec, from: f64, g: G, rel_tol: f64) -> Result<Quadrature>
where
    G: Fn(f64, f64) -> f64,
{
    let lower = dist.support.lower;
    let y0 = (from - lower).max(0.0);
    let domain = Interval::new(y0, dist.support.width())?;
    integrate_with_error(
        |y| {
            let f = dist.pdf_from_lower(y);
            if f > 0.0 {
                g(lower + y, f)
            } else {
                0.0
            }
        },
        domain,
        rel_tol,
    )
}

fn residual_survival(dist: &DistributionSpec, t: f64) -> Result<f64> {
    if t < dist.support.lower {
        return Err(Error::InvalidParameter(format!(
            "threshold t = {t} lies below the support start {}",
            dist.support.lower
        )));
    }
    let surv = dist.survival(t);
    if !(surv > 0.0) {
        return Err(Error::DegenerateTail { t });
    }
    Ok(surv)
}

/// `B_s(X) = ∫ f^s dx`.
pub fn egf(dist: &DistributionSpec, s: f64) -> Result<EgfValue> {
    convergence(dist, s, false)?;
    match dist.family {
        Family::Uniform => EgfValue::closed((dist.params[1] - dist.params[0]).powf(1.0 - s)),
        Family::Exponential => EgfValue::closed(dist.params[0].powf(s - 1.0) / s),
        _ => egf_quadrature(dist, s),
    }
}

pub fn egf_quadrature(dist: &DistributionSpec, s: f64) -> Result<EgfValue> {
    convergence(dist, s, false)?;
    let q = integrate_density(dist, dist.support.lower, |_, f| f.powf(s), QUAD_REL_TOL)?;
    Ok(EgfValue::quadrature(q))
}

/// `B_s(X;t) = ∫_t^∞ (f/S(t))^s dx`.
pub fn egf_residual(dist: &DistributionSpec, q: EgfQuery) -> Result<EgfValue> {
    convergence(dist, q.s, false)?;
    let surv = residual_survival(dist, q.t)?;
    match dist.family {
        Family::Exponential => return EgfValue::closed(dist.params[0].powf(q.s - 1.0) / q.s),
        Family::Uniform => return EgfValue::closed((dist.params[1] - q.t).powf(1.0 - q.s)),
        _ => {}
    }
    let raw = integrate_density(dist, q.t, |_, f| f.powf(q.s), QUAD_REL_TOL)?;
    let scale = surv.powf(-q.s);
    Ok(EgfValue {
        value: raw.value * scale,
        method: Method::Quadrature,
        est_error: raw.error * scale,
    })
}

/// Closed form of `B_s(W,X)` for the Lomax, power, Pareto, uniform and
/// exponential families. `None` for other families.
pub fn wegf_closed_form(dist: &DistributionSpec, s: f64) -> Option<f64> {
    let p = dist.params.first().copied().unwrap_or(f64::NAN);
    match dist.family {
        Family::Lomax => {
            let k = (1.0 + p) * s;
            Some(p.powf(s) / ((k - 1.0) * (k - 2.0)))
        }
        Family::Power => Some(p.powf(s) / ((p - 1.0) * s + 2.0)),
        Family::ParetoI => Some(p.powf(s) / ((p + 1.0) * s - 2.0)),
        Family::Uniform => {
            let (a, b) = (dist.params[0], dist.params[1]);
            Some((b * b - a * a) / (2.0 * (b - a).powf(s)))
        }
        Family::Exponential => Some(1.0 / (s * s * p.powf(2.0 - s))),
        _ => None,
    }
}

/// `B_s(W,X) = ∫ x f^s dx`.
pub fn wegf(dist: &DistributionSpec, s: f64) -> Result<EgfValue> {
    convergence(dist, s, true)?;
    match wegf_closed_form(dist, s) {
        Some(v) => EgfValue::closed(v),
        None => wegf_quadrature(dist, s),
    }
}

pub fn wegf_quadrature(dist: &DistributionSpec, s: f64) -> Result<EgfValue> {
    convergence(dist, s, true)?;
    let q = integrate_density(dist, dist.support.lower, |x, f| x * f.powf(s), QUAD_REL_TOL)?;
    Ok(EgfValue::quadrature(q))
}

/// Closed form of `B_s(W,X;t)` for the uniform, exponential and Pareto
/// families. The Pareto form is `α^s t^{2-s} / ((α+1)s - 2)`.
pub fn wregf_closed_form(dist: &DistributionSpec, q: EgfQuery) -> Option<f64> {
    let EgfQuery { s, t } = q;
    match dist.family {
        Family::Uniform => {
            let b = dist.params[1];
            Some((b + t) / (2.0 * (b - t).powf(s - 1.0)))
        }
        Family::Exponential => {
            let l = dist.params[0];
            Some(l.powf(s) * (1.0 + l * s * t) / (l * s).powi(2))
        }
        Family::ParetoI => {
            let a = dist.params[0];
            Some(a.powf(s) * t.powf(2.0 - s) / ((a + 1.0) * s - 2.0))
        }
        _ => None,
    }
}

/// `B_s(W,X;t) = ∫_t^∞ x (f/S(t))^s dx`.
pub fn wregf(dist: &DistributionSpec, q: EgfQuery) -> Result<EgfValue> {
    convergence(dist, q.s, true)?;
    residual_survival(dist, q.t)?;
    match wregf_closed_form(dist, q) {
        Some(v) => EgfValue::closed(v),
        None => wregf_quadrature(dist, q, QUAD_REL_TOL),
    }
}

pub fn wregf_quadrature(dist: &DistributionSpec, q: EgfQuery, rel_tol: f64) -> Result<EgfValue> {
    convergence(dist, q.s, true)?;
    let surv = residual_survival(dist, q.t)?;
    let raw = integrate_density(dist, q.t, |x, f| x * f.powf(q.s), rel_tol)?;
    let scale = surv.powf(-q.s);
    Ok(EgfValue {
        value: raw.value * scale,
        method: Method::Quadrature,
        est_error: raw.error * scale,
    })
}

/// `B_s(W,X;t)` through the residual generating function:
/// `t B_s(X;t) + S(t)^{-s} ∫_t^∞ S(y)^s B_s(X;y) dy`, where
/// `S(y)^s B_s(X;y) = ∫_y^∞ f^s`.
pub fn wregf_from_residual_egf(dist: &DistributionSpec, q: EgfQuery) -> Result<f64> {
    convergence(dist, q.s, true)?;
    let surv = residual_survival(dist, q.t)?;
    let tail = |y: f64| -> Result<f64> {
        Ok(integrate_density(dist, y, |_, f| f.powf(q.s), 1e-12)?.value)
    };
    let first = q.t * tail(q.t)?;
    let failure = std::cell::RefCell::new(None);
    let outer_domain = Interval::new(q.t, dist.support.upper)?;
    let outer = integrate_with_error(
        |y| match tail(y) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        outer_domain,
        1e-10,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((first + outer.value) / surv.powf(q.s))
}

fn as_convergence(e: Error, what: &str) -> Error {
    match e {
        Error::IntegrationFailure { .. } => Error::Convergence(format!("finite {what}")),
        other => other,
    }
}

/// Shannon entropy `-∫ f ln f`.
pub fn shannon_entropy(dist: &DistributionSpec) -> Result<f64> {
    integrate_density(dist, dist.support.lower, |_, f| -f * f.ln(), QUAD_REL_TOL)
        .map(|q| q.value)
        .map_err(|e| as_convergence(e, "Shannon entropy"))
}

/// Weighted entropy `-∫ x f ln f`.
pub fn weighted_entropy(dist: &DistributionSpec) -> Result<f64> {
    integrate_density(dist, dist.support.lower, |x, f| -x * f * f.ln(), QUAD_REL_TOL)
        .map(|q| q.value)
        .map_err(|e| as_convergence(e, "weighted entropy"))
}

/// `E[ln X] = ∫ f ln x`.
pub fn mean_log(dist: &DistributionSpec) -> Result<f64> {
    integrate_density(dist, dist.support.lower, |x, f| f * x.ln(), QUAD_REL_TOL)
        .map(|q| q.value)
        .map_err(|e| as_convergence(e, "E[ln X]"))
}

fn wregf_precise(dist: &DistributionSpec, q: EgfQuery) -> Result<f64> {
    match wregf_closed_form(dist, q) {
        Some(v) => {
            convergence(dist, q.s, true)?;
            residual_survival(dist, q.t)?;
            Ok(v)
        }
        None => Ok(wregf_quadrature(dist, q, DERIVATIVE_REL_TOL)?.value),
    }
}

/// Central-difference derivative of `B_s(W,X;t)` in `t`, with step
/// `1e-4 max(1, |t|)`.
pub fn wregf_derivative(dist: &DistributionSpec, q: EgfQuery) -> Result<f64> {
    let step = 1e-4 * q.t.abs().max(1.0);
    if q.t - step < dist.support.lower {
        return Err(Error::Domain(format!(
            "t - step = {} falls below the support start {}",
            q.t - step,
            dist.support.lower
        )));
    }
    let hi = wregf_precise(dist, EgfQuery::new(q.s, q.t + step))?;
    let lo = wregf_precise(dist, EgfQuery::new(q.s, q.t - step))?;
    Ok((hi - lo) / (2.0 * step))
}

/// Residual of the hazard-rate relation
/// `B'(t) - s h(t) B(t) + t h(t)^s`, which vanishes identically.
pub fn hazard_relation_residual(dist: &DistributionSpec, q: EgfQuery) -> Result<f64> {
    let d = wregf_derivative(dist, q)?;
    let b = wregf(dist, q)?.value;
    let h = dist.hazard(q.t)?;
    Ok(d - q.s * h * b + q.t * h.powf(q.s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    /// Increasing weighted residual generating function.
    Iwregf,
    /// Decreasing weighted residual generating function.
    Dwregf,
    Neither,
}

const MONOTONE_SLACK: f64 = 1e-6;

/// Classifies `t -> B_s(W,X;t)` on `t_grid` by the sign of its derivative.
/// A derivative that is zero within slack everywhere counts as increasing.
pub fn classify_monotonicity(dist: &DistributionSpec, s: f64, t_grid: &[f64]) -> Result<Monotonicity> {
    let derivs = t_grid
        .iter()
        .map(|&t| wregf_derivative(dist, EgfQuery::new(s, t)))
        .collect::<Result<Vec<_>>>()?;
    if derivs.iter().all(|&d| d >= -MONOTONE_SLACK) {
        Ok(Monotonicity::Iwregf)
    } else if derivs.iter().all(|&d| d <= MONOTONE_SLACK) {
        Ok(Monotonicity::Dwregf)
    } else {
        Ok(Monotonicity::Neither)
    }
}

/// 20 log-spaced thresholds spanning the 1% to 99% quantiles.
pub fn default_t_grid(dist: &DistributionSpec) -> Result<Vec<f64>> {
    let lo = dist.quantile(0.01)?;
    let hi = dist.quantile(0.99)?;
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..20)
        .map(|i| (a + (b - a) * i as f64 / 19.0).exp())
        .collect())
}

/// `(t/s) h(t)^{s-1}`: a lower bound on `B_s(W,X;t)` for IWREGF laws and an
/// upper bound for DWREGF laws.
pub fn hazard_bound(dist: &DistributionSpec, s: f64, t: f64) -> Result<f64> {
    check_order(s)?;
    Ok(t / s * dist.hazard(t)?.powf(s - 1.0))
}

/// The same bound written through the mean residual life,
/// `(t/s) ((1 + m'(t)) / m(t))^{s-1}`, with `m'` by central difference.
pub fn mrl_bound(dist: &DistributionSpec, s: f64, t: f64) -> Result<f64> {
    check_order(s)?;
    let m = dist.mean_residual_life(t)?;
    let step = 1e-4 * t.abs().max(1.0);
    let hi = dist.mean_residual_life(t + step)?;
    let lo = dist.mean_residual_life(t - step)?;
    let dm = (hi - lo) / (2.0 * step);
    Ok(t / s * ((1.0 + dm) / m).powf(s - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn egf_examples() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        for s in [0.5, 2.0, 3.0] {
            assert_eq!(egf(&u, s).unwrap().value, 1.0);
        }
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert!(rel(egf(&e, 2.0).unwrap().value, 0.5) < 1e-14);
        assert!(rel(egf_quadrature(&e, 2.0).unwrap().value, 0.5) < 1e-9);
        // ∫_1^∞ x^{-6} dx = 1/5
        let p = DistributionSpec::pareto_i(1.0).unwrap();
        assert!(rel(egf(&p, 3.0).unwrap().value, 0.2) < 1e-9);
    }

    #[test]
    fn residual_egf_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let v = egf_residual(&e, EgfQuery::new(2.0, 3.0)).unwrap().value;
        assert!(rel(v, 0.5) < 1e-12);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let v = egf_residual(&u, EgfQuery::new(2.0, 0.5)).unwrap().value;
        assert!(rel(v, 2.0) < 1e-12);
        let w = DistributionSpec::weibull(2.0).unwrap();
        let at_start = egf_residual(&w, EgfQuery::new(2.0, 0.0)).unwrap().value;
        assert!(rel(at_start, egf(&w, 2.0).unwrap().value) < 1e-12);
    }

    #[test]
    fn wegf_examples() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert_eq!(wegf(&u, 2.0).unwrap().value, 0.5);
        let p = DistributionSpec::pareto_i(1.0).unwrap();
        assert_eq!(wegf(&p, 2.0).unwrap().value, 0.5);
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(wegf(&e, 2.0).unwrap().value, 0.25);
        // independent route: ∫ x e^{-2x} dx
        let oracle = integrate(|x| x * (-2.0 * x).exp(), Interval::from(0.0).unwrap(), 1e-10).unwrap();
        assert!(rel(oracle, 0.25) < 1e-9);
    }

    #[test]
    fn wregf_examples() {
        let p = DistributionSpec::pareto_i(3.0).unwrap();
        for t in [1.0, 2.0, 7.5] {
            assert!(rel(wregf(&p, EgfQuery::new(2.0, t)).unwrap().value, 1.5) < 1e-14);
        }
        let e = DistributionSpec::exponential(1.0).unwrap();
        let closed = wregf(&e, EgfQuery::new(2.0, 1.0)).unwrap();
        assert_eq!(closed.method, Method::ClosedForm);
        assert!(rel(closed.value, 0.75) < 1e-14);
        let quad = wregf_quadrature(&e, EgfQuery::new(2.0, 1.0), 1e-10).unwrap();
        assert!(rel(quad.value, 0.75) < 1e-9);

        let w = DistributionSpec::weibull(1.7).unwrap();
        let start = wregf(&w, EgfQuery::new(2.0, 0.0)).unwrap().value;
        assert!(rel(start, wegf(&w, 2.0).unwrap().value) < 1e-12);
    }

    #[test]
    fn order_and_convergence_guards() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(egf(&e, 1.0).unwrap_err(), Error::OrderOne);
        assert!(matches!(egf(&e, 0.0), Err(Error::InvalidParameter(_))));
        let p = DistributionSpec::pareto_i(0.5).unwrap();
        assert!(matches!(wegf(&p, 1.2), Err(Error::Convergence(_))));
        let l = DistributionSpec::lomax(0.5).unwrap();
        assert!(matches!(wegf(&l, 1.2), Err(Error::Convergence(_))));
        let pw = DistributionSpec::power(0.2).unwrap();
        assert!(matches!(egf(&pw, 2.0), Err(Error::Convergence(_))));
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!(matches!(
            wregf(&u, EgfQuery::new(2.0, 1.0)),
            Err(Error::DegenerateTail { .. })
        ));
        assert!(wregf(&p, EgfQuery::new(3.0, 0.5)).is_err());
    }

    #[test]
    fn entropy_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert!((shannon_entropy(&e).unwrap() - 1.0).abs() < 1e-9);
        assert!((weighted_entropy(&e).unwrap() - 2.0).abs() < 1e-9);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!(shannon_entropy(&u).unwrap().abs() < 1e-12);
        assert!((mean_log(&u).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn derivative_examples() {
        // d/dt of (1 + 2t)/4 is 1/2 for the unit exponential at s = 2
        let e = DistributionSpec::exponential(1.0).unwrap();
        for t in [0.5, 1.0, 4.0] {
            let d = wregf_derivative(&e, EgfQuery::new(2.0, t)).unwrap();
            assert!((d - 0.5).abs() < 1e-8, "{d}");
        }
        let p = DistributionSpec::pareto_i(2.0).unwrap();
        for t in [1.5, 3.0, 10.0] {
            let d = wregf_derivative(&p, EgfQuery::new(2.0, t)).unwrap();
            assert!(d.abs() < 1e-9, "{d}");
        }
        let w = DistributionSpec::weibull(3.0).unwrap();
        for t in [0.3, 0.8, 1.5] {
            let d = wregf_derivative(&w, EgfQuery::new(0.5, t)).unwrap();
            assert!(d.abs() < 1e-4, "{d}");
        }
    }

    #[test]
    fn monotonicity_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
        assert_eq!(classify_monotonicity(&e, 2.0, &grid).unwrap(), Monotonicity::Iwregf);
        let p = DistributionSpec::pareto_i(2.0).unwrap();
        let pgrid = default_t_grid(&p).unwrap();
        assert_eq!(classify_monotonicity(&p, 2.0, &pgrid).unwrap(), Monotonicity::Iwregf);
        // (1+t) / (2 (1-t)^2) has derivative (3+t) / (2 (1-t)^3) > 0
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let ugrid: Vec<f64> = (1..=9).map(|i| i as f64 * 0.1).collect();
        assert_eq!(classify_monotonicity(&u, 3.0, &ugrid).unwrap(), Monotonicity::Iwregf);
        // Pareto with s = 3: α^3 t^{-1} / (3α+1) decreases
        assert_eq!(classify_monotonicity(&p, 3.0, &pgrid).unwrap(), Monotonicity::Dwregf);
    }

    #[test]
    fn mrl_bound_matches_hazard_bound() {
        let e = DistributionSpec::exponential(1.5).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let a = hazard_bound(&e, 2.0, t).unwrap();
            let b = mrl_bound(&e, 2.0, t).unwrap();
            assert!(rel(a, b) < 1e-5, "{a} {b}");
        }
    }
}
