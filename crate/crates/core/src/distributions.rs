//! Lifetime distribution catalog: density, distribution and survival
//! functions, quantiles, sampling, hazard rate and mean residual life.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::numerics::{bisect_increasing, integrate, Interval, RngStream, VALIDATION_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ParetoI,
    Exponential,
    Uniform,
    Power,
    Lomax,
    Weibull,
    GammaShifted,
    BetaExponentialShifted,
    TiltedPareto,
    InverseBeta,
    Benini,
    HalfNormal,
    LogNormal,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::ParetoI,
        Family::Exponential,
        Family::Uniform,
        Family::Power,
        Family::Lomax,
        Family::Weibull,
        Family::GammaShifted,
        Family::BetaExponentialShifted,
        Family::TiltedPareto,
        Family::InverseBeta,
        Family::Benini,
        Family::HalfNormal,
        Family::LogNormal,
    ];

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Family::ParetoI => "paretoI",
            Family::Exponential => "exponential",
            Family::Uniform => "uniform",
            Family::Power => "power",
            Family::Lomax => "lomax",
            Family::Weibull => "weibull",
            Family::GammaShifted => "gamma_shifted",
            Family::BetaExponentialShifted => "beta_exponential",
            Family::TiltedPareto => "tilted_pareto",
            Family::InverseBeta => "inverse_beta",
            Family::Benini => "benini",
            Family::HalfNormal => "half_normal",
            Family::LogNormal => "log_normal",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            Family::Uniform => 2,
            Family::HalfNormal | Family::LogNormal => 0,
            _ => 1,
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.cli_name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// A distribution family with validated parameters and its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub params: Vec<f64>,
    pub support: Interval,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl DistributionSpec {
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        if params.len() != family.param_count() {
            return Err(Error::InvalidParameter(format!(
                "{family} takes {} parameter(s), got {}",
                family.param_count(),
                params.len()
            )));
        }
        let one = |lower: f64| Interval::from(lower);
        let support = match family {
            Family::ParetoI => {
                positive("alpha", params[0])?;
                one(1.0)?
            }
            Family::Exponential | Family::Lomax | Family::Weibull => {
                positive("parameter", params[0])?;
                one(0.0)?
            }
            Family::Uniform => {
                let (a, b) = (params[0], params[1]);
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidParameter(format!(
                        "uniform requires finite a < b, got a = {a}, b = {b}"
                    )));
                }
                Interval::new(a, b)?
            }
            Family::Power => {
                positive("c", params[0])?;
                Interval::new(0.0, 1.0)?
            }
            Family::GammaShifted
            | Family::BetaExponentialShifted
            | Family::TiltedPareto
            | Family::Benini => {
                positive("lambda", params[0])?;
                one(1.0)?
            }
            Family::InverseBeta => {
                // lambda = 0 is admitted: it is ParetoI(1).
                let l = params[0];
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "lambda must be non-negative, got {l}"
                    )));
                }
                one(1.0)?
            }
            Family::HalfNormal | Family::LogNormal => one(0.0)?,
        };
        Ok(DistributionSpec {
            family,
            params: params.to_vec(),
            support,
        })
    }

    pub fn pareto_i(alpha: f64) -> Result<Self> {
        Self::new(Family::ParetoI, &[alpha])
    }
    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::Exponential, &[lambda])
    }
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Uniform, &[a, b])
    }
    pub fn power(c: f64) -> Result<Self> {
        Self::new(Family::Power, &[c])
    }
    pub fn lomax(m: f64) -> Result<Self> {
        Self::new(Family::Lomax, &[m])
    }
    pub fn weibull(shape: f64) -> Result<Self> {
        Self::new(Family::Weibull, &[shape])
    }
    pub fn gamma_shifted(lambda: f64) -> Result<Self> {
        Self::new(Family::GammaShifted, &[lambda])
    }
    pub fn beta_exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::BetaExponentialShifted, &[lambda])
    }
    pub fn tilted_pareto(lambda: f64) -> Result<Self> {
        Self::new(Family::TiltedPareto, &[lambda])
    }
    pub fn inverse_beta(lambda: f64) -> Result<Self> {
        Self::new(Family::InverseBeta, &[lambda])
    }
    pub fn benini(lambda: f64) -> Result<Self> {
        Self::new(Family::Benini, &[lambda])
    }
    pub fn half_normal() -> Self {
        Self::new(Family::HalfNormal, &[]).expect("parameter-free")
    }
    pub fn log_normal() -> Self {
        Self::new(Family::LogNormal, &[]).expect("parameter-free")
    }

    fn p(&self) -> f64 {
        self.params.first().copied().unwrap_or(f64::NAN)
    }

    /// Density at `x`; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() || x < self.support.lower || x > self.support.upper {
            return 0.0;
        }
        self.density_at(x, x - self.support.lower)
    }

    /// Density at `support.lower + y`, evaluated without cancellation in `y`.
    /// Families with a singular density at a nonzero lower bound need this
    /// form for accurate quadrature near the edge.
    pub fn pdf_from_lower(&self, y: f64) -> f64 {
        let x = self.support.lower + y;
        if y.is_nan() || y < 0.0 || x > self.support.upper {
            return 0.0;
        }
        self.density_at(x, y)
    }

    fn density_at(&self, x: f64, y: f64) -> f64 {
        let p = self.p();
        match self.family {
            Family::ParetoI => p * x.powf(-(p + 1.0)),
            Family::Exponential => p * (-p * x).exp(),
            Family::Uniform => 1.0 / (self.params[1] - self.params[0]),
            Family::Power => p * x.powf(p - 1.0),
            Family::Lomax => p * (1.0 + x).powf(-(1.0 + p)),
            Family::Weibull => p * x.powf(p - 1.0) * (-x.powf(p)).exp(),
            Family::GammaShifted => {
                if y == 0.0 {
                    return if p < 1.0 {
                        f64::INFINITY
                    } else if p == 1.0 {
                        1.0
                    } else {
                        0.0
                    };
                }
                ((p - 1.0) * y.ln() - y - ln_gamma(p)).exp()
            }
            Family::BetaExponentialShifted => {
                let base = -(-y).exp_m1();
                p * (-y).exp() * base.powf(p - 1.0)
            }
            Family::TiltedPareto => (1.0 + p) * (x + p).powi(-2),
            Family::InverseBeta => (1.0 + p) * y.powf(p) * x.powf(-(2.0 + p)),
            Family::Benini => {
                let l = x.ln();
                x.powi(-2) * (1.0 + 2.0 * p * l) * (-p * l * l).exp()
            }
            Family::HalfNormal => (2.0 / PI).sqrt() * (-0.5 * x * x).exp(),
            Family::LogNormal => {
                if x == 0.0 {
                    return 0.0;
                }
                let l = x.ln();
                (-0.5 * l * l).exp() / (x * (2.0 * PI).sqrt())
            }
        }
    }

    /// Survival function `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 1.0;
        }
        if x >= self.support.upper {
            return 0.0;
        }
        let p = self.p();
        let y = x - self.support.lower;
        match self.family {
            Family::ParetoI => x.powf(-p),
            Family::Exponential => (-p * x).exp(),
            Family::Uniform => (self.params[1] - x) / (self.params[1] - self.params[0]),
            Family::Power => -(p * x.ln()).exp_m1(),
            Family::Lomax => (1.0 + x).powf(-p),
            Family::Weibull => (-x.powf(p)).exp(),
            Family::GammaShifted => gamma_ur(p, y),
            Family::BetaExponentialShifted => -(p * (-(-y).exp()).ln_1p()).exp_m1(),
            Family::TiltedPareto => (1.0 + p) / (x + p),
            Family::InverseBeta => -((1.0 + p) * (-1.0 / x).ln_1p()).exp_m1(),
            Family::Benini => {
                let l = x.ln();
                (-l - p * l * l).exp()
            }
            Family::HalfNormal => erfc(x / SQRT_2),
            Family::LogNormal => 0.5 * erfc(x.ln() / SQRT_2),
        }
    }

    /// Distribution function `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 0.0;
        }
        if x >= self.support.upper {
            return 1.0;
        }
        let p = self.p();
        let y = x - self.support.lower;
        match self.family {
            Family::Exponential => -(-p * x).exp_m1(),
            Family::Power => x.powf(p),
            Family::Weibull => -(-x.powf(p)).exp_m1(),
            Family::GammaShifted => gamma_lr(p, y),
            Family::BetaExponentialShifted => (-(-y).exp_m1()).powf(p),
            Family::InverseBeta => (1.0 - 1.0 / x).powf(1.0 + p),
            _ => 1.0 - self.survival(x),
        }
    }

    /// Inverse distribution function. Closed form where one exists,
    /// bisection on the distribution (or survival) function otherwise.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        let p = self.p();
        // ln(1 - u) without cancellation
        let log_surv = (-u).ln_1p();
        let x = match self.family {
            Family::ParetoI => (-log_surv / p).exp(),
            Family::Exponential => -log_surv / p,
            Family::Uniform => self.params[0] + u * (self.params[1] - self.params[0]),
            Family::Power => u.powf(1.0 / p),
            Family::Lomax => (-log_surv / p).exp_m1(),
            Family::Weibull => (-log_surv).powf(1.0 / p),
            Family::BetaExponentialShifted => 1.0 - (-(u.ln() / p).exp()).ln_1p(),
            Family::TiltedPareto => (1.0 + p) / (1.0 - u) - p,
            Family::InverseBeta => 1.0 / -(u.ln() / (1.0 + p)).exp_m1(),
            Family::Benini => ((-1.0 + (1.0 - 4.0 * p * log_surv).sqrt()) / (2.0 * p)).exp(),
            Family::HalfNormal => SQRT_2 * erfc_inv(1.0 - u),
            Family::LogNormal => (-SQRT_2 * erfc_inv(2.0 * u)).exp(),
            Family::GammaShifted => self.quantile_by_bisection(u),
        };
        Ok(x)
    }

    fn quantile_by_bisection(&self, u: f64) -> f64 {
        let lower = self.support.lower;
        let mut hi = lower + 1.0;
        while self.cdf(hi) < u {
            hi = lower + 2.0 * (hi - lower);
        }
        if u <= 0.5 {
            bisect_increasing(|x| self.cdf(x) - u, lower, hi, 1e-15)
        } else {
            let q = 1.0 - u;
            bisect_increasing(|x| q - self.survival(x), lower, hi, 1e-15)
        }
    }

    /// `n` independent draws.
    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let values = match self.family {
            Family::GammaShifted => {
                let gamma = Gamma::new(self.p(), 1.0)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                (0..n).map(|_| 1.0 + gamma.sample(rng)).collect()
            }
            _ => {
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(self.quantile(rng.next_uniform())?);
                }
                out
            }
        };
        Sample::new(values)
    }

    /// Hazard rate `f(t) / S(t)`.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        let s = self.survival(t);
        if !(s > 0.0) {
            return Err(Error::DegenerateTail { t });
        }
        Ok(self.pdf(t) / s)
    }

    pub fn has_finite_mean(&self) -> bool {
        match self.family {
            Family::ParetoI | Family::Lomax => self.p() > 1.0,
            Family::TiltedPareto | Family::InverseBeta => false,
            _ => true,
        }
    }

    /// Mean residual life `∫_t^∞ S(x) dx / S(t)`.
    pub fn mean_residual_life(&self, t: f64) -> Result<f64> {
        if !self.has_finite_mean() {
            return Err(Error::InfiniteMean(self.to_string()));
        }
        let s = self.survival(t);
        if !(s > 0.0) {
            return Err(Error::DegenerateTail { t });
        }
        let start = t.max(self.support.lower);
        let head = start - t; // S = 1 below the support
        if start >= self.support.upper {
            return Ok(head);
        }
        let domain = Interval::new(start, self.support.upper)?;
        let tail = integrate(|x| self.survival(x), domain, 1e-10)?;
        Ok((head + tail) / s)
    }

    /// Mean, by closed form where cheap, quadrature otherwise.
    pub fn mean(&self) -> Result<f64> {
        self.mean_residual_life(self.support.lower)
            .map(|m| m + self.support.lower)
    }

    /// Checks the normalization of the density by quadrature; returns the
    /// integral.
    pub fn total_mass(&self) -> Result<f64> {
        let width = self.support.width();
        integrate(
            |y| self.pdf_from_lower(y),
            Interval::new(0.0, width)?,
            VALIDATION_REL_TOL * 1e-2,
        )
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family)?;
        if self.params.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `family:p1,p2` (use `-` or nothing for parameter-free families).
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let family: Family = name.parse()?;
        let params = parse_params(rest)?;
        DistributionSpec::new(family, &params)
    }
}

/// Parses a comma-separated parameter list; `-` or empty means none.
pub fn parse_params(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse parameter '{t}'")))
        })
        .collect()
}

/// `Σ g(v_i)` taken over mirrored pairs `(i, n-1-i)`, so sums over a sorted
/// view are unchanged bitwise when the data are reflected.
fn mirrored_sum(v: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let n = v.len();
    let mut sum = 0.0;
    for i in 0..n / 2 {
        sum += g(v[i]) + g(v[n - 1 - i]);
    }
    if n % 2 == 1 {
        sum += g(v[n / 2]);
    }
    sum
}

/// Observations together with their order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite observation {bad}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Sample { values, sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `X_(1) <= ... <= X_(n)`.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mirrored_sum(&self.sorted, |x| x) / self.len() as f64
    }

    /// Standard deviation with divisor `n - 1`.
    pub fn std_dev(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss = mirrored_sum(&self.sorted, |x| (x - m) * (x - m));
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|x| c * x).collect())
    }

    /// Empirical distribution function at `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.len() as f64
    }

    /// Kolmogorov distance between the empirical distribution and `cdf`.
    pub fn kolmogorov_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                ((i + 1) as f64 / n - f).max(f - i as f64 / n)
            })
            .fold(0.0, f64::max)
    }
}
