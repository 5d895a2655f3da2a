//! Kernel density estimation with linear combinations of kernels.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Sample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKernel {
    Gaussian,
    Epanechnikov,
    Triangular,
    Uniform,
}

impl BaseKernel {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            BaseKernel::Gaussian => (-0.5 * u * u).exp() / (2.0 * PI).sqrt(),
            BaseKernel::Epanechnikov => {
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    0.75 * (1.0 - u * u)
                }
            }
            BaseKernel::Triangular => {
                let a = u.abs();
                if a >= 1.0 {
                    0.0
                } else {
                    1.0 - a
                }
            }
            BaseKernel::Uniform => {
                if u.abs() > 1.0 {
                    0.0
                } else {
                    0.5
                }
            }
        }
    }

    /// Half-width of the support, `None` for the Gaussian.
    pub fn radius(self) -> Option<f64> {
        match self {
            BaseKernel::Gaussian => None,
            _ => Some(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseKernel::Gaussian => "gaussian",
            BaseKernel::Epanechnikov => "epanechnikov",
            BaseKernel::Triangular => "triangular",
            BaseKernel::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for BaseKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(BaseKernel::Gaussian),
            "epanechnikov" => Ok(BaseKernel::Epanechnikov),
            "triangular" => Ok(BaseKernel::Triangular),
            "uniform" => Ok(BaseKernel::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown kernel '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelComponent {
    pub weight: f64,
    pub base: BaseKernel,
}

/// Convex combination `k(u) = Σ a_i k_i(u)` of symmetric base kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub components: Vec<KernelComponent>,
}

impl KernelSpec {
    pub fn new(components: Vec<KernelComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidConfig("kernel needs at least one component".into()));
        }
        if let Some(c) = components.iter().find(|c| !(c.weight > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "kernel weights must be positive, got {}",
                c.weight
            )));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "kernel weights must sum to 1, got {total}"
            )));
        }
        Ok(KernelSpec { components })
    }

    pub fn single(base: BaseKernel) -> Self {
        KernelSpec {
            components: vec![KernelComponent { weight: 1.0, base }],
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self.components.as_slice() {
            [only] => only.weight * only.base.eval(u),
            many => many.iter().map(|c| c.weight * c.base.eval(u)).sum(),
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::single(BaseKernel::Gaussian)
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = Error;

    /// `gaussian`, or a mixture such as `0.5:gaussian,0.5:epanechnikov`.
    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(',')
            .map(|part| match part.split_once(':') {
                Some((w, k)) => {
                    let weight = w.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("bad kernel weight '{w}'"))
                    })?;
                    Ok(KernelComponent {
                        weight,
                        base: k.parse()?,
                    })
                }
                None => Ok(KernelComponent {
                    weight: 1.0,
                    base: part.parse()?,
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        KernelSpec::new(components)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// `1.06 σ̂ n^{-1/5}` with the `n - 1` standard deviation.
    #[default]
    Silverman,
    Fixed(f64),
}

impl std::str::FromStr for BandwidthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("silverman") {
            return Ok(BandwidthRule::Silverman);
        }
        let h: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad bandwidth '{s}'")))?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("bandwidth must be positive, got {h}")));
        }
        Ok(BandwidthRule::Fixed(h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct KdeConfig {
    pub kernel: KernelSpec,
    pub bandwidth_rule: BandwidthRule,
}

impl KdeConfig {
    pub fn fixed(kernel: KernelSpec, h: f64) -> Self {
        KdeConfig {
            kernel,
            bandwidth_rule: BandwidthRule::Fixed(h),
        }
    }

    pub fn validate(&self) -> Result<()> {
        KernelSpec::new(self.kernel.components.clone())?;
        if let BandwidthRule::Fixed(h) = self.bandwidth_rule {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidConfig(format!("bandwidth must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

pub fn bandwidth(config: &KdeConfig, sample: &Sample) -> Result<f64> {
    match config.bandwidth_rule {
        BandwidthRule::Fixed(h) => {
            if h > 0.0 && h.is_finite() {
                Ok(h)
            } else {
                Err(Error::InvalidConfig(format!("bandwidth must be positive, got {h}")))
            }
        }
        BandwidthRule::Silverman => {
            let n = sample.len();
            if n < 2 {
                return Err(Error::InsufficientData { needed: 2, got: n });
            }
            let sd = sample.std_dev();
            if !(sd > 0.0) {
                return Err(Error::DegenerateSample);
            }
            Ok(1.06 * sd * (n as f64).powf(-0.2))
        }
    }
}

/// A density estimate fitted to a sample.
#[derive(Debug, Clone)]
pub struct Kde<'a> {
    kernel: &'a KernelSpec,
    data: &'a [f64],
    h: f64,
}

impl<'a> Kde<'a> {
    pub fn fit(config: &'a KdeConfig, sample: &'a Sample) -> Result<Self> {
        let h = bandwidth(config, sample)?;
        Ok(Kde {
            kernel: &config.kernel,
            data: sample.sorted(),
            h,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    /// `(1/(n h)) Σ_j Σ_i a_i k_i((x - X_j)/h)`.
    ///
    /// Terms are summed in mirrored pairs `(j, n-1-j)` of the sorted data so
    /// that reflecting both sample and point gives a bitwise identical value.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.data.len();
        let k = |xj: f64| self.kernel.eval((x - xj) / self.h);
        let mut sum = 0.0;
        for j in 0..n / 2 {
            sum += k(self.data[j]) + k(self.data[n - 1 - j]);
        }
        if n % 2 == 1 {
            sum += k(self.data[n / 2]);
        }
        sum / (n as f64 * self.h)
    }

    /// The estimate at every order statistic, `f̂(X_(i))`, using each
    /// kernel pair once.
    pub fn at_order_statistics(&self) -> Vec<f64> {
        let n = self.data.len();
        let mut acc = vec![self.kernel.eval(0.0); n];
        for i in 0..n {
            let xi = self.data[i];
            for j in (i + 1)..n {
                let k = self.kernel.eval((xi - self.data[j]) / self.h);
                acc[i] += k;
                acc[j] += k;
            }
        }
        let norm = 1.0 / (n as f64 * self.h);
        acc.iter_mut().for_each(|a| *a *= norm);
        acc
    }
}

pub fn kde_eval(config: &KdeConfig, sample: &Sample, x: f64) -> Result<f64> {
    Ok(Kde::fit(config, sample)?.eval(x))
}

/// Leave-one-out estimate of `∫ f² W`:
/// `(1/(n(n-1))) Σ_{i≠j} (1/h) k((X_i - X_j)/h) W(X_i)`.
pub fn d2_estimate<W>(config: &KdeConfig, sample: &Sample, weight: W) -> Result<f64>
where
    W: Fn(f64) -> f64 + Sync,
{
    let n = sample.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let h = bandwidth(config, sample)?;
    let data = sample.values();
    let kernel = &config.kernel;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data[i];
            let w = weight(xi);
            if w == 0.0 {
                return 0.0;
            }
            let s: f64 = data
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| kernel.eval((xi - xj) / h))
                .sum();
            s * w
        })
        .collect();
    let total: f64 = rows.iter().sum();
    Ok(total / (h * n as f64 * (n - 1) as f64))
}
