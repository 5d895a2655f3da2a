//! Comparison statistics computed on the probability integral transform of
//! the sample under the fitted Pareto Type-I null.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::Sample;
use crate::error::{Error, Result};
use crate::gof::{self, GofConfig, GofReport, Sidedness};
use crate::kde::KdeConfig;

/// Guard applied to PIT values entering logarithms.
pub const PIT_EPS: f64 = 1e-10;
/// Tuning constant of the Meintanis statistic.
pub const MEINTANIS_A: f64 = 0.5;

/// Test statistic selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Delta,
    Ks,
    Cvm,
    Ad,
    Zan,
    Zbn,
    Men,
}

impl Statistic {
    pub const ALL: [Statistic; 7] = [
        Statistic::Delta,
        Statistic::Ks,
        Statistic::Cvm,
        Statistic::Ad,
        Statistic::Zan,
        Statistic::Zbn,
        Statistic::Men,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Delta => "delta",
            Statistic::Ks => "ks",
            Statistic::Cvm => "cvm",
            Statistic::Ad => "ad",
            Statistic::Zan => "zan",
            Statistic::Zbn => "zbn",
            Statistic::Men => "men",
        }
    }

    /// Rejection region used unless a config overrides it.
    pub fn default_sidedness(self) -> Sidedness {
        match self {
            Statistic::Delta | Statistic::Zan => Sidedness::TwoSided,
            _ => Sidedness::Upper,
        }
    }

    /// Value of the statistic on `sample`. EDF-type statistics fit the
    /// null by the moment estimator on the same sample.
    pub fn evaluate(self, sample: &Sample, kde: &KdeConfig) -> Result<f64> {
        if self == Statistic::Delta {
            return gof::delta_stat(sample, kde);
        }
        let alpha = gof::alpha_moment(sample)?;
        let p = pit(sample, alpha)?;
        Ok(match self {
            Statistic::Ks => ks_stat(&p),
            Statistic::Cvm => cvm_stat(&p),
            Statistic::Ad => ad_stat(&p),
            Statistic::Zan => zhang_za(&p),
            Statistic::Zbn => zhang_zb(&p),
            Statistic::Men => meintanis_stat(&p, MEINTANIS_A)?,
            Statistic::Delta => unreachable!(),
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown statistic '{s}' (expected delta|ks|cvm|ad|zan|zbn|men)"
                ))
            })
    }
}

/// Sorted PIT values `U_(j) = F(X_(j); α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PitSample {
    u_values: Vec<f64>,
}

impl PitSample {
    /// Wraps already-transformed values (sorted on construction).
    pub fn from_values(mut u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if let Some(bad) = u.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::Domain(format!("PIT value {bad} outside [0,1]")));
        }
        u.sort_by(f64::total_cmp);
        Ok(PitSample { u_values: u })
    }

    pub fn values(&self) -> &[f64] {
        &self.u_values
    }

    pub fn len(&self) -> usize {
        self.u_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_values.is_empty()
    }

    fn nudged(&self) -> impl Iterator<Item = f64> + '_ {
        self.u_values.iter().map(|u| u.clamp(PIT_EPS, 1.0 - PIT_EPS))
    }
}

/// `U_(j) = max(0, 1 - X_(j)^{-α})`; observations below 1 map to 0.
pub fn pit(sample: &Sample, alpha: f64) -> Result<PitSample> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let u_values = sample
        .sorted()
        .iter()
        .map(|&x| {
            if x <= 1.0 {
                0.0
            } else {
                -(-alpha * x.ln()).exp_m1()
            }
        })
        .collect();
    Ok(PitSample { u_values })
}

/// `max_j max(j/n - U_(j), U_(j) - (j-1)/n)`.
pub fn ks_stat(p: &PitSample) -> f64 {
    let n = p.len() as f64;
    p.u_values
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let j = (i + 1) as f64;
            (j / n - u).max(u - (j - 1.0) / n)
        })
        .fold(0.0, f64::max)
}

/// `1/(12n) + Σ (U_(j) - (2j-1)/(2n))²`.
pub fn cvm_stat(p: &PitSample) -> f64 {
    let n = p.len() as f64;
    let ss: f64 = p
        .u_values
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let c = (2.0 * (i + 1) as f64 - 1.0) / (2.0 * n);
            (u - c) * (u - c)
        })
        .sum();
    1.0 / (12.0 * n) + ss
}

/// `-n - (1/n) Σ [(2i-1) ln U_(i) + (2n+1-2i) ln(1 - U_(i))]`.
pub fn ad_stat(p: &PitSample) -> f64 {
    let n = p.len() as f64;
    let s: f64 = p
        .nudged()
        .enumerate()
        .map(|(k, u)| {
            let i = (k + 1) as f64;
            (2.0 * i - 1.0) * u.ln() + (2.0 * n + 1.0 - 2.0 * i) * (-u).ln_1p()
        })
        .sum();
    -n - s / n
}

/// `-(1/n) Σ ln(1 - U_(j))`.
pub fn zhang_za(p: &PitSample) -> f64 {
    let n = p.len() as f64;
    let s: f64 = p
        .u_values
        .iter()
        .map(|&u| (-u.min(1.0 - PIT_EPS)).ln_1p())
        .sum();
    -s / n
}

/// `Σ [-ln(1 - U_(j))/(n - j + 1/2) - ln(U_(j))/(j - 1/2)]`, without the
/// exponent that accompanies this expression in its printed form.
pub fn zhang_zb(p: &PitSample) -> f64 {
    let n = p.len() as f64;
    p.nudged()
        .enumerate()
        .map(|(k, u)| {
            let j = (k + 1) as f64;
            -(-u).ln_1p() / (n - j + 0.5) - u.ln() / (j - 0.5)
        })
        .sum()
}

/// Meintanis' characteristic-function statistic with tuning constant `a`.
pub fn meintanis_stat(p: &PitSample, a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("tuning constant must be positive, got {a}")));
    }
    let u = &p.u_values;
    let n = u.len() as f64;
    let mut double = 0.0;
    for &uj in u {
        for &uk in u {
            let d = uj - uk;
            double += 2.0 * a / (d * d + a * a);
        }
    }
    let single: f64 = u
        .iter()
        .map(|&uj| (uj / a).atan() + ((1.0 - uj) / a).atan())
        .sum();
    Ok(double / n + 2.0 * single - 4.0 * n * (1.0 / a).atan() - n * (1.0 + 1.0 / (a * a)).ln())
}

/// Parametric-bootstrap calibration of a comparison statistic; same protocol
/// as [`gof::bootstrap_test`].
pub fn competitor_bootstrap(sample: &Sample, stat: Statistic, config: &GofConfig) -> Result<GofReport> {
    gof::run_bootstrap(sample, stat, config)
}
