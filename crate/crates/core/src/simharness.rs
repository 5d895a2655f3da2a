//! Monte Carlo size/power harness.
//!
//! Every replication is keyed by `(statistic, n, r)`: the sample is drawn on
//! a stream derived from that key and the bootstrap runs under a seed derived
//! from it, so each grid cell is reproducible on its own and results do not
//! depend on the degree of parallelism.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::competitors::Statistic;
use crate::distributions::{DistributionSpec, Sample};
use crate::error::{Error, Result};
use crate::gof::{self, GofConfig};
use crate::numerics::{hash_label, hash_words, mix64, RngStream};

/// Salt separating the bootstrap seed family from the sample streams.
const BOOTSTRAP_SALT: u64 = 0xb007_57a9_c0ff_ee11;

/// Sample sizes used for the size study.
pub const SIZE_GRID: [usize; 5] = [10, 25, 50, 75, 100];
/// Sample sizes used for the power study.
pub const POWER_GRID: [usize; 5] = [10, 20, 30, 40, 50];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub generator: DistributionSpec,
    pub sample_sizes: Vec<usize>,
    pub reps: usize,
    pub gof: GofConfig,
    pub statistics: Vec<Statistic>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes given".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::InvalidConfig("no statistics selected".into()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("sample size {n} below 2")));
        }
        self.gof.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub statistic: Statistic,
    pub n: usize,
    pub rejection_rate: f64,
    pub reps_used: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub rows: Vec<SimRow>,
}

impl SimResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidConfig(format!("csv output: {e}"));
        w.write_record(["statistic", "n", "rejection_rate", "reps_used", "skipped"])
            .map_err(io)?;
        for row in &self.rows {
            w.write_record([
                row.statistic.name().to_string(),
                row.n.to_string(),
                format!("{:.6}", row.rejection_rate),
                row.reps_used.to_string(),
                row.skipped.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidConfig(format!("csv output: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn row(&self, stat: Statistic, n: usize) -> Option<&SimRow> {
        self.rows.iter().find(|r| r.statistic == stat && r.n == n)
    }
}

/// Key of replication `r` in cell `(stat, n)`.
pub fn replication_key(stat: Statistic, n: usize, r: usize) -> u64 {
    hash_words(&[hash_label(stat.name()), n as u64, r as u64])
}

enum Outcome {
    Reject,
    Accept,
    Skipped,
}

fn replicate(config: &SimConfig, stat: Statistic, n: usize, r: usize) -> Result<Outcome> {
    let key = replication_key(stat, n, r);
    let mut rng = RngStream::new(config.gof.seed, key);
    let sample = config.generator.sample(n, &mut rng)?;
    let boot = GofConfig {
        seed: mix64(config.gof.seed ^ key ^ BOOTSTRAP_SALT),
        ..config.gof.clone()
    };
    match gof::run_bootstrap(&sample, stat, &boot) {
        Ok(rep) if rep.reject => Ok(Outcome::Reject),
        Ok(_) => Ok(Outcome::Accept),
        Err(e) if e.is_statistical() => Ok(Outcome::Skipped),
        Err(e) => Err(e),
    }
}

/// Run every `(statistic, n)` cell. Statistical failures in a replication
/// (undefined estimator, degenerate sample, …) are counted as skipped and
/// excluded from the rate's denominator.
pub fn run_grid(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let mut rows = Vec::new();
    for &stat in &config.statistics {
        for &n in &config.sample_sizes {
            let outcomes = (0..config.reps)
                .into_par_iter()
                .map(|r| replicate(config, stat, n, r))
                .collect::<Result<Vec<_>>>()?;
            let (mut rejected, mut skipped) = (0usize, 0usize);
            for o in &outcomes {
                match o {
                    Outcome::Reject => rejected += 1,
                    Outcome::Skipped => skipped += 1,
                    Outcome::Accept => {}
                }
            }
            let reps_used = config.reps - skipped;
            let rejection_rate = if reps_used == 0 {
                0.0
            } else {
                rejected as f64 / reps_used as f64
            };
            rows.push(SimRow {
                statistic: stat,
                n,
                rejection_rate,
                reps_used,
                skipped,
            });
        }
    }
    Ok(SimResult { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityProbe {
    pub mean: f64,
    pub sd: f64,
    pub ks_distance: f64,
    /// Δ̂ replicates after self-standardization, in replication order.
    pub standardized: Vec<f64>,
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Simulate `reps` values of Δ̂ under `ParetoI(1)` at size `n`, standardize
/// them by their own mean and sd, and measure the Kolmogorov distance to the
/// standard normal.
pub fn normality_probe(n: usize, reps: usize, gof: &GofConfig) -> Result<NormalityProbe> {
    if reps < 200 {
        return Err(Error::InvalidConfig(format!(
            "normality probe needs at least 200 replicates, got {reps}"
        )));
    }
    let null = DistributionSpec::pareto_i(1.0)?;
    let salt = hash_label("normality_probe");
    let values = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(gof.seed, hash_words(&[salt, n as u64, r as u64]));
            let sample = null.sample(n, &mut rng)?;
            gof::delta_stat(&sample, &gof.kde)
        })
        .collect::<Result<Vec<f64>>>()?;

    let raw = Sample::new(values)?;
    let mean = raw.mean();
    let sd = raw.std_dev();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample);
    }
    let standardized: Vec<f64> = raw.values().iter().map(|v| (v - mean) / sd).collect();
    let z = Sample::new(standardized.clone())?;
    Ok(NormalityProbe {
        mean,
        sd,
        ks_distance: z.kolmogorov_distance(std_normal_cdf),
        standardized,
    })
}
