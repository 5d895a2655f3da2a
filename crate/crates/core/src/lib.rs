//! Weighted entropy generating functions for lifetime distributions and an
//! entropy-characterization goodness-of-fit test for the Pareto Type-I law.
//!
//! Module map:
//! - [`numerics`]: quadrature, differentiation, reproducible random streams.
//! - [`distributions`]: the lifetime distribution catalog.
//! - [`egf`]: entropy generating functions and their residual/weighted forms.
//! - [`kde`]: kernel density estimation with kernel mixtures.
//! - [`gof`]: the departure-measure test with parametric bootstrap.
//! - [`competitors`]: EDF and related comparison statistics.
//! - [`simharness`]: Monte Carlo size and power studies.

pub mod competitors;
pub mod distributions;
pub mod egf;
pub mod error;
pub mod gof;
pub mod kde;
pub mod numerics;
pub mod simharness;

pub use distributions::{DistributionSpec, Family, Sample};
pub use competitors::Statistic;
pub use error::{Error, Result};
pub use gof::{GofConfig, GofReport, Sidedness};
pub use kde::{BandwidthRule, KdeConfig, KernelSpec};
pub use numerics::{Interval, RngStream};
pub use simharness::{SimConfig, SimResult, SimRow};
