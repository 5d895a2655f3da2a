//! Embedded real datasets and the values published alongside them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Exceedances of flood peaks (m³/s) for the Wheaton River, 72 readings,
/// rounded to 0.1.
pub const FLOODS: [f64; 72] = [
    1.7, 2.2, 14.4, 1.1, 0.4, 20.6, 5.3, 0.7, //
    13.0, 12.0, 9.3, 1.4, 18.7, 8.5, 25.5, 11.6, //
    14.1, 22.1, 1.1, 2.5, 14.4, 1.7, 37.6, 0.6, //
    2.2, 39.0, 0.3, 15.0, 11.0, 7.3, 22.9, 1.7, //
    0.1, 1.1, 0.6, 9.0, 1.7, 7.0, 20.1, 0.4, //
    14.1, 9.9, 10.4, 10.7, 30.0, 3.6, 5.6, 30.8, //
    13.3, 4.2, 25.5, 3.4, 11.9, 21.5, 27.6, 36.4, //
    2.7, 64.0, 1.5, 2.5, 27.4, 1.0, 27.1, 20.2, //
    16.8, 5.3, 9.7, 27.5, 2.5, 27.0, 1.9, 2.8,
];

/// Sum of [`FLOODS`] at embed time.
pub const FLOODS_SUM: f64 = 878.7;

/// A sample assumed Rayleigh with unit scale, 15 values.
pub const RAYLEIGH: [f64; 15] = [
    0.2071766, 0.6945765, 1.0085693, 1.0149304, 1.1273867, //
    1.2283711, 1.3996847, 1.4266420, 1.8104736, 1.8117200, //
    1.8174535, 1.9283017, 2.1714312, 2.5032170, 2.7882901,
];

/// Sum of [`RAYLEIGH`] at embed time.
pub const RAYLEIGH_SUM: f64 = 22.9382244;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    Floods,
    Rayleigh,
}

/// Values reported in the original analysis of each dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Published {
    pub alpha_hat: f64,
    pub delta_hat: f64,
    pub reject: bool,
}

impl Dataset {
    pub const ALL: [Dataset; 2] = [Dataset::Floods, Dataset::Rayleigh];

    pub fn values(self) -> &'static [f64] {
        match self {
            Dataset::Floods => &FLOODS,
            Dataset::Rayleigh => &RAYLEIGH,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Floods => "floods",
            Dataset::Rayleigh => "rayleigh",
        }
    }

    pub fn published(self) -> Published {
        match self {
            Dataset::Floods => Published {
                alpha_hat: 1.0789,
                delta_hat: 0.2086,
                reject: false,
            },
            Dataset::Rayleigh => Published {
                alpha_hat: 1.2557,
                delta_hat: 0.6605,
                reject: true,
            },
        }
    }

    /// One value per line in shortest round-trip form; the checksummed
    /// representation.
    pub fn canonical_text(self) -> String {
        self.values().iter().map(|v| format!("{v}\n")).collect()
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown dataset '{s}' (expected floods|rayleigh)"))
    }
}
