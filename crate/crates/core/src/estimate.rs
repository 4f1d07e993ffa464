//! Result records shared by the exact and Monte Carlo estimators.

use std::fmt;

use serde::Serialize;

use crate::rng::pairwise_sum;

/// How a moment value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DenseMc,
    ReducedMc,
    ExactSmall,
    LimitFormula,
    FiniteNFormula,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DenseMc => "dense-mc",
            Method::ReducedMc => "reduced-mc",
            Method::ExactSmall => "exact-small",
            Method::LimitFormula => "limit-formula",
            Method::FiniteNFormula => "finite-n-formula",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Standard error of `value`; 0 for exact methods.
    pub stderr: f64,
    /// Monte Carlo draws behind the value; 0 for exact methods.
    pub samples: u64,
    pub method: Method,
}

impl MomentEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            stderr: 0.0,
            samples: 0,
            method,
        }
    }

    /// Sample mean and its standard error. Summation is pairwise over the
    /// slice in order, so the result depends only on the values.
    pub fn from_samples(values: &[f64], method: Method) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                value: f64::NAN,
                stderr: f64::NAN,
                samples: 0,
                method,
            };
        }
        let mean = pairwise_sum(values) / n as f64;
        let stderr = if n > 1 {
            let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            value: mean,
            stderr,
            samples: n as u64,
            method,
        }
    }

    /// `|value − target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}
