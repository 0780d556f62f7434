use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Observed data: at least one finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(pos));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Unchecked construction for values produced by resampling a valid sample.
    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self(values)
    }
}

/// Estimator applied to a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    Mean,
    /// Mean of 0/1 data.
    Proportion,
    Median,
    /// Standard deviation with the N−1 divisor; 0 for a single value.
    Sd,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Mean,
        Statistic::Proportion,
        Statistic::Median,
        Statistic::Sd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Proportion => "proportion",
            Statistic::Median => "median",
            Statistic::Sd => "sd",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn evaluate(self, sample: &Sample) -> f64 {
        match self {
            Statistic::Median => {
                let mut scratch = sample.values().to_vec();
                self.evaluate_in_place(&mut scratch)
            }
            _ => self.evaluate_slice(sample.values()),
        }
    }

    /// Evaluates on `values`, which may be reordered.
    pub(crate) fn evaluate_in_place(self, values: &mut [f64]) -> f64 {
        match self {
            Statistic::Median => median_in_place(values),
            _ => self.evaluate_slice(values),
        }
    }

    fn evaluate_slice(self, values: &[f64]) -> f64 {
        match self {
            Statistic::Mean | Statistic::Proportion => mean(values),
            Statistic::Sd => sd(values),
            Statistic::Median => median_in_place(&mut values.to_vec()),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[inline]
fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

/// Arithmetic mean; exact for constant input.
pub fn mean(values: &[f64]) -> f64 {
    if is_constant(values) {
        return values[0];
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation, N−1 divisor; 0 when N = 1 or the data are constant.
pub fn sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 || is_constant(values) {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (n - 1) as f64)
}

fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if below == upper {
            upper
        } else {
            (below + upper) / 2.0
        }
    }
}
