//! Pivotal bootstrap hypothesis tests and the textbook z/t baselines.

use alloc::vec::Vec;
use core::fmt;

use crate::intervals::IntervalEstimate;
use crate::resample::{bootstrap_distribution, studentize, BootstrapDistribution};
use crate::{Error, Purpose, Result, Sample, SeedSpec, Statistic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pivot {
    /// `(θ̂ − θ₀) / SE`
    Studentized,
    /// `θ̂ − θ₀`
    Locational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    TwoSided,
    /// `θ < θ₀`
    Lower,
    /// `θ > θ₀`
    Upper,
}

impl Pivot {
    pub fn name(self) -> &'static str {
        match self {
            Pivot::Studentized => "studentized",
            Pivot::Locational => "locational",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Pivot::Studentized, Pivot::Locational]
            .into_iter()
            .find(|p| p.name() == name)
    }
}

impl Alternative {
    pub fn name(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Lower => "lower",
            Alternative::Upper => "upper",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Alternative::TwoSided, Alternative::Lower, Alternative::Upper]
            .into_iter()
            .find(|a| a.name() == name)
    }
}

impl fmt::Display for Pivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSpec {
    pub pivot: Pivot,
    pub null_value: f64,
    pub alternative: Alternative,
    pub alpha: f64,
}

impl TestSpec {
    pub fn new(pivot: Pivot, null_value: f64, alternative: Alternative, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha, 1.0));
        }
        if !null_value.is_finite() {
            return Err(Error::InvalidParameter("null value must be finite"));
        }
        Ok(Self {
            pivot,
            null_value,
            alternative,
            alpha,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub observed: Option<f64>,
    pub asl: Option<f64>,
    /// `asl < alpha` whenever the ASL is defined.
    pub reject: Option<bool>,
    /// Number of defined bootstrap test statistics.
    pub boot_stats_used: usize,
}

/// Observed test statistic; undefined for the studentized pivot when the SE
/// is zero or missing.
pub fn observed_statistic(
    spec: &TestSpec,
    sample: &Sample,
    stat: Statistic,
    origin_se: Option<f64>,
) -> Option<f64> {
    let diff = stat.evaluate(sample) - spec.null_value;
    match spec.pivot {
        Pivot::Locational => Some(diff),
        Pivot::Studentized => origin_se.filter(|&se| se > 0.0).map(|se| diff / se),
    }
}

/// Bootstrap replicates of the test statistic.
///
/// The studentized pivot reuses `bd.z_star` (all undefined if `bd` was never
/// studentized).
pub fn bootstrap_statistics(spec: &TestSpec, bd: &BootstrapDistribution) -> Vec<Option<f64>> {
    match spec.pivot {
        Pivot::Locational => bd.stats.iter().map(|s| Some(s - bd.origin_stat)).collect(),
        Pivot::Studentized => bd
            .z_star
            .clone()
            .unwrap_or_else(|| alloc::vec![None; bd.b()]),
    }
}

/// Counts of defined bootstrap statistics below, above and equal to `t_obs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AslCounts {
    pub below: usize,
    pub above: usize,
    pub ties: usize,
    /// Two-sided exceedances: `t*² > t_obs²`.
    pub squared_above: usize,
}

impl AslCounts {
    pub fn used(&self) -> usize {
        self.below + self.above + self.ties
    }

    pub fn asl(&self, alternative: Alternative) -> Option<f64> {
        let used = self.used();
        if used == 0 {
            return None;
        }
        let count = match alternative {
            Alternative::Lower => self.below,
            Alternative::Upper => self.above,
            Alternative::TwoSided => self.squared_above,
        };
        Some(count as f64 / used as f64)
    }
}

pub fn asl_counts(t_obs: f64, t_boot: &[Option<f64>]) -> AslCounts {
    let obs_sq = t_obs * t_obs;
    let mut counts = AslCounts {
        below: 0,
        above: 0,
        ties: 0,
        squared_above: 0,
    };
    for t in t_boot.iter().flatten() {
        if *t < t_obs {
            counts.below += 1;
        } else if *t > t_obs {
            counts.above += 1;
        } else {
            counts.ties += 1;
        }
        if t * t > obs_sq {
            counts.squared_above += 1;
        }
    }
    counts
}

/// Achieved significance level: the proportion of defined bootstrap
/// statistics strictly more extreme than `t_obs`. `None` when no bootstrap
/// statistic is defined.
pub fn asl(t_obs: f64, t_boot: &[Option<f64>], alternative: Alternative) -> Option<f64> {
    asl_counts(t_obs, t_boot).asl(alternative)
}

/// Full pivotal bootstrap test of `spec.null_value`.
pub fn test(
    spec: &TestSpec,
    sample: &Sample,
    stat: Statistic,
    b: usize,
    m: usize,
    seed: &SeedSpec,
) -> Result<TestResult> {
    let mut bd = bootstrap_distribution(sample, stat, b, &seed.purpose(Purpose::Bootstrap))?;
    if spec.pivot == Pivot::Studentized {
        bd = studentize(bd, sample, stat, m, &seed.purpose(Purpose::Nested))?;
    }
    Ok(test_with_distribution(spec, sample, stat, &bd))
}

/// Test against an already computed bootstrap distribution.
pub fn test_with_distribution(
    spec: &TestSpec,
    sample: &Sample,
    stat: Statistic,
    bd: &BootstrapDistribution,
) -> TestResult {
    let t_boot = bootstrap_statistics(spec, bd);
    let observed = observed_statistic(spec, sample, stat, bd.origin_se);
    let counts = observed.map(|t| asl_counts(t, &t_boot));
    let used = t_boot.iter().flatten().count();
    let asl = counts.and_then(|c| c.asl(spec.alternative));
    TestResult {
        observed,
        asl,
        reject: asl.map(|a| a < spec.alpha),
        boot_stats_used: used,
    }
}

/// Rejects `null_value` iff it lies outside the closed interval; `None` for
/// an undefined interval.
pub fn test_via_interval(interval: &IntervalEstimate, null_value: f64) -> Option<bool> {
    interval.contains(null_value).map(|inside| !inside)
}

/// One-sample z and t tests for the mean and the z test for a proportion.
pub mod traditional {
    use crate::distributions::{normal_quantile, student_t_quantile};
    use crate::{sample, Error, Result, Sample};

    fn check(alpha: f64) -> Result<()> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidAlpha(alpha, 1.0))
        }
    }

    pub fn z_critical(alpha: f64) -> Result<f64> {
        check(alpha)?;
        normal_quantile(1.0 - alpha / 2.0)
    }

    pub fn t_critical(alpha: f64, n: usize) -> Result<f64> {
        check(alpha)?;
        if n < 2 {
            return Err(Error::TooFewValues {
                what: "t test",
                needed: 2,
                got: n,
            });
        }
        student_t_quantile(1.0 - alpha / 2.0, n as u64 - 1)
    }

    /// Two-sided z test for a mean with known `sigma`, given the critical value.
    #[inline]
    pub fn z_mean_rejects(mean: f64, n: usize, sigma: f64, null: f64, crit: f64) -> bool {
        (mean - null).abs() > crit * sigma / libm::sqrt(n as f64)
    }

    #[inline]
    pub fn t_mean_rejects(mean: f64, sd: f64, n: usize, null: f64, crit: f64) -> bool {
        (mean - null).abs() > crit * sd / libm::sqrt(n as f64)
    }

    /// Score-form z test: the SE uses the null proportion, not `p̂`.
    #[inline]
    pub fn z_proportion_rejects(p_hat: f64, n: usize, null: f64, crit: f64) -> bool {
        (p_hat - null).abs() > crit * libm::sqrt(null * (1.0 - null) / n as f64)
    }

    pub fn z_test_mean(sample: &Sample, null: f64, sigma: f64, alpha: f64) -> Result<bool> {
        let crit = z_critical(alpha)?;
        Ok(z_mean_rejects(
            sample::mean(sample.values()),
            sample.len(),
            sigma,
            null,
            crit,
        ))
    }

    pub fn t_test_mean(sample: &Sample, null: f64, alpha: f64) -> Result<bool> {
        let crit = t_critical(alpha, sample.len())?;
        Ok(t_mean_rejects(
            sample::mean(sample.values()),
            sample::sd(sample.values()),
            sample.len(),
            null,
            crit,
        ))
    }

    pub fn z_test_proportion(sample: &Sample, null: f64, alpha: f64) -> Result<bool> {
        if !(null > 0.0 && null < 1.0) {
            return Err(Error::InvalidParameter(
                "null proportion must lie strictly between 0 and 1",
            ));
        }
        let crit = z_critical(alpha)?;
        Ok(z_proportion_rejects(
            sample::mean(sample.values()),
            sample.len(),
            null,
            crit,
        ))
    }
}
