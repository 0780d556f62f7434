//! Bootstrap and textbook confidence intervals.

use core::fmt;

use crate::distributions::{normal_quantile, student_t_quantile, ParameterDomain};
use crate::resample::BootstrapDistribution;
use crate::{sample, Error, Result, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalMethod {
    Basic,
    Percentile,
    Studentized,
    ZMean,
    TMean,
    WaldProportion,
}

impl IntervalMethod {
    pub const ALL: [IntervalMethod; 6] = [
        IntervalMethod::Basic,
        IntervalMethod::Percentile,
        IntervalMethod::Studentized,
        IntervalMethod::ZMean,
        IntervalMethod::TMean,
        IntervalMethod::WaldProportion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntervalMethod::Basic => "basic",
            IntervalMethod::Percentile => "percentile",
            IntervalMethod::Studentized => "studentized",
            IntervalMethod::ZMean => "z_mean",
            IntervalMethod::TMean => "t_mean",
            IntervalMethod::WaldProportion => "wald_proportion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn is_bootstrap(self) -> bool {
        matches!(
            self,
            IntervalMethod::Basic | IntervalMethod::Percentile | IntervalMethod::Studentized
        )
    }

    /// What has to hold for the interval to be trustworthy.
    pub fn assumption(self) -> &'static str {
        match self {
            IntervalMethod::Basic => {
                "Assumption: the estimate minus the parameter has a distribution that is \
                 approximately pivotal, i.e. free of unknown quantities such as the population \
                 variance. Check that the bootstrap distribution would look the same for other \
                 plausible populations."
            }
            IntervalMethod::Percentile => {
                "Assumption: the estimate minus the parameter has a distribution that is \
                 approximately pivotal and also symmetric about zero. A visibly skewed bootstrap \
                 histogram is evidence against this."
            }
            IntervalMethod::Studentized => {
                "Assumption: the estimate minus the parameter, divided by its estimated standard \
                 error, has an approximately pivotal distribution. Zero second-level standard \
                 errors make the interval undefined, and small samples can give very wide \
                 intervals."
            }
            IntervalMethod::ZMean => {
                "Assumption: independent observations with a known population standard \
                 deviation and an approximately normal sample mean."
            }
            IntervalMethod::TMean => {
                "Assumption: independent observations from an approximately normal population; \
                 small skewed samples make the t quantiles unreliable."
            }
            IntervalMethod::WaldProportion => {
                "Assumption: independent 0/1 observations with enough successes and failures \
                 for the sample proportion to be approximately normal; small N or p near 0 or 1 \
                 give bounds outside [0, 1] or equal bounds."
            }
        }
    }
}

impl fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntervalFlags {
    /// A bound lies outside the parameter's domain.
    pub invalid_range: bool,
    /// `lower == upper` exactly.
    pub equal_bounds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub method: IntervalMethod,
    pub alpha: f64,
    /// `(lower, upper)` when the interval is defined.
    pub bounds: Option<(f64, f64)>,
    pub flags: IntervalFlags,
    /// Set for `centre ± half` intervals, whose width is then exactly
    /// `2·half` rather than `upper − lower` after rounding.
    pub half_width: Option<f64>,
}

impl IntervalEstimate {
    /// Builds an estimate and derives its flags from the bounds.
    pub fn new(
        method: IntervalMethod,
        alpha: f64,
        bounds: Option<(f64, f64)>,
        domain: ParameterDomain,
    ) -> Self {
        debug_assert!(bounds.is_none_or(|(lo, hi)| lo <= hi));
        Self {
            method,
            alpha,
            bounds,
            flags: compute_flags(bounds, domain),
            half_width: None,
        }
    }

    /// `centre ± half`.
    pub fn symmetric(
        method: IntervalMethod,
        alpha: f64,
        centre: f64,
        half: f64,
        domain: ParameterDomain,
    ) -> Self {
        Self {
            half_width: Some(half),
            ..Self::new(method, alpha, Some((centre - half, centre + half)), domain)
        }
    }

    pub fn undefined(method: IntervalMethod, alpha: f64) -> Self {
        Self::new(method, alpha, None, ParameterDomain::Unbounded)
    }

    pub fn defined(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn lower(&self) -> Option<f64> {
        self.bounds.map(|b| b.0)
    }

    pub fn upper(&self) -> Option<f64> {
        self.bounds.map(|b| b.1)
    }

    pub fn width(&self) -> Option<f64> {
        match (self.bounds, self.half_width) {
            (Some(_), Some(half)) => Some(2.0 * half),
            (bounds, _) => bounds.map(|(lo, hi)| hi - lo),
        }
    }

    /// Closed containment; `None` for an undefined interval.
    pub fn contains(&self, value: f64) -> Option<bool> {
        self.bounds.map(|(lo, hi)| lo <= value && value <= hi)
    }
}

pub fn compute_flags(bounds: Option<(f64, f64)>, domain: ParameterDomain) -> IntervalFlags {
    match bounds {
        None => IntervalFlags::default(),
        Some((lo, hi)) => IntervalFlags {
            invalid_range: !(domain.contains(lo) && domain.contains(hi)),
            equal_bounds: lo == hi,
        },
    }
}

/// 1-based ranks of the order statistics used for the two bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderIndexPair {
    pub lower: usize,
    pub upper: usize,
}

fn check_bootstrap_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha, 0.5))
    }
}

/// Order-statistic ranks `(B+1)α/2` and `(B+1)(1−α/2)`.
///
/// When `(B+1)α/2` is not an integer, `k = floor((B+1)α/2)` and the ranks are
/// `k`-th and `(B+1−k)`-th smallest. `Ok(None)` when `k == 0`.
pub fn order_indices(b: usize, alpha: f64) -> Result<Option<OrderIndexPair>> {
    check_bootstrap_alpha(alpha)?;
    if b == 0 {
        return Ok(None);
    }
    let position = (b as f64 + 1.0) * alpha / 2.0;
    let nearest = libm::round(position);
    // (B+1)·α/2 can land a few ulps off an integer.
    let k = if (position - nearest).abs() <= 1e-9 * position.max(1.0) {
        nearest as usize
    } else {
        libm::floor(position) as usize
    };
    if k == 0 {
        return Ok(None);
    }
    Ok(Some(OrderIndexPair {
        lower: k,
        upper: b + 1 - k,
    }))
}

/// Percentile interval: the bootstrap order statistics themselves.
pub fn percentile_interval(
    bd: &BootstrapDistribution,
    alpha: f64,
    domain: ParameterDomain,
) -> Result<IntervalEstimate> {
    let Some(idx) = order_indices(bd.b(), alpha)? else {
        return Ok(IntervalEstimate::undefined(IntervalMethod::Percentile, alpha));
    };
    let sorted = bd.sorted_stats();
    Ok(percentile_from_sorted(&sorted, idx, alpha, domain))
}

fn percentile_from_sorted(
    sorted: &[f64],
    idx: OrderIndexPair,
    alpha: f64,
    domain: ParameterDomain,
) -> IntervalEstimate {
    let bounds = (sorted[idx.lower - 1], sorted[idx.upper - 1]);
    IntervalEstimate::new(IntervalMethod::Percentile, alpha, Some(bounds), domain)
}

/// Basic interval: reflects the percentile bounds about the original estimate.
pub fn basic_interval(
    bd: &BootstrapDistribution,
    alpha: f64,
    domain: ParameterDomain,
) -> Result<IntervalEstimate> {
    let Some(idx) = order_indices(bd.b(), alpha)? else {
        return Ok(IntervalEstimate::undefined(IntervalMethod::Basic, alpha));
    };
    let sorted = bd.sorted_stats();
    Ok(basic_from_sorted(&sorted, bd.origin_stat, idx, alpha, domain))
}

fn basic_from_sorted(
    sorted: &[f64],
    origin: f64,
    idx: OrderIndexPair,
    alpha: f64,
    domain: ParameterDomain,
) -> IntervalEstimate {
    let lower = 2.0 * origin - sorted[idx.upper - 1];
    let upper = 2.0 * origin - sorted[idx.lower - 1];
    IntervalEstimate::new(IntervalMethod::Basic, alpha, Some((lower, upper)), domain)
}

/// Basic and percentile intervals sharing one sort of the bootstrap statistics.
pub fn basic_and_percentile(
    bd: &BootstrapDistribution,
    alpha: f64,
    domain: ParameterDomain,
) -> Result<(IntervalEstimate, IntervalEstimate)> {
    let Some(idx) = order_indices(bd.b(), alpha)? else {
        return Ok((
            IntervalEstimate::undefined(IntervalMethod::Basic, alpha),
            IntervalEstimate::undefined(IntervalMethod::Percentile, alpha),
        ));
    };
    let sorted = bd.sorted_stats();
    Ok((
        basic_from_sorted(&sorted, bd.origin_stat, idx, alpha, domain),
        percentile_from_sorted(&sorted, idx, alpha, domain),
    ))
}

/// Bootstrap-t interval from a studentized distribution.
///
/// Undefined z* values are dropped before sorting. The interval is undefined
/// when fewer than `k_hi` defined values remain, when the plug-in SE is zero
/// or missing, or when `bd` has not been studentized.
pub fn studentized_interval(
    bd: &BootstrapDistribution,
    alpha: f64,
    domain: ParameterDomain,
) -> Result<IntervalEstimate> {
    let undefined = IntervalEstimate::undefined(IntervalMethod::Studentized, alpha);
    let Some(idx) = order_indices(bd.b(), alpha)? else {
        return Ok(undefined);
    };
    let se = match bd.origin_se {
        Some(se) if se > 0.0 => se,
        _ => return Ok(undefined),
    };
    if bd.z_star.is_none() {
        return Ok(undefined);
    }
    let d = bd.sorted_defined_z();
    if d.len() < idx.upper {
        return Ok(undefined);
    }
    let lower = bd.origin_stat - se * d[idx.upper - 1];
    let upper = bd.origin_stat - se * d[idx.lower - 1];
    Ok(IntervalEstimate::new(
        IntervalMethod::Studentized,
        alpha,
        Some((lower, upper)),
        domain,
    ))
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha, 1.0))
    }
}

/// `x̄ ± z(1−α/2)·σ/√N` with known σ.
pub fn z_interval_mean(sample: &Sample, sigma: f64, alpha: f64) -> Result<IntervalEstimate> {
    check_level(alpha)?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter("known sigma must be positive"));
    }
    let xbar = sample::mean(sample.values());
    let half = normal_quantile(1.0 - alpha / 2.0)? * sigma / libm::sqrt(sample.len() as f64);
    Ok(IntervalEstimate::symmetric(
        IntervalMethod::ZMean,
        alpha,
        xbar,
        half,
        ParameterDomain::Unbounded,
    ))
}

/// `x̄ ± t(1−α/2, N−1)·s/√N`.
pub fn t_interval_mean(sample: &Sample, alpha: f64) -> Result<IntervalEstimate> {
    check_level(alpha)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewValues {
            what: "t interval",
            needed: 2,
            got: n,
        });
    }
    let xbar = sample::mean(sample.values());
    let s = sample::sd(sample.values());
    let half = student_t_quantile(1.0 - alpha / 2.0, n as u64 - 1)? * s / libm::sqrt(n as f64);
    Ok(IntervalEstimate::symmetric(
        IntervalMethod::TMean,
        alpha,
        xbar,
        half,
        ParameterDomain::Unbounded,
    ))
}

/// `p̂ ± z(1−α/2)·√(p̂(1−p̂)/N)`, flagged against `[0, 1]`.
pub fn wald_interval_proportion(sample: &Sample, alpha: f64) -> Result<IntervalEstimate> {
    check_level(alpha)?;
    let p_hat = sample::mean(sample.values());
    let n = sample.len() as f64;
    let half = normal_quantile(1.0 - alpha / 2.0)? * libm::sqrt(p_hat * (1.0 - p_hat) / n);
    Ok(IntervalEstimate::symmetric(
        IntervalMethod::WaldProportion,
        alpha,
        p_hat,
        half,
        ParameterDomain::UnitInterval,
    ))
}
