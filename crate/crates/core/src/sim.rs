//! Monte Carlo kernels: one replication of a scenario, and the reductions
//! that turn ordered replication records into metrics and power curves.
//!
//! Nothing here schedules work. A replication depends only on the scenario
//! and its index, so callers may evaluate replications in any order or in
//! parallel and reduce them afterwards in index order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::distributions::{draw_sample, ParameterDomain, Population};
use crate::hypothesis::traditional;
use crate::intervals::{
    basic_and_percentile, studentized_interval, t_interval_mean, wald_interval_proportion,
    z_interval_mean, IntervalEstimate, IntervalMethod,
};
use crate::resample::{bootstrap_distribution, studentize, BootstrapDistribution};
use crate::{sample, Error, Purpose, Result, Sample, SeedSpec};

/// An interval method or a directly evaluated textbook test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Procedure {
    Interval(IntervalMethod),
    ZTestMean,
    TTestMean,
    /// Score-form z test for a proportion.
    ZTestProportion,
}

impl Procedure {
    pub const ALL: [Procedure; 9] = [
        Procedure::Interval(IntervalMethod::Basic),
        Procedure::Interval(IntervalMethod::Percentile),
        Procedure::Interval(IntervalMethod::Studentized),
        Procedure::Interval(IntervalMethod::ZMean),
        Procedure::Interval(IntervalMethod::TMean),
        Procedure::Interval(IntervalMethod::WaldProportion),
        Procedure::ZTestMean,
        Procedure::TTestMean,
        Procedure::ZTestProportion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Interval(m) => m.name(),
            Procedure::ZTestMean => "z_test_mean",
            Procedure::TTestMean => "t_test_mean",
            Procedure::ZTestProportion => "z_test_proportion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn is_bootstrap(self) -> bool {
        matches!(self, Procedure::Interval(m) if m.is_bootstrap())
    }

    pub fn needs_second_level(self) -> bool {
        self == Procedure::Interval(IntervalMethod::Studentized)
    }

    /// Whether the procedure makes sense for samples from `pop`.
    pub fn applies_to(self, pop: &Population) -> bool {
        let binary = matches!(pop, Population::Bernoulli { .. });
        match self {
            Procedure::Interval(IntervalMethod::WaldProportion) | Procedure::ZTestProportion => {
                binary
            }
            Procedure::Interval(IntervalMethod::ZMean | IntervalMethod::TMean)
            | Procedure::ZTestMean
            | Procedure::TTestMean => !binary,
            Procedure::Interval(_) => true,
        }
    }

    /// Keys a private bootstrap stream when sharing is off; 0 is the shared stream.
    fn slot(self) -> u64 {
        Self::ALL.iter().position(|p| *p == self).map_or(0, |i| i as u64 + 1)
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Power grid: `steps` evenly spaced null values over `[θ − d, θ + d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerGrid {
    pub d: f64,
    pub steps: usize,
}

impl PowerGrid {
    pub const DEFAULT_STEPS: usize = 41;

    /// Grid values, dropping points outside the open unit interval for
    /// proportion targets. The centre of an odd grid is exactly `theta`.
    pub fn values(&self, theta: f64, domain: ParameterDomain) -> Vec<f64> {
        let steps = self.steps.max(1);
        let denom = (steps.max(2) - 1) as f64;
        (0..steps)
            .map(|i| {
                if steps == 1 {
                    theta
                } else {
                    theta + self.d * (2.0 * i as f64 - denom) / denom
                }
            })
            .filter(|&v| match domain {
                ParameterDomain::Unbounded => true,
                ParameterDomain::UnitInterval => v > 0.0 && v < 1.0,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    /// Unique name, used as the scenario id in outputs.
    pub label: String,
    /// Keys the random streams instead of `label` when set. Scenarios that
    /// share a stream see the same samples replication by replication.
    pub stream: Option<String>,
    pub population: Population,
    pub n: usize,
    pub procedures: Vec<Procedure>,
    /// First-level resamples; required when a bootstrap procedure is present.
    pub b: Option<usize>,
    /// Second-level resamples for the studentized interval.
    pub m: usize,
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub power_grid: Option<PowerGrid>,
    /// Bootstrap procedures share one bootstrap distribution per replication.
    pub share_bootstrap: bool,
}

impl ScenarioSpec {
    /// Default second-level resample count.
    pub const DEFAULT_M: usize = 25;

    pub fn domain(&self) -> ParameterDomain {
        self.population.domain()
    }

    pub fn theta(&self) -> f64 {
        self.population.true_parameter()
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidScenario("replications must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::InvalidScenario("sample size must be at least 1"));
        }
        if self.procedures.is_empty() {
            return Err(Error::InvalidScenario("no procedures requested"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::InvalidAlpha(self.alpha, 0.5));
        }
        if self.procedures.iter().any(|p| p.is_bootstrap()) && self.b.is_none_or(|b| b == 0) {
            return Err(Error::InvalidScenario(
                "bootstrap procedures need a resample count",
            ));
        }
        if self.procedures.iter().any(|p| p.needs_second_level()) && self.m < 2 {
            return Err(Error::InvalidScenario(
                "the studentized interval needs at least 2 second-level resamples",
            ));
        }
        if self
            .procedures
            .iter()
            .any(|p| matches!(p, Procedure::Interval(IntervalMethod::TMean) | Procedure::TTestMean))
            && self.n < 2
        {
            return Err(Error::InvalidScenario("t procedures need N >= 2"));
        }
        if let Some(grid) = self.power_grid {
            if !(grid.d.is_finite() && grid.d > 0.0) {
                return Err(Error::InvalidScenario("power grid d must be positive"));
            }
            if grid.steps == 0 {
                return Err(Error::InvalidScenario("power grid needs at least one step"));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> SeedSpec {
        SeedSpec::new(self.master_seed).scenario_label(self.stream.as_deref().unwrap_or(&self.label))
    }

    /// Resamples drawn for one replication.
    pub fn resamples_per_replication(&self) -> u64 {
        let b = self.b.unwrap_or(0) as u64;
        let boot: Vec<_> = self.procedures.iter().filter(|p| p.is_bootstrap()).collect();
        let first = if boot.is_empty() {
            0
        } else if self.share_bootstrap {
            b
        } else {
            b * boot.len() as u64
        };
        let nested = if self.procedures.iter().any(|p| p.needs_second_level()) {
            b * self.m as u64
        } else {
            0
        };
        first + nested
    }
}

/// Summary of the drawn sample, enough to re-run the textbook tests at any null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Interval(IntervalEstimate),
    /// Textbook test; the decision at any null is recomputed from the summary.
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub index: usize,
    pub summary: SampleSummary,
    /// One outcome per entry of `ScenarioSpec::procedures`, same order.
    pub outcomes: Vec<Outcome>,
}

fn bootstrap_for(
    spec: &ScenarioSpec,
    sample: &Sample,
    studentized: bool,
    rep_seed: &SeedSpec,
    slot: u64,
) -> Result<BootstrapDistribution> {
    let stat = spec.population.statistic();
    let b = spec.b.unwrap_or(0);
    // B is part of the key so cells differing only in B do not reuse resamples
    let key = (b as u64) << 8 | slot;
    let seed = rep_seed.purpose(Purpose::Bootstrap).index(key);
    let bd = bootstrap_distribution(sample, stat, b, &seed)?;
    if studentized {
        studentize(bd, sample, stat, spec.m, &rep_seed.purpose(Purpose::Nested).index(key))
    } else {
        Ok(bd)
    }
}

/// Draws replication `index` of `spec` and evaluates every procedure on it.
pub fn run_replication(spec: &ScenarioSpec, index: usize) -> Result<ReplicationRecord> {
    let rep_seed = spec.seed().replication(index as u64);
    let sample = draw_sample(&spec.population, spec.n, &rep_seed.purpose(Purpose::Sample))?;
    let domain = spec.domain();
    let alpha = spec.alpha;

    let needs_z = spec.procedures.iter().any(|p| p.needs_second_level());
    let shared = if spec.share_bootstrap && spec.procedures.iter().any(|p| p.is_bootstrap()) {
        Some(bootstrap_for(spec, &sample, needs_z, &rep_seed, 0)?)
    } else {
        None
    };

    let mut outcomes = Vec::with_capacity(spec.procedures.len());
    for &proc in &spec.procedures {
        let outcome = match proc {
            Procedure::Interval(method) if method.is_bootstrap() => {
                let private;
                let bd = match &shared {
                    Some(bd) => bd,
                    None => {
                        private = bootstrap_for(
                            spec,
                            &sample,
                            method == IntervalMethod::Studentized,
                            &rep_seed,
                            proc.slot(),
                        )?;
                        &private
                    }
                };
                let estimate = match method {
                    IntervalMethod::Studentized => studentized_interval(bd, alpha, domain)?,
                    IntervalMethod::Basic => basic_and_percentile(bd, alpha, domain)?.0,
                    _ => basic_and_percentile(bd, alpha, domain)?.1,
                };
                Outcome::Interval(estimate)
            }
            Procedure::Interval(IntervalMethod::ZMean) => Outcome::Interval(z_interval_mean(
                &sample,
                spec.population.true_sd(),
                alpha,
            )?),
            Procedure::Interval(IntervalMethod::TMean) => {
                Outcome::Interval(t_interval_mean(&sample, alpha)?)
            }
            Procedure::Interval(_) => Outcome::Interval(wald_interval_proportion(&sample, alpha)?),
            Procedure::ZTestMean | Procedure::TTestMean | Procedure::ZTestProportion => {
                Outcome::Test
            }
        };
        outcomes.push(outcome);
    }

    Ok(ReplicationRecord {
        index,
        summary: SampleSummary {
            n: sample.len(),
            mean: sample::mean(sample.values()),
            sd: sample::sd(sample.values()),
        },
        outcomes,
    })
}

/// Decides the textbook tests at arbitrary null values.
#[derive(Debug, Clone, Copy)]
pub struct TestDecider {
    z_crit: f64,
    t_crit: Option<f64>,
    sigma: f64,
}

impl TestDecider {
    pub fn new(spec: &ScenarioSpec) -> Result<Self> {
        Ok(Self {
            z_crit: traditional::z_critical(spec.alpha)?,
            t_crit: if spec.n >= 2 {
                Some(traditional::t_critical(spec.alpha, spec.n)?)
            } else {
                None
            },
            sigma: spec.population.true_sd(),
        })
    }

    pub fn rejects(&self, proc: Procedure, s: &SampleSummary, null: f64) -> Option<bool> {
        match proc {
            Procedure::ZTestMean => Some(traditional::z_mean_rejects(
                s.mean, s.n, self.sigma, null, self.z_crit,
            )),
            Procedure::TTestMean => self
                .t_crit
                .map(|crit| traditional::t_mean_rejects(s.mean, s.sd, s.n, null, crit)),
            Procedure::ZTestProportion => (null > 0.0 && null < 1.0)
                .then(|| traditional::z_proportion_rejects(s.mean, s.n, null, self.z_crit)),
            Procedure::Interval(_) => None,
        }
    }
}

/// Five-number summary (type-7 quantiles at 0, .25, .5, .75, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber(pub [f64; 5]);

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let q = |p: f64| {
            let h = (sorted.len() - 1) as f64 * p;
            let lo = libm::floor(h) as usize;
            let hi = libm::ceil(h) as usize;
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(FiveNumber([q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)]))
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn median(&self) -> f64 {
        self.0[2]
    }

    pub fn max(&self) -> f64 {
        self.0[4]
    }
}

/// Per-procedure results of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodMetrics {
    pub procedure: Procedure,
    pub defined: usize,
    pub undefined: usize,
    /// Containment (or non-rejection) proportion over defined outcomes.
    pub coverage: Option<f64>,
    /// Always `1 − coverage`.
    pub reject_at_truth: Option<f64>,
    pub invalid_prop: Option<f64>,
    pub equal_bounds_prop: Option<f64>,
    pub width: Option<FiveNumber>,
    /// Over strictly positive widths only.
    pub log_width: Option<FiveNumber>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub scenario: ScenarioSpec,
    pub methods: Vec<MethodMetrics>,
}

impl MetricsRow {
    pub fn method(&self, proc: Procedure) -> Option<&MethodMetrics> {
        self.methods.iter().find(|m| m.procedure == proc)
    }
}

/// Reduces replication records (in index order) to per-method metrics.
pub fn summarize(spec: &ScenarioSpec, records: &[ReplicationRecord]) -> Result<MetricsRow> {
    let decider = TestDecider::new(spec)?;
    let theta = spec.theta();
    let methods = spec
        .procedures
        .iter()
        .enumerate()
        .map(|(slot, &proc)| {
            let mut defined = 0usize;
            let mut covered = 0usize;
            let mut invalid = 0usize;
            let mut equal = 0usize;
            let mut widths = Vec::new();
            let mut is_interval = false;
            for rec in records {
                match rec.outcomes[slot] {
                    Outcome::Interval(iv) => {
                        is_interval = true;
                        let Some(inside) = iv.contains(theta) else {
                            continue;
                        };
                        defined += 1;
                        covered += usize::from(inside);
                        invalid += usize::from(iv.flags.invalid_range);
                        equal += usize::from(iv.flags.equal_bounds);
                        widths.push(iv.width().unwrap_or(0.0));
                    }
                    Outcome::Test => {
                        if let Some(reject) = decider.rejects(proc, &rec.summary, theta) {
                            defined += 1;
                            covered += usize::from(!reject);
                        }
                    }
                }
            }
            let frac = |count: usize| (defined > 0).then(|| count as f64 / defined as f64);
            let coverage = frac(covered);
            let logs: Vec<f64> = widths
                .iter()
                .filter(|&&w| w > 0.0)
                .map(|&w| libm::log(w))
                .collect();
            MethodMetrics {
                procedure: proc,
                defined,
                undefined: records.len() - defined,
                coverage,
                reject_at_truth: coverage.map(|c| 1.0 - c),
                invalid_prop: if is_interval { frac(invalid) } else { None },
                equal_bounds_prop: if is_interval { frac(equal) } else { None },
                width: FiveNumber::of(&widths),
                log_width: FiveNumber::of(&logs),
            }
        })
        .collect();
    Ok(MetricsRow {
        scenario: spec.clone(),
        methods,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurveRow {
    pub theta0: f64,
    /// `(procedure, rejection proportion, defined count)` in scenario order.
    pub methods: Vec<(Procedure, Option<f64>, usize)>,
}

/// Rejection proportions over the scenario's power grid, reusing the
/// intervals of each replication.
pub fn power_curve(spec: &ScenarioSpec, records: &[ReplicationRecord]) -> Result<Vec<PowerCurveRow>> {
    let grid = spec
        .power_grid
        .ok_or(Error::InvalidScenario("scenario has no power grid"))?;
    let decider = TestDecider::new(spec)?;
    Ok(grid
        .values(spec.theta(), spec.domain())
        .into_iter()
        .map(|theta0| {
            let methods = spec
                .procedures
                .iter()
                .enumerate()
                .map(|(slot, &proc)| {
                    let mut defined = 0usize;
                    let mut kept = 0usize;
                    for rec in records {
                        let not_rejected = match rec.outcomes[slot] {
                            Outcome::Interval(iv) => iv.contains(theta0),
                            Outcome::Test => decider
                                .rejects(proc, &rec.summary, theta0)
                                .map(|r| !r),
                        };
                        if let Some(keep) = not_rejected {
                            defined += 1;
                            kept += usize::from(keep);
                        }
                    }
                    // same arithmetic as `reject_at_truth`, so θ₀ = θ matches bit for bit
                    let reject = (defined > 0).then(|| 1.0 - kept as f64 / defined as f64);
                    (proc, reject, defined)
                })
                .collect();
            PowerCurveRow { theta0, methods }
        })
        .collect())
}

/// Sequential coverage run; the `bootpivot` crate provides a parallel one.
pub fn run_coverage(spec: &ScenarioSpec) -> Result<MetricsRow> {
    spec.validate()?;
    let records = (0..spec.replications)
        .map(|r| run_replication(spec, r))
        .collect::<Result<Vec<_>>>()?;
    summarize(spec, &records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn spec(pop: Population, n: usize, procs: Vec<Procedure>, r: usize) -> ScenarioSpec {
        ScenarioSpec {
            label: "unit".to_string(),
            stream: None,
            population: pop,
            n,
            procedures: procs,
            b: Some(199),
            m: 10,
            alpha: 0.05,
            replications: r,
            master_seed: 99,
            power_grid: Some(PowerGrid { d: 1.0, steps: 5 }),
            share_bootstrap: true,
        }
    }

    fn all_mean_procs() -> Vec<Procedure> {
        vec![
            Procedure::Interval(IntervalMethod::Basic),
            Procedure::Interval(IntervalMethod::Percentile),
            Procedure::Interval(IntervalMethod::Studentized),
            Procedure::Interval(IntervalMethod::ZMean),
            Procedure::Interval(IntervalMethod::TMean),
            Procedure::ZTestMean,
            Procedure::TTestMean,
        ]
    }

    #[test]
    fn procedure_names_round_trip() {
        for p in Procedure::ALL {
            assert_eq!(Procedure::from_name(p.name()), Some(p));
        }
    }

    #[test]
    fn grid_centre_is_exact_and_clipped() {
        let g = PowerGrid { d: 1.5, steps: 41 };
        let v = g.values(1.0, ParameterDomain::Unbounded);
        assert_eq!(v.len(), 41);
        assert_eq!(v[20], 1.0);
        assert_eq!(v[0], -0.5);
        assert_eq!(v[40], 2.5);
        let p = PowerGrid { d: 0.2, steps: 41 }.values(0.1, ParameterDomain::UnitInterval);
        assert!(p.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(p.contains(&0.1));
        assert!(p.len() < 41);
    }

    #[test]
    fn validation() {
        let pop = Population::normal(1.0, 1.0).unwrap();
        let mut s = spec(pop, 10, all_mean_procs(), 0);
        assert!(s.validate().is_err());
        s.replications = 10;
        assert!(s.validate().is_ok());
        s.b = None;
        assert!(s.validate().is_err());
        s.b = Some(99);
        s.m = 1;
        assert!(s.validate().is_err());
        s.m = 25;
        s.power_grid = Some(PowerGrid { d: 0.0, steps: 5 });
        assert!(s.validate().is_err());
    }

    #[test]
    fn replication_is_deterministic_and_shaped() {
        let s = spec(Population::exponential(1.0).unwrap(), 8, all_mean_procs(), 4);
        let a = run_replication(&s, 3).unwrap();
        let b = run_replication(&s, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcomes.len(), s.procedures.len());
        assert_ne!(a, run_replication(&s, 2).unwrap());
    }

    #[test]
    fn metrics_identities() {
        let s = spec(Population::exponential(1.0).unwrap(), 6, all_mean_procs(), 60);
        let row = run_coverage(&s).unwrap();
        for m in &row.methods {
            assert_eq!(m.defined + m.undefined, 60, "{}", m.procedure);
            let c = m.coverage.unwrap();
            assert!((0.0..=1.0).contains(&c));
            assert_eq!(m.reject_at_truth.unwrap(), 1.0 - c);
        }
        let z = row.method(Procedure::Interval(IntervalMethod::ZMean)).unwrap();
        let w = z.width.unwrap();
        assert_eq!(w.max(), w.min());
        // the z test is dual to the z interval
        let zt = row.method(Procedure::ZTestMean).unwrap();
        assert_eq!(zt.coverage, z.coverage);
    }

    #[test]
    fn power_at_truth_matches_coverage() {
        let s = spec(Population::normal(1.0, 1.0).unwrap(), 12, all_mean_procs(), 40);
        let records: Vec<_> = (0..40).map(|r| run_replication(&s, r).unwrap()).collect();
        let row = summarize(&s, &records).unwrap();
        let curve = power_curve(&s, &records).unwrap();
        let at_truth = curve.iter().find(|r| r.theta0 == 1.0).unwrap();
        for (proc, reject, defined) in &at_truth.methods {
            let m = row.method(*proc).unwrap();
            assert_eq!(*reject, m.reject_at_truth, "{proc}");
            assert_eq!(*defined, m.defined);
        }
    }

    #[test]
    fn unshared_bootstrap_changes_streams_not_shape() {
        let mut s = spec(Population::normal(0.0, 1.0).unwrap(), 10, all_mean_procs(), 3);
        let shared = run_replication(&s, 0).unwrap();
        s.share_bootstrap = false;
        let separate = run_replication(&s, 0).unwrap();
        assert_eq!(shared.summary, separate.summary);
        assert_ne!(shared.outcomes[0], separate.outcomes[0]);
        assert!(s.resamples_per_replication() > 199 * 10);
    }

    #[test]
    fn five_number_summary() {
        let f = FiveNumber::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!(f.0, [1.0, 2.0, 3.0, 4.0, 5.0]);
        let g = FiveNumber::of(&[0.0, 10.0]).unwrap();
        assert_eq!(g.0, [0.0, 2.5, 5.0, 7.5, 10.0]);
        assert!(FiveNumber::of(&[]).is_none());
    }

    #[test]
    fn bernoulli_flags_flow_through() {
        let s = spec(
            Population::bernoulli(0.1).unwrap(),
            5,
            vec![
                Procedure::Interval(IntervalMethod::Basic),
                Procedure::Interval(IntervalMethod::Percentile),
                Procedure::Interval(IntervalMethod::WaldProportion),
                Procedure::ZTestProportion,
            ],
            200,
        );
        let row = run_coverage(&s).unwrap();
        let wald = row.method(Procedure::Interval(IntervalMethod::WaldProportion)).unwrap();
        assert!(wald.equal_bounds_prop.unwrap() > 0.3);
        assert!(wald.invalid_prop.unwrap() > 0.2);
        let pct = row.method(Procedure::Interval(IntervalMethod::Percentile)).unwrap();
        assert!(pct.equal_bounds_prop.unwrap() > 0.3);
        assert!(row.method(Procedure::ZTestProportion).unwrap().invalid_prop.is_none());
    }
}
