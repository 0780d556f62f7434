//! Bootstrap distributions, plug-in and nested standard errors, studentized
//! bootstrap values and pivot diagnostics.

use alloc::vec::Vec;

use rand::Rng;

use crate::distributions::{draw_sample, Population};
use crate::{Error, Purpose, Result, Sample, SeedSpec, Statistic};

/// Fills `out` with `src.len()` draws taken uniformly with replacement from `src`.
#[inline]
pub fn resample_into<R: Rng + ?Sized>(src: &[f64], out: &mut Vec<f64>, rng: &mut R) {
    let n = src.len();
    out.clear();
    out.extend((0..n).map(|_| src[rng.random_range(0..n)]));
}

pub fn resample(sample: &Sample, seed: &SeedSpec) -> Sample {
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(sample.len());
    resample_into(sample.values(), &mut out, &mut rng);
    Sample::from_trusted(out)
}

/// Standard deviation of `stats` with the B−1 divisor; exactly 0 for constant input.
pub fn plugin_se(stats: &[f64]) -> Result<f64> {
    if stats.len() < 2 {
        return Err(Error::TooFewValues {
            what: "plug-in standard error",
            needed: 2,
            got: stats.len(),
        });
    }
    Ok(crate::sample::sd(stats))
}

/// Bootstrap statistics of one sample, optionally studentized.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    pub stats: Vec<f64>,
    /// Second-level standard errors, one per resample, once studentized.
    pub se_star: Option<Vec<f64>>,
    /// `(stats[i] - origin_stat) / se_star[i]`; `None` where `se_star[i] == 0`.
    pub z_star: Option<Vec<Option<f64>>>,
    pub origin_stat: f64,
    /// Plug-in SE of the bootstrap statistics; `None` when B < 2.
    pub origin_se: Option<f64>,
    /// Second-level resample count, 0 until studentized.
    pub m: usize,
    /// Stream the first-level resamples were drawn from.
    pub seed: SeedSpec,
}

impl BootstrapDistribution {
    pub fn b(&self) -> usize {
        self.stats.len()
    }

    /// Defined studentized values in ascending order.
    pub fn sorted_defined_z(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self
            .z_star
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .flatten()
            .copied()
            .collect();
        d.sort_unstable_by(f64::total_cmp);
        d
    }

    pub fn sorted_stats(&self) -> Vec<f64> {
        let mut s = self.stats.clone();
        s.sort_unstable_by(f64::total_cmp);
        s
    }
}

pub fn bootstrap_distribution(
    sample: &Sample,
    stat: Statistic,
    b: usize,
    seed: &SeedSpec,
) -> Result<BootstrapDistribution> {
    if b == 0 {
        return Err(Error::TooFewValues {
            what: "bootstrap distribution",
            needed: 1,
            got: 0,
        });
    }
    let mut rng = seed.rng();
    let mut buf = Vec::with_capacity(sample.len());
    let stats: Vec<f64> = (0..b)
        .map(|_| {
            resample_into(sample.values(), &mut buf, &mut rng);
            stat.evaluate_in_place(&mut buf)
        })
        .collect();
    let origin_se = plugin_se(&stats).ok();
    Ok(BootstrapDistribution {
        origin_stat: stat.evaluate(sample),
        origin_se,
        stats,
        se_star: None,
        z_star: None,
        m: 0,
        seed: *seed,
    })
}

fn nested_se_with<R: Rng + ?Sized>(
    bootstrap_sample: &[f64],
    stat: Statistic,
    m: usize,
    rng: &mut R,
    buf: &mut Vec<f64>,
    second: &mut Vec<f64>,
) -> f64 {
    second.clear();
    for _ in 0..m {
        resample_into(bootstrap_sample, buf, rng);
        second.push(stat.evaluate_in_place(buf));
    }
    crate::sample::sd(second)
}

/// Plug-in SE over `m` second-level resamples of one bootstrap sample.
pub fn nested_bootstrap_se(
    bootstrap_sample: &Sample,
    stat: Statistic,
    m: usize,
    seed: &SeedSpec,
) -> Result<f64> {
    if m < 2 {
        return Err(Error::TooFewValues {
            what: "nested bootstrap standard error",
            needed: 2,
            got: m,
        });
    }
    let mut rng = seed.rng();
    let mut buf = Vec::with_capacity(bootstrap_sample.len());
    let mut second = Vec::with_capacity(m);
    Ok(nested_se_with(
        bootstrap_sample.values(),
        stat,
        m,
        &mut rng,
        &mut buf,
        &mut second,
    ))
}

/// Fills in second-level SEs and studentized values for `bd`.
///
/// The first-level resamples are replayed from `bd.seed`; all second-level
/// draws come from the single stream named by `seed`.
pub fn studentize(
    mut bd: BootstrapDistribution,
    sample: &Sample,
    stat: Statistic,
    m: usize,
    seed: &SeedSpec,
) -> Result<BootstrapDistribution> {
    if m < 2 {
        return Err(Error::TooFewValues {
            what: "nested bootstrap standard error",
            needed: 2,
            got: m,
        });
    }
    let mut first = bd.seed.rng();
    let mut nested = seed.rng();
    let n = sample.len();
    let mut boot = Vec::with_capacity(n);
    let mut scratch = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(m);
    let mut se_star = Vec::with_capacity(bd.b());
    let mut z_star = Vec::with_capacity(bd.b());
    for &theta_star in &bd.stats {
        resample_into(sample.values(), &mut boot, &mut first);
        debug_assert!({
            scratch.clone_from(&boot);
            stat.evaluate_in_place(&mut scratch) == theta_star
        });
        let se = nested_se_with(&boot, stat, m, &mut nested, &mut buf, &mut second);
        se_star.push(se);
        z_star.push(studentized_value(theta_star, bd.origin_stat, se));
    }
    bd.se_star = Some(se_star);
    bd.z_star = Some(z_star);
    bd.m = m;
    Ok(bd)
}

/// `(theta_star - origin) / se`, undefined when `se` is zero.
#[inline]
pub fn studentized_value(theta_star: f64, origin: f64, se: f64) -> Option<f64> {
    (se > 0.0).then(|| (theta_star - origin) / se)
}

/// Bootstrap distribution plus studentization in one call.
pub fn studentized_bootstrap(
    sample: &Sample,
    stat: Statistic,
    b: usize,
    m: usize,
    seed: &SeedSpec,
) -> Result<BootstrapDistribution> {
    let bd = bootstrap_distribution(sample, stat, b, seed)?;
    studentize(bd, sample, stat, m, &seed.purpose(Purpose::Nested))
}

/// Simulated draws of the shifted and studentized estimator for one population.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotDiagnostics {
    pub population: Population,
    pub n: usize,
    pub b: usize,
    /// `θ̂(X) − θ` for every replication.
    pub shifted: Vec<f64>,
    /// `(θ̂(X) − θ) / σ̂` where σ̂ > 0.
    pub studentized: Vec<f64>,
    /// Replications whose σ̂ was zero.
    pub removed: usize,
}

/// One diagnostic replication: `(shifted, studentized)`.
pub fn pivot_draw(
    pop: &Population,
    n: usize,
    b: usize,
    seed: &SeedSpec,
) -> Result<(f64, Option<f64>)> {
    let sample = draw_sample(pop, n, &seed.purpose(Purpose::Sample))?;
    let stat = pop.statistic();
    // Bootstrap stream keyed by B so the B=99 and B=999 overlays share samples
    // but not resamples.
    let bd = bootstrap_distribution(
        &sample,
        stat,
        b,
        &seed.purpose(Purpose::Diagnostic).index(b as u64),
    )?;
    let shifted = bd.origin_stat - pop.true_parameter();
    let se = bd.origin_se.ok_or(Error::TooFewValues {
        what: "plug-in standard error",
        needed: 2,
        got: b,
    })?;
    Ok((shifted, (se > 0.0).then(|| shifted / se)))
}

/// Sequential pivot diagnostics over a list of populations.
///
/// Replication `r` of population `i` uses scenario label `seed.scenario ^ (i + 1)`.
pub fn pivot_diagnostics(
    pops: &[Population],
    n: usize,
    reps: usize,
    b: usize,
    seed: &SeedSpec,
) -> Result<Vec<PivotDiagnostics>> {
    if reps == 0 {
        return Err(Error::InvalidScenario("replications must be at least 1"));
    }
    pops.iter()
        .enumerate()
        .map(|(i, pop)| {
            let base = seed.scenario(seed.scenario ^ (i as u64 + 1));
            let draws = (0..reps)
                .map(|r| pivot_draw(pop, n, b, &base.replication(r as u64)))
                .collect::<Result<Vec<_>>>()?;
            Ok(collect_diagnostics(*pop, n, b, draws))
        })
        .collect()
}

pub fn collect_diagnostics(
    population: Population,
    n: usize,
    b: usize,
    draws: Vec<(f64, Option<f64>)>,
) -> PivotDiagnostics {
    let shifted: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let studentized: Vec<f64> = draws.iter().filter_map(|d| d.1).collect();
    let removed = shifted.len() - studentized.len();
    PivotDiagnostics {
        population,
        n,
        b,
        shifted,
        studentized,
        removed,
    }
}
