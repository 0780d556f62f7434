//! Command implementations. Each writes its report to `out` and returns an
//! error whose exit code the binary uses.

use std::io::Write;
use std::path::{Path, PathBuf};

use bootpivot_core::distributions::ParameterDomain;
use bootpivot_core::hypothesis::{test_with_distribution, Alternative, Pivot, TestSpec};
use bootpivot_core::intervals::{
    basic_and_percentile, order_indices, studentized_interval, t_interval_mean,
    wald_interval_proportion, z_interval_mean, IntervalEstimate, IntervalMethod,
};
use bootpivot_core::resample::{bootstrap_distribution, studentize, BootstrapDistribution};
use bootpivot_core::{Error, Purpose, Sample, SeedSpec, Statistic};
use log::info;

use crate::config::RunConfig;
use crate::data::read_values;
use crate::error::{CliError, Result};
use crate::harness::{self, DiagnosticSeries};
use crate::output;
use crate::schedule::Scheduler;

#[derive(Debug, Clone)]
pub struct IntervalArgs {
    pub data: PathBuf,
    pub stat: Statistic,
    pub method: IntervalMethod,
    pub b: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Known population SD, required by `z_mean`.
    pub sigma: Option<f64>,
    pub hist_out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct TestArgs {
    pub data: PathBuf,
    pub stat: Statistic,
    pub pivot: Pivot,
    pub null: f64,
    pub alternative: Alternative,
    pub b: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BatchArgs {
    pub config: PathBuf,
    /// Overrides `output.directory`.
    pub out_dir: Option<PathBuf>,
    /// Overrides `design.workers`.
    pub workers: Option<usize>,
}

fn w(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text)
        .map_err(|e| CliError::io("<stdout>", e))
}

fn stat_phrase(stat: Statistic) -> &'static str {
    match stat {
        Statistic::Mean => "mean",
        Statistic::Median => "median",
        Statistic::Proportion => "proportion",
        Statistic::Sd => "standard deviation",
    }
}

fn method_phrase(method: IntervalMethod) -> &'static str {
    match method {
        IntervalMethod::Basic => "basic bootstrap",
        IntervalMethod::Percentile => "percentile bootstrap",
        IntervalMethod::Studentized => "studentized bootstrap",
        IntervalMethod::ZMean => "z",
        IntervalMethod::TMean => "t",
        IntervalMethod::WaldProportion => "Wald",
    }
}

fn load_sample(path: &Path, stat: Statistic) -> Result<Sample> {
    let values = read_values(path)?;
    if stat == Statistic::Proportion && values.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(CliError::invalid(format!(
            "{}: proportions need 0/1 data",
            path.display()
        )));
    }
    Ok(Sample::new(values)?)
}

fn domain_for(stat: Statistic) -> ParameterDomain {
    if stat == Statistic::Proportion {
        ParameterDomain::UnitInterval
    } else {
        ParameterDomain::Unbounded
    }
}

fn seed_for(command: &str, seed: u64) -> SeedSpec {
    SeedSpec::new(seed).scenario_label(command)
}

fn bootstrap(
    sample: &Sample,
    stat: Statistic,
    b: usize,
    m: Option<usize>,
    seed: &SeedSpec,
) -> Result<BootstrapDistribution> {
    let bd = bootstrap_distribution(sample, stat, b, &seed.purpose(Purpose::Bootstrap))?;
    Ok(match m {
        Some(m) => studentize(bd, sample, stat, m, &seed.purpose(Purpose::Nested))?,
        None => bd,
    })
}

fn check_method(args: &IntervalArgs) -> Result<()> {
    let mut errors = Vec::new();
    let needs = |stat: Statistic| {
        format!(
            "method {} needs stat {}, got {}",
            args.method, stat, args.stat
        )
    };
    match args.method {
        IntervalMethod::ZMean | IntervalMethod::TMean if args.stat != Statistic::Mean => {
            errors.push(needs(Statistic::Mean))
        }
        IntervalMethod::WaldProportion if args.stat != Statistic::Proportion => {
            errors.push(needs(Statistic::Proportion))
        }
        _ => {}
    }
    if args.method == IntervalMethod::ZMean && args.sigma.is_none() {
        errors.push("method z_mean needs --sigma".into());
    }
    if args.method.is_bootstrap() && !(args.alpha > 0.0 && args.alpha <= 0.5) {
        errors.push(format!("alpha must be in (0, 0.5], got {}", args.alpha));
    }
    if args.method == IntervalMethod::Studentized && args.m < 2 {
        errors.push("studentized intervals need at least 2 second-level resamples".into());
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(errors))
    }
}

pub fn cmd_interval(args: &IntervalArgs, out: &mut dyn Write) -> Result<IntervalEstimate> {
    check_method(args)?;
    let sample = load_sample(&args.data, args.stat)?;
    let domain = domain_for(args.stat);
    let mut hist = None;
    let estimate = match args.method {
        IntervalMethod::ZMean => z_interval_mean(&sample, args.sigma.unwrap_or(1.0), args.alpha)?,
        IntervalMethod::TMean => t_interval_mean(&sample, args.alpha)?,
        IntervalMethod::WaldProportion => wald_interval_proportion(&sample, args.alpha)?,
        method => {
            if order_indices(args.b, args.alpha)?.is_none() {
                return Err(Error::TooFewResamples(args.b, args.alpha).into());
            }
            let m = (method == IntervalMethod::Studentized).then_some(args.m);
            let bd = bootstrap(&sample, args.stat, args.b, m, &seed_for("interval", args.seed))?;
            let est = match method {
                IntervalMethod::Studentized => studentized_interval(&bd, args.alpha, domain)?,
                IntervalMethod::Basic => basic_and_percentile(&bd, args.alpha, domain)?.0,
                _ => basic_and_percentile(&bd, args.alpha, domain)?.1,
            };
            hist = Some(bd);
            est
        }
    };

    let what = format!(
        "The {} interval for the {}",
        method_phrase(args.method),
        stat_phrase(args.stat)
    );
    match estimate.bounds {
        Some((lo, hi)) => w(out, format_args!("{what} is: ({lo}, {hi}).\n"))?,
        None => w(
            out,
            format_args!(
                "{what} is undefined: too few defined bootstrap z values or a zero standard error.\n"
            ),
        )?,
    }
    if estimate.flags.equal_bounds {
        w(out, format_args!("Flag: equal bounds (zero width).\n"))?;
    }
    if estimate.flags.invalid_range {
        w(out, format_args!("Flag: a bound lies outside [0, 1].\n"))?;
    }
    w(out, format_args!("{}\n", args.method.assumption()))?;

    if let Some(path) = &args.hist_out {
        let Some(bd) = hist else {
            return Err(CliError::invalid(format!(
                "--hist-out needs a bootstrap method, got {}",
                args.method
            )));
        };
        let series = [
            DiagnosticSeries {
                name: "bootstrap".into(),
                values: bd.stats.clone(),
                removed: 0,
            },
            DiagnosticSeries {
                name: "original".into(),
                values: vec![bd.origin_stat],
                removed: 0,
            },
        ];
        output::write_hist(path, &series)?;
    }
    Ok(estimate)
}

pub fn cmd_test(args: &TestArgs, out: &mut dyn Write) -> Result<()> {
    let spec = TestSpec::new(args.pivot, args.null, args.alternative, args.alpha)?;
    if args.pivot == Pivot::Studentized && args.m < 2 {
        return Err(CliError::invalid(
            "the studentized pivot needs at least 2 second-level resamples",
        ));
    }
    let sample = load_sample(&args.data, args.stat)?;
    let m = (args.pivot == Pivot::Studentized).then_some(args.m);
    let bd = bootstrap(&sample, args.stat, args.b, m, &seed_for("test", args.seed))?;
    let result = test_with_distribution(&spec, &sample, args.stat, &bd);

    let h0 = format!("H0: {} = {}", stat_phrase(args.stat), args.null);
    match result.observed {
        Some(t) => w(out, format_args!("Observed statistic t(x) = {t}\n"))?,
        None => w(
            out,
            format_args!("Observed statistic t(x) is undefined: the standard error is zero.\n"),
        )?,
    }
    w(
        out,
        format_args!(
            "Defined bootstrap statistics: {} of {}\n",
            result.boot_stats_used,
            bd.b()
        ),
    )?;
    match (result.asl, result.reject) {
        (Some(asl), Some(reject)) => {
            w(out, format_args!("ASL ({}) = {asl}\n", args.alternative))?;
            let verdict = if reject { "reject" } else { "do not reject" };
            w(out, format_args!("Decision at alpha = {}: {verdict} {h0}\n", args.alpha))?;
        }
        _ => w(out, format_args!("The test of {h0} is undefined.\n"))?,
    }
    Ok(())
}

fn batch_setup(args: &BatchArgs, cfg: &RunConfig) -> Result<(Scheduler, PathBuf)> {
    let workers = args.workers.or(cfg.design.workers).unwrap_or(0);
    let sched = Scheduler::new(workers)?;
    let dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| cfg.output.directory.clone());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok((sched, dir))
}

pub fn cmd_simulate(args: &BatchArgs, out: &mut dyn Write) -> Result<PathBuf> {
    let cfg = RunConfig::load(&args.config)?;
    let specs = cfg.scenarios()?;
    let (sched, dir) = batch_setup(args, &cfg)?;
    info!(
        "{} scenarios, {} resamples in total, {} workers",
        specs.len(),
        harness::resample_budget(&specs),
        sched.workers()
    );
    let mut rows = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        info!("[{}/{}] {}", i + 1, specs.len(), spec.label);
        rows.push(harness::run_coverage(spec, &sched)?);
    }
    let path = dir.join("metrics.csv");
    output::write_metrics(&path, &rows)?;
    w(out, format_args!("wrote {}\n", path.display()))?;
    Ok(path)
}

pub fn cmd_power(args: &BatchArgs, out: &mut dyn Write) -> Result<PathBuf> {
    let cfg = RunConfig::load(&args.config)?;
    if !cfg.power.enabled {
        return Err(CliError::invalid("power.enabled is false"));
    }
    let specs = cfg.scenarios()?;
    let (sched, dir) = batch_setup(args, &cfg)?;
    info!(
        "{} scenarios, {} resamples in total, {} workers",
        specs.len(),
        harness::resample_budget(&specs),
        sched.workers()
    );
    let mut curves = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        info!("[{}/{}] {}", i + 1, specs.len(), spec.label);
        let (_, rows) = harness::run_power(spec, &sched)?;
        curves.push((spec.label.clone(), rows));
    }
    let path = dir.join("power.csv");
    output::write_power(&path, &curves)?;
    w(out, format_args!("wrote {}\n", path.display()))?;
    Ok(path)
}

pub fn cmd_diagnose(args: &BatchArgs, out: &mut dyn Write) -> Result<PathBuf> {
    let cfg = RunConfig::load(&args.config)?;
    let plan = cfg.diagnostic_plan()?;
    let (sched, dir) = batch_setup(args, &cfg)?;
    let series = harness::run_diagnostics(&plan, &sched)?;
    let path = dir.join("hist.csv");
    output::write_hist(&path, &series)?;
    let sidecar = dir.join("hist_removed.csv");
    output::write_removed(&sidecar, &series)?;
    for s in series.iter().filter(|s| s.removed > 0) {
        w(out, format_args!("{}: removed {}\n", s.name, s.removed))?;
    }
    w(
        out,
        format_args!("wrote {} and {}\n", path.display(), sidecar.display()),
    )?;
    Ok(path)
}
