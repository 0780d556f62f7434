//! Parallel drivers for the simulation kernels in `bootpivot_core::sim`.

use bootpivot_core::distributions::Population;
use bootpivot_core::resample::{collect_diagnostics, pivot_draw};
use bootpivot_core::sim::{
    power_curve, run_replication, summarize, MetricsRow, PowerCurveRow, ReplicationRecord,
    ScenarioSpec,
};
use bootpivot_core::SeedSpec;
use log::info;

use crate::error::Result;
use crate::schedule::Scheduler;

fn replicate(spec: &ScenarioSpec, sched: &Scheduler) -> Result<Vec<ReplicationRecord>> {
    spec.validate()?;
    info!(
        "{}: {} replications, {} resamples",
        spec.label,
        spec.replications,
        spec.resamples_per_replication() * spec.replications as u64
    );
    Ok(sched.map(spec.replications, |r| run_replication(spec, r))?)
}

/// Coverage, flags and widths for every procedure of one scenario.
pub fn run_coverage(spec: &ScenarioSpec, sched: &Scheduler) -> Result<MetricsRow> {
    let records = replicate(spec, sched)?;
    Ok(summarize(spec, &records)?)
}

/// Rejection curve over the scenario's grid, plus the metrics of the same
/// replications.
pub fn run_power(
    spec: &ScenarioSpec,
    sched: &Scheduler,
) -> Result<(MetricsRow, Vec<PowerCurveRow>)> {
    let records = replicate(spec, sched)?;
    Ok((summarize(spec, &records)?, power_curve(spec, &records)?))
}

/// Total resamples a set of scenarios will draw.
pub fn resample_budget(specs: &[ScenarioSpec]) -> u64 {
    specs
        .iter()
        .map(|s| s.resamples_per_replication() * s.replications as u64)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticPlan {
    /// Each population with its own sample sizes.
    pub cells: Vec<(Population, Vec<usize>)>,
    pub resamples: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

/// One histogram-ready value sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub name: String,
    pub values: Vec<f64>,
    /// Replications dropped because their standard error was zero.
    pub removed: usize,
}

/// Shifted and studentized estimator draws for every population and size.
///
/// All B values of one (population, N) cell reuse the same samples, so the
/// shifted series is emitted once per cell.
pub fn run_diagnostics(plan: &DiagnosticPlan, sched: &Scheduler) -> Result<Vec<DiagnosticSeries>> {
    let mut out = Vec::new();
    for (pop, sizes) in &plan.cells {
        for &n in sizes {
            let cell = format!("{} N={n}", pop.label());
            let base = SeedSpec::new(plan.master_seed).scenario_label(&format!("diagnose/{cell}"));
            for (j, &b) in plan.resamples.iter().enumerate() {
                info!("{cell} B={b}: {} replications", plan.replications);
                let draws = sched.map(plan.replications, |r| {
                    pivot_draw(pop, n, b, &base.replication(r as u64))
                })?;
                let diag = collect_diagnostics(*pop, n, b, draws);
                if j == 0 {
                    out.push(DiagnosticSeries {
                        name: format!("shifted {cell}"),
                        values: diag.shifted,
                        removed: 0,
                    });
                }
                out.push(DiagnosticSeries {
                    name: format!("studentized {cell} B={b}"),
                    values: diag.studentized,
                    removed: diag.removed,
                });
            }
        }
    }
    Ok(out)
}
