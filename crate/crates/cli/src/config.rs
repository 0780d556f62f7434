//! Run configuration files (TOML).
//!
//! ```toml
//! [[population]]
//! kind = "exponential"
//! rate = 1.0
//! sizes = [5, 10, 20]     # optional, overrides design.sizes
//!
//! [design]
//! sizes = [10, 40]
//! resamples = [99, 999]
//! second_level = 25
//! alpha = 0.05
//! replications = 10000
//! master_seed = 20240601
//!
//! [methods]
//! list = ["basic", "percentile", "t_mean"]
//! ```

use std::path::{Path, PathBuf};

use bootpivot_core::distributions::Population;
use bootpivot_core::intervals::IntervalMethod;
use bootpivot_core::sim::{PowerGrid, Procedure, ScenarioSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::harness::DiagnosticPlan;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub population: Vec<PopulationEntry>,
    pub design: Design,
    #[serde(default)]
    pub methods: Methods,
    #[serde(default)]
    pub power: PowerSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationEntry {
    pub kind: String,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub rate: Option<f64>,
    pub p: Option<f64>,
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Design {
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub resamples: Vec<usize>,
    #[serde(default = "default_second_level")]
    pub second_level: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub workers: Option<usize>,
    #[serde(default = "default_true")]
    pub share_bootstrap: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Methods {
    #[serde(default)]
    pub list: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    #[serde(default = "default_true")]
    pub enabled: bool,
    /// Defaults to 1.5 for means and 1.0 for proportions.
    pub d: Option<f64>,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            enabled: true,
            d: None,
            steps: PowerGrid::DEFAULT_STEPS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_second_level() -> usize {
    ScenarioSpec::DEFAULT_M
}

fn default_alpha() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

fn default_steps() -> usize {
    PowerGrid::DEFAULT_STEPS
}

fn default_directory() -> PathBuf {
    PathBuf::from(".")
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

const MEAN_POWER_D: f64 = 1.5;
const PROPORTION_POWER_D: f64 = 1.0;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::invalid(format!("config: {}", e.message())))
    }

    /// Populations with their sample sizes, collecting every problem found.
    fn populations(&self, errors: &mut Vec<String>) -> Vec<(Population, Vec<usize>)> {
        if self.population.is_empty() {
            errors.push("at least one [[population]] is required".into());
        }
        let mut out = Vec::new();
        for (i, entry) in self.population.iter().enumerate() {
            let sizes = entry.sizes.clone().unwrap_or_else(|| self.design.sizes.clone());
            if sizes.is_empty() {
                errors.push(format!("population {}: no sample sizes given", i + 1));
            }
            if sizes.contains(&0) {
                errors.push(format!("population {}: sample sizes must be positive", i + 1));
            }
            match entry.build() {
                Ok(pop) => out.push((pop, sizes)),
                Err(msg) => errors.push(format!("population {}: {msg}", i + 1)),
            }
        }
        out
    }

    fn check_design(&self, errors: &mut Vec<String>) {
        let d = &self.design;
        if d.replications == 0 {
            errors.push("design.replications must be at least 1".into());
        }
        if !(d.alpha > 0.0 && d.alpha <= 0.5) {
            errors.push(format!("design.alpha must be in (0, 0.5], got {}", d.alpha));
        }
        if d.resamples.contains(&0) {
            errors.push("design.resamples must be positive".into());
        }
        if d.workers == Some(0) {
            errors.push("design.workers must be at least 1".into());
        }
        for f in &self.output.formats {
            if f != "csv" {
                errors.push(format!("output.formats: unsupported format {f:?}"));
            }
        }
    }

    fn procedures(&self, errors: &mut Vec<String>) -> Vec<Procedure> {
        if self.methods.list.is_empty() {
            errors.push("methods.list must name at least one method".into());
        }
        let mut out = Vec::new();
        for name in &self.methods.list {
            match Procedure::from_name(name) {
                Some(p) if out.contains(&p) => errors.push(format!("method {name} listed twice")),
                Some(p) => out.push(p),
                None => errors.push(format!("unknown method {name:?}")),
            }
        }
        let studentized = Procedure::Interval(IntervalMethod::Studentized);
        if out.iter().any(|p| p.is_bootstrap()) && self.design.resamples.is_empty() {
            errors.push("bootstrap methods need design.resamples".into());
        }
        if out.contains(&studentized) && self.design.second_level < 2 {
            errors.push("design.second_level must be at least 2".into());
        }
        out
    }

    /// Coverage scenarios: one cell per (population, N, B) for the bootstrap
    /// methods and one per (population, N) for the rest. Cells of the same
    /// (population, N) see the same samples.
    pub fn scenarios(&self) -> Result<Vec<ScenarioSpec>> {
        let mut errors = Vec::new();
        self.check_design(&mut errors);
        let pops = self.populations(&mut errors);
        let procs = self.procedures(&mut errors);
        let power_d = self.power.d;
        if let Some(d) = power_d {
            if !(d.is_finite() && d > 0.0) {
                errors.push(format!("power.d must be positive, got {d}"));
            }
        }
        if self.power.steps == 0 {
            errors.push("power.steps must be at least 1".into());
        }

        let mut specs = Vec::new();
        for proc in &procs {
            if !pops.iter().any(|(pop, _)| proc.applies_to(pop)) {
                errors.push(format!("method {proc} applies to none of the populations"));
            }
        }
        for (pop, sizes) in &pops {
            let boot: Vec<Procedure> = procs
                .iter()
                .copied()
                .filter(|p| p.is_bootstrap() && p.applies_to(pop))
                .collect();
            let other: Vec<Procedure> = procs
                .iter()
                .copied()
                .filter(|p| !p.is_bootstrap() && p.applies_to(pop))
                .collect();
            let grid = PowerGrid {
                d: power_d.unwrap_or(match pop {
                    Population::Bernoulli { .. } => PROPORTION_POWER_D,
                    _ => MEAN_POWER_D,
                }),
                steps: self.power.steps,
            };
            for &n in sizes {
                let stream = format!("{} N={n}", pop.label());
                let make = |label: String, procedures: Vec<Procedure>, b: Option<usize>| ScenarioSpec {
                    label,
                    stream: Some(stream.clone()),
                    population: *pop,
                    n,
                    procedures,
                    b,
                    m: self.design.second_level,
                    alpha: self.design.alpha,
                    replications: self.design.replications,
                    master_seed: self.design.master_seed,
                    power_grid: self.power.enabled.then_some(grid),
                    share_bootstrap: self.design.share_bootstrap,
                };
                if !boot.is_empty() {
                    for &b in &self.design.resamples {
                        specs.push(make(format!("{stream} B={b}"), boot.clone(), Some(b)));
                    }
                }
                if !other.is_empty() {
                    specs.push(make(stream.clone(), other.clone(), None));
                }
            }
        }
        for spec in &specs {
            if let Err(e) = spec.validate() {
                errors.push(format!("{}: {e}", spec.label));
            }
        }
        if errors.is_empty() {
            Ok(specs)
        } else {
            errors.dedup();
            Err(CliError::Validation(errors))
        }
    }

    pub fn diagnostic_plan(&self) -> Result<DiagnosticPlan> {
        let mut errors = Vec::new();
        self.check_design(&mut errors);
        let cells = self.populations(&mut errors);
        if self.design.resamples.is_empty() {
            errors.push("design.resamples must list at least one B".into());
        }
        if self.design.resamples.contains(&1) {
            errors.push("design.resamples must be at least 2 for a standard error".into());
        }
        if errors.is_empty() {
            Ok(DiagnosticPlan {
                cells,
                resamples: self.design.resamples.clone(),
                replications: self.design.replications,
                master_seed: self.design.master_seed,
            })
        } else {
            Err(CliError::Validation(errors))
        }
    }
}

impl PopulationEntry {
    fn build(&self) -> std::result::Result<Population, String> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| format!("{} needs {key}", self.kind));
        let extra = |keys: &[(&str, bool)]| -> std::result::Result<(), String> {
            match keys.iter().find(|(_, set)| *set) {
                Some((k, _)) => Err(format!("{} does not take {k}", self.kind)),
                None => Ok(()),
            }
        };
        let pop = match self.kind.as_str() {
            "normal" => {
                extra(&[("rate", self.rate.is_some()), ("p", self.p.is_some())])?;
                Population::normal(need(self.mean, "mean")?, need(self.sd, "sd")?)
            }
            "exponential" => {
                extra(&[
                    ("mean", self.mean.is_some()),
                    ("sd", self.sd.is_some()),
                    ("p", self.p.is_some()),
                ])?;
                Population::exponential(need(self.rate, "rate")?)
            }
            "bernoulli" => {
                extra(&[
                    ("mean", self.mean.is_some()),
                    ("sd", self.sd.is_some()),
                    ("rate", self.rate.is_some()),
                ])?;
                Population::bernoulli(need(self.p, "p")?)
            }
            other => return Err(format!("unknown kind {other:?}")),
        };
        pop.map_err(|e| e.to_string())
    }
}
