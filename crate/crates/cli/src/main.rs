use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bootpivot::app::{self, BatchArgs, IntervalArgs, TestArgs};
use bootpivot::CliError;
use bootpivot_core::hypothesis::{Alternative, Pivot};
use bootpivot_core::intervals::IntervalMethod;
use bootpivot_core::Statistic;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bootpivot", version, about = "Bootstrap intervals, tests and coverage simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interval estimate for one data file.
    Interval {
        #[command(flatten)]
        data: DataArgs,
        /// basic, percentile, studentized, z_mean, t_mean or wald_proportion.
        #[arg(long, value_parser = parse_method, default_value = "percentile")]
        method: IntervalMethod,
        /// Known population SD for z_mean.
        #[arg(long)]
        sigma: Option<f64>,
        /// Write the bootstrap statistics as histogram data.
        #[arg(long)]
        hist_out: Option<PathBuf>,
    },
    /// Pivotal bootstrap test for one data file.
    Test {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_pivot, default_value = "studentized")]
        pivot: Pivot,
        /// Hypothesized parameter value.
        #[arg(long, allow_negative_numbers = true)]
        null: f64,
        /// two-sided, lower or upper.
        #[arg(long, value_parser = parse_alternative, default_value = "two-sided")]
        alternative: Alternative,
    },
    /// Coverage study; writes metrics.csv.
    Simulate(Batch),
    /// Rejection curves; writes power.csv.
    Power(Batch),
    /// Shifted and studentized estimator draws; writes hist.csv.
    Diagnose(Batch),
}

#[derive(Args)]
struct DataArgs {
    /// One value per line, or a single CSV column with optional header.
    #[arg(long)]
    data: PathBuf,
    /// mean, median, proportion or sd.
    #[arg(long, value_parser = parse_stat, default_value = "mean")]
    stat: Statistic,
    /// First-level resamples.
    #[arg(short = 'B', long = "resamples", default_value_t = 999)]
    b: usize,
    /// Second-level resamples for studentizing.
    #[arg(short = 'M', long = "second-level", default_value_t = 25)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct Batch {
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, overriding the config.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_named<T>(s: &str, f: fn(&str) -> Option<T>, what: &str) -> Result<T, String> {
    f(s).ok_or_else(|| format!("unknown {what} {s:?}"))
}

fn parse_method(s: &str) -> Result<IntervalMethod, String> {
    parse_named(s, IntervalMethod::from_name, "method")
}

fn parse_stat(s: &str) -> Result<Statistic, String> {
    parse_named(s, Statistic::from_name, "statistic")
}

fn parse_pivot(s: &str) -> Result<Pivot, String> {
    parse_named(s, Pivot::from_name, "pivot")
}

fn parse_alternative(s: &str) -> Result<Alternative, String> {
    parse_named(s, Alternative::from_name, "alternative")
}

impl Batch {
    fn into_args(self) -> BatchArgs {
        BatchArgs {
            config: self.config,
            out_dir: self.out,
            workers: self.workers,
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Interval {
            data,
            method,
            sigma,
            hist_out,
        } => {
            let args = IntervalArgs {
                data: data.data,
                stat: data.stat,
                method,
                b: data.b,
                m: data.m,
                alpha: data.alpha,
                seed: data.seed,
                sigma,
                hist_out,
            };
            app::cmd_interval(&args, out).map(drop)
        }
        Command::Test {
            data,
            pivot,
            null,
            alternative,
        } => {
            let args = TestArgs {
                data: data.data,
                stat: data.stat,
                pivot,
                null,
                alternative,
                b: data.b,
                m: data.m,
                alpha: data.alpha,
                seed: data.seed,
            };
            app::cmd_test(&args, out)
        }
        Command::Simulate(b) => app::cmd_simulate(&b.into_args(), out).map(drop),
        Command::Power(b) => app::cmd_power(&b.into_args(), out).map(drop),
        Command::Diagnose(b) => app::cmd_diagnose(&b.into_args(), out).map(drop),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
