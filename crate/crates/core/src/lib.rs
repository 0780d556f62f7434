//! Pivotal bootstrap inference.
//!
//! Basic, percentile and studentized (bootstrap-t) confidence intervals, the
//! matching pivotal bootstrap hypothesis tests, the textbook z/t/Wald
//! baselines, and the per-replication kernels of a Monte Carlo coverage and
//! power study. Everything here is pure computation over `alloc`; threads,
//! files and the command line live in the `bootpivot` crate.
//!
//! Randomness is always supplied through a [`SeedSpec`], which names a stream
//! by labels rather than by position, so a replication produces the same
//! numbers no matter which worker runs it or in what order.

#![no_std]

extern crate alloc;

mod error;

pub mod distributions;
pub mod hypothesis;
pub mod intervals;
pub mod resample;
pub mod sample;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use sample::{Sample, Statistic};
pub use seed::{Purpose, SeedSpec, StreamRng};
