use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} is outside the open interval (0, 1)")]
    InvalidProbability(f64),
    #[error("significance level {0} is outside (0, {1}]")]
    InvalidAlpha(f64, f64),
    #[error("degrees of freedom must be at least 1")]
    InvalidDegreesOfFreedom,
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value at position {0}")]
    NonFiniteValue(usize),
    #[error("{what} needs at least {needed} values, got {got}")]
    TooFewValues {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("invalid population parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("{0} resamples are too few for a two-sided level-{1} interval")]
    TooFewResamples(usize, f64),
    #[error("{0}")]
    InvalidScenario(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
