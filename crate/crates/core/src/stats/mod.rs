//! Likert survey statistics.
//!
//! Robust descriptives, adjective ratings, percentile bootstrap intervals,
//! Cronbach's alpha, the Wilcoxon signed-rank test and Spearman's rho, plus
//! [`analyze`] which runs all of them over a participants x items matrix.

use thiserror::Error;

mod adjective;
mod bootstrap;
mod descriptive;
mod likert;
mod rank;
mod reliability;
pub mod special;

pub use adjective::{adjective_rating, Adjective};
pub use bootstrap::bootstrap_ci;
pub use descriptive::{descriptive, mean, median, quantile, sample_sd, Descriptive};
pub use likert::{
    analyze, Analysis, Construct, ConstructRow, Item, ItemRow, LikertMatrix, Reliability,
    Summary,
};
pub use rank::{average_ranks, spearman_rho, wilcoxon_signed_rank, Correlation, Wilcoxon};
pub use reliability::cronbach_alpha;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("input is empty")]
    Empty,
    #[error("paired inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("value {0} is outside the accepted range")]
    OutOfRange(f64),
    #[error("statistic undefined: {0}")]
    Degenerate(&'static str),
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("invalid Likert matrix: {0}")]
    Matrix(alloc::string::String),
}
