//! Reference frequencies, table regeneration and proportion tests.

mod analysis;
mod counts;
mod inference;
pub mod reference;
mod render;
mod tables;

pub use analysis::{analyze, log_warnings, subject_shares, Analysis};
pub use counts::{tabulate, ChoiceCounts, Slice};
pub use inference::{
    clustered_comparison, permutation_test, two_proportion_test, ComparisonResult, Method, PermutationResult,
};
pub use reference::{reference_counts, round1_degree_counts};
pub use render::{format_milli, format_tenths, milli, proportions, scaled_half_up, RowShares};
pub use tables::{
    reproduce_tables, reproduce_tables_with, CellMismatch, ComparisonRow, PercentageRow, TablesReport,
    COMPARISON_TABLES, PERCENT_TABLES,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("row total is zero")]
    ZeroTotal,
    #[error("degenerate comparison: {0}")]
    Degenerate(String),
    #[error("need at least two subjects per side, got {left} and {right}")]
    InsufficientClusters { left: usize, right: usize },
    #[error("inconsistent counts: {0}")]
    Inconsistent(String),
    #[error("missing reference data: {0}")]
    Missing(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
