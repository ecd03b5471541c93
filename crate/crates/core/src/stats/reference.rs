//! Published frequencies and the values printed alongside them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::counts::parse_counts;
use super::{ChoiceCounts, Slice, StatsError};
use crate::game::{Action, Treatment};

const CHOICE_COUNTS: &str = include_str!("../../data/choice_counts.csv");
const ROUND1_BY_DEGREE: &str = include_str!("../../data/round1_by_degree.csv");
const PRINTED_PERCENTAGES: &str = include_str!("../../data/printed_percentages.csv");
const PRINTED_COMPARISONS: &str = include_str!("../../data/printed_comparisons.csv");

/// The 16 aggregate and 36 by-degree count rows.
pub fn reference_counts() -> &'static [ChoiceCounts] {
    static CELL: OnceLock<Vec<ChoiceCounts>> = OnceLock::new();
    CELL.get_or_init(|| parse_counts(CHOICE_COUNTS).expect("embedded counts are valid"))
}

/// First-round counts by degree, recovered from the printed first-round
/// percentages and the number of subjects per degree (two per group).
pub fn round1_degree_counts() -> &'static [ChoiceCounts] {
    static CELL: OnceLock<Vec<ChoiceCounts>> = OnceLock::new();
    CELL.get_or_init(|| parse_counts(ROUND1_BY_DEGREE).expect("embedded counts are valid"))
}

/// Looks up a count row in either embedded table.
pub fn lookup(treatment: Treatment, slice: Slice, degree: Option<u32>) -> Option<&'static ChoiceCounts> {
    reference_counts()
        .iter()
        .chain(round1_degree_counts())
        .find(|c| c.key() == (treatment, slice, degree))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintedPercentages {
    pub table: String,
    pub treatment: Treatment,
    pub slice: Slice,
    pub degree: Option<u32>,
    pub no_buy: String,
    pub token_x: String,
    pub token_y: String,
}

impl PrintedPercentages {
    pub fn cells(&self) -> [&str; 3] {
        [&self.no_buy, &self.token_x, &self.token_y]
    }
}

pub fn printed_percentages() -> &'static [PrintedPercentages] {
    static CELL: OnceLock<Vec<PrintedPercentages>> = OnceLock::new();
    CELL.get_or_init(|| parse_rows(PRINTED_PERCENTAGES).expect("embedded table is valid"))
}

/// Comparison families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    /// Baseline against decoy, same externality condition and window.
    Bvd,
    /// Individual against network, same decoy condition and window.
    Ivn,
    /// First part against second part within one session order.
    Session,
    /// A treatment played first against the same treatment played second.
    Treatment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedComparison {
    pub table: String,
    pub block: Block,
    pub key: String,
    pub condition: String,
    pub variable: Action,
    pub group1: f64,
    pub group2: f64,
    pub diff: f64,
    pub p_two: f64,
    pub p_left: f64,
    pub p_right: f64,
}

pub fn printed_comparisons() -> &'static [PrintedComparison] {
    static CELL: OnceLock<Vec<PrintedComparison>> = OnceLock::new();
    CELL.get_or_init(|| parse_rows(PRINTED_COMPARISONS).expect("embedded table is valid"))
}

fn parse_rows<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, StatsError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.deserialize().map(|r| r.map_err(StatsError::from)).collect()
}

/// Degree covered by a comparison table; `None` for the aggregate table.
pub fn comparison_table_degree(table: &str) -> Option<u32> {
    match table {
        "4" => Some(1),
        "6" => Some(2),
        "8" => Some(3),
        _ => None,
    }
}

type RowKey = (Treatment, Slice);

/// The two count rows a printed comparison refers to.
pub fn comparison_groups(c: &PrintedComparison) -> Result<(RowKey, RowKey), StatsError> {
    let bad = || {
        StatsError::Parse(format!(
            "unrecognised comparison {:?}/{}/{}",
            c.block, c.key, c.condition
        ))
    };
    let window = |k: &str| match k {
        "period1" => Some(Slice::Round1),
        "part1" => Some(Slice::Rounds1To10),
        "part2" => Some(Slice::Rounds11To20),
        "all" => Some(Slice::All),
        _ => None,
    };
    let t = |decoy: bool, net: bool| Treatment {
        externalities: net,
        decoy,
    };
    match c.block {
        Block::Bvd => {
            let s = window(&c.key).ok_or_else(bad)?;
            let net = match c.condition.as_str() {
                "individual" => false,
                "network" => true,
                _ => return Err(bad()),
            };
            Ok(((t(false, net), s), (t(true, net), s)))
        }
        Block::Ivn => {
            let s = window(&c.key).ok_or_else(bad)?;
            let decoy = decoy_condition(&c.condition).ok_or_else(bad)?;
            Ok(((t(decoy, false), s), (t(decoy, true), s)))
        }
        Block::Session => {
            let decoy = decoy_condition(&c.condition).ok_or_else(bad)?;
            let first_net = match c.key.as_str() {
                "ind-net" => false,
                "net-ind" => true,
                _ => return Err(bad()),
            };
            Ok((
                (t(decoy, first_net), Slice::Rounds1To10),
                (t(decoy, !first_net), Slice::Rounds11To20),
            ))
        }
        Block::Treatment => {
            let tr: Treatment = c.key.parse().map_err(|_| bad())?;
            Ok(((tr, Slice::Rounds1To10), (tr, Slice::Rounds11To20)))
        }
    }
}

fn decoy_condition(s: &str) -> Option<bool> {
    match s {
        "baseline" => Some(false),
        "decoy" => Some(true),
        _ => None,
    }
}
