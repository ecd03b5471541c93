use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::game::{Action, Treatment};
use crate::session::RoundRecord;

/// Round window over which choices are counted. The first part holds rounds
/// 1-10 and the second part rounds 11-20.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slice {
    #[serde(rename = "round1")]
    Round1,
    #[serde(rename = "rounds1_10")]
    Rounds1To10,
    #[serde(rename = "rounds11_20")]
    Rounds11To20,
    #[serde(rename = "all")]
    All,
}

impl Slice {
    pub const ALL: [Slice; 4] = [Slice::Round1, Slice::Rounds1To10, Slice::Rounds11To20, Slice::All];

    pub fn label(self) -> &'static str {
        match self {
            Slice::Round1 => "round1",
            Slice::Rounds1To10 => "rounds1_10",
            Slice::Rounds11To20 => "rounds11_20",
            Slice::All => "all",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Slice::Round1 => "Round 1",
            Slice::Rounds1To10 => "Rounds 1-10",
            Slice::Rounds11To20 => "Rounds 11-20",
            Slice::All => "All rounds",
        }
    }

    pub fn contains(self, part: u8, round: u32) -> bool {
        match self {
            Slice::Round1 => part == 1 && round == 1,
            Slice::Rounds1To10 => part == 1,
            Slice::Rounds11To20 => part == 2,
            Slice::All => true,
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Slice {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Slice::ALL
            .into_iter()
            .find(|v| v.label() == s.trim())
            .ok_or_else(|| StatsError::Parse(format!("unknown slice {s:?}")))
    }
}

/// Choice frequencies for one treatment, slice and optional degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChoiceCounts {
    pub treatment: Treatment,
    pub slice: Slice,
    pub degree: Option<u32>,
    pub no_buy: u64,
    pub token_x: u64,
    pub token_y: u64,
    pub total: u64,
}

impl ChoiceCounts {
    pub fn empty(treatment: Treatment, slice: Slice, degree: Option<u32>) -> Self {
        ChoiceCounts {
            treatment,
            slice,
            degree,
            no_buy: 0,
            token_x: 0,
            token_y: 0,
            total: 0,
        }
    }

    pub fn count(&self, a: Action) -> u64 {
        match a {
            Action::NoBuy => self.no_buy,
            Action::TokenX => self.token_x,
            Action::TokenY => self.token_y,
        }
    }

    pub fn add(&mut self, a: Action) {
        match a {
            Action::NoBuy => self.no_buy += 1,
            Action::TokenX => self.token_x += 1,
            Action::TokenY => self.token_y += 1,
        }
        self.total += 1;
    }

    pub fn validate(&self) -> Result<(), StatsError> {
        if self.no_buy + self.token_x + self.token_y != self.total {
            return Err(StatsError::Inconsistent(format!(
                "{self:?}: components do not sum to total"
            )));
        }
        if !self.treatment.decoy && self.token_y != 0 {
            return Err(StatsError::Inconsistent(format!(
                "{self:?}: Token Y in a baseline treatment"
            )));
        }
        if matches!(self.degree, Some(d) if !(1..=3).contains(&d)) {
            return Err(StatsError::Inconsistent(format!("{self:?}: degree out of range")));
        }
        Ok(())
    }

    pub fn key(&self) -> (Treatment, Slice, Option<u32>) {
        (self.treatment, self.slice, self.degree)
    }
}

#[derive(Deserialize)]
struct CsvCounts {
    treatment: Treatment,
    slice: Slice,
    degree: Option<u32>,
    no_buy: u64,
    token_x: u64,
    token_y: u64,
    total: u64,
}

pub(crate) fn parse_counts(text: &str) -> Result<Vec<ChoiceCounts>, StatsError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rd.deserialize::<CsvCounts>() {
        let r = row?;
        let c = ChoiceCounts {
            treatment: r.treatment,
            slice: r.slice,
            degree: r.degree,
            no_buy: r.no_buy,
            token_x: r.token_x,
            token_y: r.token_y,
            total: r.total,
        };
        c.validate()?;
        out.push(c);
    }
    Ok(out)
}

/// Choice counts from a log, aggregated and by degree, for every treatment and
/// slice that occurs. Sorted by treatment, slice, then degree (aggregate first).
pub fn tabulate(records: &[RoundRecord]) -> Vec<ChoiceCounts> {
    let mut acc: BTreeMap<(Treatment, Slice, Option<u32>), ChoiceCounts> = BTreeMap::new();
    for r in records {
        for slice in Slice::ALL.into_iter().filter(|s| s.contains(r.part, r.round)) {
            for degree in [None, Some(r.degree)] {
                acc.entry((r.treatment, slice, degree))
                    .or_insert_with(|| ChoiceCounts::empty(r.treatment, slice, degree))
                    .add(r.action);
            }
        }
    }
    acc.into_values().collect()
}
