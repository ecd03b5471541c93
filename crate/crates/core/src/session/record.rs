use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::game::{Action, Colour, PositionId, Treatment};

/// One row of the choice log: one seat in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub session_id: String,
    pub group: u32,
    /// Seat index within the group; stable across parts.
    pub subject: u32,
    pub part: u8,
    pub treatment: Treatment,
    pub round: u32,
    pub position: PositionId,
    pub degree: u32,
    pub action: Action,
    /// Post-purchase loss probability.
    pub loss_probability: f64,
    pub draw: Colour,
    pub payoff: i64,
    pub paid: bool,
    pub timed_out: bool,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "session_id",
    "group",
    "subject",
    "part",
    "treatment",
    "round",
    "position",
    "degree",
    "action",
    "loss_probability",
    "draw",
    "payoff",
    "paid",
    "timed_out",
];

pub fn write_csv<W: Write>(records: &[RoundRecord], out: W) -> Result<(), SessionError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[RoundRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RoundRecord>, SessionError> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(SessionError::Format(format!(
            "unexpected header {:?}, expected {:?}",
            headers.iter().collect::<Vec<_>>(),
            CSV_COLUMNS
        )));
    }
    rd.deserialize().map(|r| r.map_err(SessionError::from)).collect()
}

pub fn write_json<W: Write>(records: &[RoundRecord], out: W) -> Result<(), SessionError> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<RoundRecord>, SessionError> {
    Ok(serde_json::from_reader(input)?)
}
