//! The laboratory protocol: sessions of two ten-round parts, round feedback,
//! and one randomly paid round per part.

mod batch;
mod config;
mod engine;
mod record;
pub mod seeds;

pub use batch::{batch, run_session, BatchResult, SeedSchedule};
pub use config::{Seat, SessionConfig, SessionType};
pub use engine::{Choice, GroupRun, RoundOutcome};
pub use record::{read_csv, read_json, to_csv_string, write_csv, write_json, RoundRecord, CSV_COLUMNS};

use thiserror::Error;

use crate::agents::AgentError;
use crate::game::GameError;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    Config(String),
    #[error("group {group} seat {subject} is a human seat; use the live session service")]
    HumanSeat { group: usize, subject: usize },
    #[error("session is already finished")]
    Finished,
    #[error("malformed choice log: {0}")]
    Format(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
