//! Live experimental sessions over HTTP: humans and agents share groups, each
//! seat authenticated by its own token, and every accepted input is appended
//! to a JSONL event log that can be replayed after a restart.

pub mod http;
pub mod live;

use decoynet::session::SessionError;
use decoynet::{Action, Treatment};
use thiserror::Error;

pub use http::{router, AppState};
pub use live::{Event, LiveOptions, LiveSession, Phase, SeatToken, SeatView, SessionSummary};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no session named {0:?}")]
    NotFound(String),
    #[error("missing or unknown token")]
    BadToken,
    #[error("session {0:?} already exists")]
    DuplicateSession(String),
    #[error("invalid session id {0:?}: use letters, digits, '-' and '_'")]
    BadSessionId(String),
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("expected phase {expected}, group is in {actual}")]
    WrongPhase {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("current round is part {part} round {round}")]
    WrongRound { part: u8, round: u32 },
    #[error("{action} is not offered in {treatment}")]
    Inadmissible { action: Action, treatment: Treatment },
    #[error("choice already submitted for this round")]
    AlreadySubmitted,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("event log: {0}")]
    Log(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ServiceError {
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::NotFound(_) => 404,
            ServiceError::BadToken => 401,
            ServiceError::DuplicateSession(_)
            | ServiceError::WrongPhase { .. }
            | ServiceError::WrongRound { .. }
            | ServiceError::AlreadySubmitted => 409,
            ServiceError::BadSessionId(_)
            | ServiceError::InvalidConfig(_)
            | ServiceError::Inadmissible { .. }
            | ServiceError::BadRequest(_) => 400,
            ServiceError::Log(_) | ServiceError::Session(_) | ServiceError::Io(_) => 500,
        }
    }
}

pub fn validate_session_id(id: &str) -> Result<(), ServiceError> {
    let ok = !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(ServiceError::BadSessionId(id.to_string()))
    }
}
