//! Behavioural choice models for simulated seats.

mod choice;
mod observation;
mod spec;

pub use choice::{attraction_scores, choice_probabilities, decide, expected_utilities, Distribution};
pub use observation::{Menu, MenuItem, Observation, RoundFeedback};
pub use spec::{AgentKind, AgentSpec, RawAgent};

use thiserror::Error;

use crate::game::GameError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("unknown agent kind {0:?}")]
    UnknownKind(String),
    #[error("agent kind {kind} requires field {field}")]
    Missing { kind: String, field: &'static str },
    #[error("choice probabilities {0:?} must be non-negative and sum to 1")]
    BadProbabilities(Vec<f64>),
    #[error("logit temperature must be positive and finite, got {0}")]
    BadTemperature(f64),
    #[error("theta must be non-negative and finite, got {0}")]
    BadTheta(f64),
    #[error("part-two bias must be finite, got {0}")]
    BadBias(f64),
    #[error("menu does not match the treatment: {0}")]
    MenuMismatch(String),
    #[error(transparent)]
    Game(#[from] GameError),
}
