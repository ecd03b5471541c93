//! The protection game: positions on a fixed six-node network, ball boxes that
//! define each player's loss lottery, and the token effects that reshape them.

mod ballbox;
mod mechanics;
mod params;
mod position;
mod topology;
mod treatment;

pub use ballbox::{BallBox, Colour};
pub use mechanics::{initial_box, Game, ProfileOutcome, RoundDraw};
pub use params::GameParameters;
pub use position::{PerPosition, PositionId};
pub use topology::{Degree, Edge, Topology};
pub use treatment::{Action, ActionProfile, Treatment};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("degree {0} is out of range (expected 1, 2 or 3)")]
    DegreeOutOfRange(u32),
    #[error("ball box ({red}, {brown}, {green}) does not hold exactly 100 balls")]
    InvalidBox { red: u32, brown: u32, green: u32 },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("action {action} is not available to position {position} in treatment {treatment}")]
    InadmissibleAction {
        position: PositionId,
        action: Action,
        treatment: Treatment,
    },
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}
