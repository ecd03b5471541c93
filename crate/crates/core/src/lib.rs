//! Network protection game with a decoy option.
//!
//! Six players sit on a fixed network and each faces a loss lottery drawn from a
//! box of 100 balls. Tokens repaint balls green in the buyer's box and, in the
//! network treatments, in other members' boxes too. Token Y is a dominated
//! variant of Token X.

pub mod agents;
pub mod config;
pub mod equilibrium;
pub mod game;
pub mod scalar;
pub mod session;
pub mod stats;

pub use game::{
    Action, ActionProfile, BallBox, Colour, Degree, Game, GameError, GameParameters, PerPosition, PositionId, Topology,
    Treatment,
};
pub use scalar::{RealScalar, Scalar};

/// Experimental currency in floating point.
pub type Ecu = f64;
/// Exact experimental currency.
pub type ExactEcu = num_rational::Rational64;
