use std::fmt;

use serde::{Deserialize, Serialize};

use super::GameError;
use crate::scalar::Scalar;

pub const BALLS_PER_BOX: u32 = 100;

/// Colour of a drawn ball. Red and brown both trigger the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Colour {
    Red,
    Brown,
    Green,
}

impl Colour {
    pub fn is_loss(self) -> bool {
        !matches!(self, Colour::Green)
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colour::Red => "red",
            Colour::Brown => "brown",
            Colour::Green => "green",
        })
    }
}

/// A 100-ball loss lottery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BallBox {
    red: u32,
    brown: u32,
    green: u32,
}

#[derive(Deserialize)]
struct RawBox {
    red: u32,
    brown: u32,
    green: u32,
}

impl TryFrom<RawBox> for BallBox {
    type Error = GameError;

    fn try_from(r: RawBox) -> Result<Self, Self::Error> {
        BallBox::new(r.red, r.brown, r.green)
    }
}

impl BallBox {
    pub fn new(red: u32, brown: u32, green: u32) -> Result<Self, GameError> {
        if red.checked_add(brown).and_then(|s| s.checked_add(green)) != Some(BALLS_PER_BOX) {
            return Err(GameError::InvalidBox { red, brown, green });
        }
        Ok(BallBox { red, brown, green })
    }

    pub fn red(&self) -> u32 {
        self.red
    }

    pub fn brown(&self) -> u32 {
        self.brown
    }

    pub fn green(&self) -> u32 {
        self.green
    }

    /// Share of balls that trigger the loss.
    pub fn loss_probability<T: Scalar>(&self) -> T {
        T::from_count(self.red + self.brown) / T::from_count(BALLS_PER_BOX)
    }

    /// Repaint up to `n` red balls green; returns the part of the request that
    /// could not be met.
    pub(crate) fn convert_red(&mut self, n: u32) -> u32 {
        let done = n.min(self.red);
        self.red -= done;
        self.green += done;
        n - done
    }

    pub(crate) fn convert_brown(&mut self, n: u32) -> u32 {
        let done = n.min(self.brown);
        self.brown -= done;
        self.green += done;
        n - done
    }

    /// Colour of the ball at position `ticket` (0..100) in red, brown, green order.
    pub fn colour_at(&self, ticket: u32) -> Colour {
        if ticket < self.red {
            Colour::Red
        } else if ticket < self.red + self.brown {
            Colour::Brown
        } else {
            Colour::Green
        }
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Colour {
        self.colour_at(rng.random_range(0..BALLS_PER_BOX))
    }
}

impl fmt::Display for BallBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.red, self.brown, self.green)
    }
}
