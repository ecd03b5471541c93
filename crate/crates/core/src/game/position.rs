use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GameError;

/// One of the six network seats, labelled A to F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PositionId {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl PositionId {
    pub const ALL: [PositionId; 6] = [
        PositionId::A,
        PositionId::B,
        PositionId::C,
        PositionId::D,
        PositionId::E,
        PositionId::F,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl fmt::Display for PositionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for PositionId {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => {
                let c = c.to_ascii_uppercase();
                if ('A'..='F').contains(&c) {
                    Ok(Self::ALL[(c as u8 - b'A') as usize])
                } else {
                    Err(GameError::Parse {
                        what: "position",
                        input: s.into(),
                    })
                }
            }
            _ => Err(GameError::Parse {
                what: "position",
                input: s.into(),
            }),
        }
    }
}

/// A value for every position, indexed by [`PositionId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PerPosition<T>(pub [T; 6]);

impl<T> PerPosition<T> {
    pub fn from_fn(mut f: impl FnMut(PositionId) -> T) -> Self {
        PerPosition(std::array::from_fn(|i| f(PositionId::ALL[i])))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PositionId, &T)> {
        PositionId::ALL.iter().copied().zip(self.0.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(PositionId, &T) -> U) -> PerPosition<U> {
        PerPosition::from_fn(|p| f(p, &self.0[p.index()]))
    }

    pub fn values(&self) -> &[T; 6] {
        &self.0
    }
}

impl<T> Index<PositionId> for PerPosition<T> {
    type Output = T;

    fn index(&self, p: PositionId) -> &T {
        &self.0[p.index()]
    }
}

impl<T> IndexMut<PositionId> for PerPosition<T> {
    fn index_mut(&mut self, p: PositionId) -> &mut T {
        &mut self.0[p.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for p in PositionId::ALL {
            assert_eq!(p.to_string().parse::<PositionId>().unwrap(), p);
            assert_eq!(PositionId::from_index(p.index()), Some(p));
        }
        assert!("G".parse::<PositionId>().is_err());
        assert!("AB".parse::<PositionId>().is_err());
        assert_eq!("c".parse::<PositionId>().unwrap(), PositionId::C);
    }
}
