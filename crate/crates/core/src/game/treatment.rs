use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{GameError, PerPosition, PositionId};

/// One of the four experimental conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Treatment {
    pub externalities: bool,
    pub decoy: bool,
}

impl Treatment {
    pub const BAS_IND: Treatment = Treatment {
        externalities: false,
        decoy: false,
    };
    pub const BAS_NET: Treatment = Treatment {
        externalities: true,
        decoy: false,
    };
    pub const DEC_IND: Treatment = Treatment {
        externalities: false,
        decoy: true,
    };
    pub const DEC_NET: Treatment = Treatment {
        externalities: true,
        decoy: true,
    };
    pub const ALL: [Treatment; 4] = [Self::BAS_IND, Self::BAS_NET, Self::DEC_IND, Self::DEC_NET];

    pub fn label(self) -> &'static str {
        match (self.decoy, self.externalities) {
            (false, false) => "bas-ind",
            (false, true) => "bas-net",
            (true, false) => "dec-ind",
            (true, true) => "dec-net",
        }
    }

    /// Admissible actions in the documented order.
    pub fn menu(self) -> &'static [Action] {
        if self.decoy {
            &Action::ALL
        } else {
            &Action::ALL[..2]
        }
    }

    pub fn admits(self, action: Action) -> bool {
        self.decoy || action != Action::TokenY
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Treatment {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        Treatment::ALL
            .into_iter()
            .find(|c| c.label() == t)
            .ok_or_else(|| GameError::Parse {
                what: "treatment",
                input: s.into(),
            })
    }
}

impl Serialize for Treatment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Treatment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    #[default]
    NoBuy,
    TokenX,
    TokenY,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::NoBuy, Action::TokenX, Action::TokenY];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> char {
        match self {
            Action::NoBuy => 'N',
            Action::TokenX => 'X',
            Action::TokenY => 'Y',
        }
    }

    pub fn from_code(c: char) -> Option<Action> {
        match c.to_ascii_uppercase() {
            'N' => Some(Action::NoBuy),
            'X' => Some(Action::TokenX),
            'Y' => Some(Action::TokenY),
            _ => None,
        }
    }

    pub fn is_token(self) -> bool {
        self != Action::NoBuy
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::NoBuy => "no_buy",
            Action::TokenX => "token_x",
            Action::TokenY => "token_y",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Action {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let mut chars = t.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if let Some(a) = Action::from_code(c) {
                return Ok(a);
            }
        }
        match t.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "no_buy" | "nobuy" | "none" => Ok(Action::NoBuy),
            "token_x" | "tokenx" | "x" => Ok(Action::TokenX),
            "token_y" | "tokeny" | "y" => Ok(Action::TokenY),
            _ => Err(GameError::Parse {
                what: "action",
                input: s.into(),
            }),
        }
    }
}

/// Simultaneous choices of the six positions. Serialised as a six-letter code
/// such as `"NXNXNX"`, position A first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActionProfile(pub [Action; 6]);

impl ActionProfile {
    pub fn uniform(a: Action) -> Self {
        ActionProfile([a; 6])
    }

    pub fn get(&self, p: PositionId) -> Action {
        self.0[p.index()]
    }

    pub fn with(mut self, p: PositionId, a: Action) -> Self {
        self.0[p.index()] = a;
        self
    }

    pub fn as_per_position(&self) -> PerPosition<Action> {
        PerPosition(self.0)
    }

    pub fn validate(&self, treatment: Treatment) -> Result<(), GameError> {
        for p in PositionId::ALL {
            let action = self.get(p);
            if !treatment.admits(action) {
                return Err(GameError::InadmissibleAction {
                    position: p,
                    action,
                    treatment,
                });
            }
        }
        Ok(())
    }

    /// Number of profiles admissible under `treatment`.
    pub fn count(treatment: Treatment) -> usize {
        treatment.menu().len().pow(6)
    }

    /// Position in the lexicographic ordering (A most significant, actions in
    /// menu order).
    pub fn index(&self, treatment: Treatment) -> usize {
        let base = treatment.menu().len();
        self.0.iter().fold(0, |acc, a| acc * base + a.index())
    }

    pub fn from_index(index: usize, treatment: Treatment) -> Option<Self> {
        let base = treatment.menu().len();
        if index >= base.pow(6) {
            return None;
        }
        let mut out = [Action::NoBuy; 6];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = Action::ALL[rest % base];
            rest /= base;
        }
        Some(ActionProfile(out))
    }

    pub fn buyers(&self) -> impl Iterator<Item = PositionId> + '_ {
        PositionId::ALL.into_iter().filter(|p| self.get(*p).is_token())
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.0 {
            write!(f, "{}", a.code())?;
        }
        Ok(())
    }
}

impl FromStr for ActionProfile {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let codes: Vec<char> = s.trim().chars().collect();
        if codes.len() != 6 {
            return Err(GameError::Parse {
                what: "action profile",
                input: s.into(),
            });
        }
        let mut out = [Action::NoBuy; 6];
        for (slot, c) in out.iter_mut().zip(codes) {
            *slot = Action::from_code(c).ok_or_else(|| GameError::Parse {
                what: "action profile",
                input: s.into(),
            })?;
        }
        Ok(ActionProfile(out))
    }
}

impl Serialize for ActionProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
