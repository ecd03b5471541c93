use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::agents::{AgentError, AgentSpec, RawAgent};
use crate::game::{GameParameters, Topology, Treatment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionType {
    IndThenNetBaseline,
    NetThenIndBaseline,
    IndThenNetDecoy,
    NetThenIndDecoy,
}

impl SessionType {
    pub const ALL: [SessionType; 4] = [
        SessionType::IndThenNetBaseline,
        SessionType::NetThenIndBaseline,
        SessionType::IndThenNetDecoy,
        SessionType::NetThenIndDecoy,
    ];

    /// Treatments of part 1 and part 2.
    pub fn treatments(self) -> [Treatment; 2] {
        match self {
            SessionType::IndThenNetBaseline => [Treatment::BAS_IND, Treatment::BAS_NET],
            SessionType::NetThenIndBaseline => [Treatment::BAS_NET, Treatment::BAS_IND],
            SessionType::IndThenNetDecoy => [Treatment::DEC_IND, Treatment::DEC_NET],
            SessionType::NetThenIndDecoy => [Treatment::DEC_NET, Treatment::DEC_IND],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SessionType::IndThenNetBaseline => "ind_then_net_baseline",
            SessionType::NetThenIndBaseline => "net_then_ind_baseline",
            SessionType::IndThenNetDecoy => "ind_then_net_decoy",
            SessionType::NetThenIndDecoy => "net_then_ind_decoy",
        }
    }
}

impl std::str::FromStr for SessionType {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SessionType::ALL
            .into_iter()
            .find(|t| t.label() == s.trim())
            .ok_or_else(|| SessionError::Config(format!("unknown session type {s:?}")))
    }
}

/// Occupant of one seat. In configuration files a human seat is written as
/// `{ kind = "human" }`; anything else is an agent specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAgent", into = "RawAgent")]
pub enum Seat {
    Agent(AgentSpec),
    Human,
}

impl Seat {
    pub fn is_human(&self) -> bool {
        matches!(self, Seat::Human)
    }

    pub fn agent(&self) -> Option<&AgentSpec> {
        match self {
            Seat::Agent(a) => Some(a),
            Seat::Human => None,
        }
    }
}

impl TryFrom<RawAgent> for Seat {
    type Error = AgentError;

    fn try_from(r: RawAgent) -> Result<Self, AgentError> {
        if r.kind == "human" {
            Ok(Seat::Human)
        } else {
            AgentSpec::try_from(r).map(Seat::Agent)
        }
    }
}

impl From<Seat> for RawAgent {
    fn from(s: Seat) -> RawAgent {
        match s {
            Seat::Human => RawAgent::bare("human"),
            Seat::Agent(a) => a.into(),
        }
    }
}

fn default_rounds() -> u32 {
    10
}

fn default_session_id() -> String {
    "session".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default = "default_session_id")]
    pub session_id: String,
    pub session_type: SessionType,
    /// Six seats per group, indexed by subject; subject `i` starts at position `i`.
    pub groups: Vec<Vec<Seat>>,
    #[serde(default = "default_rounds")]
    pub rounds_per_part: u32,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub params: GameParameters,
    #[serde(default)]
    pub seed: u64,
    /// Redraw seat positions at the start of part 2.
    #[serde(default)]
    pub reshuffle_positions: bool,
}

impl SessionConfig {
    pub fn new(session_type: SessionType, groups: Vec<Vec<Seat>>, seed: u64) -> Self {
        SessionConfig {
            session_id: default_session_id(),
            session_type,
            groups,
            rounds_per_part: default_rounds(),
            topology: Topology::default(),
            params: GameParameters::default(),
            seed,
            reshuffle_positions: false,
        }
    }

    /// `n` groups of identical agents.
    pub fn homogeneous(session_type: SessionType, agent: AgentSpec, n: usize, seed: u64) -> Self {
        Self::new(session_type, vec![vec![Seat::Agent(agent); 6]; n], seed)
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.groups.is_empty() {
            return Err(SessionError::Config("a session needs at least one group".into()));
        }
        if let Some((i, g)) = self.groups.iter().enumerate().find(|(_, g)| g.len() != 6) {
            return Err(SessionError::Config(format!(
                "group {i} has {} seats, expected 6",
                g.len()
            )));
        }
        if self.rounds_per_part == 0 {
            return Err(SessionError::Config("rounds_per_part must be at least 1".into()));
        }
        if self.session_id.is_empty() {
            return Err(SessionError::Config("session_id must not be empty".into()));
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn human_seats(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.groups.iter().enumerate().flat_map(|(g, seats)| {
            seats
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_human())
                .map(move |(i, _)| (g, i))
        })
    }

    pub fn has_humans(&self) -> bool {
        self.human_seats().next().is_some()
    }
}
