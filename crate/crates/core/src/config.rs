//! Run configuration files (TOML). Every field has a default, so an empty file
//! describes a complete decoy session played by simulated agents.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentSpec;
use crate::equilibrium::UtilitySpec;
use crate::game::{GameParameters, Topology};
use crate::session::{Seat, SeedSchedule, SessionConfig, SessionError, SessionType};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_session_type() -> SessionType {
    SessionType::NetThenIndDecoy
}

fn default_id() -> String {
    "sim".into()
}

fn default_rounds() -> u32 {
    10
}

fn default_replications() -> usize {
    1
}

fn default_group_count() -> usize {
    15
}

fn default_agent() -> AgentSpec {
    AgentSpec::decoy_susceptible(UtilitySpec::RiskNeutral, 10.0, 5.0).expect("valid default agent")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_id")]
    pub session_id: String,
    #[serde(default = "default_session_type")]
    pub session_type: SessionType,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rounds")]
    pub rounds_per_part: u32,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed_schedule: SeedSchedule,
    #[serde(default)]
    pub reshuffle_positions: bool,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub params: GameParameters,
    /// Agent used for every seat when `groups` is absent.
    #[serde(default)]
    pub agent: Option<AgentSpec>,
    #[serde(default)]
    pub group_count: Option<usize>,
    /// Explicit seats, six per group.
    #[serde(default)]
    pub groups: Option<Vec<Vec<Seat>>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config uses defaults")
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<inline>"),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.session_config().map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn session_config(&self) -> Result<SessionConfig, ConfigError> {
        let groups = match (&self.groups, &self.agent) {
            (Some(_), Some(_)) => return Err(ConfigError::Invalid("give either `agent` or `groups`, not both".into())),
            (Some(_), _) if self.group_count.is_some() => {
                return Err(ConfigError::Invalid("`group_count` only applies with `agent`".into()))
            }
            (Some(g), None) => g.clone(),
            (None, agent) => {
                let agent = agent.clone().unwrap_or_else(default_agent);
                vec![vec![Seat::Agent(agent); 6]; self.group_count.unwrap_or_else(default_group_count)]
            }
        };
        if self.replications == 0 {
            return Err(ConfigError::Invalid("replications must be at least 1".into()));
        }
        let cfg = SessionConfig {
            session_id: self.session_id.clone(),
            session_type: self.session_type,
            groups,
            rounds_per_part: self.rounds_per_part,
            topology: self.topology.clone(),
            params: self.params.clone(),
            seed: self.seed,
            reshuffle_positions: self.reshuffle_positions,
        };
        cfg.validate()
            .map_err(|e: SessionError| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}
