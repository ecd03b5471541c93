use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::equilibrium::UtilitySpec;
use crate::game::Action;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentKind {
    /// Fixed choice distribution in (NoBuy, X, Y) order.
    Random {
        p: [f64; 3],
    },
    MyopicBr {
        utility: UtilitySpec,
    },
    Eu {
        utility: UtilitySpec,
        temperature: f64,
    },
    DecoySusceptible {
        utility: UtilitySpec,
        theta: f64,
        temperature: f64,
    },
}

/// A validated behavioural model plus its optional seed salt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAgent", into = "RawAgent")]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub seed: Option<u64>,
    /// Value bonus on token purchases in the second part.
    pub part_two_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[doc(hidden)]
pub struct RawAgent {
    pub(crate) kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    utility: Option<UtilitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    part_two_bias: f64,
}

impl RawAgent {
    pub(crate) fn bare(kind: &str) -> RawAgent {
        RawAgent {
            kind: kind.into(),
            p: None,
            utility: None,
            temperature: None,
            theta: None,
            seed: None,
            part_two_bias: 0.0,
        }
    }
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl TryFrom<RawAgent> for AgentSpec {
    type Error = AgentError;

    fn try_from(r: RawAgent) -> Result<Self, AgentError> {
        let utility = r.utility.unwrap_or_default();
        let temperature = || {
            r.temperature.ok_or(AgentError::Missing {
                kind: r.kind.clone(),
                field: "temperature",
            })
        };
        let kind = match r.kind.as_str() {
            "random" => {
                let p = r.p.clone().ok_or(AgentError::Missing {
                    kind: r.kind.clone(),
                    field: "p",
                })?;
                let p = match p.as_slice() {
                    [n, x] => [*n, *x, 0.0],
                    [n, x, y] => [*n, *x, *y],
                    _ => return Err(AgentError::BadProbabilities(p)),
                };
                AgentKind::Random { p }
            }
            "myopic_br" => AgentKind::MyopicBr { utility },
            "eu" => AgentKind::Eu {
                utility,
                temperature: temperature()?,
            },
            "decoy_susceptible" => AgentKind::DecoySusceptible {
                utility,
                theta: r.theta.ok_or(AgentError::Missing {
                    kind: r.kind.clone(),
                    field: "theta",
                })?,
                temperature: temperature()?,
            },
            other => return Err(AgentError::UnknownKind(other.to_string())),
        };
        AgentSpec::new(kind, r.seed, r.part_two_bias)
    }
}

impl From<AgentSpec> for RawAgent {
    fn from(a: AgentSpec) -> RawAgent {
        let mut raw = RawAgent::bare("");
        raw.seed = a.seed;
        raw.part_two_bias = a.part_two_bias;
        match a.kind {
            AgentKind::Random { p } => {
                raw.kind = "random".into();
                raw.p = Some(p.to_vec());
            }
            AgentKind::MyopicBr { utility } => {
                raw.kind = "myopic_br".into();
                raw.utility = Some(utility);
            }
            AgentKind::Eu { utility, temperature } => {
                raw.kind = "eu".into();
                raw.utility = Some(utility);
                raw.temperature = Some(temperature);
            }
            AgentKind::DecoySusceptible {
                utility,
                theta,
                temperature,
            } => {
                raw.kind = "decoy_susceptible".into();
                raw.utility = Some(utility);
                raw.theta = Some(theta);
                raw.temperature = Some(temperature);
            }
        }
        raw
    }
}

impl AgentSpec {
    pub fn new(kind: AgentKind, seed: Option<u64>, part_two_bias: f64) -> Result<Self, AgentError> {
        match &kind {
            AgentKind::Random { p } => {
                let sum: f64 = p.iter().sum();
                if p.iter().any(|v| !v.is_finite() || *v < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(AgentError::BadProbabilities(p.to_vec()));
                }
            }
            AgentKind::MyopicBr { .. } => {}
            AgentKind::Eu { temperature, .. } => check_temperature(*temperature)?,
            AgentKind::DecoySusceptible { theta, temperature, .. } => {
                check_temperature(*temperature)?;
                if !(theta.is_finite() && *theta >= 0.0) {
                    return Err(AgentError::BadTheta(*theta));
                }
            }
        }
        if !part_two_bias.is_finite() {
            return Err(AgentError::BadBias(part_two_bias));
        }
        Ok(AgentSpec {
            kind,
            seed,
            part_two_bias,
        })
    }

    pub fn random(p: [f64; 3]) -> Result<Self, AgentError> {
        Self::new(AgentKind::Random { p }, None, 0.0)
    }

    pub fn always(a: Action) -> Self {
        let mut p = [0.0; 3];
        p[a.index()] = 1.0;
        AgentSpec {
            kind: AgentKind::Random { p },
            seed: None,
            part_two_bias: 0.0,
        }
    }

    pub fn myopic_br(utility: UtilitySpec) -> Self {
        AgentSpec {
            kind: AgentKind::MyopicBr { utility },
            seed: None,
            part_two_bias: 0.0,
        }
    }

    pub fn eu(utility: UtilitySpec, temperature: f64) -> Result<Self, AgentError> {
        Self::new(AgentKind::Eu { utility, temperature }, None, 0.0)
    }

    pub fn decoy_susceptible(utility: UtilitySpec, theta: f64, temperature: f64) -> Result<Self, AgentError> {
        Self::new(
            AgentKind::DecoySusceptible {
                utility,
                theta,
                temperature,
            },
            None,
            0.0,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_part_two_bias(mut self, bias: f64) -> Result<Self, AgentError> {
        if !bias.is_finite() {
            return Err(AgentError::BadBias(bias));
        }
        self.part_two_bias = bias;
        Ok(self)
    }
}

fn check_temperature(t: f64) -> Result<(), AgentError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(AgentError::BadTemperature(t))
    }
}
