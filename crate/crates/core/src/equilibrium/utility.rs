use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::{RealScalar, Scalar};

/// Maps final wealth to utility. Implementations must be strictly increasing.
pub trait Utility<T: Scalar>: Sync {
    fn utility(&self, wealth: T) -> T;

    /// Expected utility of the binary loss lottery.
    fn expected(&self, loss_probability: T, bad: T, good: T) -> T {
        loss_probability * self.utility(bad) + (T::one() - loss_probability) * self.utility(good)
    }
}

/// Linear utility; usable with exact scalars.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RiskNeutral;

impl<T: Scalar> Utility<T> for RiskNeutral {
    fn utility(&self, wealth: T) -> T {
        wealth
    }
}

/// Positive affine transform of another utility.
#[derive(Debug, Clone, Copy)]
pub struct Affine<U, T> {
    pub inner: U,
    pub scale: T,
    pub shift: T,
}

impl<T: Scalar, U: Utility<T>> Utility<T> for Affine<U, T> {
    fn utility(&self, wealth: T) -> T {
        self.scale * self.inner.utility(wealth) + self.shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum UtilityError {
    #[error("utility coefficient must be finite, got {0}")]
    NonFinite(f64),
}

/// Configurable utility family. Serialised as `risk_neutral`, `crra:<rho>` or
/// `cara:<alpha>`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum UtilitySpec {
    #[default]
    RiskNeutral,
    /// `w^(1-rho) / (1 - rho)`, `ln w` at `rho = 1`. Negative `rho` is risk seeking.
    Crra { rho: f64 },
    /// `-e^(-alpha w) / alpha`, linear at `alpha = 0`.
    Cara { alpha: f64 },
}

impl UtilitySpec {
    pub fn crra(rho: f64) -> Result<Self, UtilityError> {
        if rho.is_finite() {
            Ok(UtilitySpec::Crra { rho })
        } else {
            Err(UtilityError::NonFinite(rho))
        }
    }

    pub fn cara(alpha: f64) -> Result<Self, UtilityError> {
        if alpha.is_finite() {
            Ok(UtilitySpec::Cara { alpha })
        } else {
            Err(UtilityError::NonFinite(alpha))
        }
    }

    pub fn is_risk_neutral(&self) -> bool {
        match *self {
            UtilitySpec::RiskNeutral => true,
            UtilitySpec::Crra { rho } => rho == 0.0,
            UtilitySpec::Cara { alpha } => alpha == 0.0,
        }
    }
}

impl<T: RealScalar> Utility<T> for UtilitySpec {
    fn utility(&self, w: T) -> T {
        let c = |v: f64| T::from_f64(v).expect("finite coefficient");
        match *self {
            UtilitySpec::RiskNeutral => w,
            UtilitySpec::Crra { rho } if (rho - 1.0).abs() < 1e-12 => w.ln(),
            UtilitySpec::Crra { rho } => {
                let k = c(1.0 - rho);
                w.powf(k) / k
            }
            UtilitySpec::Cara { alpha: 0.0 } => w,
            UtilitySpec::Cara { alpha } => {
                let a = c(alpha);
                -(-a * w).exp() / a
            }
        }
    }
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilitySpec::RiskNeutral => f.write_str("risk_neutral"),
            UtilitySpec::Crra { rho } => write!(f, "crra:{rho}"),
            UtilitySpec::Cara { alpha } => write!(f, "cara:{alpha}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown utility {0:?} (expected risk_neutral, crra:<rho> or cara:<alpha>)")]
pub struct ParseUtilityError(pub String);

impl FromStr for UtilitySpec {
    type Err = ParseUtilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseUtilityError(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "risk_neutral" | "risk-neutral" | "neutral") {
            return Ok(UtilitySpec::RiskNeutral);
        }
        let (kind, coef) = t.split_once([':', '=']).ok_or_else(err)?;
        let v: f64 = coef.trim().parse().map_err(|_| err())?;
        match kind.trim() {
            "crra" => UtilitySpec::crra(v).map_err(|_| err()),
            "cara" => UtilitySpec::cara(v).map_err(|_| err()),
            _ => Err(err()),
        }
    }
}

impl TryFrom<String> for UtilitySpec {
    type Error = ParseUtilityError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<UtilitySpec> for String {
    fn from(u: UtilitySpec) -> String {
        u.to_string()
    }
}
