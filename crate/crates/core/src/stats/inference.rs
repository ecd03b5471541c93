use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Discrete, Hypergeometric, Normal, StudentsT};

use super::StatsError;

/// Choice of standard error and reference distribution for a difference of
/// two proportions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Student t on the 0/1 observations with pooled within-group variance.
    #[default]
    PooledT,
    /// Per-group sample variances, Student t with `n1 + n2 - 2` df.
    UnpooledT,
    /// Pooled-proportion z test.
    PooledZ,
    /// Welch t on per-subject means.
    WelchClustered,
}

impl std::str::FromStr for Method {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "pooled_t" => Ok(Method::PooledT),
            "unpooled_t" => Ok(Method::UnpooledT),
            "pooled_z" => Ok(Method::PooledZ),
            "welch_clustered" => Ok(Method::WelchClustered),
            other => Err(StatsError::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// `p_left = P(T <= t)`, `p_right = P(T >= t)` and the two-sided p-value of a
/// difference `group1 - group2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub group1: String,
    pub group2: String,
    pub p1: f64,
    pub p2: f64,
    pub diff: f64,
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_two: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub method: Method,
}

impl ComparisonResult {
    pub fn labelled(mut self, g1: impl Into<String>, g2: impl Into<String>) -> Self {
        self.group1 = g1.into();
        self.group2 = g2.into();
        self
    }
}

enum Reference {
    T(f64),
    Z,
}

fn tails(diff: f64, se: f64, reference: Reference) -> (f64, f64, f64, f64) {
    if se == 0.0 || !se.is_finite() {
        return if diff == 0.0 {
            (0.0, 1.0, 0.5, 0.5)
        } else if diff > 0.0 {
            (f64::INFINITY, 0.0, 1.0, 0.0)
        } else {
            (f64::NEG_INFINITY, 0.0, 0.0, 1.0)
        };
    }
    let t = diff / se;
    let (left, right, two) = match reference {
        Reference::T(df) => {
            let d = StudentsT::new(0.0, 1.0, df).expect("positive df");
            (d.cdf(t), d.sf(t), 2.0 * d.sf(t.abs()))
        }
        Reference::Z => {
            let d = Normal::standard();
            (d.cdf(t), d.sf(t), 2.0 * d.sf(t.abs()))
        }
    };
    (t, two.min(1.0), left, right)
}

/// Compares `c1/n1` with `c2/n2`.
pub fn two_proportion_test(c1: u64, n1: u64, c2: u64, n2: u64, method: Method) -> Result<ComparisonResult, StatsError> {
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::Degenerate("empty group".into()));
    }
    if c1 > n1 || c2 > n2 {
        return Err(StatsError::Degenerate(format!(
            "counts exceed totals: {c1}/{n1}, {c2}/{n2}"
        )));
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    let (p1, p2) = (c1 as f64 / f1, c2 as f64 / f2);
    let diff = p1 - p2;
    let (se, reference, df) = match method {
        Method::PooledT => {
            if n1 + n2 < 3 {
                return Err(StatsError::Degenerate("pooled t needs n1 + n2 >= 3".into()));
            }
            let df = f1 + f2 - 2.0;
            let s2 = (f1 * p1 * (1.0 - p1) + f2 * p2 * (1.0 - p2)) / df;
            ((s2 * (1.0 / f1 + 1.0 / f2)).sqrt(), Reference::T(df), Some(df))
        }
        Method::UnpooledT => {
            if n1 < 2 || n2 < 2 {
                return Err(StatsError::Degenerate(
                    "unpooled t needs two observations per group".into(),
                ));
            }
            let df = f1 + f2 - 2.0;
            let v1 = p1 * (1.0 - p1) * f1 / (f1 - 1.0);
            let v2 = p2 * (1.0 - p2) * f2 / (f2 - 1.0);
            ((v1 / f1 + v2 / f2).sqrt(), Reference::T(df), Some(df))
        }
        Method::PooledZ => {
            let p = (c1 + c2) as f64 / (f1 + f2);
            ((p * (1.0 - p) * (1.0 / f1 + 1.0 / f2)).sqrt(), Reference::Z, None)
        }
        Method::WelchClustered => {
            return Err(StatsError::Degenerate(
                "the clustered method needs per-subject data".into(),
            ))
        }
    };
    let (statistic, p_two, p_left, p_right) = tails(diff, se, reference);
    Ok(ComparisonResult {
        group1: String::new(),
        group2: String::new(),
        p1,
        p2,
        diff,
        statistic,
        df,
        p_two,
        p_left,
        p_right,
        method,
    })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Welch t test on per-subject mean shares.
pub fn clustered_comparison(side1: &[f64], side2: &[f64]) -> Result<ComparisonResult, StatsError> {
    if side1.len() < 2 || side2.len() < 2 {
        return Err(StatsError::InsufficientClusters {
            left: side1.len(),
            right: side2.len(),
        });
    }
    let (m1, v1) = mean_var(side1);
    let (m2, v2) = mean_var(side2);
    let (n1, n2) = (side1.len() as f64, side2.len() as f64);
    let (a, b) = (v1 / n1, v2 / n2);
    let se = (a + b).sqrt();
    let df = if se > 0.0 {
        (a + b).powi(2) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0))
    } else {
        n1 + n2 - 2.0
    };
    let diff = m1 - m2;
    let (statistic, p_two, p_left, p_right) = tails(diff, se, Reference::T(df));
    Ok(ComparisonResult {
        group1: String::new(),
        group2: String::new(),
        p1: m1,
        p2: m2,
        diff,
        statistic,
        df: Some(df),
        p_two,
        p_left,
        p_right,
        method: Method::WelchClustered,
    })
}

/// Exact conditional test: group labels are permuted with the pooled number
/// of successes held fixed, so `c1` is hypergeometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub p_two: f64,
    pub p_left: f64,
    pub p_right: f64,
    /// Two-sided mid-p: half the probability of ties with the observed |diff|.
    pub mid_p_two: f64,
}

pub fn permutation_test(c1: u64, n1: u64, c2: u64, n2: u64) -> Result<PermutationResult, StatsError> {
    if n1 == 0 || n2 == 0 || c1 > n1 || c2 > n2 {
        return Err(StatsError::Degenerate(format!("invalid counts {c1}/{n1}, {c2}/{n2}")));
    }
    let (n, k) = (n1 + n2, c1 + c2);
    let h = Hypergeometric::new(n, k, n1).map_err(|e| StatsError::Degenerate(e.to_string()))?;
    let d = |x: u64| x as f64 / n1 as f64 - (k - x) as f64 / n2 as f64;
    let obs = d(c1);
    let eps = 1e-12;
    let (mut two, mut left, mut right, mut tie) = (0.0, 0.0, 0.0, 0.0);
    for x in k.saturating_sub(n2)..=k.min(n1) {
        let p = h.pmf(x);
        let dx = d(x);
        if dx.abs() >= obs.abs() - eps {
            two += p;
            if (dx.abs() - obs.abs()).abs() <= eps {
                tie += p;
            }
        }
        if dx <= obs + eps {
            left += p;
        }
        if dx >= obs - eps {
            right += p;
        }
    }
    Ok(PermutationResult {
        p_two: two.min(1.0),
        p_left: left.min(1.0),
        p_right: right.min(1.0),
        mid_p_two: (two - 0.5 * tie).min(1.0),
    })
}
