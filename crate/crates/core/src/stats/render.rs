//! Decimal rendering with exact half-up rounding of count ratios.

use super::{ChoiceCounts, StatsError};
use crate::game::Action;

/// `num / den` scaled by `scale` and rounded half up, computed exactly.
pub fn scaled_half_up(num: u64, den: u64, scale: u64) -> Result<i64, StatsError> {
    if den == 0 {
        return Err(StatsError::ZeroTotal);
    }
    let n = num as u128 * scale as u128 * 2 + den as u128;
    Ok((n / (2 * den as u128)) as i64)
}

/// Share rounded to thousandths, as an integer count of thousandths.
pub fn milli(num: u64, den: u64) -> Result<i64, StatsError> {
    scaled_half_up(num, den, 1000)
}

pub fn format_milli(m: i64) -> String {
    let sign = if m < 0 { "-" } else { "" };
    let a = m.unsigned_abs();
    format!("{sign}{}.{:03}", a / 1000, a % 1000)
}

pub fn format_tenths(t: i64) -> String {
    let sign = if t < 0 { "-" } else { "" };
    let a = t.unsigned_abs();
    format!("{sign}{}.{}", a / 10, a % 10)
}

/// Row shares of NoBuy, X and Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowShares {
    pub shares: [f64; 3],
    /// Percent to one decimal, in tenths of a percent.
    pub tenths: [i64; 3],
    pub token_y_offered: bool,
}

impl RowShares {
    /// Cells as printed; a zero Token Y count is shown as `--`.
    pub fn cells(&self) -> [String; 3] {
        let mut out = self.tenths.map(format_tenths);
        if !self.token_y_offered {
            out[2] = "--".into();
        }
        out
    }
}

pub fn proportions(c: &ChoiceCounts) -> Result<RowShares, StatsError> {
    if c.total == 0 {
        return Err(StatsError::ZeroTotal);
    }
    let mut shares = [0.0; 3];
    let mut tenths = [0; 3];
    for a in Action::ALL {
        shares[a.index()] = c.count(a) as f64 / c.total as f64;
        tenths[a.index()] = scaled_half_up(c.count(a), c.total, 1000)?;
    }
    Ok(RowShares {
        shares,
        tenths,
        token_y_offered: c.token_y > 0,
    })
}
