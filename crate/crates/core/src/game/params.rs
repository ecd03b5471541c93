use serde::{Deserialize, Serialize};

use super::{Action, BallBox, Degree, GameError};

/// Treatment constants. `Default` carries the laboratory values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameParameters {
    pub endowment: u32,
    pub loss: u32,
    pub cost_x: u32,
    pub cost_y: u32,
    /// Starting box per degree tier (degree 1, 2, 3).
    pub initial_boxes: [BallBox; 3],
    /// Own red→green conversions bought with Token X, per degree tier.
    pub own_red_x: [u32; 3],
    /// Own red→green conversions bought with Token Y, per degree tier.
    pub own_red_y: [u32; 3],
    pub ext_brown_per_buyer: u32,
    pub ext_red_x_to_nonbuyer: u32,
    pub ext_red_y_to_nonbuyer: u32,
    pub ext_red_x_to_y_buyer: u32,
    /// Whether a Token Y buyer's brown conversion also hits their own box.
    pub y_brown_includes_self: bool,
}

impl Default for GameParameters {
    fn default() -> Self {
        let tier = |red| BallBox::new(red, 25, 75 - red).expect("tier boxes sum to 100");
        GameParameters {
            endowment: 150,
            loss: 100,
            cost_x: 32,
            cost_y: 42,
            initial_boxes: [tier(15), tier(30), tier(45)],
            own_red_x: [10, 20, 30],
            own_red_y: [8, 16, 24],
            ext_brown_per_buyer: 5,
            ext_red_x_to_nonbuyer: 10,
            ext_red_y_to_nonbuyer: 8,
            ext_red_x_to_y_buyer: 2,
            y_brown_includes_self: false,
        }
    }
}

impl GameParameters {
    /// Checks the decoy dominance precondition: Token Y costs more and converts
    /// fewer red balls than Token X at every degree.
    pub fn validate(&self) -> Result<(), GameError> {
        if self.cost_y <= self.cost_x {
            return Err(GameError::InvalidParameters(format!(
                "cost_y ({}) must exceed cost_x ({})",
                self.cost_y, self.cost_x
            )));
        }
        for tier in 0..3 {
            if self.own_red_y[tier] >= self.own_red_x[tier] {
                return Err(GameError::InvalidParameters(format!(
                    "own_red_y ({}) must be below own_red_x ({}) at degree {}",
                    self.own_red_y[tier],
                    self.own_red_x[tier],
                    tier + 1
                )));
            }
        }
        if self.cost_y.max(self.cost_x) > self.endowment {
            return Err(GameError::InvalidParameters("token costs exceed the endowment".into()));
        }
        Ok(())
    }

    pub fn initial_box(&self, degree: Degree) -> BallBox {
        self.initial_boxes[degree.tier()]
    }

    pub fn cost(&self, action: Action) -> u32 {
        match action {
            Action::NoBuy => 0,
            Action::TokenX => self.cost_x,
            Action::TokenY => self.cost_y,
        }
    }

    /// Red balls a buyer converts in their own box.
    pub fn own_red(&self, action: Action, degree: Degree) -> u32 {
        match action {
            Action::NoBuy => 0,
            Action::TokenX => self.own_red_x[degree.tier()],
            Action::TokenY => self.own_red_y[degree.tier()],
        }
    }

    /// Final wealth after paying for `action`, with and without the loss.
    pub fn wealth_outcomes(&self, action: Action) -> (i64, i64) {
        let keep = self.endowment as i64 - self.cost(action) as i64;
        (keep - self.loss as i64, keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_tiered() {
        let p = GameParameters::default();
        p.validate().unwrap();
        let boxes: Vec<_> = Degree::ALL
            .iter()
            .map(|&d| {
                let b = p.initial_box(d);
                (b.red(), b.brown(), b.green())
            })
            .collect();
        assert_eq!(boxes, vec![(15, 25, 60), (30, 25, 45), (45, 25, 30)]);
        assert_eq!(p.wealth_outcomes(Action::TokenY), (8, 108));
    }

    #[test]
    fn dominance_precondition_enforced() {
        let mut p = GameParameters::default();
        p.cost_y = 32;
        assert!(p.validate().is_err());
        let mut p = GameParameters::default();
        p.own_red_y[2] = 30;
        assert!(p.validate().is_err());
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let p: GameParameters = toml::from_str("cost_x = 30\ny_brown_includes_self = true").unwrap();
        assert_eq!(p.cost_x, 30);
        assert_eq!(p.cost_y, 42);
        assert!(p.y_brown_includes_self);
        assert!(toml::from_str::<GameParameters>("bogus = 1").is_err());
    }
}
