use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    Action, ActionProfile, BallBox, Colour, Degree, GameError, GameParameters, PerPosition, PositionId, Topology,
    Treatment,
};
use crate::scalar::Scalar;

/// Starting box for a degree under the default parameters.
pub fn initial_box(degree: u32) -> Result<BallBox, GameError> {
    Ok(GameParameters::default().initial_box(Degree::new(degree)?))
}

/// Boxes after a profile, plus the number of requested conversions that could
/// not be carried out for lack of balls of the right colour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileOutcome {
    pub boxes: PerPosition<BallBox>,
    pub shortfall: PerPosition<u32>,
}

impl ProfileOutcome {
    pub fn clamped(&self) -> bool {
        self.shortfall.values().iter().any(|&s| s > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundDraw {
    pub draw: Colour,
    pub payoff: i64,
}

/// A fully specified game: network, constants and treatment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game {
    pub topology: Topology,
    pub params: GameParameters,
    pub treatment: Treatment,
}

impl Game {
    pub fn new(topology: Topology, params: GameParameters, treatment: Treatment) -> Result<Self, GameError> {
        params.validate()?;
        Ok(Game {
            topology,
            params,
            treatment,
        })
    }

    /// Default network and constants.
    pub fn standard(treatment: Treatment) -> Self {
        Game {
            topology: Topology::default(),
            params: GameParameters::default(),
            treatment,
        }
    }

    pub fn degree(&self, p: PositionId) -> Degree {
        self.topology.degree(p)
    }

    pub fn initial_boxes(&self) -> PerPosition<BallBox> {
        PerPosition::from_fn(|p| self.params.initial_box(self.degree(p)))
    }

    pub fn apply_profile(&self, profile: &ActionProfile) -> Result<PerPosition<BallBox>, GameError> {
        Ok(self.apply_profile_traced(profile)?.boxes)
    }

    pub fn apply_profile_traced(&self, profile: &ActionProfile) -> Result<ProfileOutcome, GameError> {
        profile.validate(self.treatment)?;
        let params = &self.params;
        let mut boxes = self.initial_boxes();
        let mut shortfall = PerPosition([0u32; 6]);

        for p in PositionId::ALL {
            let own = profile.get(p);
            let b = &mut boxes[p];
            let mut miss = b.convert_red(params.own_red(own, self.degree(p)));

            if self.treatment.externalities {
                for q in PositionId::ALL {
                    let from_other = q != p && profile.get(q).is_token();
                    let from_self = q == p && own == Action::TokenY && params.y_brown_includes_self;
                    if from_other || from_self {
                        miss += b.convert_brown(params.ext_brown_per_buyer);
                    }
                }
                for q in self.topology.neighbours(p) {
                    let n = match (own, profile.get(q)) {
                        (Action::NoBuy, Action::TokenX) => params.ext_red_x_to_nonbuyer,
                        (Action::NoBuy, Action::TokenY) => params.ext_red_y_to_nonbuyer,
                        (Action::TokenY, Action::TokenX) if self.treatment.decoy => params.ext_red_x_to_y_buyer,
                        _ => 0,
                    };
                    miss += b.convert_red(n);
                }
            }
            shortfall[p] = miss;
        }
        Ok(ProfileOutcome { boxes, shortfall })
    }

    /// Risk-neutral expected payoff of `p` given the post-purchase boxes.
    pub fn expected_payoff<T: Scalar>(
        &self,
        p: PositionId,
        profile: &ActionProfile,
        boxes: &PerPosition<BallBox>,
    ) -> T {
        let params = &self.params;
        let action = profile.get(p);
        T::from_count(params.endowment)
            - T::from_count(params.cost(action))
            - T::from_count(params.loss) * boxes[p].loss_probability::<T>()
    }

    /// Draws one ball per position from `rng`, A to F in order.
    pub fn realize_round<R: Rng + ?Sized>(
        &self,
        boxes: &PerPosition<BallBox>,
        profile: &ActionProfile,
        rng: &mut R,
    ) -> PerPosition<RoundDraw> {
        PerPosition::from_fn(|p| self.settle(p, profile, boxes[p].draw(rng)))
    }

    /// Draws each position's ball from its own stream.
    pub fn realize_round_streams<R: Rng>(
        &self,
        boxes: &PerPosition<BallBox>,
        profile: &ActionProfile,
        streams: &mut PerPosition<R>,
    ) -> PerPosition<RoundDraw> {
        PerPosition::from_fn(|p| self.settle(p, profile, boxes[p].draw(&mut streams[p])))
    }

    fn settle(&self, p: PositionId, profile: &ActionProfile, draw: Colour) -> RoundDraw {
        let (bad, good) = self.params.wealth_outcomes(profile.get(p));
        RoundDraw {
            draw,
            payoff: if draw.is_loss() { bad } else { good },
        }
    }
}
