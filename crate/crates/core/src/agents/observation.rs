use serde::{Deserialize, Serialize};

use crate::game::{Action, ActionProfile, Degree, Game, GameParameters, PerPosition, PositionId, Treatment};

/// One purchasable option as presented to a player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MenuItem {
    pub action: Action,
    pub cost: u32,
    /// Red balls the purchase converts in the buyer's own box.
    pub own_red: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Menu {
    pub items: Vec<MenuItem>,
}

impl Menu {
    pub fn for_treatment(treatment: Treatment, params: &GameParameters, degree: Degree) -> Menu {
        Self::from_actions(treatment.menu(), params, degree)
    }

    pub fn from_actions(actions: &[Action], params: &GameParameters, degree: Degree) -> Menu {
        Menu {
            items: actions
                .iter()
                .map(|&action| MenuItem {
                    action,
                    cost: params.cost(action),
                    own_red: params.own_red(action, degree),
                })
                .collect(),
        }
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.items.iter().map(|i| i.action)
    }

    pub fn contains(&self, a: Action) -> bool {
        self.actions().any(|b| b == a)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// What every member sees after a round: choices and post-purchase risk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundFeedback {
    pub profile: ActionProfile,
    pub loss_probabilities: PerPosition<f64>,
}

/// Information available to one seat when choosing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub position: PositionId,
    pub degree: Degree,
    pub treatment: Treatment,
    pub menu: Menu,
    /// Absent in the first round of a part.
    pub previous: Option<RoundFeedback>,
    pub round: u32,
    pub part: u8,
}

impl Observation {
    pub fn new(
        game: &Game,
        position: PositionId,
        part: u8,
        round: u32,
        previous: Option<RoundFeedback>,
    ) -> Observation {
        let degree = game.degree(position);
        Observation {
            position,
            degree,
            treatment: game.treatment,
            menu: Menu::for_treatment(game.treatment, &game.params, degree),
            previous,
            round,
            part,
        }
    }

    /// The profile the others are expected to repeat.
    pub fn belief(&self) -> ActionProfile {
        self.previous
            .as_ref()
            .map(|f| f.profile)
            .unwrap_or_else(|| ActionProfile::uniform(Action::NoBuy))
    }

    pub fn with_menu(mut self, actions: &[Action], params: &GameParameters) -> Observation {
        self.menu = Menu::from_actions(actions, params, self.degree);
        self
    }
}
