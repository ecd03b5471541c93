use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AgentError, AgentKind, AgentSpec, Menu, Observation};
use crate::equilibrium::{Utility, UtilitySpec};
use crate::game::{Action, Game};
use crate::scalar::Scalar;

/// Choice probabilities indexed by action; inadmissible actions carry 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution(pub [f64; 3]);

impl Distribution {
    pub fn get(&self, a: Action) -> f64 {
        self.0[a.index()]
    }

    pub fn point(a: Action) -> Self {
        let mut p = [0.0; 3];
        p[a.index()] = 1.0;
        Distribution(p)
    }

    /// Samples with a single uniform draw, walking actions in menu order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = Action::NoBuy;
        for a in Action::ALL {
            let p = self.get(a);
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = a;
            if u < acc {
                return a;
            }
        }
        last
    }
}

fn check_menu(game: &Game, obs: &Observation) -> Result<(), AgentError> {
    if obs.menu.is_empty() {
        return Err(AgentError::MenuMismatch("empty menu".into()));
    }
    if obs.treatment != game.treatment {
        return Err(AgentError::MenuMismatch(format!(
            "observation is for {} but the game is {}",
            obs.treatment, game.treatment
        )));
    }
    for item in &obs.menu.items {
        if !game.treatment.admits(item.action) {
            return Err(AgentError::MenuMismatch(format!(
                "{} is not offered in {}",
                item.action, game.treatment
            )));
        }
    }
    Ok(())
}

/// Expected utility of each menu action against the belief that the others
/// repeat the previous round.
pub fn expected_utilities(game: &Game, obs: &Observation, utility: &UtilitySpec) -> Result<[f64; 3], AgentError> {
    let mut out = [f64::NEG_INFINITY; 3];
    let belief = obs.belief();
    for a in obs.menu.actions() {
        let profile = belief.with(obs.position, a);
        let boxes = game.apply_profile(&profile)?;
        let (bad, good) = game.params.wealth_outcomes(a);
        out[a.index()] = utility.expected(boxes[obs.position].loss_probability::<f64>(), bad as f64, good as f64);
    }
    Ok(out)
}

/// Dominance score on (cost, own red conversion). For each pair, the margin is
/// the number of attributes where `a` is strictly better minus those where `b`
/// is, divided by the attribute count; only positive margins count.
pub fn attraction_scores(menu: &Menu) -> [f64; 3] {
    const K: f64 = 2.0;
    let norm = |vals: Vec<f64>| -> Vec<f64> {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        vals.iter()
            .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    };
    // Both attributes oriented so that larger is better.
    let cost = norm(menu.items.iter().map(|i| -(i.cost as f64)).collect());
    let red = norm(menu.items.iter().map(|i| i.own_red as f64).collect());
    let cmp = |x: f64, y: f64| -> f64 {
        if x > y + 1e-12 {
            1.0
        } else if y > x + 1e-12 {
            -1.0
        } else {
            0.0
        }
    };
    let mut out = [0.0; 3];
    for (i, a) in menu.items.iter().enumerate() {
        let mut s = 0.0;
        for j in 0..menu.len() {
            if i != j {
                let margin = (cmp(cost[i], cost[j]) + cmp(red[i], red[j])) / K;
                s += margin.max(0.0);
            }
        }
        out[a.action.index()] = s;
    }
    out
}

fn logit(menu: &Menu, values: &[f64; 3], temperature: f64) -> Distribution {
    let vmax = menu
        .actions()
        .map(|a| values[a.index()])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p = [0.0; 3];
    let mut z = 0.0;
    for a in menu.actions() {
        let w = ((values[a.index()] - vmax) / temperature).exp();
        p[a.index()] = w;
        z += w;
    }
    for v in p.iter_mut() {
        *v /= z;
    }
    Distribution(p)
}

fn bias(spec: &AgentSpec, obs: &Observation) -> [f64; 3] {
    if obs.part == 2 && spec.part_two_bias != 0.0 {
        [0.0, spec.part_two_bias, spec.part_two_bias]
    } else {
        [0.0; 3]
    }
}

/// The distribution `decide` samples from.
pub fn choice_probabilities(spec: &AgentSpec, game: &Game, obs: &Observation) -> Result<Distribution, AgentError> {
    check_menu(game, obs)?;
    let extra = bias(spec, obs);
    let with_bias = |mut v: [f64; 3]| {
        for (x, b) in v.iter_mut().zip(extra) {
            *x += b;
        }
        v
    };
    match &spec.kind {
        AgentKind::Random { p } => {
            for a in Action::ALL {
                if p[a.index()] > 0.0 && !obs.menu.contains(a) {
                    return Err(AgentError::MenuMismatch(format!(
                        "random agent puts mass on {a}, which is not on the menu"
                    )));
                }
            }
            Ok(Distribution(*p))
        }
        AgentKind::MyopicBr { utility } => {
            let v = with_bias(expected_utilities(game, obs, utility)?);
            let mut best = obs.menu.items[0].action;
            for a in obs.menu.actions() {
                if v[a.index()].clearly_greater(v[best.index()]) {
                    best = a;
                }
            }
            Ok(Distribution::point(best))
        }
        AgentKind::Eu { utility, temperature } => {
            let v = with_bias(expected_utilities(game, obs, utility)?);
            Ok(logit(&obs.menu, &v, *temperature))
        }
        AgentKind::DecoySusceptible {
            utility,
            theta,
            temperature,
        } => {
            let mut v = with_bias(expected_utilities(game, obs, utility)?);
            if *theta > 0.0 {
                let ra = attraction_scores(&obs.menu);
                for (x, r) in v.iter_mut().zip(ra) {
                    *x += theta * r;
                }
            }
            Ok(logit(&obs.menu, &v, *temperature))
        }
    }
}

pub fn decide<R: Rng + ?Sized>(
    spec: &AgentSpec,
    game: &Game,
    obs: &Observation,
    rng: &mut R,
) -> Result<Action, AgentError> {
    Ok(choice_probabilities(spec, game, obs)?.sample(rng))
}
