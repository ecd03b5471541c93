use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Utility;
use crate::game::{Action, ActionProfile, Game, PerPosition, PositionId, Treatment};
use crate::scalar::Scalar;

/// Every admissible profile in lexicographic order, all-NoBuy first.
pub fn enumerate_profiles(treatment: Treatment) -> impl Iterator<Item = ActionProfile> {
    (0..ActionProfile::count(treatment)).map(move |i| ActionProfile::from_index(i, treatment).expect("index in range"))
}

/// Expected utility of each position for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePayoffs<T> {
    pub profile: ActionProfile,
    pub utilities: PerPosition<T>,
    pub welfare: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialOptimum<T> {
    pub profile: ActionProfile,
    pub welfare: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport<T> {
    pub treatment: Treatment,
    pub utility: String,
    pub equilibria: Vec<ActionProfile>,
    /// Actions strictly dominated for each position.
    pub dominated: PerPosition<Vec<Action>>,
    pub social_optimum: SocialOptimum<T>,
    pub payoffs: Vec<ProfilePayoffs<T>>,
}

/// Exhaustive payoff table for one game and utility.
#[derive(Debug, Clone)]
pub struct Solver<T> {
    treatment: Treatment,
    table: Vec<PerPosition<T>>,
}

impl<T: Scalar> Solver<T> {
    pub fn new<U: Utility<T>>(game: &Game, utility: &U) -> Self {
        let treatment = game.treatment;
        let table = (0..ActionProfile::count(treatment))
            .into_par_iter()
            .map(|i| {
                let profile = ActionProfile::from_index(i, treatment).expect("index in range");
                let boxes = game
                    .apply_profile(&profile)
                    .expect("enumerated profiles are admissible");
                PerPosition::from_fn(|p| {
                    let (bad, good) = game.params.wealth_outcomes(profile.get(p));
                    utility.expected(
                        boxes[p].loss_probability::<T>(),
                        T::from_i64(bad).expect("wealth fits"),
                        T::from_i64(good).expect("wealth fits"),
                    )
                })
            })
            .collect();
        Solver { treatment, table }
    }

    pub fn treatment(&self) -> Treatment {
        self.treatment
    }

    pub fn utility(&self, profile: &ActionProfile, p: PositionId) -> T {
        self.table[profile.index(self.treatment)][p]
    }

    pub fn welfare(&self, profile: &ActionProfile) -> T {
        self.table[profile.index(self.treatment)]
            .values()
            .iter()
            .fold(T::zero(), |acc, &v| acc + v)
    }

    /// Maximisers of `p`'s expected utility with the other positions held
    /// fixed, in menu order.
    pub fn best_responses(&self, profile: &ActionProfile, p: PositionId) -> Vec<Action> {
        let menu = self.treatment.menu();
        let values: Vec<T> = menu.iter().map(|&a| self.utility(&profile.with(p, a), p)).collect();
        let best = values.iter().copied().fold(values[0], |m, v| if v > m { v } else { m });
        menu.iter()
            .zip(values)
            .filter(|(_, v)| v.approx_eq(best))
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn is_equilibrium(&self, profile: &ActionProfile) -> bool {
        PositionId::ALL
            .iter()
            .all(|&p| self.best_responses(profile, p).contains(&profile.get(p)))
    }

    pub fn equilibria(&self) -> Vec<ActionProfile> {
        enumerate_profiles(self.treatment)
            .filter(|pr| self.is_equilibrium(pr))
            .collect()
    }

    /// Whether `b` beats `a` for `p` beyond the tie tolerance against every
    /// choice of the others.
    pub fn strictly_dominates(&self, p: PositionId, b: Action, a: Action) -> bool {
        enumerate_profiles(self.treatment)
            .filter(|pr| pr.get(p) == a)
            .all(|pr| self.utility(&pr.with(p, b), p).clearly_greater(self.utility(&pr, p)))
    }

    pub fn dominated(&self) -> PerPosition<Vec<Action>> {
        let menu = self.treatment.menu();
        PerPosition::from_fn(|p| {
            menu.iter()
                .copied()
                .filter(|&a| menu.iter().any(|&b| b != a && self.strictly_dominates(p, b, a)))
                .collect()
        })
    }

    /// Highest-welfare profile; the earliest in profile order wins ties.
    pub fn social_optimum(&self) -> SocialOptimum<T> {
        let mut best: Option<SocialOptimum<T>> = None;
        for profile in enumerate_profiles(self.treatment) {
            let welfare = self.welfare(&profile);
            let better = match &best {
                None => true,
                Some(b) => welfare.clearly_greater(b.welfare),
            };
            if better {
                best = Some(SocialOptimum { profile, welfare });
            }
        }
        best.expect("at least one profile")
    }

    pub fn report(&self, utility_label: impl Into<String>) -> SolverReport<T> {
        let payoffs = enumerate_profiles(self.treatment)
            .map(|profile| ProfilePayoffs {
                profile,
                utilities: self.table[profile.index(self.treatment)],
                welfare: self.welfare(&profile),
            })
            .collect();
        SolverReport {
            treatment: self.treatment,
            utility: utility_label.into(),
            equilibria: self.equilibria(),
            dominated: self.dominated(),
            social_optimum: self.social_optimum(),
            payoffs,
        }
    }
}

/// Convenience wrapper building the table and the full report.
pub fn pure_nash<T: Scalar, U: Utility<T>>(game: &Game, utility: &U, label: impl Into<String>) -> SolverReport<T> {
    Solver::new(game, utility).report(label)
}

pub fn best_responses<T: Scalar, U: Utility<T>>(
    game: &Game,
    utility: &U,
    profile: &ActionProfile,
    p: PositionId,
) -> Vec<Action> {
    Solver::new(game, utility).best_responses(profile, p)
}

pub fn social_optimum<T: Scalar, U: Utility<T>>(game: &Game, utility: &U) -> SocialOptimum<T> {
    Solver::new(game, utility).social_optimum()
}

/// Roots in `[lo, hi]` of `f`, located by a uniform scan and refined by
/// bisection to `tol`.
pub fn sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=steps {
        let b = lo + h * i as f64;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            while r - l > tol {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm.signum() == fl.signum() {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            roots.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    roots
}
