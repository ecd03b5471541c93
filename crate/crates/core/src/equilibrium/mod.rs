//! Strategic analysis by exhaustive enumeration of pure profiles.

mod solver;
mod utility;

pub use solver::{
    best_responses, enumerate_profiles, pure_nash, sign_changes, social_optimum, ProfilePayoffs, SocialOptimum, Solver,
    SolverReport,
};
pub use utility::{Affine, ParseUtilityError, RiskNeutral, Utility, UtilityError, UtilitySpec};
