//! Linear programming, membership and distance computations.

mod distance;
pub mod lp;

pub use distance::{
    euclidean_distance, frank_wolfe_distance, gauge_distance, gauge_distance_lp, membership,
    membership_lp, FrankWolfeResult, GaugeField,
};
pub use lp::{solve_lp, Constraint, LpProblem, LpSolution, LpStatus, Relation, Sense};
