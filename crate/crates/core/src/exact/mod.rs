//! Exact rational linear algebra: elimination, nullspaces, simplex LP,
//! affine dimension, polytope V/H conversion and stochastic fixed points.

pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rat;
pub mod stochastic;

pub use linalg::{independent_subset, nullspace, rank_of, solve_linear, LinearSolution, RMat, RVec};
pub use lp::{lp_feasible_point, lp_optimize, Constraints, LpResult, LpStatus, Sense};
pub use polytope::{affine_hull_dim, facet_enumeration, vertex_enumeration, Halfspace, MAX_ENUMERATION_DIM};
pub use rat::{format_rat, int, parse_rat, rat, Rat};
pub use stochastic::stochastic_fixed_point;
