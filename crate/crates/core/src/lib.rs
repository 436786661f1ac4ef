//! Bivariate information decomposition into shared, unique and
//! complementary information, computed by certified convex optimization
//! over the polytope of distributions with fixed pairwise marginals.
//!
//! Also provides the partial-information lattice of antichains with Möbius
//! inversion, and a randomized harness for the monotonicity properties of
//! the decomposition.

pub mod cli;
pub mod error;
pub mod feasible;
pub mod harness;
mod kernel;
pub mod lattice;
pub mod par;
pub mod solver;
pub mod table;
pub mod transport;

pub use error::{Error, Result};
pub use feasible::{
    build_constraints, ci_lift, independent_coupling, is_feasible, lmo, si_lift, FeasiblePoint,
    MarginalConstraints,
};
pub use lattice::{
    antichains, below, bivariate_icap, check_wb_axioms, mobius_inversion, nogo_certificate,
    Antichain, PiLattice, RedundancyAssignment, SourceSet,
};
pub use solver::{
    brute_force_decompose, decompose, decompose_with, minimize_cmi, minimize_cmi_with,
    Decomposition, Method, SolveResult, SolverOptions,
};
pub use table::{JointTable, Variable};
