//! Relative capacity with respect to linear varieties, computed from a discrete
//! relative extremal function.

pub mod extremal;
pub mod functional;
pub mod mask;
pub mod problem;
pub mod quasi;
pub mod stencil;

pub use extremal::{relative_extremal, relative_extremal_with, ExtremalFunction, ExtremalSolver, Scheme, SweepOrder};
pub use functional::{admissible, extremal_mass, candidate_lower_bound, candidates, capacity, capacity_with, CapacityResult, SolveOptions};
pub use mask::{MaskSpec, Shape};
pub use problem::{CapacityProblem, Layout, NodeKind};
pub use quasi::{pluripolar_test, pluripolar_test_with, quasicontinuity_experiment, quasicontinuity_experiment_with, QuasiOptions, QuasiReport, QuasiRow};
