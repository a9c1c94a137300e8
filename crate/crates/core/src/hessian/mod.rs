//! Γ_m cones, Hessian measures of sampled and piecewise-linear functions, and
//! mollification experiments.

pub mod convergence;
pub mod grid;
pub mod matrix;
pub mod measure;
pub mod restrict;
pub mod superform;

pub use convergence::{convergence_experiment, ConvergenceRow};
pub use grid::{is_m_subharmonic, mollify, pointwise_max, GridFunction, SubharmonicReport};
pub use matrix::{is_m_positive, sigmas_exact, SymmetricMatrix, DEFAULT_TOL};
pub use measure::{hessian_measure_smooth, pl_monge_ampere, superform_constant, Atom, HessianMeasure};
pub use restrict::{restrict_to_variety, Restriction};
pub use superform::superform_wedge_oracle;
