//! Exact and grid-numerical tools for m-subharmonic functions, tropical
//! varieties and their Hessian measures.

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod hessian;
pub mod indicators;
pub mod linalg;
pub mod lp;
pub mod oracles;
pub mod rational;
pub mod tropical;

pub use error::{Error, Result};
pub use rational::Q;
