//! Exact polyhedral geometry over the rationals.

pub mod complex;
pub mod hull;
pub mod polyhedron;
pub mod polytope;
pub mod subspace;

use serde::{Deserialize, Serialize};

use crate::rational::{to_f64, Q};

pub use complex::{PolyhedralCell, WeightedComplex, Weighting};
pub use hull::{AffineFrame, ConvexHull};
pub use polyhedron::{CellInfo, Constraint, Polyhedron};
pub use polytope::{mixed_volume, Polytope};
pub use subspace::AffineSubspace;

/// A Hausdorff measure. `exact` is present whenever the value is rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Measure {
    Finite {
        value: f64,
        #[serde(with = "crate::rational::serde_opt_q", default)]
        exact: Option<Q>,
    },
    Divergent,
}

impl Measure {
    pub fn zero() -> Self {
        Self::exact(Q::from_integer(0.into()))
    }

    pub fn exact(x: Q) -> Self {
        Measure::Finite { value: to_f64(&x), exact: Some(x) }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Measure::Finite { value, .. } => Some(*value),
            Measure::Divergent => None,
        }
    }

    pub fn exact_value(&self) -> Option<&Q> {
        match self {
            Measure::Finite { exact, .. } => exact.as_ref(),
            Measure::Divergent => None,
        }
    }
}
