//! Regular subdivision of the Newton polytope induced by the lifting `α ↦ −υ(α)`.

use num_traits::Signed;
use serde_json::{json, Value};

use super::TropicalPolynomial;
use crate::geometry::{ConvexHull, Polytope};

#[derive(Clone, Debug, PartialEq)]
pub struct DualCell {
    /// Indices of the terms whose lifted points lie on this upper face.
    pub terms: Vec<usize>,
    pub polytope: Polytope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualSubdivision {
    pub base: Polytope,
    /// Maximal cells, ordered by their sorted term-index lists.
    pub cells: Vec<DualCell>,
}

impl DualSubdivision {
    pub fn to_json(&self) -> Value {
        json!({
            "version": 1,
            "base": self.base.to_json(),
            "cells": self.cells.iter().map(|c| json!({"terms": c.terms, "polytope": c.polytope.to_json()})).collect::<Vec<_>>(),
        })
    }
}

pub fn dual_subdivision(f: &TropicalPolynomial) -> DualSubdivision {
    let base = f.newton_polytope();
    let n = f.n();
    let lifted: Vec<_> = f
        .terms()
        .iter()
        .map(|t| {
            let mut p = t.alpha_q();
            p.push(-t.upsilon.clone());
            p
        })
        .collect();
    let hull = ConvexHull::new(&lifted);
    let cell_of = |terms: Vec<usize>| {
        let pts: Vec<Vec<i64>> = terms.iter().map(|&i| f.terms()[i].alpha.clone()).collect();
        DualCell { polytope: Polytope::from_integer_points(&pts).expect("lattice points"), terms }
    };
    let mut cells: Vec<DualCell> = if hull.dim() == base.dim() {
        vec![cell_of((0..f.terms().len()).collect())]
    } else {
        let lift_axis = hull.frame.pivots.iter().position(|&j| j == n).expect("height is a pivot of the lifted hull");
        hull.facets
            .iter()
            .filter(|fc| fc.normal[lift_axis].is_positive())
            .map(|fc| {
                let mut terms: Vec<usize> = fc.members.iter().map(|&i| hull.source[i]).collect();
                terms.sort_unstable();
                cell_of(terms)
            })
            .collect()
    };
    cells.sort_by(|a, b| a.terms.cmp(&b.terms));
    DualSubdivision { base, cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};
    use crate::tropical::parse_tropical;

    #[test]
    fn trivial_and_split_subdivisions() {
        let line = parse_tropical("max(0, x1, x2)", 2).unwrap();
        let s = dual_subdivision(&line);
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].polytope, s.base);

        // corners of the square, υ(1,1) = 1: the diagonal (1,0)-(0,1) splits it
        let f = parse_tropical("max(0, x1, x2, -1 + x1 + x2)", 2).unwrap();
        let s = dual_subdivision(&f);
        assert_eq!(s.cells.len(), 2);
        assert_eq!(s.cells[0].terms, vec![0, 1, 2]);
        assert_eq!(s.cells[1].terms, vec![1, 2, 3]);
        assert!(s.cells.iter().all(|c| c.polytope.volume() == crate::rational::qf(1, 2)));

        let point = parse_tropical("max(2 + x1 + x2)", 2).unwrap();
        let s = dual_subdivision(&point);
        assert_eq!(s.cells[0].polytope.vertices(), &[qvec(&[1, 1])]);
        assert_eq!(s.base.volume(), q(0));
    }
}
