//! Group-constrained matroid bases: finite abelian groups, matroid oracles and
//! intersection, the signature and proximity solvers, and brute-force checks of
//! closeness properties.

pub mod catalog;
pub mod group;
pub mod instances;
pub mod intersection;
pub mod lab;
pub mod matroid;
pub mod solver;
pub mod weights;
