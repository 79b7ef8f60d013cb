//! Matroids behind an independence oracle.
//!
//! Every matroid exposes its ground-set size and an independence predicate on
//! [`ElementSet`]s. Concrete families live in [`families`], minors and duals in
//! [`minor`], the exchange machinery (blocks, Brualdi bijections, strong base
//! orderability) in [`exchange`], and the text file format in [`io`].

pub mod exchange;
pub mod families;
pub mod io;
pub mod minor;
mod set;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use exchange::{
    blocks_brute_force, brualdi_bijection, enumerate_blocks, find_blocks, find_exchange, is_k_replaceable,
    is_strongly_base_orderable, ExchangeBijection, SboVerdict,
};
pub use families::{
    make_explicit, make_explicit_trusted, make_graphic, make_linear, make_partition, make_uniform, validate_bases,
    ExplicitMatroid, GraphicMatroid, LinearMatroid, PartitionMatroid, UniformMatroid,
};
pub use minor::{contract, delete, dual, shared, DualMatroid, Minor};
pub use set::{binomial, BaseSet, ElementSet, Elements, KSubsets, MAX_ELEMENTS};

/// Upper bound on `C(n, r)` for base enumeration.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("invalid matroid: {0}")]
    Invalid(String),
    #[error("element {element} is a loop; matroids here are loopless")]
    Loop { element: usize },
    #[error("bases {a} and {b} violate the exchange axiom at element {element}")]
    ExchangeViolation { a: ElementSet, b: ElementSet, element: usize },
    #[error("{0} is not a prime field size")]
    NotPrime(u64),
    #[error("ground set of size {0} exceeds the supported maximum of {max}", max = MAX_ELEMENTS)]
    TooLarge(usize),
    #[error("capacity guard exceeded: {what} = {value} > {limit}")]
    Capacity { what: String, value: u64, limit: u64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    Uniform,
    Graphic,
    Linear,
    Partition,
    ExplicitBases,
    Minor,
    Dual,
}

impl fmt::Display for MatroidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatroidKind::Uniform => "uniform",
            MatroidKind::Graphic => "graphic",
            MatroidKind::Linear => "linear",
            MatroidKind::Partition => "partition",
            MatroidKind::ExplicitBases => "explicit",
            MatroidKind::Minor => "minor",
            MatroidKind::Dual => "dual",
        };
        f.write_str(s)
    }
}

pub trait Matroid: Send + Sync + fmt::Debug {
    /// Elements are `0..ground_size()`.
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: ElementSet) -> bool;

    fn kind(&self) -> MatroidKind;

    /// Size of a maximal independent subset of `set`, grown greedily in
    /// ascending element order.
    fn rank_of(&self, set: ElementSet) -> usize {
        let mut indep = ElementSet::EMPTY;
        for e in set {
            if self.is_independent(indep.with(e)) {
                indep.insert(e);
            }
        }
        indep.len()
    }

    /// `r(M) = r(E)`.
    fn rank(&self) -> usize {
        self.rank_of(self.ground())
    }

    fn ground(&self) -> ElementSet {
        ElementSet::full(self.ground_size())
    }

    fn is_base(&self, set: ElementSet) -> bool {
        set.len() == self.rank() && self.is_independent(set)
    }
}

pub type MatroidRef = Arc<dyn Matroid>;

/// Lexicographically least base (greedy in ascending index order).
pub fn greedy_base(m: &dyn Matroid) -> BaseSet {
    let mut base = ElementSet::EMPTY;
    for e in m.ground() {
        if m.is_independent(base.with(e)) {
            base.insert(e);
        }
    }
    base
}

/// All bases in lexicographic order.
pub fn enumerate_bases(m: &dyn Matroid) -> Result<Vec<BaseSet>, MatroidError> {
    let n = m.ground_size();
    let r = m.rank();
    let count = binomial(n as u64, r as u64);
    if count > ENUMERATION_GUARD {
        return Err(MatroidError::Capacity {
            what: format!("C({n},{r})"),
            value: count,
            limit: ENUMERATION_GUARD,
        });
    }
    Ok(m.ground().k_subsets(r).filter(|&s| m.is_independent(s)).collect())
}

/// Exhaustively checks the independence axioms: ∅ independent, hereditary,
/// augmentation. Only for small ground sets.
pub fn check_axioms(m: &dyn Matroid) -> Result<(), MatroidError> {
    let n = m.ground_size();
    if n > 12 {
        return Err(MatroidError::Capacity { what: "ground set for axiom check".into(), value: n as u64, limit: 12 });
    }
    if !m.is_independent(ElementSet::EMPTY) {
        return Err(MatroidError::Invalid("empty set is dependent".into()));
    }
    let indep: Vec<bool> = (0..1u64 << n).map(|b| m.is_independent(ElementSet::from_bits(b))).collect();
    for bits in 0..1u64 << n {
        if !indep[bits as usize] {
            continue;
        }
        let s = ElementSet::from_bits(bits);
        for e in s {
            if !indep[s.without(e).bits() as usize] {
                return Err(MatroidError::Invalid(format!("{s} independent but {} is not", s.without(e))));
            }
        }
    }
    for i in 0..1u64 << n {
        if !indep[i as usize] {
            continue;
        }
        let small = ElementSet::from_bits(i);
        for j in 0..1u64 << n {
            let big = ElementSet::from_bits(j);
            if !indep[j as usize] || big.len() <= small.len() {
                continue;
            }
            if !big.difference(small).iter().any(|e| indep[small.with(e).bits() as usize]) {
                return Err(MatroidError::Invalid(format!("cannot augment {small} from {big}")));
            }
        }
    }
    Ok(())
}

/// True when both oracles agree on every subset (small ground sets only).
pub fn oracle_equivalent(a: &dyn Matroid, b: &dyn Matroid) -> bool {
    let n = a.ground_size();
    n == b.ground_size()
        && n <= 16
        && (0..1u64 << n).all(|bits| {
            let s = ElementSet::from_bits(bits);
            a.is_independent(s) == b.is_independent(s)
        })
}

/// Elements `e` with `{e}` dependent.
pub fn loops(m: &dyn Matroid) -> Vec<usize> {
    m.ground().iter().filter(|&e| !m.is_independent(ElementSet::singleton(e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let k4 = make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.rank_of(ElementSet::EMPTY), 0);
        assert_eq!(k4.rank(), 3);
        // triangle 0-1-2 uses edges (0,1),(0,2),(1,2)
        let triangle: ElementSet = [0, 1, 3].iter().collect();
        assert_eq!(k4.rank_of(triangle), 2);
    }

    #[test]
    fn enumeration_counts() {
        let k4 = make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(enumerate_bases(&k4).unwrap().len(), 16);
        let u24 = make_uniform(4, 2).unwrap();
        let bases = enumerate_bases(&u24).unwrap();
        assert_eq!(bases.len(), 6);
        assert!(bases.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumeration_guard() {
        let big = make_uniform(64, 32).unwrap();
        assert!(matches!(enumerate_bases(&big), Err(MatroidError::Capacity { .. })));
    }

    #[test]
    fn axioms_hold_for_families() {
        let k4 = make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        check_axioms(&k4).unwrap();
        check_axioms(&make_uniform(6, 3).unwrap()).unwrap();
        let fano = make_linear(
            2,
            &[vec![1, 0, 0, 1, 1, 0, 1], vec![0, 1, 0, 1, 0, 1, 1], vec![0, 0, 1, 0, 1, 1, 1]],
        )
        .unwrap();
        check_axioms(&fano).unwrap();
        check_axioms(&make_partition(&[0, 0, 0, 1, 1, 1], &[1, 2]).unwrap()).unwrap();
    }

    #[derive(Debug)]
    struct NotAMatroid;

    impl Matroid for NotAMatroid {
        fn ground_size(&self) -> usize {
            4
        }
        fn is_independent(&self, set: ElementSet) -> bool {
            // {0,1} and {2} maximal: augmentation fails
            set.is_subset([0, 1].iter().collect()) || set == ElementSet::singleton(2)
        }
        fn kind(&self) -> MatroidKind {
            MatroidKind::ExplicitBases
        }
    }

    #[test]
    fn axiom_check_catches_violations() {
        assert!(check_axioms(&NotAMatroid).is_err());
    }
}
