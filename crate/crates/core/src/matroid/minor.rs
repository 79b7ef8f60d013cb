//! Deletion, contraction and duality.
//!
//! A [`Minor`] keeps a handle on its parent and re-indexes the surviving
//! elements as `0..n'` in ascending parent order.

use std::sync::Arc;

use super::{ElementSet, Matroid, MatroidError, MatroidKind, MatroidRef};

#[derive(Clone, Debug)]
pub struct Minor {
    parent: MatroidRef,
    /// Parent index of each surviving element.
    kept: Vec<usize>,
    contracted: ElementSet,
    rank: usize,
}

impl Minor {
    /// `M / contract \ delete`. `contract` must be independent and disjoint
    /// from `delete`.
    pub fn new(parent: MatroidRef, contract: ElementSet, delete: ElementSet) -> Result<Self, MatroidError> {
        let ground = parent.ground();
        if !contract.is_subset(ground) || !delete.is_subset(ground) {
            return Err(MatroidError::Usage("minor sets must lie in the ground set".into()));
        }
        if !contract.is_disjoint(delete) {
            return Err(MatroidError::Usage("contracted and deleted sets overlap".into()));
        }
        if !parent.is_independent(contract) {
            return Err(MatroidError::Usage(format!("cannot contract dependent set {contract}")));
        }
        let kept: Vec<usize> = ground.difference(contract).difference(delete).to_vec();
        let mut minor = Minor { parent, kept, contracted: contract, rank: 0 };
        minor.rank = minor.rank_of(ElementSet::full(minor.kept.len()));
        Ok(minor)
    }

    pub fn parent(&self) -> &MatroidRef {
        &self.parent
    }

    /// Parent index of each minor element.
    pub fn element_map(&self) -> &[usize] {
        &self.kept
    }

    pub fn contracted(&self) -> ElementSet {
        self.contracted
    }

    /// Maps a set of minor elements to parent elements.
    pub fn lift(&self, set: ElementSet) -> ElementSet {
        set.iter().map(|e| self.kept[e]).collect()
    }

    /// Maps parent elements that survive in the minor to minor indices.
    pub fn project(&self, set: ElementSet) -> ElementSet {
        self.kept.iter().enumerate().filter(|(_, &p)| set.contains(p)).map(|(i, _)| i).collect()
    }
}

impl Matroid for Minor {
    fn ground_size(&self) -> usize {
        self.kept.len()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.parent.is_independent(self.lift(set).union(self.contracted))
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Minor
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

pub fn delete(m: MatroidRef, set: ElementSet) -> Result<Minor, MatroidError> {
    Minor::new(m, ElementSet::EMPTY, set)
}

/// Contraction by an independent set.
pub fn contract(m: MatroidRef, set: ElementSet) -> Result<Minor, MatroidError> {
    Minor::new(m, set, ElementSet::EMPTY)
}

/// Dual matroid: `X` is independent iff `E \ X` spans `M`, i.e.
/// `r*(X) = |X| + r(E \ X) - r(E)` equals `|X|`.
#[derive(Clone, Debug)]
pub struct DualMatroid {
    inner: MatroidRef,
    inner_rank: usize,
}

pub fn dual(m: MatroidRef) -> DualMatroid {
    let inner_rank = m.rank();
    DualMatroid { inner: m, inner_rank }
}

impl DualMatroid {
    pub fn inner(&self) -> &MatroidRef {
        &self.inner
    }
}

impl Matroid for DualMatroid {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        let rest = set.complement(self.ground_size());
        self.inner.rank_of(rest) == self.inner_rank
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Dual
    }
    fn rank_of(&self, set: ElementSet) -> usize {
        set.len() + self.inner.rank_of(set.complement(self.ground_size())) - self.inner_rank
    }
    fn rank(&self) -> usize {
        self.ground_size() - self.inner_rank
    }
}

/// Convenience for wrapping a concrete matroid into a shared handle.
pub fn shared<M: Matroid + 'static>(m: M) -> MatroidRef {
    Arc::new(m)
}
