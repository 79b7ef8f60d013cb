//! Exhaustive checks of closeness properties on small matroids.

mod closeness;
mod inequality;
mod isolation;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSpec};
use crate::matroid::{binomial, enumerate_bases, BaseSet, Matroid, MatroidError};
use crate::solver::{Labeling, SolveError};

pub use closeness::{check_k_close, check_strongly_k_close, reduce_witness, Witness};
pub use inequality::{check_schrijver_seymour, sbo_strong_closeness_suite, SboSuiteReport, SsReport};
pub use isolation::{
    is_block_isolating, is_strong_block_isolating, isolation_scan, labeling_count, labeling_from_index, Predicate,
    Reduction, ScanEntry, ScanLine, ScanReport,
};

/// Largest `C(n, r)` the lab enumerates.
pub const LAB_BASE_GUARD: u64 = 1_000_000;
/// Largest number of labelings a single scan (or shard) visits.
pub const LAB_LABELING_GUARD: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("capacity guard exceeded: {what} = {value} > {limit}")]
    Capacity { what: String, value: u64, limit: u64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("report error: {0}")]
    Report(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub(crate) fn guarded_bases(m: &dyn Matroid) -> Result<Vec<BaseSet>, LabError> {
    let (n, r) = (m.ground_size(), m.rank());
    let count = binomial(n as u64, r as u64);
    if count > LAB_BASE_GUARD {
        return Err(LabError::Capacity { what: format!("C({n},{r})"), value: count, limit: LAB_BASE_GUARD });
    }
    Ok(enumerate_bases(m)?)
}

pub(crate) fn check_labeling(m: &dyn Matroid, labeling: &Labeling) -> Result<(), LabError> {
    if labeling.len() != m.ground_size() {
        return Err(LabError::Usage(format!(
            "{} labels for a ground set of size {}",
            labeling.len(),
            m.ground_size()
        )));
    }
    Ok(())
}

/// `ℓ(M)` with the number of bases attaining each label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelImage {
    group: GroupSpec,
    multiplicity: Vec<u64>,
}

impl LabelImage {
    pub fn image(&self) -> BTreeSet<GroupElement> {
        self.image_indices().into_iter().map(|i| self.group.element_at(i)).collect()
    }

    pub fn image_indices(&self) -> Vec<usize> {
        (0..self.multiplicity.len()).filter(|&i| self.multiplicity[i] > 0).collect()
    }

    pub fn len(&self) -> usize {
        self.multiplicity.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multiplicity(&self, g: &GroupElement) -> u64 {
        self.multiplicity[self.group.index_of(g)]
    }

    /// Multiplicities indexed by dense group-element index.
    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicity
    }

    pub fn base_count(&self) -> u64 {
        self.multiplicity.iter().sum()
    }
}

pub fn label_image(m: &dyn Matroid, labeling: &Labeling) -> Result<LabelImage, LabError> {
    check_labeling(m, labeling)?;
    let group = labeling.group().clone();
    let mut multiplicity = vec![0; group.order()];
    for b in guarded_bases(m)? {
        multiplicity[labeling.label_sum_index(b)] += 1;
    }
    Ok(LabelImage { group, multiplicity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{dual, make_graphic, make_uniform, shared};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn images() {
        let u = make_uniform(6, 3).unwrap();
        let l = Labeling::cyclic(4, &[0; 6]);
        let img = label_image(&u, &l).unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img.multiplicity(&l.group().zero()), 20);

        let tight = Labeling::cyclic(4, &[1, 1, 1, 0, 0, 0]);
        let img = label_image(&u, &tight).unwrap();
        assert_eq!(img.len(), 4);
        assert_eq!(img.multiplicities(), &[1, 9, 9, 1]);
    }

    #[test]
    fn image_through_dual_complements() {
        let k4 = shared(make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap());
        let d = dual(k4.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let l = Labeling::random(GroupSpec::cyclic(3), 6, &mut rng);
            let img = label_image(&*k4, &l).unwrap();
            let total = l.label_sum_index(k4.ground());
            // bases of the dual are complements, so their labels are ℓ(E) - ℓ(B)
            let dual_img = label_image(&d, &l).unwrap();
            for i in 0..3 {
                let j = l.group().add_idx(total, l.group().neg_idx(i));
                assert_eq!(img.multiplicities()[i], dual_img.multiplicities()[j]);
            }
            assert_eq!(img.base_count(), 16);
        }
    }
}
