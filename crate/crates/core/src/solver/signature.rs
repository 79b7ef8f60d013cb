//! Signatures `a_g = |B ∩ E(g)|` and their enumeration.

use crate::group::{GroupElement, GroupSpec};
use crate::matroid::BaseSet;

use super::Labeling;

/// Fiber counts of a base, indexed by dense group-element index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    counts: Vec<usize>,
}

impl Signature {
    pub fn new(counts: Vec<usize>) -> Self {
        Signature { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn get(&self, group: &GroupSpec, g: &GroupElement) -> usize {
        self.counts[group.index_of(g)]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `Σ_g a_g · g`.
    pub fn label(&self, group: &GroupSpec) -> GroupElement {
        group.element_at(self.label_index(group))
    }

    pub fn label_index(&self, group: &GroupSpec) -> usize {
        self.counts.iter().enumerate().fold(0, |acc, (g, &a)| {
            let scaled = group.index_of(&group.scalar_mul(a as u64, &group.element_at(g)).expect("in group"));
            group.add_idx(acc, scaled)
        })
    }

    /// `0 <= a_g <= caps[g]` for every `g`.
    pub fn fits(&self, caps: &[usize]) -> bool {
        self.counts.len() == caps.len() && self.counts.iter().zip(caps).all(|(a, c)| a <= c)
    }
}

pub fn signature_of(labeling: &Labeling, base: BaseSet) -> Signature {
    let mut counts = vec![0; labeling.group().order()];
    for e in base {
        counts[labeling.indices()[e]] += 1;
    }
    Signature { counts }
}

pub fn signature_label(group: &GroupSpec, a: &Signature) -> GroupElement {
    a.label(group)
}

/// The move `a_D - a_B` split into its positive part and the magnitude of its
/// negative part; the two supports are disjoint and have equal totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureDelta {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl SignatureDelta {
    pub fn between(from: &Signature, to: &Signature) -> Self {
        let (plus, minus) = from
            .counts
            .iter()
            .zip(&to.counts)
            .map(|(&b, &d)| (d.saturating_sub(b), b.saturating_sub(d)))
            .unzip();
        SignatureDelta { plus, minus }
    }

    pub fn size(&self) -> usize {
        self.plus.iter().sum()
    }

    /// `from + plus - minus`, or `None` if a coordinate would go negative.
    pub fn apply(&self, from: &Signature) -> Option<Signature> {
        let counts = from
            .counts
            .iter()
            .zip(&self.plus)
            .zip(&self.minus)
            .map(|((&a, &p), &m)| (a + p).checked_sub(m))
            .collect::<Option<Vec<_>>>()?;
        Some(Signature { counts })
    }
}

/// Vectors with `0 <= v[i] <= caps[i]` and `Σ v = total`, in ascending
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Compositions {
    caps: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(caps: Vec<usize>, total: usize) -> Self {
        let mut first = vec![0; caps.len()];
        let next = fill_from_back(&caps, &mut first, 0, total).then_some(first);
        Compositions { caps, next }
    }
}

/// Lexicographically smallest way to place `amount` into `v[from..]`.
fn fill_from_back(caps: &[usize], v: &mut [usize], from: usize, mut amount: usize) -> bool {
    for i in (from..v.len()).rev() {
        v[i] = amount.min(caps[i]);
        amount -= v[i];
    }
    amount == 0
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let len = succ.len();
        let mut suffix = 0;
        for i in (0..len).rev() {
            if i + 1 < len && succ[i] < self.caps[i] && suffix > 0 {
                succ[i] += 1;
                fill_from_back(&self.caps, &mut succ, i + 1, suffix - 1);
                self.next = Some(succ);
                break;
            }
            suffix += succ[i];
        }
        Some(current)
    }
}

/// Stream of signatures for rank `r` with per-label caps `|E(g)|`, optionally
/// restricted to those whose label is `target`.
pub struct SignatureIter<'a> {
    group: &'a GroupSpec,
    inner: Compositions,
    target: Option<usize>,
}

pub fn enumerate_signatures<'a>(
    group: &'a GroupSpec,
    r: usize,
    caps: &[usize],
    target: Option<&GroupElement>,
) -> SignatureIter<'a> {
    SignatureIter {
        group,
        inner: Compositions::new(caps.to_vec(), r),
        target: target.map(|g| group.index_of(g)),
    }
}

impl Iterator for SignatureIter<'_> {
    type Item = Signature;

    fn next(&mut self) -> Option<Signature> {
        loop {
            let sig = Signature { counts: self.inner.next()? };
            match self.target {
                Some(t) if sig.label_index(self.group) != t => continue,
                _ => return Some(sig),
            }
        }
    }
}
