use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{check_labeling, guarded_bases, LabError};
use crate::group::GroupElement;
use crate::matroid::{BaseSet, MatroidRef, Minor};
use crate::solver::Labeling;
use crate::weights::{format_weight, Weight, Weights};

/// Bases `A`, `B` where `B` is a nearest (optimum) `target`-base to the
/// (optimum) base `A`, yet farther than `k`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub matroid: MatroidRef,
    pub labeling: Labeling,
    pub weights: Option<Weights>,
    pub target: GroupElement,
    pub a: BaseSet,
    pub b: BaseSet,
    pub distance: usize,
    pub k: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "witness n={} r={} target={} k={} distance={}",
            self.matroid.ground_size(),
            self.matroid.rank(),
            self.target,
            self.k,
            self.distance
        )?;
        writeln!(f, "  A = {}", self.a)?;
        writeln!(f, "  B = {}", self.b)?;
        write!(f, "  labels = {}", self.labeling.compact())?;
        if let Some(w) = &self.weights {
            let parts: Vec<String> = w.values().iter().map(|&v| format_weight(v)).collect();
            write!(f, "\n  weights = {}", parts.join("/"))?;
        }
        Ok(())
    }
}

impl Witness {
    /// Re-derives the witness property by enumeration.
    pub fn validate(&self) -> Result<(), LabError> {
        let m = &*self.matroid;
        check_labeling(m, &self.labeling)?;
        let bad = |msg: String| Err(LabError::Usage(format!("invalid witness: {msg}")));
        if !m.is_base(self.a) || !m.is_base(self.b) {
            return bad("A or B is not a base".into());
        }
        if self.labeling.label_sum(self.b) != self.target {
            return bad(format!("B has label {}, not {}", self.labeling.label_sum(self.b), self.target));
        }
        if self.a.difference(self.b).len() != self.distance || self.distance <= self.k {
            return bad(format!("distance {} does not exceed k = {}", self.distance, self.k));
        }
        let bases = guarded_bases(m)?;
        let target = self.labeling.group().index_of(&self.target);
        let weight = |b: BaseSet| self.weights.as_ref().map_or(Weight::from_integer(0), |w| w.total(b));
        let best_overall = bases.iter().map(|&b| weight(b)).min();
        let best_target = bases.iter().filter(|&&b| self.labeling.label_sum_index(b) == target).map(|&b| weight(b)).min();
        if Some(weight(self.a)) != best_overall || Some(weight(self.b)) != best_target {
            return bad("A or B is not optimum".into());
        }
        let nearest = bases
            .iter()
            .filter(|&&d| self.labeling.label_sum_index(d) == target && Some(weight(d)) == best_target)
            .map(|d| self.a.difference(*d).len())
            .min();
        if nearest != Some(self.distance) {
            return bad(format!("a {} base lies at distance {:?}", self.target, nearest));
        }
        Ok(())
    }
}

/// Per start base: the worst `(distance, B, label)` over all attainable labels.
fn worst_from(
    a: BaseSet,
    bases: &[BaseSet],
    labels: &[usize],
    is_target: &[bool],
    order: usize,
) -> Option<(usize, BaseSet, usize)> {
    let mut best: Vec<Option<(usize, BaseSet)>> = vec![None; order];
    for ((&d, &g), &ok) in bases.iter().zip(labels).zip(is_target) {
        if !ok {
            continue;
        }
        let dist = a.difference(d).len();
        if best[g].is_none_or(|(cur, _)| dist < cur) {
            best[g] = Some((dist, d));
        }
    }
    let mut worst: Option<(usize, BaseSet, usize)> = None;
    for (g, entry) in best.into_iter().enumerate() {
        let Some((dist, b)) = entry else { continue };
        let better = match worst {
            None => true,
            Some((wd, wb, wg)) => dist > wd || (dist == wd && (b, g) < (wb, wg)),
        };
        if better {
            worst = Some((dist, b, g));
        }
    }
    worst
}

fn closeness(
    m: &MatroidRef,
    labeling: &Labeling,
    weights: Option<&Weights>,
    k: usize,
) -> Result<Option<Witness>, LabError> {
    check_labeling(&**m, labeling)?;
    if let Some(w) = weights {
        if w.len() != m.ground_size() {
            return Err(LabError::Usage(format!("{} weights for {} elements", w.len(), m.ground_size())));
        }
    }
    let bases = guarded_bases(&**m)?;
    let order = labeling.group().order();
    let labels: Vec<usize> = bases.iter().map(|&b| labeling.label_sum_index(b)).collect();
    let (starts, is_target) = match weights {
        None => (bases.clone(), vec![true; bases.len()]),
        Some(w) => {
            let values: Vec<Weight> = bases.iter().map(|&b| w.total(b)).collect();
            let min = values.iter().min().copied();
            let mut min_by_label = vec![None; order];
            for (&v, &g) in values.iter().zip(&labels) {
                if min_by_label[g].is_none_or(|cur| v < cur) {
                    min_by_label[g] = Some(v);
                }
            }
            let starts = bases.iter().zip(&values).filter(|(_, &v)| Some(v) == min).map(|(&b, _)| b).collect();
            let is_target = values.iter().zip(&labels).map(|(&v, &g)| Some(v) == min_by_label[g]).collect();
            (starts, is_target)
        }
    };
    let per_start: Vec<_> = starts
        .par_iter()
        .map(|&a| worst_from(a, &bases, &labels, &is_target, order).map(|(d, b, g)| (d, a, b, g)))
        .collect();
    let mut worst: Option<(usize, BaseSet, BaseSet, usize)> = None;
    for (d, a, b, g) in per_start.into_iter().flatten() {
        if d > k && worst.is_none_or(|(wd, ..)| d > wd) {
            worst = Some((d, a, b, g));
        }
    }
    Ok(worst.map(|(distance, a, b, g)| Witness {
        matroid: m.clone(),
        labeling: labeling.clone(),
        weights: weights.cloned(),
        target: labeling.group().element_at(g),
        a,
        b,
        distance,
        k,
    }))
}

/// `None` when every base has a `g`-base within distance `k` for every
/// attainable `g`; otherwise a maximal violation, least `(A, B, g)` on ties.
pub fn check_k_close(m: &MatroidRef, labeling: &Labeling, k: usize) -> Result<Option<Witness>, LabError> {
    closeness(m, labeling, None, k)
}

/// Like [`check_k_close`] for minimum-`w` bases and minimum-`w` `g`-bases.
pub fn check_strongly_k_close(
    m: &MatroidRef,
    labeling: &Labeling,
    w: &Weights,
    k: usize,
) -> Result<Option<Witness>, LabError> {
    closeness(m, labeling, Some(w), k)
}

/// Contracts `A ∩ B` (shifting the target by `-ℓ(A ∩ B)`) and deletes
/// everything outside `A ∪ B`, leaving a block matroid with blocks `A'`, `B'`.
pub fn reduce_witness(w: &Witness) -> Result<Witness, LabError> {
    let ground = w.matroid.ground();
    let common = w.a.intersection(w.b);
    let outside = ground.difference(w.a.union(w.b));
    if common.is_empty() && outside.is_empty() {
        return Ok(w.clone());
    }
    let minor = Minor::new(w.matroid.clone(), common, outside)?;
    let map = minor.element_map().to_vec();
    let group = w.labeling.group();
    let target = group.sub(&w.target, &w.labeling.label_sum(common))?;
    let a = minor.project(w.a.difference(common));
    let b = minor.project(w.b.difference(common));
    Ok(Witness {
        labeling: w.labeling.restrict(&map),
        weights: w.weights.as_ref().map(|ws| ws.restrict(&map)),
        matroid: Arc::new(minor),
        target,
        a,
        b,
        distance: w.distance,
        k: w.k,
    })
}
