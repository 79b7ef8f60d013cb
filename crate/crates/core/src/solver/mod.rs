//! Group-constrained base feasibility and optimization: plain signature
//! enumeration and the proximity search around an optimum base.

mod labeling;
mod signature;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::group::{ClosenessClass, GroupElement, GroupError, GroupSpec};
use crate::intersection::{max_common_independent, min_cost_common_base, IntersectionError};
use crate::matroid::{binomial, make_partition, BaseSet, ElementSet, Matroid, MatroidError, MatroidKind};
use crate::weights::{WeightError, Weight, Weights};

pub use labeling::{Labeling, LabelingError};
pub use signature::{enumerate_signatures, signature_label, signature_of, Compositions, Signature, SignatureDelta, SignatureIter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("refusing to run uncertified: {0}")]
    NotCertified(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Feasible,
    Infeasible,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Signatures produced by the enumeration (before any label filter for
    /// proximity, after it for plain enumeration).
    pub signatures_tried: u64,
    /// Matroid intersections solved, counted as a sequential run would.
    pub intersections: u64,
    /// Independence-oracle calls on the input matroid inside those intersections.
    pub oracle_calls: u64,
    /// `(a+, a-)` pairs enumerated by the proximity search.
    pub candidate_pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub base: Option<BaseSet>,
    pub label: Option<GroupElement>,
    pub weight: Option<Weight>,
    pub signature: Option<Signature>,
    /// False when an infeasible or optimal answer relies on an unproven
    /// closeness assumption.
    pub certified: bool,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProximityMode {
    CertifiedOnly,
    Heuristic,
}

#[derive(Debug)]
struct Counting<'a> {
    inner: &'a dyn Matroid,
    calls: AtomicU64,
}

impl Matroid for Counting<'_> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.is_independent(set)
    }

    fn kind(&self) -> MatroidKind {
        self.inner.kind()
    }

    fn rank_of(&self, set: ElementSet) -> usize {
        self.inner.rank_of(set)
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }
}

fn check_instance(m: &dyn Matroid, labeling: &Labeling, w: Option<&Weights>) -> Result<(), SolveError> {
    let n = m.ground_size();
    if labeling.len() != n {
        return Err(SolveError::Usage(format!("{} labels for a ground set of size {n}", labeling.len())));
    }
    if let Some(w) = w {
        if w.len() != n {
            return Err(SolveError::Usage(format!("{} weights for a ground set of size {n}", w.len())));
        }
    }
    Ok(())
}

/// One signature subproblem: a (min-cost) base with `|B ∩ E(g)| = a_g`, and
/// the number of oracle calls spent.
fn evaluate(
    m: &dyn Matroid,
    labeling: &Labeling,
    a: &Signature,
    costs: Option<&[i64]>,
) -> Result<(Option<(BaseSet, i64)>, u64), SolveError> {
    let r = m.rank();
    if a.total() != r || !a.fits(&labeling.fiber_sizes()) {
        return Ok((None, 0));
    }
    let partition = make_partition(labeling.indices(), a.counts())?;
    let counted = Counting { inner: m, calls: AtomicU64::new(0) };
    let found = match costs {
        Some(c) => min_cost_common_base(&counted, &partition, c)?,
        None => {
            let common = max_common_independent(&counted, &partition)?;
            (common.len() == r).then_some((common, 0))
        }
    };
    Ok((found, counted.calls.into_inner()))
}

/// A base whose fiber counts are exactly `a`, of minimum weight when `w` is
/// given. `None` when no such base exists.
pub fn base_with_signature(
    m: &dyn Matroid,
    labeling: &Labeling,
    a: &Signature,
    w: Option<&Weights>,
) -> Result<Option<(BaseSet, Weight)>, SolveError> {
    check_instance(m, labeling, w)?;
    if a.counts().len() != labeling.group().order() {
        return Err(SolveError::Usage("signature length differs from the group order".into()));
    }
    let scaled = w.map(Weights::scaled).transpose()?;
    let (found, _) = evaluate(m, labeling, a, scaled.as_ref().map(|(c, _)| c.as_slice()))?;
    let denom = scaled.map_or(1, |(_, d)| d);
    Ok(found.map(|(b, c)| (b, Rational64::new(c, denom))))
}

/// Minimum-weight base by the greedy algorithm, ties broken by element index.
pub fn find_optimum_base(m: &dyn Matroid, w: &Weights) -> BaseSet {
    let mut order: Vec<usize> = (0..m.ground_size()).collect();
    order.sort_by(|&x, &y| w.get(x).cmp(&w.get(y)).then(x.cmp(&y)));
    let mut base = ElementSet::EMPTY;
    for e in order {
        if m.is_independent(base.with(e)) {
            base.insert(e);
        }
    }
    base
}

/// For a minimum-weight base `A` and `a ∈ A`, the cheapest `b ∉ A` (ties by
/// index) with `A - a + b` a base; that base is optimum in `M \ a`. `None`
/// when `a` is a coloop.
pub fn deletion_exchange(m: &dyn Matroid, w: &Weights, base: BaseSet, a: usize) -> Option<usize> {
    let rest = base.without(a);
    m.ground()
        .difference(base)
        .iter()
        .filter(|&b| m.is_independent(rest.with(b)))
        .min_by(|&x, &y| w.get(x).cmp(&w.get(y)).then(x.cmp(&y)))
}

/// Candidates evaluated per parallel round when looking for the first hit.
const FIRST_HIT_CHUNK: usize = 64;

struct Outcome {
    hit: Option<(usize, BaseSet, i64)>,
    intersections: u64,
    oracle_calls: u64,
}

/// Feasibility: the first candidate (in list order) that yields a base.
/// Optimization: the cheapest, earliest on ties. Counts follow a sequential
/// scan so they do not depend on the thread pool.
fn run_candidates(
    m: &dyn Matroid,
    labeling: &Labeling,
    candidates: &[Signature],
    costs: Option<&[i64]>,
) -> Result<Outcome, SolveError> {
    let eval = |a: &Signature| evaluate(m, labeling, a, costs);
    let mut out = Outcome { hit: None, intersections: 0, oracle_calls: 0 };
    if costs.is_none() {
        for (c, chunk) in candidates.chunks(FIRST_HIT_CHUNK).enumerate() {
            let results: Vec<_> = chunk.par_iter().map(eval).collect();
            for (i, res) in results.into_iter().enumerate() {
                let (found, calls) = res?;
                out.intersections += 1;
                out.oracle_calls += calls;
                if let Some((b, cost)) = found {
                    out.hit = Some((c * FIRST_HIT_CHUNK + i, b, cost));
                    return Ok(out);
                }
            }
        }
        return Ok(out);
    }
    let results: Vec<_> = candidates.par_iter().map(eval).collect();
    for (i, res) in results.into_iter().enumerate() {
        let (found, calls) = res?;
        out.intersections += 1;
        out.oracle_calls += calls;
        if let Some((b, cost)) = found {
            if out.hit.as_ref().is_none_or(|&(_, _, best)| cost < best) {
                out.hit = Some((i, b, cost));
            }
        }
    }
    Ok(out)
}

fn finish(
    m: &dyn Matroid,
    labeling: &Labeling,
    target: &GroupElement,
    w: Option<&Weights>,
    candidates: &[Signature],
    outcome: Outcome,
    mut stats: SolveStats,
    certified: bool,
) -> Result<SolveResult, SolveError> {
    stats.intersections = outcome.intersections;
    stats.oracle_calls = outcome.oracle_calls;
    let Some((i, base, _)) = outcome.hit else {
        return Ok(SolveResult {
            status: SolveStatus::Infeasible,
            base: None,
            label: None,
            weight: None,
            signature: None,
            certified,
            stats,
        });
    };
    let label = labeling.label_sum(base);
    if !m.is_base(base) || &label != target || signature_of(labeling, base) != candidates[i] {
        return Err(SolveError::Internal(format!("intersection returned an invalid base {base}")));
    }
    Ok(SolveResult {
        status: SolveStatus::Feasible,
        base: Some(base),
        label: Some(label),
        weight: w.map(|w| w.total(base)),
        signature: Some(candidates[i].clone()),
        certified,
        stats,
    })
}

fn costs_of(w: Option<&Weights>) -> Result<Option<Vec<i64>>, SolveError> {
    Ok(w.map(|w| w.scaled()).transpose()?.map(|(c, _)| c))
}

/// Tries every signature with label `target`; one matroid intersection each.
pub fn solve_enum(
    m: &dyn Matroid,
    labeling: &Labeling,
    target: &GroupElement,
    w: Option<&Weights>,
) -> Result<SolveResult, SolveError> {
    check_instance(m, labeling, w)?;
    let group = labeling.group();
    if !group.contains(target) {
        return Err(GroupError::Mismatch { element: target.to_string(), group: group.to_string() }.into());
    }
    let candidates: Vec<Signature> =
        enumerate_signatures(group, m.rank(), &labeling.fiber_sizes(), Some(target)).collect();
    let costs = costs_of(w)?;
    let outcome = run_candidates(m, labeling, &candidates, costs.as_deref())?;
    let stats = SolveStats { signatures_tried: candidates.len() as u64, ..SolveStats::default() };
    finish(m, labeling, target, w, &candidates, outcome, stats, true)
}

pub fn default_proximity_k(group: &GroupSpec) -> usize {
    group.order() - 1
}

/// Why a proximity run with this `k` is not backed by a closeness theorem,
/// or `None` if it is.
pub fn certification_gap(group: &GroupSpec, k: usize, optimizing: bool) -> Result<Option<String>, SolveError> {
    let order = group.order();
    if optimizing {
        if order > 4 {
            return Ok(Some(format!("strong closeness is only established for |G| <= 4, here |G| = {order}")));
        }
        let need = group.davenport_constant()? - 1;
        if k < need {
            return Ok(Some(format!("optimization over {group} needs k >= D(G) - 1 = {need}, got {k}")));
        }
        return Ok(None);
    }
    if group.closeness_class() != ClosenessClass::Proven {
        return Ok(Some(format!("closeness of {group} is unproven")));
    }
    if k + 1 < order {
        return Ok(Some(format!("feasibility over {group} needs k >= |G| - 1 = {}, got {k}", order - 1)));
    }
    Ok(None)
}

/// Upper bound `C(k + |G| - 1, k)^2` on the proximity candidate count.
pub fn proximity_pair_bound(group: &GroupSpec, k: usize) -> u64 {
    let c = binomial((k + group.order() - 1) as u64, k as u64);
    c.saturating_mul(c)
}

/// Starts from an optimum base `B` and only tries signatures `a_B + a+ - a-`
/// with `|a+| = |a-| <= k`, in order of move size, then lexicographically.
pub fn solve_proximity(
    m: &dyn Matroid,
    labeling: &Labeling,
    target: &GroupElement,
    k: usize,
    w: Option<&Weights>,
    mode: ProximityMode,
) -> Result<SolveResult, SolveError> {
    check_instance(m, labeling, w)?;
    let group = labeling.group();
    if !group.contains(target) {
        return Err(GroupError::Mismatch { element: target.to_string(), group: group.to_string() }.into());
    }
    let optimizing = w.is_some_and(|w| !w.is_zero());
    let gap = certification_gap(group, k, optimizing)?;
    if let (Some(reason), ProximityMode::CertifiedOnly) = (&gap, mode) {
        return Err(SolveError::NotCertified(format!("{reason}; use heuristic mode to run anyway")));
    }
    let zero = Weights::zeros(m.ground_size());
    let start = find_optimum_base(m, w.unwrap_or(&zero));
    let a_b = signature_of(labeling, start);
    let fibers = labeling.fiber_sizes();
    let target_idx = group.index_of(target);

    let mut stats = SolveStats::default();
    let mut candidates = Vec::new();
    for s in 0..=k {
        let plus_caps: Vec<usize> = fibers.iter().zip(a_b.counts()).map(|(f, a)| f - a).collect();
        for plus in Compositions::new(plus_caps, s) {
            let minus_caps: Vec<usize> =
                plus.iter().zip(a_b.counts()).map(|(&p, &a)| if p > 0 { 0 } else { a }).collect();
            for minus in Compositions::new(minus_caps, s) {
                stats.candidate_pairs += 1;
                let delta = SignatureDelta { plus: plus.clone(), minus };
                let Some(a_d) = delta.apply(&a_b) else { continue };
                stats.signatures_tried += 1;
                if a_d.label_index(group) == target_idx {
                    candidates.push(a_d);
                }
            }
        }
    }
    let costs = costs_of(w)?;
    let outcome = run_candidates(m, labeling, &candidates, costs.as_deref())?;
    finish(m, labeling, target, w, &candidates, outcome, stats, gap.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{enumerate_bases, make_graphic, make_uniform};

    fn tight(m: u32) -> (crate::matroid::UniformMatroid, Labeling) {
        let r = (m - 1) as usize;
        let values: Vec<i64> = (0..2 * r).map(|e| i64::from(e < r)).collect();
        (make_uniform(2 * r, r).unwrap(), Labeling::cyclic(m, &values))
    }

    #[test]
    fn signature_subproblem() {
        let u = make_uniform(4, 2).unwrap();
        let l = Labeling::cyclic(2, &[0, 0, 1, 1]);
        let (b, _) = base_with_signature(&u, &l, &Signature::new(vec![2, 0]), None).unwrap().unwrap();
        assert_eq!(b, [0, 1].iter().collect());
        assert_eq!(base_with_signature(&u, &l, &Signature::new(vec![0, 3]), None).unwrap(), None);
        for base in enumerate_bases(&u).unwrap() {
            let a = signature_of(&l, base);
            assert!(base_with_signature(&u, &l, &a, None).unwrap().is_some());
            assert_eq!(a.label(l.group()), l.label_sum(base));
        }
    }

    #[test]
    fn tight_example_zero_base_is_second_block() {
        let (u, l) = tight(4);
        let zero = l.group().zero();
        let res = solve_enum(&u, &l, &zero, None).unwrap();
        assert_eq!(res.base, Some([3, 4, 5].iter().collect()));
        let prox = solve_proximity(&u, &l, &zero, 3, None, ProximityMode::CertifiedOnly).unwrap();
        assert_eq!(prox.base, res.base);
        assert!(prox.stats.candidate_pairs <= proximity_pair_bound(l.group(), 3));
        assert!(prox.stats.intersections <= proximity_pair_bound(l.group(), 3));
    }

    #[test]
    fn proximity_k0_is_greedy_label() {
        let k4 = make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let l = Labeling::cyclic(3, &[1, 2, 0, 1, 1, 2]);
        let start = find_optimum_base(&k4, &Weights::zeros(6));
        for g in l.group().elements() {
            let res = solve_proximity(&k4, &l, &g, 0, None, ProximityMode::Heuristic).unwrap();
            assert_eq!(res.is_feasible(), l.label_sum(start) == g);
            assert!(!res.certified);
        }
    }

    #[test]
    fn certification_rules() {
        let (u, l) = tight(6);
        let zero = l.group().zero();
        let err = solve_proximity(&u, &l, &zero, 4, None, ProximityMode::CertifiedOnly).unwrap_err();
        assert!(matches!(err, SolveError::NotCertified(_)));
        assert!(solve_proximity(&u, &l, &zero, 5, None, ProximityMode::CertifiedOnly).unwrap().certified);
        let w = Weights::from_integers(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let err = solve_proximity(&u, &l, &zero, 5, Some(&w), ProximityMode::CertifiedOnly).unwrap_err();
        assert!(matches!(err, SolveError::NotCertified(_)));
    }

    #[test]
    fn optimum_base_and_deletion() {
        let u = make_uniform(4, 2).unwrap();
        assert_eq!(find_optimum_base(&u, &Weights::zeros(4)), [0, 1].iter().collect());
        let w = Weights::from_integers(&[3, 1, 2, 5]);
        let opt = find_optimum_base(&u, &w);
        assert_eq!(opt, [1, 2].iter().collect());
        assert_eq!(deletion_exchange(&u, &w, opt, 1), Some(0));
        let coloop = make_uniform(2, 2).unwrap();
        assert_eq!(deletion_exchange(&coloop, &Weights::zeros(2), ElementSet::full(2), 0), None);
    }
}
