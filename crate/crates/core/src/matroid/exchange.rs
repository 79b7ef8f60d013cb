//! Base exchange machinery: blocks, Brualdi bijections, multi-element
//! exchanges and strong base orderability.

use std::collections::HashSet;

use super::{binomial, enumerate_bases, BaseSet, ElementSet, Matroid, MatroidError, MatroidKind};
use crate::intersection::max_common_independent;

/// Bijection between `A \ B` and `B \ A`, stored as `(from, to)` pairs in
/// ascending `from` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeBijection {
    pub pairs: Vec<(usize, usize)>,
}

impl ExchangeBijection {
    pub fn image(&self, x: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(a, _)| a == x).map(|&(_, b)| b)
    }

    pub fn map_set(&self, set: ElementSet) -> ElementSet {
        set.iter().filter_map(|x| self.image(x)).collect()
    }
}

/// Co-independence oracle of a borrowed matroid.
#[derive(Debug)]
struct BorrowedDual<'a> {
    inner: &'a dyn Matroid,
    inner_rank: usize,
}

impl Matroid for BorrowedDual<'_> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.inner.rank_of(set.complement(self.ground_size())) == self.inner_rank
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Dual
    }
    fn rank(&self) -> usize {
        self.ground_size() - self.inner_rank
    }
}

/// Two disjoint bases covering the ground set, if they exist.
///
/// A common independent set of `M` and `M*` of size `r` is a base whose
/// complement is also a base. The smaller block (lexicographically) comes first.
pub fn find_blocks(m: &dyn Matroid) -> Option<(BaseSet, BaseSet)> {
    let n = m.ground_size();
    let r = m.rank();
    if n != 2 * r {
        return None;
    }
    let dual = BorrowedDual { inner: m, inner_rank: r };
    let common = max_common_independent(m, &dual).ok()?;
    if common.len() != r {
        return None;
    }
    let other = common.complement(n);
    Some(if common < other { (common, other) } else { (other, common) })
}

/// Block pair found by scanning all base pairs; reference implementation for
/// [`find_blocks`].
pub fn blocks_brute_force(m: &dyn Matroid) -> Result<Option<(BaseSet, BaseSet)>, MatroidError> {
    if m.ground_size() != 2 * m.rank() {
        return Ok(None);
    }
    let bases = enumerate_bases(m)?;
    for (i, &a) in bases.iter().enumerate() {
        for &b in &bases[i + 1..] {
            if a.is_disjoint(b) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Every base whose complement is also a base, in lexicographic order.
pub fn enumerate_blocks(m: &dyn Matroid) -> Result<Vec<BaseSet>, MatroidError> {
    let n = m.ground_size();
    if n != 2 * m.rank() {
        return Ok(Vec::new());
    }
    let bases = enumerate_bases(m)?;
    let set: HashSet<u64> = bases.iter().map(|b| b.bits()).collect();
    Ok(bases.into_iter().filter(|b| set.contains(&b.complement(n).bits())).collect())
}

fn require_base(m: &dyn Matroid, b: ElementSet, name: &str) -> Result<(), MatroidError> {
    if m.is_base(b) {
        Ok(())
    } else {
        Err(MatroidError::Usage(format!("{name} = {b} is not a base")))
    }
}

/// A bijection `f: A \ B -> B \ A` with `A - a + f(a)` a base for every `a`,
/// found as a perfect matching in the exchange graph.
pub fn brualdi_bijection(m: &dyn Matroid, a: BaseSet, b: BaseSet) -> Result<ExchangeBijection, MatroidError> {
    require_base(m, a, "A")?;
    require_base(m, b, "B")?;
    let left = a.difference(b).to_vec();
    let right = b.difference(a).to_vec();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&x| (0..right.len()).filter(|&j| m.is_independent(a.without(x).with(right[j]))).collect())
        .collect();
    let mut match_right = vec![usize::MAX; right.len()];
    for i in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(i, &adj, &mut match_right, &mut seen) {
            return Err(MatroidError::Internal(format!(
                "no exchange bijection between {a} and {b}; the oracle is not a matroid"
            )));
        }
    }
    let mut pairs: Vec<(usize, usize)> =
        match_right.iter().enumerate().map(|(j, &i)| (left[i], right[j])).collect();
    pairs.sort_unstable();
    Ok(ExchangeBijection { pairs })
}

fn augment(i: usize, adj: &[Vec<usize>], match_right: &mut [usize], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if match_right[j] == usize::MAX || augment(match_right[j], adj, match_right, seen) {
            match_right[j] = i;
            return true;
        }
    }
    false
}

/// Finds `A2 ⊆ A1`, `B2 ⊆ B1` with `|A2| = |B2| = t` and `A - A2 + B2` a base.
///
/// `B2` ranges over the `t`-subsets of `B1` in lexicographic order; for the
/// first `B2` with `(A \ A1) ∪ B2` independent, that set is extended to a base
/// with elements of `A1` in ascending order and `A2` is what was left out.
/// Existence is guaranteed when `|A1| + |B1| - r(A1 ∪ B1) >= t`.
pub fn find_exchange(
    m: &dyn Matroid,
    a: BaseSet,
    a1: ElementSet,
    b1: ElementSet,
    t: usize,
) -> Result<Option<(ElementSet, ElementSet)>, MatroidError> {
    require_base(m, a, "A")?;
    if !a1.is_subset(a) {
        return Err(MatroidError::Usage(format!("A1 = {a1} is not a subset of A = {a}")));
    }
    if !a.is_disjoint(b1) {
        return Err(MatroidError::Usage(format!("B1 = {b1} meets A = {a}")));
    }
    if !m.is_independent(b1) {
        return Err(MatroidError::Usage(format!("B1 = {b1} is dependent")));
    }
    if t > a1.len() || t > b1.len() {
        return Ok(None);
    }
    let kept = a.difference(a1);
    for b2 in b1.k_subsets(t) {
        let mut cur = kept.union(b2);
        if !m.is_independent(cur) {
            continue;
        }
        for x in a1 {
            if m.is_independent(cur.with(x)) {
                cur.insert(x);
            }
        }
        debug_assert_eq!(cur.len(), a.len());
        let a2 = a1.difference(cur);
        return Ok(Some((a2, b2)));
    }
    Ok(None)
}

/// Largest number of bases the strong-base-orderability checks accept.
pub const SBO_BASE_LIMIT: usize = 1000;
/// Largest rank the strong-base-orderability checks accept.
pub const SBO_RANK_LIMIT: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SboVerdict {
    /// One witnessing bijection per unordered base pair `(A, B)` with `A < B`,
    /// mapping `A \ B` to `B \ A` (the identity on `A ∩ B` is implicit).
    Orderable(Vec<(BaseSet, BaseSet, ExchangeBijection)>),
    NotOrderable { a: BaseSet, b: BaseSet },
}

impl SboVerdict {
    pub fn is_orderable(&self) -> bool {
        matches!(self, SboVerdict::Orderable(_))
    }
}

fn sbo_guard(m: &dyn Matroid) -> Result<Vec<BaseSet>, MatroidError> {
    let r = m.rank();
    if r > SBO_RANK_LIMIT {
        return Err(MatroidError::Capacity { what: "rank".into(), value: r as u64, limit: SBO_RANK_LIMIT as u64 });
    }
    let count = binomial(m.ground_size() as u64, r as u64);
    if count > 10 * SBO_BASE_LIMIT as u64 {
        return Err(MatroidError::Capacity { what: "C(n,r)".into(), value: count, limit: 10 * SBO_BASE_LIMIT as u64 });
    }
    let bases = enumerate_bases(m)?;
    if bases.len() > SBO_BASE_LIMIT {
        return Err(MatroidError::Capacity {
            what: "number of bases".into(),
            value: bases.len() as u64,
            limit: SBO_BASE_LIMIT as u64,
        });
    }
    Ok(bases)
}

/// Searches for a bijection `src[i] -> dst[perm[i]]` such that
/// `from - X + f(X)` is a base for every `X ⊆ src` with `|X| <= max_size`.
fn subset_exchange_bijection(
    src: &[usize],
    dst: &[usize],
    from: ElementSet,
    max_size: usize,
    bases: &HashSet<u64>,
) -> Option<Vec<usize>> {
    struct Search<'a> {
        src: &'a [usize],
        dst: &'a [usize],
        from: ElementSet,
        max_size: usize,
        bases: &'a HashSet<u64>,
        image: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn ok_with_last(&self, depth: usize) -> bool {
            // subsets of src[..depth] that contain src[depth-1]
            let last = depth - 1;
            (0u64..1 << last).all(|mask| {
                let size = mask.count_ones() as usize + 1;
                if size > self.max_size {
                    return true;
                }
                let mut s = self.from.without(self.src[last]).with(self.dst[self.image[last]]);
                for i in 0..last {
                    if mask & (1 << i) != 0 {
                        s = s.without(self.src[i]).with(self.dst[self.image[i]]);
                    }
                }
                self.bases.contains(&s.bits())
            })
        }

        fn run(&mut self, depth: usize) -> bool {
            if depth == self.src.len() {
                return true;
            }
            for j in 0..self.dst.len() {
                if self.used[j] {
                    continue;
                }
                self.used[j] = true;
                self.image.push(j);
                if self.ok_with_last(depth + 1) && self.run(depth + 1) {
                    return true;
                }
                self.image.pop();
                self.used[j] = false;
            }
            false
        }
    }

    let mut search = Search {
        src,
        dst,
        from,
        max_size,
        bases,
        image: Vec::with_capacity(src.len()),
        used: vec![false; dst.len()],
    };
    search.run(0).then_some(search.image)
}

/// Exhaustive strong base orderability check with bijections fixing `A ∩ B`.
pub fn is_strongly_base_orderable(m: &dyn Matroid) -> Result<SboVerdict, MatroidError> {
    let bases = sbo_guard(m)?;
    let lookup: HashSet<u64> = bases.iter().map(|b| b.bits()).collect();
    let mut witnesses = Vec::new();
    for (i, &a) in bases.iter().enumerate() {
        for &b in &bases[i + 1..] {
            let src = a.difference(b).to_vec();
            let dst = b.difference(a).to_vec();
            match subset_exchange_bijection(&src, &dst, a, src.len(), &lookup) {
                Some(image) => {
                    let pairs = src.iter().zip(&image).map(|(&x, &j)| (x, dst[j])).collect();
                    witnesses.push((a, b, ExchangeBijection { pairs }));
                }
                None => return Ok(SboVerdict::NotOrderable { a, b }),
            }
        }
    }
    Ok(SboVerdict::Orderable(witnesses))
}

/// A bijection `f: B \ A -> A \ B` with `B - B' + f(B')` a base for every
/// `B' ⊆ B \ A` of size at most `k`, if one exists. Pairs are `(b, f(b))`.
pub fn k_replacement(
    m: &dyn Matroid,
    a: BaseSet,
    b: BaseSet,
    k: usize,
) -> Result<Option<ExchangeBijection>, MatroidError> {
    let bases = sbo_guard(m)?;
    require_base(m, a, "A")?;
    require_base(m, b, "B")?;
    let lookup: HashSet<u64> = bases.iter().map(|x| x.bits()).collect();
    let src = b.difference(a).to_vec();
    let dst = a.difference(b).to_vec();
    Ok(subset_exchange_bijection(&src, &dst, b, k, &lookup).map(|image| ExchangeBijection {
        pairs: src.iter().zip(&image).map(|(&x, &j)| (x, dst[j])).collect(),
    }))
}

pub fn is_k_replaceable(m: &dyn Matroid, a: BaseSet, b: BaseSet, k: usize) -> Result<bool, MatroidError> {
    Ok(k_replacement(m, a, b, k)?.is_some())
}
