//! Cardinality and minimum-weight matroid intersection by shortest augmenting
//! paths in the exchange graph.
//!
//! For a common independent set `I` the exchange graph has an arc `x -> y`
//! (`x ∈ I`, `y ∉ I`) when `I - x + y` is independent in `M1`, and an arc
//! `y -> x` when `I - x + y` is independent in `M2`. Paths run from the
//! elements addable in `M1` to the elements addable in `M2`.

use num_rational::Rational64;
use thiserror::Error;

use crate::matroid::{BaseSet, ElementSet, Matroid};
use crate::weights::{WeightError, Weights};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectionError {
    #[error("ground sets differ in size: {0} vs {1}")]
    GroundMismatch(usize, usize),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error(transparent)]
    Weights(#[from] WeightError),
}

fn check_ground(m1: &dyn Matroid, m2: &dyn Matroid) -> Result<usize, IntersectionError> {
    let (n1, n2) = (m1.ground_size(), m2.ground_size());
    if n1 != n2 {
        return Err(IntersectionError::GroundMismatch(n1, n2));
    }
    Ok(n1)
}

struct ExchangeGraph {
    /// Outgoing arcs per element.
    arcs: Vec<Vec<usize>>,
    sources: ElementSet,
    sinks: ElementSet,
}

impl ExchangeGraph {
    fn build(m1: &dyn Matroid, m2: &dyn Matroid, current: ElementSet, n: usize) -> Self {
        let outside = current.complement(n);
        let mut arcs = vec![Vec::new(); n];
        let mut sources = ElementSet::EMPTY;
        let mut sinks = ElementSet::EMPTY;
        for y in outside {
            let grown = current.with(y);
            if m1.is_independent(grown) {
                sources.insert(y);
            }
            if m2.is_independent(grown) {
                sinks.insert(y);
            }
        }
        for x in current {
            for y in outside {
                let swapped = current.without(x).with(y);
                if m1.is_independent(swapped) {
                    arcs[x].push(y);
                }
                if m2.is_independent(swapped) {
                    arcs[y].push(x);
                }
            }
        }
        ExchangeGraph { arcs, sources, sinks }
    }
}

/// Maximum-cardinality common independent set.
pub fn max_common_independent(m1: &dyn Matroid, m2: &dyn Matroid) -> Result<ElementSet, IntersectionError> {
    let n = check_ground(m1, m2)?;
    let mut current = ElementSet::EMPTY;
    loop {
        let graph = ExchangeGraph::build(m1, m2, current, n);
        let Some(path) = shortest_path(&graph, n) else {
            return Ok(current);
        };
        for v in path {
            current = current.symmetric_difference(ElementSet::singleton(v));
        }
    }
}

/// Breadth-first search from all sources; the first sink reached (scanning in
/// ascending order) ends a shortest path.
fn shortest_path(graph: &ExchangeGraph, n: usize) -> Option<Vec<usize>> {
    let mut pred = vec![usize::MAX; n];
    let mut seen = graph.sources;
    let mut frontier: Vec<usize> = graph.sources.to_vec();
    while !frontier.is_empty() {
        if let Some(&end) = frontier.iter().filter(|&&v| graph.sinks.contains(v)).min() {
            let mut path = vec![end];
            let mut v = end;
            while pred[v] != usize::MAX {
                v = pred[v];
                path.push(v);
            }
            path.reverse();
            return Some(path);
        }
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in &graph.arcs[u] {
                if !seen.contains(v) {
                    seen.insert(v);
                    pred[v] = u;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    None
}

/// Minimum-cost common independent sets of sizes `1, 2, ...` up to
/// `target_size` or until no augmenting path exists. Entry `k - 1` has size `k`.
pub fn weighted_intersection_trace(
    m1: &dyn Matroid,
    m2: &dyn Matroid,
    costs: &[i64],
    target_size: usize,
) -> Result<Vec<(ElementSet, i64)>, IntersectionError> {
    let n = check_ground(m1, m2)?;
    if costs.len() != n {
        return Err(IntersectionError::WeightCount { expected: n, got: costs.len() });
    }
    let mut current = ElementSet::EMPTY;
    let mut cost = 0i64;
    let mut trace = Vec::new();
    while current.len() < target_size {
        let graph = ExchangeGraph::build(m1, m2, current, n);
        let Some((path, length)) = cheapest_path(&graph, current, costs, n) else {
            break;
        };
        for v in path {
            current = current.symmetric_difference(ElementSet::singleton(v));
        }
        cost += length;
        trace.push((current, cost));
    }
    Ok(trace)
}

/// Bellman-Ford on vertex lengths `c(y)` for `y ∉ I` and `-c(x)` for `x ∈ I`,
/// minimizing (length, arcs); remaining ties keep the first path found.
fn cheapest_path(graph: &ExchangeGraph, current: ElementSet, costs: &[i64], n: usize) -> Option<(Vec<usize>, i64)> {
    let length = |v: usize| if current.contains(v) { -costs[v] } else { costs[v] };
    let mut dist: Vec<Option<(i64, usize)>> = vec![None; n];
    let mut pred = vec![usize::MAX; n];
    for s in graph.sources {
        dist[s] = Some((length(s), 0));
    }
    for _ in 0..=n {
        let mut changed = false;
        for u in 0..n {
            let Some((du, hu)) = dist[u] else { continue };
            for &v in &graph.arcs[u] {
                let cand = (du + length(v), hu + 1);
                if dist[v].is_none_or(|d| cand < d) {
                    dist[v] = Some(cand);
                    pred[v] = u;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let end = graph.sinks.iter().filter(|&t| dist[t].is_some()).min_by_key(|&t| (dist[t], t))?;
    let total = dist[end]?.0;
    let mut path = vec![end];
    let mut v = end;
    while pred[v] != usize::MAX {
        v = pred[v];
        path.push(v);
        if path.len() > n {
            // a predecessor cycle can only come from a broken oracle
            return None;
        }
    }
    path.reverse();
    Some((path, total))
}

/// Minimum-cost common base with integer costs. `None` when the ranks differ
/// or no common base exists.
pub fn min_cost_common_base(
    m1: &dyn Matroid,
    m2: &dyn Matroid,
    costs: &[i64],
) -> Result<Option<(BaseSet, i64)>, IntersectionError> {
    check_ground(m1, m2)?;
    let r = m1.rank();
    if m2.rank() != r {
        return Ok(None);
    }
    if r == 0 {
        return Ok(Some((ElementSet::EMPTY, 0)));
    }
    let trace = weighted_intersection_trace(m1, m2, costs, r)?;
    Ok(trace.last().filter(|(s, _)| s.len() == r).copied())
}

/// Minimum-weight common base with exact rational weights.
pub fn min_weight_common_base(
    m1: &dyn Matroid,
    m2: &dyn Matroid,
    weights: &Weights,
) -> Result<Option<(BaseSet, Rational64)>, IntersectionError> {
    let (costs, denom) = weights.scaled()?;
    Ok(min_cost_common_base(m1, m2, &costs)?.map(|(b, c)| (b, Rational64::new(c, denom))))
}
