//! Named matroids and labelings used by tests, the acceptance suite and the
//! command line.

use crate::group::GroupSpec;
use crate::matroid::{
    make_explicit, make_graphic, make_linear, make_partition, make_uniform, shared, ElementSet, MatroidRef,
};
use crate::solver::Labeling;

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub matroid: MatroidRef,
    /// Default labeling, when the instance comes with one.
    pub labeling: Option<Labeling>,
}

impl Instance {
    fn plain(name: &str, matroid: MatroidRef) -> Self {
        Instance { name: name.to_string(), matroid, labeling: None }
    }
}

pub const K4_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn k4() -> MatroidRef {
    shared(make_graphic(4, &K4_EDGES).expect("K4"))
}

/// `U(m-1, 2(m-1))` over `Z_m`, the first block labeled 1 and the second 0.
/// The only 0-base is the second block, at distance `m - 1` from the first.
pub fn tight_example(m: u32) -> Instance {
    assert!(m >= 2, "tight example needs m >= 2");
    let r = (m - 1) as usize;
    let values: Vec<i64> = (0..2 * r).map(|e| i64::from(e < r)).collect();
    Instance {
        name: format!("tight-{m}"),
        matroid: shared(make_uniform(2 * r, r).expect("uniform")),
        labeling: Some(Labeling::cyclic(m, &values)),
    }
}

/// The tight example for `Z_4` with two coloops (labels 2 and 3) added.
pub fn padded_tight_example() -> Instance {
    let coloops: ElementSet = [6, 7].iter().collect();
    let bases: Vec<ElementSet> = ElementSet::full(6).k_subsets(3).map(|s| s.union(coloops)).collect();
    Instance {
        name: "padded-tight".into(),
        matroid: shared(make_explicit(8, &bases).expect("padded tight example")),
        labeling: Some(Labeling::cyclic(4, &[1, 1, 1, 0, 0, 0, 2, 3])),
    }
}

pub fn fano() -> MatroidRef {
    let rows = [vec![1, 0, 0, 1, 1, 0, 1], vec![0, 1, 0, 1, 0, 1, 1], vec![0, 0, 1, 0, 1, 1, 1]];
    shared(make_linear(2, &rows).expect("Fano"))
}

/// `K_{2,3}`: vertices 0, 1 on one side and 2, 3, 4 on the other.
pub fn k23() -> MatroidRef {
    let edges = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)];
    shared(make_graphic(5, &edges).expect("K23"))
}

/// Rank 3 on 5 elements over GF(3).
pub fn ternary() -> MatroidRef {
    let rows = [vec![1, 0, 0, 1, 1], vec![0, 1, 0, 1, 2], vec![0, 0, 1, 0, 1]];
    shared(make_linear(3, &rows).expect("ternary"))
}

/// Classes `{0,1,2}` and `{3,4,5}` with capacities 1 and 2.
pub fn partition_3_3() -> MatroidRef {
    shared(make_partition(&[0, 0, 0, 1, 1, 1], &[1, 2]).expect("partition"))
}

/// The standard matroids with `n <= 8` and `r <= 4`.
pub fn bundled_matroids() -> Vec<Instance> {
    let mut out: Vec<Instance> = [(1, 2), (2, 3), (2, 4), (2, 5), (3, 6), (4, 8)]
        .iter()
        .map(|&(r, n)| Instance::plain(&format!("u{r}-{n}"), shared(make_uniform(n, r).expect("uniform"))))
        .collect();
    out.push(Instance::plain("k4", k4()));
    out.push(Instance::plain("fano", fano()));
    out.push(Instance::plain("k23", k23()));
    out.push(Instance::plain("ternary", ternary()));
    out.push(Instance::plain("partition-3-3", partition_3_3()));
    out
}

pub fn builtin_names() -> Vec<String> {
    let mut names: Vec<String> = bundled_matroids().into_iter().map(|i| i.name).collect();
    names.extend(["tight-<m>".to_string(), "padded-tight".into(), "u<r>-<n>".into()]);
    names
}

/// Looks up `k4`, `fano`, `k23`, `ternary`, `partition-3-3`, `padded-tight`,
/// `tight-<m>` or `u<r>-<n>`.
pub fn builtin(name: &str) -> Option<Instance> {
    if let Some(m) = name.strip_prefix("tight-") {
        let m: u32 = m.parse().ok()?;
        return (2..=64).contains(&m).then(|| tight_example(m));
    }
    if name == "padded-tight" {
        return Some(padded_tight_example());
    }
    if let Some(rest) = name.strip_prefix('u') {
        if let Some((r, n)) = rest.split_once('-') {
            let (r, n) = (r.parse().ok()?, n.parse().ok()?);
            return make_uniform(n, r).ok().map(|u| Instance::plain(name, shared(u)));
        }
    }
    bundled_matroids().into_iter().find(|i| i.name == name)
}

/// Groups used across the test grids.
pub fn grid_groups() -> Vec<GroupSpec> {
    ["Z2", "Z3", "Z4", "Z6", "Z2xZ2"].iter().map(|s| s.parse().expect("group")).collect()
}
