//! Concrete matroid families.

use std::collections::HashSet;

use super::{binomial, loops, ElementSet, Matroid, MatroidError, MatroidKind, MAX_ELEMENTS};
use crate::group::is_prime;

/// Explicit matroids with at most this many elements are validated at construction.
pub const EXPLICIT_VALIDATION_LIMIT: usize = 12;

fn check_size(n: usize) -> Result<(), MatroidError> {
    if n > MAX_ELEMENTS {
        Err(MatroidError::TooLarge(n))
    } else {
        Ok(())
    }
}

fn reject_loops(m: &dyn Matroid) -> Result<(), MatroidError> {
    match loops(m).first() {
        Some(&element) => Err(MatroidError::Loop { element }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug)]
pub struct UniformMatroid {
    n: usize,
    r: usize,
}

pub fn make_uniform(n: usize, r: usize) -> Result<UniformMatroid, MatroidError> {
    check_size(n)?;
    if r > n {
        return Err(MatroidError::Invalid(format!("uniform rank {r} exceeds ground size {n}")));
    }
    if r == 0 && n > 0 {
        return Err(MatroidError::Loop { element: 0 });
    }
    Ok(UniformMatroid { n, r })
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        set.len() <= self.r
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Uniform
    }
    fn rank_of(&self, set: ElementSet) -> usize {
        set.len().min(self.r)
    }
    fn rank(&self) -> usize {
        self.r
    }
}

/// Cycle matroid of a multigraph; element `i` is edge `i`.
#[derive(Clone, Debug)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    rank: usize,
}

pub fn make_graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<GraphicMatroid, MatroidError> {
    check_size(edges.len())?;
    for (i, &(u, w)) in edges.iter().enumerate() {
        if u >= vertices || w >= vertices {
            return Err(MatroidError::Invalid(format!("edge {i} = ({u},{w}) names a vertex >= {vertices}")));
        }
        if u == w {
            return Err(MatroidError::Loop { element: i });
        }
    }
    let mut m = GraphicMatroid { vertices, edges: edges.to_vec(), rank: 0 };
    m.rank = super::greedy_base(&m).len();
    Ok(m)
}

impl GraphicMatroid {
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        for e in set {
            let (u, w) = self.edges[e];
            let (ru, rw) = (find(&mut parent, u), find(&mut parent, w));
            if ru == rw {
                return false;
            }
            parent[ru] = rw;
        }
        true
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Graphic
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

/// Column matroid of a matrix over GF(p).
#[derive(Clone, Debug)]
pub struct LinearMatroid {
    p: u64,
    rows: Vec<Vec<u64>>,
    n: usize,
    rank: usize,
}

pub fn make_linear(p: u64, rows: &[Vec<i64>]) -> Result<LinearMatroid, MatroidError> {
    if p > u32::MAX as u64 || !is_prime(p as u32) {
        return Err(MatroidError::NotPrime(p));
    }
    let n = rows.first().map_or(0, Vec::len);
    check_size(n)?;
    if rows.iter().any(|r| r.len() != n) {
        return Err(MatroidError::Invalid("matrix rows have different lengths".into()));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut m = LinearMatroid { p, rows, n, rank: 0 };
    reject_loops(&m)?;
    m.rank = m.column_rank(m.ground());
    Ok(m)
}

impl LinearMatroid {
    pub fn field(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    fn column_rank(&self, set: ElementSet) -> usize {
        let p = self.p;
        let cols: Vec<usize> = set.to_vec();
        let mut mat: Vec<Vec<u64>> = self.rows.iter().map(|row| cols.iter().map(|&c| row[c]).collect()).collect();
        let (nrows, ncols) = (mat.len(), cols.len());
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..nrows).find(|&r| mat[r][col] != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            let inv = mod_pow(mat[rank][col], p - 2, p);
            for x in mat[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..nrows {
                if r != rank && mat[r][col] != 0 {
                    let factor = mat[r][col];
                    for c in 0..ncols {
                        mat[r][c] = (mat[r][c] + p - factor * mat[rank][c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Matroid for LinearMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.column_rank(set) == set.len()
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Linear
    }
    fn rank_of(&self, set: ElementSet) -> usize {
        self.column_rank(set)
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

/// Matroid given by its list of bases.
#[derive(Clone, Debug)]
pub struct ExplicitMatroid {
    n: usize,
    rank: usize,
    bases: Vec<ElementSet>,
    /// Independence bitmap over all subsets when `n` is small enough.
    table: Option<Vec<u64>>,
}

const TABLE_LIMIT: usize = 20;

/// Checks base sizes, duplicates and the base exchange axiom: for bases A, B
/// and a ∈ A \ B there is b ∈ B \ A with A - a + b a base.
pub fn validate_bases(n: usize, bases: &[ElementSet]) -> Result<(), MatroidError> {
    check_size(n)?;
    let Some(first) = bases.first() else {
        return Err(MatroidError::Invalid("base list is empty".into()));
    };
    let r = first.len();
    let ground = ElementSet::full(n);
    let mut seen = HashSet::new();
    for b in bases {
        if b.len() != r {
            return Err(MatroidError::Invalid(format!("base {b} has size {} but {first} has size {r}", b.len())));
        }
        if !b.is_subset(ground) {
            return Err(MatroidError::Invalid(format!("base {b} leaves the ground set 0..{n}")));
        }
        if !seen.insert(b.bits()) {
            return Err(MatroidError::Invalid(format!("base {b} listed twice")));
        }
    }
    for &a in bases {
        for &b in bases {
            for x in a.difference(b) {
                let ok = b.difference(a).iter().any(|y| seen.contains(&a.without(x).with(y).bits()));
                if !ok {
                    return Err(MatroidError::ExchangeViolation { a, b, element: x });
                }
            }
        }
    }
    Ok(())
}

/// Builds an explicit matroid, validating the exchange axiom when
/// `n <= EXPLICIT_VALIDATION_LIMIT`. Larger inputs need [`make_explicit_trusted`].
pub fn make_explicit(n: usize, bases: &[ElementSet]) -> Result<ExplicitMatroid, MatroidError> {
    if n > EXPLICIT_VALIDATION_LIMIT {
        return Err(MatroidError::Usage(format!(
            "explicit matroids with more than {EXPLICIT_VALIDATION_LIMIT} elements are not validated; pass --trust"
        )));
    }
    validate_bases(n, bases)?;
    build_explicit(n, bases)
}

/// Builds an explicit matroid from a trusted base list: sizes and loops are
/// still checked, the exchange axiom is not.
pub fn make_explicit_trusted(n: usize, bases: &[ElementSet]) -> Result<ExplicitMatroid, MatroidError> {
    check_size(n)?;
    let Some(first) = bases.first() else {
        return Err(MatroidError::Invalid("base list is empty".into()));
    };
    if bases.iter().any(|b| b.len() != first.len() || !b.is_subset(ElementSet::full(n))) {
        return Err(MatroidError::Invalid("bases differ in size or leave the ground set".into()));
    }
    build_explicit(n, bases)
}

fn build_explicit(n: usize, bases: &[ElementSet]) -> Result<ExplicitMatroid, MatroidError> {
    let mut bases = bases.to_vec();
    bases.sort();
    bases.dedup();
    let covered = bases.iter().fold(ElementSet::EMPTY, |acc, &b| acc.union(b));
    if let Some(element) = ElementSet::full(n).difference(covered).iter().next() {
        return Err(MatroidError::Loop { element });
    }
    let table = (n <= TABLE_LIMIT).then(|| {
        let mut bits = vec![0u64; (1usize << n).div_ceil(64)];
        for b in &bases {
            for s in b.subsets() {
                let i = s.bits() as usize;
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    });
    Ok(ExplicitMatroid { n, rank: bases[0].len(), bases, table })
}

impl ExplicitMatroid {
    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }
}

impl Matroid for ExplicitMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        match &self.table {
            Some(bits) => {
                if !set.is_subset(ElementSet::full(self.n)) {
                    return false;
                }
                let i = set.bits() as usize;
                bits[i / 64] & (1 << (i % 64)) != 0
            }
            None => self.bases.iter().any(|&b| set.is_subset(b)),
        }
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::ExplicitBases
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

/// Partition matroid: at most `capacity[c]` elements from class `c`.
///
/// Zero capacities are allowed (they make the class elements loops); this
/// family is mostly used as the signature constraint in matroid intersection.
#[derive(Clone, Debug)]
pub struct PartitionMatroid {
    class_of: Vec<usize>,
    capacities: Vec<usize>,
    class_masks: Vec<ElementSet>,
    rank: usize,
}

pub fn make_partition(class_of: &[usize], capacities: &[usize]) -> Result<PartitionMatroid, MatroidError> {
    check_size(class_of.len())?;
    let mut class_masks = vec![ElementSet::EMPTY; capacities.len()];
    for (e, &c) in class_of.iter().enumerate() {
        let Some(mask) = class_masks.get_mut(c) else {
            return Err(MatroidError::Invalid(format!("element {e} is in class {c} but only {} classes exist", capacities.len())));
        };
        mask.insert(e);
    }
    for (c, (&cap, mask)) in capacities.iter().zip(&class_masks).enumerate() {
        if cap > mask.len() {
            return Err(MatroidError::Invalid(format!("class {c} has capacity {cap} but only {} elements", mask.len())));
        }
    }
    let rank = capacities.iter().sum();
    Ok(PartitionMatroid { class_of: class_of.to_vec(), capacities: capacities.to_vec(), class_masks, rank })
}

impl PartitionMatroid {
    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.class_of.len()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.class_masks.iter().zip(&self.capacities).all(|(&mask, &cap)| set.intersection(mask).len() <= cap)
    }
    fn kind(&self) -> MatroidKind {
        MatroidKind::Partition
    }
    fn rank_of(&self, set: ElementSet) -> usize {
        self.class_masks.iter().zip(&self.capacities).map(|(&mask, &cap)| set.intersection(mask).len().min(cap)).sum()
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

/// Number of bases of a uniform matroid, for quick sanity checks.
pub fn uniform_base_count(n: usize, r: usize) -> u64 {
    binomial(n as u64, r as u64)
}
