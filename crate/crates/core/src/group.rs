//! Finite abelian groups in invariant-factor form.
//!
//! A group is `Z_{m_1} x ... x Z_{m_t}` with `m_1 | m_2 | ... | m_t`. Elements
//! carry their residue vector; hot loops work on dense element indices instead
//! (see [`GroupSpec::index_of`]), where index order equals lexicographic order
//! of residue vectors.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest group the brute-force Davenport search accepts.
pub const DAVENPORT_BRUTE_FORCE_MAX_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse group spec `{0}`: expected something like Z4 or Z2xZ6")]
    ParseSpec(String),
    #[error("cannot parse element `{text}` of {group}")]
    ParseElement { text: String, group: String },
    #[error("factors {0:?} are not in invariant-factor form (each >= 2, each dividing the next)")]
    NotInvariantForm(Vec<u32>),
    #[error("element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("subgroup belongs to {found}, expected {expected}")]
    ParentMismatch { expected: String, found: String },
    #[error("element set is not a subgroup of {0}: {1}")]
    NotASubgroup(String, String),
    #[error("Davenport formula M(G) is only known to equal D(G) for p-groups and groups with at most two invariant factors; {0} is neither")]
    FormulaOutOfRange(String),
    #[error("brute-force Davenport search is capped at |G| <= {max}; {group} has order {order}")]
    TooLarge { group: String, order: usize, max: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

/// A group element as its residue vector, one residue per invariant factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.is_empty() {
            return write!(f, "0");
        }
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Whether closeness `|G| - 1` is a proven fact for the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosenessClass {
    Proven,
    Unproven,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DavenportMethod {
    Formula,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<u32>,
    order: usize,
}

impl GroupSpec {
    /// Builds a group from factors already in invariant-factor form.
    pub fn new(factors: Vec<u32>) -> Result<Self, GroupError> {
        let ok = factors.iter().all(|&m| m >= 2) && factors.windows(2).all(|w| w[1] % w[0] == 0);
        if !ok {
            return Err(GroupError::NotInvariantForm(factors));
        }
        let order = factors.iter().map(|&m| m as usize).product();
        Ok(GroupSpec { factors, order })
    }

    /// Builds `Z_{m_1} x ... x Z_{m_k}` for arbitrary moduli and canonicalizes
    /// to invariant-factor form (so `[2, 3]` becomes `Z6`).
    pub fn from_moduli(moduli: &[u32]) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::NotInvariantForm(moduli.to_vec()));
        }
        // prime -> exponents of that prime across the cyclic factors
        let mut by_prime: Vec<(u32, Vec<u32>)> = Vec::new();
        for &m in moduli {
            for (p, e) in factorize(m) {
                match by_prime.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, exps)) => exps.push(e),
                    None => by_prime.push((p, vec![e])),
                }
            }
        }
        let len = by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        for (_, exps) in by_prime.iter_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            exps.resize(len, 0);
        }
        let mut factors: Vec<u32> = (0..len)
            .map(|j| by_prime.iter().map(|(p, exps)| p.pow(exps[j])).product())
            .collect();
        factors.reverse();
        GroupSpec::new(factors)
    }

    pub fn cyclic(m: u32) -> Self {
        GroupSpec::from_moduli(&[m]).expect("cyclic modulus must be positive")
    }

    pub fn trivial() -> Self {
        GroupSpec { factors: Vec::new(), order: 1 }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    /// True when the order is a prime power (every element has p-power order).
    pub fn is_p_group(&self) -> bool {
        factorize(self.order as u32).len() <= 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.factors.len()] }
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement, GroupError> {
        if residues.len() != self.factors.len() {
            return Err(GroupError::Mismatch { element: format!("{residues:?}"), group: self.to_string() });
        }
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &m)| r.rem_euclid(m as i64) as u32)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.residues.len() == self.factors.len() && g.residues.iter().zip(&self.factors).all(|(&r, &m)| r < m)
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::Mismatch { element: g.to_string(), group: self.to_string() })
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a.residues.iter().zip(&self.factors).map(|(&x, &m)| (m - x) % m).collect(),
        })
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.add(a, &self.neg(b)?)
    }

    /// `n * g`, the n-fold sum of `g`.
    pub fn scalar_mul(&self, n: u64, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| ((n % m as u64) * x as u64 % m as u64) as u32)
                .collect(),
        })
    }

    pub fn sum<'a, I>(&self, items: I) -> Result<GroupElement, GroupError>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        items.into_iter().try_fold(self.zero(), |acc, g| self.add(&acc, g))
    }

    /// Dense index of an element; index order is lexicographic residue order.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        debug_assert!(index < self.order);
        let mut residues = vec![0; self.factors.len()];
        for (slot, &m) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % m as usize) as u32;
            index /= m as usize;
        }
        GroupElement { residues }
    }

    /// All elements in index (lexicographic) order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        if let [m] = self.factors[..] {
            return (a + b) % m as usize;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut stride = 1;
        for &m in self.factors.iter().rev() {
            let m = m as usize;
            out += ((a % m + b % m) % m) * stride;
            a /= m;
            b /= m;
            stride *= m;
        }
        out
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        self.index_of(&self.neg(&self.element_at(a)).expect("index in range"))
    }

    /// Full addition table indexed by `a * order + b`.
    pub fn addition_table(&self) -> Vec<u16> {
        let n = self.order;
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(self.add_idx(a, b) as u16);
            }
        }
        table
    }

    /// Parses an element as comma-joined residues, or a bare integer for
    /// cyclic groups. Residues are reduced modulo their factor.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, GroupError> {
        let err = || GroupError::ParseElement { text: text.to_string(), group: self.to_string() };
        let parts: Vec<i64> = text
            .trim()
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        if self.factors.is_empty() {
            return if parts == [0] { Ok(self.zero()) } else { Err(err()) };
        }
        if parts.len() != self.factors.len() {
            return Err(err());
        }
        self.element(&parts)
    }

    /// `M(G) = sum (m_i - 1) + 1`.
    pub fn davenport_lower_bound(&self) -> usize {
        self.factors.iter().map(|&m| m as usize - 1).sum::<usize>() + 1
    }

    pub fn davenport(&self, method: DavenportMethod) -> Result<usize, GroupError> {
        match method {
            DavenportMethod::Formula => {
                if self.is_p_group() || self.factors.len() <= 2 {
                    Ok(self.davenport_lower_bound())
                } else {
                    Err(GroupError::FormulaOutOfRange(self.to_string()))
                }
            }
            DavenportMethod::BruteForce => self.davenport_brute_force(),
        }
    }

    /// Davenport constant by the formula where it is known to be exact,
    /// otherwise by brute force.
    pub fn davenport_constant(&self) -> Result<usize, GroupError> {
        self.davenport(DavenportMethod::Formula)
            .or_else(|_| self.davenport(DavenportMethod::BruteForce))
    }

    fn davenport_brute_force(&self) -> Result<usize, GroupError> {
        if self.order > DAVENPORT_BRUTE_FORCE_MAX_ORDER {
            return Err(GroupError::TooLarge {
                group: self.to_string(),
                order: self.order,
                max: DAVENPORT_BRUTE_FORCE_MAX_ORDER,
            });
        }
        let table = self.addition_table();
        let mut search = ZeroSumFreeSearch { order: self.order, table: &table, memo: HashMap::new() };
        let longest = search.longest(0, 1);
        let cap = self.davenport_lower_bound() + 4;
        if longest + 1 >= cap {
            return Err(GroupError::Internal(format!(
                "zero-sum-free sequence of length {longest} in {self} exceeds the search window {cap}"
            )));
        }
        Ok(longest + 1)
    }

    /// `stab(F) = { g : g + F = F }`.
    pub fn stabilizer(&self, set: &BTreeSet<GroupElement>) -> Result<Subgroup, GroupError> {
        let mut member = vec![false; self.order];
        for g in set {
            self.check(g)?;
            member[self.index_of(g)] = true;
        }
        let members: Vec<usize> = (0..self.order).filter(|&i| member[i]).collect();
        let elements = (0..self.order)
            .filter(|&g| members.iter().all(|&x| member[self.add_idx(g, x)]))
            .map(|g| self.element_at(g))
            .collect();
        Ok(Subgroup { parent: self.clone(), elements })
    }

    /// Partition of the group into cosets of `h`; each coset is represented by
    /// its lexicographically smallest element and cosets are listed in
    /// representative order.
    pub fn cosets(&self, h: &Subgroup) -> Result<CosetPartition, GroupError> {
        if h.parent != *self {
            return Err(GroupError::ParentMismatch { expected: self.to_string(), found: h.parent.to_string() });
        }
        let sub: Vec<usize> = h.elements.iter().map(|g| self.index_of(g)).collect();
        let mut coset_of = vec![usize::MAX; self.order];
        let mut cosets = Vec::new();
        let mut representatives = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = cosets.len();
            let mut coset = BTreeSet::new();
            for &s in &sub {
                let x = self.add_idx(g, s);
                coset_of[x] = id;
                coset.insert(self.element_at(x));
            }
            representatives.push(self.element_at(g));
            cosets.push(coset);
        }
        Ok(CosetPartition { subgroup: h.clone(), cosets, representatives, coset_of })
    }

    pub fn closeness_class(&self) -> ClosenessClass {
        let primes = factorize(self.order as u32);
        let omega: u32 = primes.iter().map(|&(_, e)| e).sum();
        let prime_power_cyclic = self.is_cyclic() && primes.len() == 1;
        if self.order == 1 || omega == 2 || prime_power_cyclic {
            ClosenessClass::Proven
        } else {
            ClosenessClass::Unproven
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::ParseSpec(s.to_string());
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(err());
        }
        let moduli = trimmed
            .split(['x', 'X'])
            .map(|part| {
                let part = part.trim();
                let digits = part.strip_prefix(['Z', 'z']).ok_or_else(err)?;
                match digits.parse::<u32>() {
                    Ok(m) if m >= 1 => Ok(m),
                    _ => Err(err()),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupSpec::from_moduli(&moduli)
    }
}

struct ZeroSumFreeSearch<'a> {
    order: usize,
    table: &'a [u16],
    memo: HashMap<(u32, usize), usize>,
}

impl ZeroSumFreeSearch<'_> {
    /// Longest extension of a zero-sum-free sequence whose nonempty subsums
    /// form `sums`, using only elements with index >= `start`.
    fn longest(&mut self, sums: u32, start: usize) -> usize {
        if let Some(&v) = self.memo.get(&(sums, start)) {
            return v;
        }
        let mut best = 0;
        for x in start..self.order {
            let mut next = sums | (1 << x);
            for s in 0..self.order {
                if sums & (1 << s) != 0 {
                    next |= 1 << self.table[s * self.order + x];
                }
            }
            if next & 1 == 0 {
                best = best.max(1 + self.longest(next, x));
            }
        }
        self.memo.insert((sums, start), best);
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: GroupSpec,
    elements: BTreeSet<GroupElement>,
}

impl Subgroup {
    /// Validates that `elements` is a subgroup of `parent`.
    pub fn new(parent: GroupSpec, elements: BTreeSet<GroupElement>) -> Result<Self, GroupError> {
        for g in &elements {
            parent.check(g)?;
        }
        let not_sub = |why: &str| GroupError::NotASubgroup(parent.to_string(), why.to_string());
        if !elements.contains(&parent.zero()) {
            return Err(not_sub("missing identity"));
        }
        for a in &elements {
            if !elements.contains(&parent.neg(a)?) {
                return Err(not_sub(&format!("missing inverse of {a}")));
            }
            for b in &elements {
                if !elements.contains(&parent.add(a, b)?) {
                    return Err(not_sub(&format!("{a} + {b} escapes")));
                }
            }
        }
        Ok(Subgroup { parent, elements })
    }

    pub fn whole(parent: &GroupSpec) -> Self {
        Subgroup { parent: parent.clone(), elements: parent.elements().collect() }
    }

    pub fn trivial(parent: &GroupSpec) -> Self {
        Subgroup { parent: parent.clone(), elements: BTreeSet::from([parent.zero()]) }
    }

    pub fn parent(&self) -> &GroupSpec {
        &self.parent
    }

    pub fn elements(&self) -> &BTreeSet<GroupElement> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetPartition {
    subgroup: Subgroup,
    cosets: Vec<BTreeSet<GroupElement>>,
    representatives: Vec<GroupElement>,
    coset_of: Vec<usize>,
}

impl CosetPartition {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[BTreeSet<GroupElement>] {
        &self.cosets
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    /// Coset number of the element with the given dense index.
    pub fn coset_of_index(&self, index: usize) -> usize {
        self.coset_of[index]
    }
}

/// Prime factorization by trial division, ascending primes.
pub(crate) fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}
