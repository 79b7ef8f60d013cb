use rand::Rng;
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSpec};
use crate::matroid::ElementSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelingError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no label given for element {0}")]
    Missing(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A map from ground-set elements to group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    group: GroupSpec,
    labels: Vec<GroupElement>,
    index: Vec<usize>,
}

impl Labeling {
    pub fn new(group: GroupSpec, labels: Vec<GroupElement>) -> Result<Self, GroupError> {
        for g in &labels {
            if !group.contains(g) {
                return Err(GroupError::Mismatch { element: g.to_string(), group: group.to_string() });
            }
        }
        let index = labels.iter().map(|g| group.index_of(g)).collect();
        Ok(Labeling { group, labels, index })
    }

    /// Labels given as dense element indices (see [`GroupSpec::index_of`]).
    pub fn from_indices(group: GroupSpec, index: Vec<usize>) -> Self {
        assert!(index.iter().all(|&i| i < group.order()), "label index out of range");
        let labels = index.iter().map(|&i| group.element_at(i)).collect();
        Labeling { group, labels, index }
    }

    /// Cyclic-group convenience: labels given as integers reduced mod `m`.
    pub fn cyclic(m: u32, values: &[i64]) -> Self {
        let group = GroupSpec::cyclic(m);
        let labels = values.iter().map(|&v| group.element(&[v]).expect("cyclic group")).collect();
        Labeling::new(group, labels).expect("reduced labels")
    }

    pub fn constant(group: GroupSpec, n: usize, g: &GroupElement) -> Result<Self, GroupError> {
        Labeling::new(group, vec![g.clone(); n])
    }

    pub fn random<R: Rng + ?Sized>(group: GroupSpec, n: usize, rng: &mut R) -> Self {
        let order = group.order();
        Labeling::from_indices(group, (0..n).map(|_| rng.gen_range(0..order)).collect())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn labels(&self) -> &[GroupElement] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &GroupElement {
        &self.labels[e]
    }

    pub fn indices(&self) -> &[usize] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `ℓ(S)`, the group sum of the labels in `set`.
    pub fn label_sum(&self, set: ElementSet) -> GroupElement {
        self.group.element_at(self.label_sum_index(set))
    }

    pub fn label_sum_index(&self, set: ElementSet) -> usize {
        set.iter().fold(0, |acc, e| self.group.add_idx(acc, self.index[e]))
    }

    /// `E(g)`.
    pub fn fiber(&self, g: &GroupElement) -> ElementSet {
        let gi = self.group.index_of(g);
        self.fiber_of_index(gi)
    }

    pub fn fiber_of_index(&self, gi: usize) -> ElementSet {
        self.index.iter().enumerate().filter(|(_, &i)| i == gi).map(|(e, _)| e).collect()
    }

    /// `|E(g)|` for every group element in index order.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.group.order()];
        for &i in &self.index {
            sizes[i] += 1;
        }
        sizes
    }

    /// The labeling of the elements `map[0], map[1], ...`.
    pub fn restrict(&self, map: &[usize]) -> Labeling {
        Labeling::from_indices(self.group.clone(), map.iter().map(|&e| self.index[e]).collect())
    }

    /// Adds `h` to every label.
    pub fn translate(&self, h: &GroupElement) -> Result<Labeling, GroupError> {
        let labels = self.labels.iter().map(|g| self.group.add(g, h)).collect::<Result<_, _>>()?;
        Labeling::new(self.group.clone(), labels)
    }

    /// Parses lines `<element-index> <group-element>`; every element in
    /// `0..n` needs exactly one label.
    pub fn parse(text: &str, group: &GroupSpec, n: usize) -> Result<Self, LabelingError> {
        let mut labels: Vec<Option<GroupElement>> = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| LabelingError::Parse { line, msg };
            let mut words = content.split_whitespace();
            let (Some(idx), Some(val), None) = (words.next(), words.next(), words.next()) else {
                return Err(err("expected `<element-index> <group-element>`".into()));
            };
            let idx: usize = idx.parse().map_err(|_| err(format!("bad element index `{idx}`")))?;
            if idx >= n {
                return Err(err(format!("element {idx} out of range 0..{n}")));
            }
            let g = group.parse_element(val).map_err(|e| err(e.to_string()))?;
            if labels[idx].replace(g).is_some() {
                return Err(err(format!("element {idx} labeled twice")));
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(e, g)| g.ok_or(LabelingError::Missing(e)))
            .collect::<Result<_, _>>()?;
        Ok(Labeling::new(group.clone(), labels)?)
    }

    /// File form: one `<element-index> <group-element>` line per element.
    pub fn to_file_string(&self) -> String {
        self.labels.iter().enumerate().map(|(e, g)| format!("{e} {g}\n")).collect()
    }

    /// Compact one-word form, labels joined by `/`.
    pub fn compact(&self) -> String {
        let parts: Vec<String> = self.labels.iter().map(|g| g.to_string()).collect();
        parts.join("/")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_sums() {
        let z4 = GroupSpec::cyclic(4);
        let ones = Labeling::cyclic(4, &[1; 6]);
        assert!(ones.label_sum(ElementSet::EMPTY).is_zero());
        assert_eq!(ones.label_sum(ElementSet::full(6)), z4.element(&[2]).unwrap());

        let v: GroupSpec = "Z2xZ2".parse().unwrap();
        let labels = vec![
            v.element(&[1, 0]).unwrap(),
            v.element(&[1, 1]).unwrap(),
            v.element(&[0, 1]).unwrap(),
        ];
        let l = Labeling::new(v.clone(), labels).unwrap();
        // componentwise parity: (1+1+0, 0+1+1) = (0, 0)
        assert!(l.label_sum(ElementSet::full(3)).is_zero());
        assert_eq!(l.label_sum([0, 1].iter().collect()), v.element(&[0, 1]).unwrap());
    }

    #[test]
    fn parse_round_trip() {
        let v: GroupSpec = "Z2xZ4".parse().unwrap();
        let l = Labeling::parse("0 1,3\n2 0,0\n1 1,1 # x\n", &v, 3).unwrap();
        assert_eq!(l.compact(), "1,3/1,1/0,0");
        assert_eq!(Labeling::parse(&l.to_file_string(), &v, 3).unwrap(), l);
        assert_eq!(Labeling::parse("0 1,3\n", &v, 2), Err(LabelingError::Missing(1)));
        assert!(Labeling::parse("0 1\n", &v, 1).is_err());
        assert!(Labeling::parse("0 1,1\n0 1,1\n", &v, 1).is_err());
    }

    #[test]
    fn fibers() {
        let l = Labeling::cyclic(3, &[0, 1, 1, 2, 0]);
        assert_eq!(l.fiber_sizes(), vec![2, 2, 1]);
        assert_eq!(l.fiber_of_index(1), [1, 2].iter().collect());
        assert_eq!(l.restrict(&[3, 4]).indices(), &[2, 0]);
    }
}
