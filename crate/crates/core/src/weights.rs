//! Exact element weights.

use num_rational::Rational64;
use thiserror::Error;

use crate::matroid::ElementSet;

pub type Weight = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no weight given for element {0}")]
    Missing(usize),
    #[error("weight denominators overflow when scaled to a common denominator")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weights {
    values: Vec<Weight>,
}

impl Weights {
    pub fn new(values: Vec<Weight>) -> Self {
        Weights { values }
    }

    pub fn zeros(n: usize) -> Self {
        Weights { values: vec![Weight::from_integer(0); n] }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Weights { values: values.iter().map(|&v| Weight::from_integer(v)).collect() }
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: usize) -> Weight {
        self.values[e]
    }

    pub fn total(&self, set: ElementSet) -> Weight {
        set.iter().map(|e| self.values[e]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v.numer() == 0)
    }

    /// Weights of the elements `map[0], map[1], ...`.
    pub fn restrict(&self, map: &[usize]) -> Weights {
        Weights { values: map.iter().map(|&e| self.values[e]).collect() }
    }

    /// Integer costs sharing a common denominator: `values[e] = costs[e] / denom`.
    pub fn scaled(&self) -> Result<(Vec<i64>, i64), WeightError> {
        let mut denom: i64 = 1;
        for v in &self.values {
            let d = *v.denom();
            let g = gcd(denom, d);
            denom = (denom / g).checked_mul(d).ok_or(WeightError::Overflow)?;
        }
        let costs = self
            .values
            .iter()
            .map(|v| v.numer().checked_mul(denom / v.denom()).ok_or(WeightError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok((costs, denom))
    }

    /// Parses lines `<element-index> <integer-or-rational>`; every element in
    /// `0..n` must appear exactly once.
    pub fn parse(text: &str, n: usize) -> Result<Self, WeightError> {
        let mut values: Vec<Option<Weight>> = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| WeightError::Parse { line, msg: msg.to_string() };
            let mut words = content.split_whitespace();
            let (Some(idx), Some(val), None) = (words.next(), words.next(), words.next()) else {
                return Err(err("expected `<element-index> <weight>`"));
            };
            let idx: usize = idx.parse().map_err(|_| err("bad element index"))?;
            if idx >= n {
                return Err(err(&format!("element {idx} out of range 0..{n}")));
            }
            let val = parse_weight(val).ok_or_else(|| err(&format!("bad weight `{val}`")))?;
            if values[idx].replace(val).is_some() {
                return Err(err(&format!("element {idx} listed twice")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, v)| v.ok_or(WeightError::Missing(e)))
            .collect::<Result<_, _>>()?;
        Ok(Weights { values })
    }
}

/// Parses `7`, `-3` or `5/4`; floats are rejected.
pub fn parse_weight(text: &str) -> Option<Weight> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Weight::new(n, d))
        }
        None => text.trim().parse::<i64>().ok().map(Weight::from_integer),
    }
}

pub fn format_weight(w: Weight) -> String {
    if *w.denom() == 1 {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}
