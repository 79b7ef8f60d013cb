//! Line-oriented matroid files.
//!
//! ```text
//! matroid uniform      matroid graphic     matroid linear     matroid explicit
//! n 6                  vertices 4          field 3            n 4
//! r 3                  edge 0 1            rows 2             base 0 1
//!                      edge 1 2            1 0 1 1            base 0 2
//!                                          0 1 1 2
//! ```
//!
//! `matroid partition` takes `n <n>` followed by `class <capacity> <elements..>`
//! lines. Everything after `#` is a comment.

use std::sync::Arc;

use super::{
    make_explicit, make_explicit_trusted, make_graphic, make_linear, make_partition, make_uniform, ElementSet,
    MatroidError, MatroidRef,
};

fn parse_err(line: usize, msg: impl Into<String>) -> MatroidError {
    MatroidError::Invalid(format!("line {line}: {}", msg.into()))
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("").trim();
                (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
            })
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        self.pos += 1;
        item
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(0, |(l, _)| *l)
    }

    /// Reads `<key> <value>`.
    fn keyed(&mut self, key: &str) -> Result<usize, MatroidError> {
        let (line, words) = self.next().ok_or_else(|| parse_err(self.last_line(), format!("missing `{key}` line")))?;
        match words.as_slice() {
            [k, v] if *k == key => v.parse().map_err(|_| parse_err(line, format!("bad value for `{key}`"))),
            _ => Err(parse_err(line, format!("expected `{key} <value>`"))),
        }
    }
}

fn numbers<T: std::str::FromStr>(line: usize, words: &[&str]) -> Result<Vec<T>, MatroidError> {
    words.iter().map(|w| w.parse().map_err(|_| parse_err(line, format!("bad number `{w}`")))).collect()
}

/// Parses a matroid file. `trust` skips exchange-axiom validation of
/// explicit matroids (and lifts their size limit).
pub fn parse_matroid(text: &str, trust: bool) -> Result<MatroidRef, MatroidError> {
    let mut lines = Lines::new(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty matroid file"))?;
    let kind = match header.as_slice() {
        ["matroid", kind] => *kind,
        _ => return Err(parse_err(line, "expected `matroid <kind>`")),
    };
    let m: MatroidRef = match kind {
        "uniform" => {
            let n = lines.keyed("n")?;
            let r = lines.keyed("r")?;
            Arc::new(make_uniform(n, r)?)
        }
        "graphic" => {
            let v = lines.keyed("vertices")?;
            let mut edges = Vec::new();
            while let Some((line, words)) = lines.next() {
                match words.as_slice() {
                    ["edge", rest @ ..] if rest.len() == 2 => {
                        let ends: Vec<usize> = numbers(line, rest)?;
                        edges.push((ends[0], ends[1]));
                    }
                    _ => return Err(parse_err(line, "expected `edge <u> <w>`")),
                }
            }
            Arc::new(make_graphic(v, &edges)?)
        }
        "linear" => {
            let p = lines.keyed("field")?;
            let r = lines.keyed("rows")?;
            let mut rows = Vec::with_capacity(r);
            for _ in 0..r {
                let (line, words) = lines.next().ok_or_else(|| parse_err(lines.last_line(), "missing matrix row"))?;
                rows.push(numbers::<i64>(line, &words)?);
            }
            if let Some((line, _)) = lines.next() {
                return Err(parse_err(line, "unexpected content after matrix"));
            }
            Arc::new(make_linear(p as u64, &rows)?)
        }
        "explicit" => {
            let n = lines.keyed("n")?;
            let mut bases = Vec::new();
            while let Some((line, words)) = lines.next() {
                match words.as_slice() {
                    ["base", rest @ ..] => {
                        let elems: Vec<usize> = numbers(line, rest)?;
                        if elems.iter().any(|&e| e >= n) {
                            return Err(parse_err(line, format!("element out of range 0..{n}")));
                        }
                        bases.push(elems.iter().collect::<ElementSet>());
                    }
                    _ => return Err(parse_err(line, "expected `base <elements..>`")),
                }
            }
            if trust {
                Arc::new(make_explicit_trusted(n, &bases)?)
            } else {
                Arc::new(make_explicit(n, &bases)?)
            }
        }
        "partition" => {
            let n = lines.keyed("n")?;
            let mut class_of = vec![usize::MAX; n];
            let mut caps = Vec::new();
            while let Some((line, words)) = lines.next() {
                match words.as_slice() {
                    ["class", cap, rest @ ..] => {
                        let cap: usize = cap.parse().map_err(|_| parse_err(line, "bad capacity"))?;
                        for e in numbers::<usize>(line, rest)? {
                            if e >= n || class_of[e] != usize::MAX {
                                return Err(parse_err(line, format!("element {e} out of range or repeated")));
                            }
                            class_of[e] = caps.len();
                        }
                        caps.push(cap);
                    }
                    _ => return Err(parse_err(line, "expected `class <capacity> <elements..>`")),
                }
            }
            if let Some(e) = class_of.iter().position(|&c| c == usize::MAX) {
                return Err(parse_err(lines.last_line(), format!("element {e} is in no class")));
            }
            let m = make_partition(&class_of, &caps)?;
            if let Some(&e) = super::loops(&m).first() {
                return Err(MatroidError::Loop { element: e });
            }
            Arc::new(m)
        }
        other => return Err(parse_err(line, format!("unknown matroid kind `{other}`"))),
    };
    Ok(m)
}
