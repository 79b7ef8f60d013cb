//! Small-matroid catalogs.
//!
//! One entry per line: `<id> <n> <r> <base>;<base>;...`, each base as
//! comma-joined element indices (`-` for the empty base). `#` starts a comment.
//!
//! Revlex files (as published for complete lists of small matroids) start with
//! a header `n r` followed by one basis-indicator string per matroid: position
//! `i` refers to the `i`-th `r`-subset in reverse-lexicographic order (sets
//! compared by their largest elements first), `*` or `1` marks a base and `0`
//! a non-base.

use std::path::Path;

use thiserror::Error;

use crate::matroid::{
    binomial, find_blocks, make_explicit_trusted, validate_bases, BaseSet, ElementSet, MatroidError, MatroidRef,
    MAX_ELEMENTS,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: entry {id}: {source}")]
    Entry { line: usize, id: String, source: MatroidError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub n: usize,
    pub r: usize,
    pub bases: Vec<BaseSet>,
}

impl CatalogEntry {
    /// Base sizes and the exchange axiom. Loops are allowed here.
    pub fn validate(&self) -> Result<(), MatroidError> {
        if self.n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(self.n));
        }
        let ground = ElementSet::full(self.n);
        for b in &self.bases {
            if b.len() != self.r {
                return Err(MatroidError::Invalid(format!("base {b} has size {}, expected {}", b.len(), self.r)));
            }
            if !b.is_subset(ground) {
                return Err(MatroidError::Invalid(format!("base {b} leaves the ground set 0..{}", self.n)));
            }
        }
        validate_bases(self.n, &self.bases)
    }

    /// Elements in no base.
    pub fn loops(&self) -> ElementSet {
        let covered = self.bases.iter().fold(ElementSet::EMPTY, |acc, &b| acc.union(b));
        covered.complement(self.n)
    }

    /// The entry as an explicit matroid; fails for entries with loops.
    pub fn to_matroid(&self) -> Result<MatroidRef, MatroidError> {
        Ok(std::sync::Arc::new(make_explicit_trusted(self.n, &self.bases)?))
    }

    /// Two disjoint bases covering the ground set, if the entry has them.
    pub fn block_pair(&self) -> Option<(BaseSet, BaseSet)> {
        if self.n != 2 * self.r || !self.loops().is_empty() {
            return None;
        }
        find_blocks(&*self.to_matroid().ok()?)
    }

    pub fn render(&self) -> String {
        let bases: Vec<String> = self
            .bases
            .iter()
            .map(|b| if b.is_empty() { "-".to_string() } else { b.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",") })
            .collect();
        format!("{} {} {} {}", self.id, self.n, self.r, bases.join(";"))
    }
}

#[derive(Debug, Default)]
pub struct LoadedCatalog {
    pub entries: Vec<CatalogEntry>,
    /// `(line, message)` for entries dropped in lenient mode.
    pub skipped: Vec<(usize, String)>,
}

fn parse_entry(line: usize, content: &str) -> Result<CatalogEntry, CatalogError> {
    let err = |msg: String| CatalogError::Parse { line, msg };
    let words: Vec<&str> = content.split_whitespace().collect();
    let [id, n, r, rest @ ..] = words.as_slice() else {
        return Err(err("expected `<id> <n> <r> <bases>`".into()));
    };
    let n: usize = n.parse().map_err(|_| err(format!("bad n `{n}`")))?;
    let r: usize = r.parse().map_err(|_| err(format!("bad r `{r}`")))?;
    let bases_text = match rest {
        [one] => *one,
        [] => return Err(err(format!("entry {id} lists no bases"))),
        _ => return Err(err(format!("entry {id}: unexpected whitespace inside the base list"))),
    };
    let mut bases = Vec::new();
    for word in bases_text.split(';').filter(|w| !w.is_empty()) {
        let base = if word == "-" {
            ElementSet::EMPTY
        } else {
            let mut set = ElementSet::EMPTY;
            for e in word.split(',') {
                let e: usize = e.parse().map_err(|_| err(format!("entry {id}: bad element `{e}`")))?;
                if e >= n || e >= MAX_ELEMENTS {
                    return Err(err(format!("entry {id}: element {e} outside 0..{n}")));
                }
                set.insert(e);
            }
            set
        };
        bases.push(base);
    }
    let entry = CatalogEntry { id: id.to_string(), n, r, bases };
    entry.validate().map_err(|source| CatalogError::Entry { line, id: entry.id.clone(), source })?;
    Ok(entry)
}

/// Entries in file order. With `lenient`, invalid entries are skipped and
/// recorded instead of aborting.
pub fn parse_catalog(text: &str, lenient: bool) -> Result<LoadedCatalog, CatalogError> {
    let mut out = LoadedCatalog::default();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match parse_entry(i + 1, content) {
            Ok(entry) => out.entries.push(entry),
            Err(e) if lenient => out.skipped.push((i + 1, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn load_catalog(path: &Path, lenient: bool) -> Result<LoadedCatalog, CatalogError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
    parse_catalog(&text, lenient)
}

pub fn render_catalog(entries: &[CatalogEntry]) -> String {
    entries.iter().map(|e| e.render() + "\n").collect()
}

/// The `r`-subsets of `0..n` in reverse-lexicographic order.
pub fn revlex_subsets(n: usize, r: usize) -> Vec<BaseSet> {
    let mut subsets: Vec<BaseSet> = ElementSet::full(n).k_subsets(r).collect();
    subsets.sort_by(|a, b| a.to_vec().iter().rev().cmp(b.to_vec().iter().rev()));
    subsets
}

/// Converts a revlex file to catalog entries with ids `<prefix><index>`
/// (0-based, zero-padded to three digits).
pub fn import_revlex(text: &str, prefix: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(CatalogError::Parse { line: 1, msg: "missing `n r` header".into() })?;
    let herr = || CatalogError::Parse { line: hline, msg: "expected header `n r`".into() };
    let (n, r) = header.split_once(char::is_whitespace).ok_or_else(herr)?;
    let n: usize = n.trim().parse().map_err(|_| herr())?;
    let r: usize = r.trim().parse().map_err(|_| herr())?;
    if n > MAX_ELEMENTS || r > n {
        return Err(herr());
    }
    let subsets = revlex_subsets(n, r);
    let expected = binomial(n as u64, r as u64) as usize;
    let mut out = Vec::new();
    for (line, word) in lines {
        if word.chars().count() != expected {
            return Err(CatalogError::Parse {
                line,
                msg: format!("indicator has {} positions, expected C({n},{r}) = {expected}", word.chars().count()),
            });
        }
        let mut bases = Vec::new();
        for (c, &s) in word.chars().zip(&subsets) {
            match c {
                '*' | '1' => bases.push(s),
                '0' => {}
                other => return Err(CatalogError::Parse { line, msg: format!("bad indicator character `{other}`") }),
            }
        }
        bases.sort();
        let entry = CatalogEntry { id: format!("{prefix}{:03}", out.len()), n, r, bases };
        entry.validate().map_err(|source| CatalogError::Entry { line, id: entry.id.clone(), source })?;
        out.push(entry);
    }
    Ok(out)
}

/// Keeps the entries whose ground set splits into two disjoint bases.
pub fn filter_blocks<I: IntoIterator<Item = CatalogEntry>>(entries: I) -> impl Iterator<Item = CatalogEntry> {
    entries.into_iter().filter(|e| e.block_pair().is_some())
}

/// The bundled revlex list of all rank-3 matroids on 6 elements.
pub const RANK3_SIZE6_REVLEX: &str = include_str!("../../data/rank3_size6.revlex");
/// The bundled revlex list of all rank-4 matroids on 8 elements.
pub const RANK4_SIZE8_REVLEX: &str = include_str!("../../data/rank4_size8.revlex");
