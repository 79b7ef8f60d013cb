//! Block isolation predicates and exhaustive labeling scans.
//!
//! Labelings of `n` elements over `G` are numbered `0..|G|^n` with element 0
//! as the most significant base-`|G|` digit. Translation reduction keeps the
//! labelings whose last element is labeled 0.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{check_labeling, guarded_bases, LabError, LAB_LABELING_GUARD};
use crate::group::GroupSpec;
use crate::matroid::{BaseSet, Matroid, MatroidRef};
use crate::solver::Labeling;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Some block is the only base with its label.
    Block,
    /// Some block is the only block with its label.
    StrongBlock,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::Block => "block",
            Predicate::StrongBlock => "strong-block",
        })
    }
}

impl FromStr for Predicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "block" => Ok(Predicate::Block),
            "strong-block" | "strong_block" => Ok(Predicate::StrongBlock),
            _ => Err(format!("unknown predicate `{s}` (block, strong-block)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    None,
    Translation,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reduction::None => "none",
            Reduction::Translation => "translation",
        })
    }
}

impl FromStr for Reduction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Reduction::None),
            "translation" => Ok(Reduction::Translation),
            _ => Err(format!("unknown reduction `{s}` (none, translation)")),
        }
    }
}

fn require_block_candidate(m: &dyn Matroid) -> Result<(), LabError> {
    let (n, r) = (m.ground_size(), m.rank());
    if n != 2 * r {
        return Err(LabError::Usage(format!("not a block matroid candidate: n = {n}, r = {r}")));
    }
    Ok(())
}

fn isolating(m: &dyn Matroid, labeling: &Labeling, predicate: Predicate) -> Result<Option<BaseSet>, LabError> {
    require_block_candidate(m)?;
    check_labeling(m, labeling)?;
    let bases = guarded_bases(m)?;
    let ground = m.ground();
    let blocks: Vec<BaseSet> = bases.iter().copied().filter(|&b| m.is_independent(ground.difference(b))).collect();
    let population = match predicate {
        Predicate::Block => &bases,
        Predicate::StrongBlock => &blocks,
    };
    let mut count = vec![0u64; labeling.group().order()];
    for &b in population {
        count[labeling.label_sum_index(b)] += 1;
    }
    Ok(blocks.into_iter().find(|&b| count[labeling.label_sum_index(b)] == 1))
}

/// The least block that is the unique base with its label, if any.
pub fn is_block_isolating(m: &dyn Matroid, labeling: &Labeling) -> Result<Option<BaseSet>, LabError> {
    isolating(m, labeling, Predicate::Block)
}

/// The least block that is the unique block with its label, if any.
pub fn is_strong_block_isolating(m: &dyn Matroid, labeling: &Labeling) -> Result<Option<BaseSet>, LabError> {
    isolating(m, labeling, Predicate::StrongBlock)
}

/// `|G|^n`, or `None` on overflow.
pub fn labeling_count(group: &GroupSpec, n: usize) -> Option<u64> {
    (group.order() as u64).checked_pow(n as u32)
}

pub fn labeling_from_index(group: &GroupSpec, n: usize, index: u64) -> Labeling {
    Labeling::from_indices(group.clone(), digits(group.order() as u64, n, index))
}

fn digits(order: u64, n: usize, mut index: u64) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % order) as usize;
        index /= order;
    }
    out
}

/// Precomputed data for evaluating a predicate on many labelings.
struct Engine {
    n: usize,
    order: usize,
    add: Vec<u16>,
    /// Bases whose labels are counted.
    counted: Vec<u64>,
    /// Blocks in ascending order, as positions in `counted`.
    blocks: Vec<usize>,
}

/// Subset sums are tabulated per nibble of the ground set.
const NIBBLE: usize = 4;

impl Engine {
    fn new(m: &dyn Matroid, group: &GroupSpec, predicate: Predicate) -> Result<Self, LabError> {
        require_block_candidate(m)?;
        let bases = guarded_bases(m)?;
        let ground = m.ground();
        let is_block: Vec<bool> = bases.iter().map(|&b| m.is_independent(ground.difference(b))).collect();
        let (counted, blocks) = match predicate {
            Predicate::Block => {
                let blocks = (0..bases.len()).filter(|&i| is_block[i]).collect();
                (bases.iter().map(|b| b.bits()).collect(), blocks)
            }
            Predicate::StrongBlock => {
                let counted: Vec<u64> =
                    bases.iter().zip(&is_block).filter(|(_, &ok)| ok).map(|(b, _)| b.bits()).collect();
                ((counted.clone()), (0..counted.len()).collect())
            }
        };
        Ok(Engine { n: m.ground_size(), order: group.order(), add: group.addition_table(), counted, blocks })
    }

    fn plus(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    /// Position in `counted` of the least isolated block, if any.
    fn evaluate(&self, labels: &[usize], tables: &mut Vec<usize>, sums: &mut [usize], count: &mut [u32]) -> Option<usize> {
        let chunks = self.n.div_ceil(NIBBLE);
        tables.clear();
        tables.resize(chunks << NIBBLE, 0);
        for c in 0..chunks {
            let table = &mut tables[c << NIBBLE..(c + 1) << NIBBLE];
            for s in 1..1usize << NIBBLE {
                let low = s.trailing_zeros() as usize;
                let e = c * NIBBLE + low;
                let prev = table[s & (s - 1)];
                table[s] = if e < self.n { self.add[prev * self.order + labels[e]] as usize } else { prev };
            }
        }
        count.iter_mut().for_each(|c| *c = 0);
        for (slot, &bits) in sums.iter_mut().zip(&self.counted) {
            let mut acc = tables[(bits & 0xf) as usize];
            let mut rest = bits >> NIBBLE;
            let mut c = 1;
            while rest != 0 {
                acc = self.plus(acc, tables[(c << NIBBLE) + (rest & 0xf) as usize]);
                rest >>= NIBBLE;
                c += 1;
            }
            *slot = acc;
            count[acc] += 1;
        }
        self.blocks.iter().copied().find(|&i| count[sums[i]] == 1)
    }
}

/// One scanned matroid.
#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub id: String,
    pub matroid: MatroidRef,
}

/// Scan result for one matroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanLine {
    pub id: String,
    pub n: usize,
    pub r: usize,
    pub isolating: u64,
    /// Least isolating labeling index, its labels and the isolated block.
    pub first: Option<(u64, String, BaseSet)>,
    pub checked: u64,
}

impl ScanLine {
    pub fn verdict(&self) -> &'static str {
        if self.isolating == 0 {
            "none"
        } else {
            "isolating"
        }
    }

    fn render(&self) -> String {
        let first = match &self.first {
            Some((idx, labels, block)) => format!("{idx}:{labels}:{}", block_word(*block)),
            None => "-".into(),
        };
        format!(
            "{} n={} r={} verdict={} isolating={} first={} checked={}",
            self.id,
            self.n,
            self.r,
            self.verdict(),
            self.isolating,
            first,
            self.checked
        )
    }
}

fn block_word(b: BaseSet) -> String {
    let parts: Vec<String> = b.iter().map(|e| e.to_string()).collect();
    parts.join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub group: GroupSpec,
    pub predicate: Predicate,
    pub reduction: Reduction,
    /// Labeling-index intervals covered; `None` means every labeling.
    pub ranges: Option<Vec<(u64, u64)>>,
    pub seed: u64,
    pub lines: Vec<ScanLine>,
}

/// Labelings per parallel work unit.
const SCAN_CHUNK: u64 = 1 << 12;

fn scan_one(
    entry: &ScanEntry,
    group: &GroupSpec,
    predicate: Predicate,
    reduction: Reduction,
    range: Option<(u64, u64)>,
) -> Result<ScanLine, LabError> {
    let m = &*entry.matroid;
    let n = m.ground_size();
    let engine = Engine::new(m, group, predicate).map_err(|e| match e {
        LabError::Usage(msg) => LabError::Usage(format!("{}: {msg}", entry.id)),
        other => other,
    })?;
    let total = labeling_count(group, n)
        .ok_or_else(|| LabError::Capacity { what: format!("|G|^{n}"), value: u64::MAX, limit: LAB_LABELING_GUARD })?;
    let (lo, hi) = range.unwrap_or((0, total));
    if lo > hi || hi > total {
        return Err(LabError::Usage(format!("range {lo}..{hi} outside 0..{total} for {}", entry.id)));
    }
    if hi - lo > LAB_LABELING_GUARD {
        return Err(LabError::Capacity {
            what: format!("labelings in {lo}..{hi}"),
            value: hi - lo,
            limit: LAB_LABELING_GUARD,
        });
    }
    let order = group.order() as u64;
    let step = match reduction {
        Reduction::None => 1,
        Reduction::Translation => order,
    };
    let chunk_starts: Vec<u64> = (lo..hi).step_by(SCAN_CHUNK as usize).collect();
    let parts: Vec<(u64, u64, Option<(u64, usize)>)> = chunk_starts
        .par_iter()
        .map(|&start| {
            let end = (start + SCAN_CHUNK).min(hi);
            let mut tables = Vec::new();
            let mut sums = vec![0; engine.counted.len()];
            let mut count = vec![0u32; engine.order];
            let (mut hits, mut checked, mut first) = (0, 0, None);
            let mut idx = start.next_multiple_of(step);
            while idx < end {
                let labels = digits(order, n, idx);
                checked += 1;
                if let Some(pos) = engine.evaluate(&labels, &mut tables, &mut sums, &mut count) {
                    hits += 1;
                    first.get_or_insert((idx, pos));
                }
                idx += step;
            }
            (hits, checked, first)
        })
        .collect();
    let mut line = ScanLine { id: entry.id.clone(), n, r: m.rank(), isolating: 0, first: None, checked: 0 };
    for (hits, checked, first) in parts {
        line.isolating += hits;
        line.checked += checked;
        if line.first.is_none() {
            if let Some((idx, pos)) = first {
                let labels = labeling_from_index(group, n, idx);
                let block = BaseSet::from_bits(engine.counted[pos]);
                line.first = Some((idx, labels.compact(), block));
            }
        }
    }
    Ok(line)
}

/// Runs the predicate over all labelings in `range` (default: all `|G|^n`)
/// for each matroid. Every matroid must have `n = 2r`.
pub fn isolation_scan(
    entries: &[ScanEntry],
    group: &GroupSpec,
    predicate: Predicate,
    reduction: Reduction,
    range: Option<(u64, u64)>,
    seed: u64,
) -> Result<ScanReport, LabError> {
    let lines = entries
        .iter()
        .map(|e| scan_one(e, group, predicate, reduction, range))
        .collect::<Result<Vec<_>, _>>()?;
    let ranges = normalize_ranges(group, &lines, range.map(|r| vec![r]));
    Ok(ScanReport { group: group.clone(), predicate, reduction, ranges, seed, lines })
}

/// Ranges covering every labeling of every entry render as `full`.
fn normalize_ranges(group: &GroupSpec, lines: &[ScanLine], ranges: Option<Vec<(u64, u64)>>) -> Option<Vec<(u64, u64)>> {
    let rs = ranges?;
    let complete =
        !lines.is_empty() && lines.iter().all(|l| labeling_count(group, l.n).is_some_and(|total| rs == [(0, total)]));
    (!complete).then_some(rs)
}

fn format_ranges(ranges: &Option<Vec<(u64, u64)>>) -> String {
    match ranges {
        None => "full".into(),
        Some(rs) => rs.iter().map(|(a, b)| format!("{a}..{b}")).collect::<Vec<_>>().join(","),
    }
}

fn parse_ranges(text: &str) -> Result<Option<Vec<(u64, u64)>>, String> {
    if text == "full" {
        return Ok(None);
    }
    text.split(',')
        .map(|part| {
            let (a, b) = part.split_once("..").ok_or_else(|| format!("bad range `{part}`"))?;
            let a = a.parse().map_err(|_| format!("bad range `{part}`"))?;
            let b = b.parse().map_err(|_| format!("bad range `{part}`"))?;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

impl ScanReport {
    pub fn isolating_matroids(&self) -> usize {
        self.lines.iter().filter(|l| l.isolating > 0).count()
    }

    pub fn isolating_labelings(&self) -> u64 {
        self.lines.iter().map(|l| l.isolating).sum()
    }

    pub fn checked(&self) -> u64 {
        self.lines.iter().map(|l| l.checked).sum()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "# scan group={} predicate={} reduction={} range={} seed={}\n",
            self.group,
            self.predicate,
            self.reduction,
            format_ranges(&self.ranges),
            self.seed
        );
        for line in &self.lines {
            out.push_str(&line.render());
            out.push('\n');
        }
        out.push_str(&format!(
            "summary matroids={} isolating-matroids={} isolating-labelings={} checked={}\n",
            self.lines.len(),
            self.isolating_matroids(),
            self.isolating_labelings(),
            self.checked()
        ));
        out
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        let bad = |line: usize, msg: &str| LabError::Report(format!("line {line}: {msg}"));
        let mut header: Option<BTreeMap<String, String>> = None;
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with("summary ") {
                continue;
            }
            if let Some(rest) = raw.strip_prefix("# scan ") {
                header = Some(fields(rest).map_err(|m| bad(ln, &m))?);
                continue;
            }
            if raw.starts_with('#') {
                continue;
            }
            let (id, rest) = raw.split_once(' ').ok_or_else(|| bad(ln, "expected `<id> key=value ...`"))?;
            let f = fields(rest).map_err(|m| bad(ln, &m))?;
            let get = |k: &str| f.get(k).ok_or_else(|| bad(ln, &format!("missing `{k}`")));
            let num = |k: &str| -> Result<u64, LabError> { get(k)?.parse().map_err(|_| bad(ln, &format!("bad `{k}`"))) };
            let first = match get("first")?.as_str() {
                "-" => None,
                word => {
                    let mut parts = word.splitn(3, ':');
                    let (Some(idx), Some(labels), Some(block)) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(bad(ln, "bad `first`"));
                    };
                    let idx = idx.parse().map_err(|_| bad(ln, "bad `first` index"))?;
                    let block = block
                        .split(',')
                        .map(|e| e.parse::<usize>())
                        .collect::<Result<BaseSet, _>>()
                        .map_err(|_| bad(ln, "bad `first` block"))?;
                    Some((idx, labels.to_string(), block))
                }
            };
            lines.push(ScanLine {
                id: id.to_string(),
                n: num("n")? as usize,
                r: num("r")? as usize,
                isolating: num("isolating")?,
                first,
                checked: num("checked")?,
            });
        }
        let h = header.ok_or_else(|| LabError::Report("missing `# scan` header".into()))?;
        let get = |k: &str| h.get(k).ok_or_else(|| LabError::Report(format!("header lacks `{k}`")));
        Ok(ScanReport {
            group: get("group")?.parse().map_err(|e: crate::group::GroupError| LabError::Report(e.to_string()))?,
            predicate: get("predicate")?.parse().map_err(LabError::Report)?,
            reduction: get("reduction")?.parse().map_err(LabError::Report)?,
            ranges: parse_ranges(get("range")?).map_err(LabError::Report)?,
            seed: get("seed")?.parse().map_err(|_| LabError::Report("bad seed".into()))?,
            lines,
        })
    }

    /// Combines shard reports over disjoint labeling ranges of the same
    /// matroids. Adjacent ranges are coalesced; the result renders exactly
    /// like a single run over the union.
    pub fn merge(reports: &[ScanReport]) -> Result<ScanReport, LabError> {
        let first = reports.first().ok_or_else(|| LabError::Report("nothing to merge".into()))?;
        let ids: Vec<&str> = first.lines.iter().map(|l| l.id.as_str()).collect();
        let mut ranges = Vec::new();
        for rep in reports {
            if rep.group != first.group
                || rep.predicate != first.predicate
                || rep.reduction != first.reduction
                || rep.seed != first.seed
            {
                return Err(LabError::Report("shard headers differ".into()));
            }
            if rep.lines.iter().map(|l| l.id.as_str()).ne(ids.iter().copied()) {
                return Err(LabError::Report("shards cover different matroids".into()));
            }
            let Some(rs) = &rep.ranges else {
                return Err(LabError::Report("cannot merge a full-range report with other shards".into()));
            };
            for &(a, b) in rs {
                ranges.push((a, b, rep));
            }
        }
        ranges.sort_by_key(|&(a, b, _)| (a, b));
        for pair in ranges.windows(2) {
            if pair[1].0 < pair[0].1 {
                return Err(LabError::Report(format!(
                    "overlapping shards {}..{} and {}..{}",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        let mut lines: Vec<ScanLine> = first
            .lines
            .iter()
            .map(|l| ScanLine { isolating: 0, first: None, checked: 0, ..l.clone() })
            .collect();
        for rep in reports {
            for (acc, l) in lines.iter_mut().zip(&rep.lines) {
                if (acc.n, acc.r) != (l.n, l.r) {
                    return Err(LabError::Report(format!("shards disagree on the shape of {}", l.id)));
                }
                acc.isolating += l.isolating;
                acc.checked += l.checked;
                if let Some(f) = &l.first {
                    if acc.first.as_ref().is_none_or(|cur| f.0 < cur.0) {
                        acc.first = Some(f.clone());
                    }
                }
            }
        }
        let mut merged: Vec<(u64, u64)> = Vec::new();
        for (a, b, _) in ranges {
            match merged.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        let ranges = normalize_ranges(&first.group, &lines, Some(merged));
        Ok(ScanReport { ranges, lines, ..first.clone() })
    }
}

fn fields(text: &str) -> Result<BTreeMap<String, String>, String> {
    text.split_whitespace()
        .map(|w| {
            w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| format!("bad field `{w}`"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{make_graphic, make_uniform, shared};

    fn k4() -> MatroidRef {
        shared(make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap())
    }

    #[test]
    fn engine_agrees_with_direct_predicates() {
        let m = k4();
        for group in [GroupSpec::cyclic(2), GroupSpec::cyclic(3)] {
            for predicate in [Predicate::Block, Predicate::StrongBlock] {
                let engine = Engine::new(&*m, &group, predicate).unwrap();
                let total = labeling_count(&group, 6).unwrap();
                let (mut t, mut s, mut c) = (Vec::new(), vec![0; engine.counted.len()], vec![0; group.order()]);
                for idx in 0..total {
                    let l = labeling_from_index(&group, 6, idx);
                    let fast = engine.evaluate(l.indices(), &mut t, &mut s, &mut c).map(|p| BaseSet::from_bits(engine.counted[p]));
                    let slow = isolating(&*m, &l, predicate).unwrap();
                    assert_eq!(fast, slow, "{group} {predicate} {idx}");
                }
            }
        }
    }

    #[test]
    fn constant_labeling_isolates_nothing() {
        let m = k4();
        let l = Labeling::cyclic(3, &[1; 6]);
        assert_eq!(is_block_isolating(&*m, &l).unwrap(), None);
        assert_eq!(is_strong_block_isolating(&*m, &l).unwrap(), None);
    }

    #[test]
    fn u24_over_z2_has_no_block_isolating_labeling() {
        let u = make_uniform(4, 2).unwrap();
        let z2 = GroupSpec::cyclic(2);
        for idx in 0..16 {
            assert_eq!(is_block_isolating(&u, &labeling_from_index(&z2, 4, idx)).unwrap(), None);
        }
        // the tight labeling over Z3 does isolate a block of U(2,4)
        let l = Labeling::cyclic(3, &[1, 1, 0, 0]);
        assert_eq!(is_block_isolating(&u, &l).unwrap(), Some([0, 1].iter().collect()));
    }

    #[test]
    fn non_block_shapes_are_rejected() {
        let u = make_uniform(3, 2).unwrap();
        assert!(matches!(is_block_isolating(&u, &Labeling::cyclic(2, &[0; 3])), Err(LabError::Usage(_))));
        let entries = [ScanEntry { id: "u23".into(), matroid: shared(u) }];
        assert!(isolation_scan(&entries, &GroupSpec::cyclic(2), Predicate::Block, Reduction::None, None, 0).is_err());
    }

    #[test]
    fn k4_scans_and_translation() {
        let entries = [ScanEntry { id: "k4".into(), matroid: k4() }];
        let z3 = GroupSpec::cyclic(3);
        let full = isolation_scan(&entries, &z3, Predicate::StrongBlock, Reduction::None, None, 0).unwrap();
        assert_eq!((full.lines[0].checked, full.lines[0].isolating), (729, 0));
        let red = isolation_scan(&entries, &z3, Predicate::StrongBlock, Reduction::Translation, None, 0).unwrap();
        assert_eq!((red.lines[0].checked, red.lines[0].isolating), (243, 0));

        let u = [ScanEntry { id: "u24".into(), matroid: shared(make_uniform(4, 2).unwrap()) }];
        let full = isolation_scan(&u, &z3, Predicate::Block, Reduction::None, None, 0).unwrap();
        let red = isolation_scan(&u, &z3, Predicate::Block, Reduction::Translation, None, 0).unwrap();
        assert!(full.lines[0].isolating > 0);
        assert_eq!(full.lines[0].isolating, 3 * red.lines[0].isolating);
    }

    #[test]
    fn shards_merge_to_full_report() {
        let u = [ScanEntry { id: "u24".into(), matroid: shared(make_uniform(4, 2).unwrap()) }];
        let z3 = GroupSpec::cyclic(3);
        let whole = isolation_scan(&u, &z3, Predicate::Block, Reduction::None, Some((0, 81)), 0).unwrap();
        let a = isolation_scan(&u, &z3, Predicate::Block, Reduction::None, Some((40, 81)), 0).unwrap();
        let b = isolation_scan(&u, &z3, Predicate::Block, Reduction::None, Some((0, 40)), 0).unwrap();
        let merged = ScanReport::merge(&[ScanReport::parse(&a.render()).unwrap(), b]).unwrap();
        assert_eq!(merged.render(), whole.render());
        let c = isolation_scan(&u, &z3, Predicate::Block, Reduction::None, Some((30, 50)), 0).unwrap();
        assert!(ScanReport::merge(&[a, c]).is_err());
    }
}
