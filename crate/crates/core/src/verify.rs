//! Exact, exhaustive coverage checking.
//!
//! Triple coverage is tracked with two bits per triple over the colex
//! [`TripleIndex`]: a `seen` bitset and a `multi` bitset, set on the first and
//! second hit respectively. Large point sets are processed in rank-range
//! partitions; each partition rescans the full block list and counts only the
//! triples in its range, and partial reports are merged by summation.

use std::collections::HashMap;

use crate::bbd::Bbd;
use crate::error::{Error, Result};
use crate::mds::MdsCode;
use crate::model::{binomial, check_block, for_each_triple, Design, TripleIndex};

/// Witness lists are truncated to this many entries; counts stay exact.
pub const WITNESS_LIMIT: usize = 16;

/// C(600,3): the largest range processed in a single pass by default.
pub const DEFAULT_PASS_TRIPLES: u64 = 35_820_200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageOptions {
    /// Worker threads per pass; each handles a contiguous rank range.
    pub threads: usize,
    /// Upper bound on triples held in memory at once (across all workers).
    pub max_triples_per_pass: u64,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions {
            threads: 1,
            max_triples_per_pass: DEFAULT_PASS_TRIPLES,
        }
    }
}

impl CoverageOptions {
    pub fn with_threads(threads: usize) -> Self {
        CoverageOptions {
            threads: threads.max(1),
            ..Default::default()
        }
    }
}

/// Exact once/zero/multi counts for one category of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryCounts {
    pub label: String,
    pub once: u64,
    pub uncovered: u64,
    pub multi: u64,
}

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.once + self.uncovered + self.multi
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    pub total: u64,
    pub once: u64,
    pub uncovered: u64,
    pub multi: u64,
    pub uncovered_witnesses: Vec<[u32; 3]>,
    pub multi_witnesses: Vec<[u32; 3]>,
    /// Present only when a classifier was supplied.
    pub categories: Vec<CategoryCounts>,
}

impl CoverageReport {
    /// Every triple covered exactly once.
    pub fn is_exact(&self) -> bool {
        self.uncovered == 0 && self.multi == 0
    }

    /// No triple covered twice.
    pub fn is_packing(&self) -> bool {
        self.multi == 0
    }

    pub fn category(&self, label: &str) -> Option<&CategoryCounts> {
        self.categories.iter().find(|c| c.label == label)
    }

    fn merge(&mut self, other: CoverageReport) {
        self.total += other.total;
        self.once += other.once;
        self.uncovered += other.uncovered;
        self.multi += other.multi;
        extend_truncated(&mut self.uncovered_witnesses, other.uncovered_witnesses);
        extend_truncated(&mut self.multi_witnesses, other.multi_witnesses);
        if self.categories.is_empty() {
            self.categories = other.categories;
        } else {
            for (mine, theirs) in self.categories.iter_mut().zip(other.categories) {
                mine.once += theirs.once;
                mine.uncovered += theirs.uncovered;
                mine.multi += theirs.multi;
            }
        }
    }
}

fn extend_truncated<T>(dst: &mut Vec<T>, src: Vec<T>) {
    let room = WITNESS_LIMIT.saturating_sub(dst.len());
    dst.extend(src.into_iter().take(room));
}

/// Maps a triple to a category index into `labels`.
pub struct Classifier<'a> {
    pub labels: Vec<String>,
    pub classify: &'a (dyn Fn([u32; 3]) -> usize + Sync),
}

fn scan_range<B: AsRef<[u32]>>(
    index: &TripleIndex,
    blocks: &[B],
    lo: u64,
    hi: u64,
    classifier: Option<&Classifier<'_>>,
) -> CoverageReport {
    let words = ((hi - lo) as usize).div_ceil(64);
    let mut seen = vec![0u64; words];
    let mut multi = vec![0u64; words];
    for b in blocks {
        for_each_triple(b.as_ref(), |x, y, z| {
            let r = index.rank_unchecked(x, y, z);
            if r < lo || r >= hi {
                return;
            }
            let off = (r - lo) as usize;
            let (w, bit) = (off / 64, 1u64 << (off % 64));
            if seen[w] & bit != 0 {
                multi[w] |= bit;
            } else {
                seen[w] |= bit;
            }
        });
    }

    let mut report = CoverageReport {
        total: hi - lo,
        ..Default::default()
    };
    let seen_count: u64 = seen.iter().map(|w| w.count_ones() as u64).sum();
    report.multi = multi.iter().map(|w| w.count_ones() as u64).sum();
    report.uncovered = report.total - seen_count;
    report.once = seen_count - report.multi;

    let need_uncovered = report.uncovered > 0;
    let need_multi = report.multi > 0;
    if let Some(cls) = classifier {
        report.categories = cls
            .labels
            .iter()
            .map(|l| CategoryCounts {
                label: l.clone(),
                ..Default::default()
            })
            .collect();
    }
    if classifier.is_none() && !need_uncovered && !need_multi {
        return report;
    }

    // Walk the range in rank order.
    let Ok(mut t) = index.unrank(lo) else {
        return report;
    };
    for off in 0..(hi - lo) as usize {
        let (w, bit) = (off / 64, 1u64 << (off % 64));
        let state = if multi[w] & bit != 0 {
            2
        } else if seen[w] & bit != 0 {
            1
        } else {
            0
        };
        match state {
            0 if report.uncovered_witnesses.len() < WITNESS_LIMIT => {
                report.uncovered_witnesses.push(t)
            }
            2 if report.multi_witnesses.len() < WITNESS_LIMIT => report.multi_witnesses.push(t),
            _ => {}
        }
        if let Some(cls) = classifier {
            let c = &mut report.categories[(cls.classify)(t)];
            match state {
                0 => c.uncovered += 1,
                1 => c.once += 1,
                _ => c.multi += 1,
            }
        } else if report.uncovered_witnesses.len() >= WITNESS_LIMIT.min(report.uncovered as usize)
            && report.multi_witnesses.len() >= WITNESS_LIMIT.min(report.multi as usize)
        {
            break;
        }
        // next triple in colex order
        t[0] += 1;
        if t[0] == t[1] {
            t[0] = 0;
            t[1] += 1;
            if t[1] == t[2] {
                t[1] = 1;
                t[2] += 1;
            }
        }
    }
    report
}

/// Exact triple coverage of `blocks` on points `0..v`.
///
/// Blocks must be ascending with entries below `v`; that is the caller's
/// contract (see [`verify_design`] for the checked entry point).
pub fn coverage<B: AsRef<[u32]> + Sync>(
    v: u32,
    blocks: &[B],
    opts: &CoverageOptions,
    classifier: Option<&Classifier<'_>>,
) -> CoverageReport {
    let index = TripleIndex::new(v);
    let total = index.len();
    let mut report = CoverageReport::default();
    if let Some(cls) = classifier {
        report.categories = cls
            .labels
            .iter()
            .map(|l| CategoryCounts {
                label: l.clone(),
                ..Default::default()
            })
            .collect();
    }
    if total == 0 {
        return report;
    }
    let threads = opts.threads.max(1) as u64;
    let pass = opts.max_triples_per_pass.max(1);
    let mut lo = 0;
    while lo < total {
        let hi = (lo + pass).min(total);
        let chunk = (hi - lo).div_ceil(threads);
        let ranges: Vec<(u64, u64)> = (0..threads)
            .map(|i| (lo + i * chunk, (lo + (i + 1) * chunk).min(hi)))
            .filter(|(a, b)| a < b)
            .collect();
        let parts: Vec<CoverageReport> = if ranges.len() == 1 {
            vec![scan_range(&index, blocks, ranges[0].0, ranges[0].1, classifier)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|&(a, b)| {
                        let index = &index;
                        s.spawn(move || scan_range(index, blocks, a, b, classifier))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("coverage worker panicked"))
                    .collect()
            })
        };
        for p in parts {
            report.merge(p);
        }
        lo = hi;
    }
    report
}

/// Checks block shapes against the design kind, then counts coverage exactly.
pub fn verify_design(design: &Design) -> Result<CoverageReport> {
    verify_design_with(design, &CoverageOptions::default())
}

pub fn verify_design_with(design: &Design, opts: &CoverageOptions) -> Result<CoverageReport> {
    for b in design.blocks() {
        check_block(design.kind(), design.v(), b)?;
    }
    Ok(coverage(design.v(), design.blocks(), opts, None))
}

/// Per-category coverage counts under a user classifier.
pub fn coverage_profile<B: AsRef<[u32]> + Sync>(
    v: u32,
    blocks: &[B],
    classifier: &Classifier<'_>,
    opts: &CoverageOptions,
) -> CoverageReport {
    coverage(v, blocks, opts, Some(classifier))
}

/// Outcome of an H-design check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HDesignReport {
    pub total: u64,
    pub once: u64,
    pub uncovered: u64,
    pub multi: u64,
    /// Uncovered or multiply covered transverses, as point lists.
    pub witnesses: Vec<Vec<u32>>,
}

impl HDesignReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered == 0 && self.multi == 0
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Exact once-coverage of all `t`-element transverses of `d` groups of size
/// `q` (group `g` is the point range `g*q..(g+1)*q`).
pub fn verify_h_design<B: AsRef<[u32]>>(
    d: usize,
    q: u32,
    w: usize,
    t: usize,
    blocks: &[B],
) -> Result<HDesignReport> {
    if t > w || w > d || q == 0 {
        return Err(Error::BadParams(format!("H({d},{q},{w},{t})")));
    }
    let v = d as u32 * q;
    let subsets = combinations(d, t);
    let subset_index: HashMap<u64, usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.iter().fold(0u64, |m, &g| m | 1 << g), i))
        .collect();
    let per_subset = (q as u64)
        .checked_pow(t as u32)
        .ok_or_else(|| Error::BadParams("too many transverses".into()))?;
    let total = per_subset * subsets.len() as u64;
    if total > 1 << 30 {
        return Err(Error::BadParams("too many transverses".into()));
    }
    let mut count = vec![0u8; total as usize];
    let tsub = combinations(w, t);
    for b in blocks {
        let b = b.as_ref();
        if b.len() != w {
            return Err(Error::MalformedBlock {
                block: b.to_vec(),
                reason: format!("expected {w} points"),
            });
        }
        if let Some(&p) = b.iter().find(|&&p| p >= v) {
            return Err(Error::MalformedBlock {
                block: b.to_vec(),
                reason: format!("point {p} outside [0, {v})"),
            });
        }
        let mut pts: Vec<u32> = b.to_vec();
        pts.sort_unstable_by_key(|&p| p / q);
        if pts.windows(2).any(|x| x[0] / q == x[1] / q) {
            return Err(Error::NotTransverse(b.to_vec()));
        }
        for sel in &tsub {
            let mask = sel.iter().fold(0u64, |m, &i| m | 1 << (pts[i] / q));
            let sym = sel
                .iter()
                .rev()
                .fold(0u64, |acc, &i| acc * q as u64 + (pts[i] % q) as u64);
            let idx = subset_index[&mask] as u64 * per_subset + sym;
            let c = &mut count[idx as usize];
            *c = c.saturating_add(1).min(2);
        }
    }
    let mut report = HDesignReport {
        total,
        ..Default::default()
    };
    for (idx, &c) in count.iter().enumerate() {
        match c {
            0 => report.uncovered += 1,
            1 => report.once += 1,
            _ => report.multi += 1,
        }
        if c != 1 && report.witnesses.len() < WITNESS_LIMIT {
            let groups = &subsets[idx / per_subset as usize];
            let mut sym = idx as u64 % per_subset;
            let pts = groups
                .iter()
                .map(|&g| {
                    let s = (sym % q as u64) as u32;
                    sym /= q as u64;
                    g as u32 * q + s
                })
                .collect();
            report.witnesses.push(pts);
        }
    }
    Ok(report)
}

/// Why a word set fails to be MDS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MdsWitness {
    /// Two words agreeing on `coords`, which should determine the word.
    Collision {
        coords: Vec<usize>,
        first: Vec<u32>,
        second: Vec<u32>,
    },
    /// A face (values fixed on `coords`) that no word meets.
    EmptyFace { coords: Vec<usize>, values: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsCheck {
    pub valid: bool,
    pub witness: Option<MdsWitness>,
}

/// Recomputes the MDS property from the words alone: `|code| = q^k` and every
/// projection onto `k = d - dist + 1` coordinates is injective.
pub fn verify_mds(code: &MdsCode) -> Result<MdsCheck> {
    let (d, q) = (code.d(), code.q());
    for w in code.words() {
        if let Some(&s) = w.iter().find(|&&s| s >= q) {
            return Err(Error::AlphabetViolation { symbol: s, q });
        }
    }
    let k = code.info_len();
    let expected = (q as u64)
        .checked_pow(k as u32)
        .filter(|&e| e <= 1 << 28)
        .ok_or_else(|| Error::BadParams(format!("q^{k} too large to check")))?;
    let mut first_subset = None;
    for coords in combinations(d, k) {
        let mut slot = vec![u32::MAX; expected as usize];
        for (i, w) in code.words().enumerate() {
            let key = coords.iter().fold(0u64, |acc, &c| acc * q as u64 + w[c] as u64);
            let cell = &mut slot[key as usize];
            if *cell != u32::MAX {
                return Ok(MdsCheck {
                    valid: false,
                    witness: Some(MdsWitness::Collision {
                        first: code.word(*cell as usize).to_vec(),
                        second: w.to_vec(),
                        coords,
                    }),
                });
            }
            *cell = i as u32;
        }
        if first_subset.is_none() {
            first_subset = Some((coords, slot));
        }
    }
    if code.len() as u64 != expected {
        // injective everywhere but too few words: some face is empty
        let (coords, slot) = first_subset.expect("at least one coordinate subset");
        let key = slot.iter().position(|&c| c == u32::MAX).unwrap_or(0) as u64;
        let mut values = vec![0; k];
        let mut rest = key;
        for v in values.iter_mut().rev() {
            *v = (rest % q as u64) as u32;
            rest /= q as u64;
        }
        return Ok(MdsCheck {
            valid: false,
            witness: Some(MdsWitness::EmptyFace { coords, values }),
        });
    }
    Ok(MdsCheck {
        valid: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eq1Check {
    pub holds: bool,
    /// A required word that is missing from the code.
    pub witness: Option<Vec<u32>>,
}

/// The bipartite-design symmetry condition on a length-4 code: all diagonal
/// words `(x,x,u,u)` present, and closure under swapping coordinates 0,1 and
/// coordinates 2,3.
pub fn verify_eq1(code: &MdsCode) -> Eq1Check {
    if code.d() != 4 {
        return Eq1Check {
            holds: false,
            witness: None,
        };
    }
    let missing = |w: Vec<u32>| Eq1Check {
        holds: false,
        witness: Some(w),
    };
    let q = code.q();
    for x in 0..q {
        for u in 0..q {
            let w = vec![x, x, u, u];
            if !code.contains(&w) {
                return missing(w);
            }
        }
    }
    for w in code.words() {
        let (x, y, u, v) = (w[0], w[1], w[2], w[3]);
        for img in [[y, x, u, v], [x, y, v, u], [y, x, v, u]] {
            if !code.contains(&img) {
                return missing(img.to_vec());
            }
        }
    }
    Eq1Check {
        holds: true,
        witness: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbdCheck {
    pub valid: bool,
    pub report: CoverageReport,
}

pub const CROSSING: &str = "crossing";
pub const INTERNAL: &str = "internal";

/// Every block splits 2+2; crossing triples covered once, single-group triples never.
pub fn verify_bbd(bbd: &Bbd) -> Result<BbdCheck> {
    verify_bbd_blocks(bbd.m(), bbd.blocks())
}

pub(crate) fn verify_bbd_blocks(m: u32, blocks: &[[u32; 4]]) -> Result<BbdCheck> {
    for b in blocks {
        check_block(crate::model::Kind::Partial, 2 * m, b)?;
        if b.iter().filter(|&&p| p < m).count() != 2 {
            return Err(Error::BadSplit(b.to_vec()));
        }
    }
    let classify = move |t: [u32; 3]| {
        let low = t.iter().filter(|&&p| p < m).count();
        usize::from(low == 0 || low == 3)
    };
    let classifier = Classifier {
        labels: vec![CROSSING.into(), INTERNAL.into()],
        classify: &classify,
    };
    let report = coverage_profile(2 * m, blocks, &classifier, &CoverageOptions::default());
    let crossing = &report.categories[0];
    let internal = &report.categories[1];
    let valid = crossing.uncovered == 0
        && crossing.multi == 0
        && internal.once == 0
        && internal.multi == 0
        && crossing.total() == 2 * m as u64 * binomial(m as u64, 2);
    Ok(BbdCheck { valid, report })
}
