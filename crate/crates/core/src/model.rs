//! Shared domain types: designs, triple indexing and admissibility arithmetic.
//!
//! Points are always dense integers `0..v`. Blocks are strictly ascending
//! point lists; a [`Design`] keeps them in lexicographic order so that two
//! designs with the same block set compare equal and serialize identically.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which family of 3-designs a block set claims to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    /// Steiner quadruple system S(3,4,v).
    Sqs,
    /// S(3,{4,6},v): blocks of size 4 or 6.
    S46,
    /// A packing of 4-blocks that is allowed to leave triples uncovered.
    Partial,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Sqs => "sqs",
            Kind::S46 => "s46",
            Kind::Partial => "partial",
        }
    }

    fn allows_size(self, len: usize) -> bool {
        match self {
            Kind::Sqs | Kind::Partial => len == 4,
            Kind::S46 => len == 4 || len == 6,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqs" => Ok(Kind::Sqs),
            "s46" => Ok(Kind::S46),
            "partial" => Ok(Kind::Partial),
            other => Err(Error::BadParams(format!("unknown design kind `{other}`"))),
        }
    }
}

/// A point count plus a set of blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    kind: Kind,
    v: u32,
    blocks: Vec<Vec<u32>>,
}

/// Checks a single block for range, ordering and size against `kind`.
pub(crate) fn check_block(kind: Kind, v: u32, block: &[u32]) -> Result<()> {
    let malformed = |reason: &str| Error::MalformedBlock {
        block: block.to_vec(),
        reason: reason.to_string(),
    };
    if !kind.allows_size(block.len()) {
        return Err(malformed(&format!("size {} not allowed for {kind}", block.len())));
    }
    if block.windows(2).any(|w| w[0] >= w[1]) {
        return Err(malformed("not strictly ascending"));
    }
    if block.last().is_some_and(|&p| p >= v) {
        return Err(malformed(&format!("point outside [0, {v})")));
    }
    Ok(())
}

impl Design {
    /// Builds a design from ascending blocks in any order.
    ///
    /// Blocks are validated and sorted; a repeated block is rejected as
    /// malformed.
    pub fn new(kind: Kind, v: u32, mut blocks: Vec<Vec<u32>>) -> Result<Self> {
        for b in &blocks {
            check_block(kind, v, b)?;
        }
        blocks.sort_unstable();
        if let Some(w) = blocks.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MalformedBlock {
                block: w[0].clone(),
                reason: "duplicate block".into(),
            });
        }
        Ok(Design { kind, v, blocks })
    }

    /// Like [`Design::new`] but sorts each block first.
    pub fn from_unsorted(kind: Kind, v: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Design::new(kind, v, blocks)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn into_blocks(self) -> Vec<Vec<u32>> {
        self.blocks
    }

    /// Same blocks under a different kind label; re-validated.
    pub fn with_kind(&self, kind: Kind) -> Result<Self> {
        Design::new(kind, self.v, self.blocks.clone())
    }

    /// True when every block of `other` (same point labels) is a block here.
    pub fn contains_all(&self, other: &[Vec<u32>]) -> bool {
        other.iter().all(|b| self.blocks.binary_search(b).is_ok())
    }

    /// Applies a point relabeling `map[old] = new` and returns the re-sorted design.
    pub fn relabel(&self, map: &[u32], v: u32) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| map[p as usize]).collect())
            .collect();
        Design::from_unsorted(self.kind, v, blocks)
    }

    /// Shifts every point by `offset`, embedding the design into a larger point set.
    pub fn shifted(&self, offset: u32) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.blocks
            .iter()
            .map(move |b| b.iter().map(|&p| p + offset).collect())
    }
}

/// An explicit region of a partial design meant to be filled by a smaller design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hole {
    pub points: Vec<u32>,
    pub required_kind: Kind,
}

impl Hole {
    pub fn new(mut points: Vec<u32>, required_kind: Kind) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if points.len() < 4 {
            return Err(Error::BadParams(format!(
                "hole needs at least 4 points, got {}",
                points.len()
            )));
        }
        Ok(Hole { points, required_kind })
    }

    pub fn contains(&self, p: u32) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

/// Number of blocks of an SQS(v): v(v-1)(v-2)/24.
pub fn sqs_block_count(v: u64) -> Result<u64> {
    if v < 3 {
        return Ok(0);
    }
    let prod = v * (v - 1) * (v - 2);
    if prod % 24 != 0 {
        return Err(Error::NotIntegral(v));
    }
    Ok(prod / 24)
}

/// Existence congruence for the design kind. Orders 1 and 2 are vacuous.
pub fn is_admissible(v: u32, kind: Kind) -> bool {
    match kind {
        Kind::Sqs | Kind::Partial => v == 1 || v == 2 || matches!(v % 6, 2 | 4),
        Kind::S46 => v % 2 == 0,
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Colexicographic ranking of the 3-subsets of `0..v`.
///
/// `rank({a<b<c}) = C(a,1) + C(b,2) + C(c,3)`.
#[derive(Debug, Clone)]
pub struct TripleIndex {
    v: u32,
    c2: Vec<u64>,
    c3: Vec<u64>,
}

impl TripleIndex {
    pub fn new(v: u32) -> Self {
        let n = v as u64 + 1;
        let c2 = (0..n).map(|b| b * b.saturating_sub(1) / 2).collect();
        let c3 = (0..n)
            .map(|c| c * c.saturating_sub(1) * c.saturating_sub(2) / 6)
            .collect();
        TripleIndex { v, c2, c3 }
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// C(v,3).
    pub fn len(&self) -> u64 {
        self.c3[self.v as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rank of an ascending triple; no range checking.
    #[inline]
    pub fn rank_unchecked(&self, a: u32, b: u32, c: u32) -> u64 {
        a as u64 + self.c2[b as usize] + self.c3[c as usize]
    }

    pub fn rank(&self, t: [u32; 3]) -> Result<u64> {
        let [a, b, c] = t;
        if !(a < b && b < c && c < self.v) {
            return Err(Error::OutOfRange {
                v: self.v,
                index: c as u64,
            });
        }
        Ok(self.rank_unchecked(a, b, c))
    }

    pub fn unrank(&self, r: u64) -> Result<[u32; 3]> {
        if r >= self.len() {
            return Err(Error::OutOfRange { v: self.v, index: r });
        }
        // largest c with C(c,3) <= r, then largest b < c with C(b,2) <= rest
        let c = self.c3.partition_point(|&x| x <= r) - 1;
        let r = r - self.c3[c];
        let b = self.c2[..c].partition_point(|&x| x <= r) - 1;
        let a = r - self.c2[b];
        Ok([a as u32, b as u32, c as u32])
    }

    /// Visits every triple in rank order.
    pub fn for_each(&self, mut f: impl FnMut(u64, [u32; 3])) {
        let mut r = 0u64;
        for c in 2..self.v {
            for b in 1..c {
                for a in 0..b {
                    f(r, [a, b, c]);
                    r += 1;
                }
            }
        }
    }
}

/// Colex rank of a triple in `0..v`.
pub fn rank_triple(v: u32, triple: [u32; 3]) -> Result<u64> {
    TripleIndex::new(v).rank(triple)
}

/// Inverse of [`rank_triple`].
pub fn unrank_triple(v: u32, index: u64) -> Result<[u32; 3]> {
    TripleIndex::new(v).unrank(index)
}

/// Calls `f` on every 3-subset of an ascending block.
#[inline]
pub(crate) fn for_each_triple(block: &[u32], mut f: impl FnMut(u32, u32, u32)) {
    let n = block.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                f(block[i], block[j], block[k]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_counts() {
        assert_eq!(sqs_block_count(8), Ok(14));
        assert_eq!(sqs_block_count(2), Ok(0));
        assert_eq!(sqs_block_count(130), Ok(89440));
        assert_eq!(sqs_block_count(5), Err(Error::NotIntegral(5)));
    }

    #[test]
    fn admissible_orders_have_integral_counts() {
        for v in 1..=2000u32 {
            if is_admissible(v, Kind::Sqs) {
                assert!(sqs_block_count(v as u64).is_ok(), "v={v}");
            }
        }
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(8, Kind::Sqs));
        assert!(!is_admissible(9, Kind::Sqs));
        assert!(is_admissible(12, Kind::S46));
        assert!(!is_admissible(12, Kind::Sqs));
        assert!(is_admissible(1, Kind::Sqs) && is_admissible(2, Kind::Sqs));
    }

    #[test]
    fn triple_rank_examples() {
        assert_eq!(rank_triple(5, [0, 1, 2]), Ok(0));
        assert_eq!(rank_triple(5, [2, 3, 4]), Ok(9));
        assert_eq!(unrank_triple(5, 9), Ok([2, 3, 4]));
        assert!(unrank_triple(5, 10).is_err());
        assert!(rank_triple(5, [0, 1, 5]).is_err());
        assert!(rank_triple(5, [1, 1, 2]).is_err());
    }

    #[test]
    fn rank_unrank_exhaustive() {
        for v in 0..=40u32 {
            let idx = TripleIndex::new(v);
            assert_eq!(idx.len(), binomial(v as u64, 3));
            let mut seen = 0;
            idx.for_each(|r, t| {
                assert_eq!(idx.rank(t).unwrap(), r);
                assert_eq!(idx.unrank(r).unwrap(), t);
                seen += 1;
            });
            assert_eq!(seen, idx.len());
        }
    }

    #[test]
    fn design_rejects_bad_blocks() {
        assert!(Design::new(Kind::Sqs, 8, vec![vec![0, 1, 2, 8]]).is_err());
        assert!(Design::new(Kind::Sqs, 8, vec![vec![0, 2, 1, 3]]).is_err());
        assert!(Design::new(Kind::Sqs, 8, vec![vec![0, 1, 2, 3, 4, 5]]).is_err());
        assert!(Design::new(Kind::S46, 8, vec![vec![0, 1, 2, 3, 4, 5]]).is_ok());
        let dup = Design::new(Kind::Sqs, 8, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]);
        assert!(matches!(dup, Err(Error::MalformedBlock { .. })));
    }

    #[test]
    fn hole_needs_four_points() {
        assert!(Hole::new(vec![1, 2, 3], Kind::Sqs).is_err());
        let h = Hole::new(vec![5, 1, 3, 2], Kind::Sqs).unwrap();
        assert!(h.contains(5) && !h.contains(4));
    }
}
