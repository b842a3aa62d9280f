//! Steiner quadruple system constructions: base systems, doubling and the
//! `8n+2` assembly.
//!
//! The assembly works on the point set `Ω` of size `8n+2`: eight groups
//! `A_l = [l·n, (l+1)·n)` indexed by labels `l = 2i+δ` (the pair `(i,δ)`,
//! `i < 4`, `δ < 2`) followed by the two extra points `e₁ = 8n`, `e₂ = 8n+1`.
//! The holes are `A_(i,0) ∪ A_(i,1) ∪ {e₁,e₂}`. Blocks come in four parts:
//!
//! - R1: for each block `s` of an SQS(8) on the labels, the H-design of the
//!   distance-2 extension `C_s` of the projection `M_s`, minus `M_s` itself;
//! - R2: for each word `b` of the MDS(7,8,n) code `M`, the 26 blocks of a
//!   normalized SQS(10) not containing both `e₁` and `e₂`, with label `l`
//!   sent to `l·n + b_l`;
//! - R3: one bipartite design on `A_l ∪ A_l'` for each of the 24 label pairs
//!   with different `i`;
//! - R4: an SQS(2n+2) on each hole (omitted in holes mode).

use crate::bbd::{bbd_block_count, bbd_from_factorizations, Bbd};
use crate::error::{Error, Result};
use crate::latin::{mols_supply, round_robin_one_factorization};
use crate::mds::{extend_to_distance2, mds_from_mols, project, MdsCode};
use crate::search::{search_small_sqs, DEFAULT_SEARCH_BUDGET};
use crate::model::{is_admissible, sqs_block_count, Design, Hole, Kind};
use crate::verify::{coverage_profile, verify_bbd, verify_design, verify_mds, Classifier, CoverageOptions};

/// The 14 four-subsets of `GF(2)^3` (as `0..8`) with XOR zero.
pub fn boolean_sqs8() -> Design {
    let mut blocks = Vec::with_capacity(14);
    for a in 0..8u32 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                let d = a ^ b ^ c;
                if d > c {
                    blocks.push(vec![a, b, c, d]);
                }
            }
        }
    }
    Design::new(Kind::Sqs, 8, blocks).expect("XOR-zero quadruples are well formed")
}

/// S(3,{4,6},v) for `v ∈ {2,4,6}`: no block, one 4-block, one 6-block.
pub fn s46_base(v: u32) -> Result<Design> {
    let blocks = match v {
        2 => Vec::new(),
        4 | 6 => vec![(0..v).collect()],
        _ => return Err(Error::BadParams(format!("no S(3,{{4,6}}) base of order {v}"))),
    };
    Design::new(Kind::S46, v, blocks)
}

fn ensure_exact(d: &Design, what: &str) -> Result<()> {
    let r = verify_design(d)?;
    if r.is_exact() {
        Ok(())
    } else {
        Err(Error::VerificationFailure(format!(
            "{what}: {} uncovered, {} multiply covered (uncovered {:?}, multi {:?})",
            r.uncovered, r.multi, r.uncovered_witnesses, r.multi_witnesses
        )))
    }
}

/// An SQS(10) relabeled so that `{2i, 2i+1, 8, 9}` is a block for `i < 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedS10 {
    pub design: Design,
    /// `labeling[p]` is the new name of input point `p`.
    pub labeling: [u32; 10],
}

/// Relabels `s10` so that `e1 → 8`, `e2 → 9` and the four blocks through
/// `{e1, e2}` become `{2i, 2i+1, 8, 9}`, pairs taken in block order.
pub fn normalize_s10(s10: &Design, e1: u32, e2: u32) -> Result<NormalizedS10> {
    if s10.kind() != Kind::Sqs || s10.v() != 10 {
        return Err(Error::PreconditionFailure(format!(
            "expected an SQS(10), got {} on {} points",
            s10.kind(),
            s10.v()
        )));
    }
    if e1 == e2 || e1 >= 10 || e2 >= 10 {
        return Err(Error::BadParams(format!("extra points {e1}, {e2}")));
    }
    ensure_exact(s10, "SQS(10) input")?;
    let mut labeling = [u32::MAX; 10];
    labeling[e1 as usize] = 8;
    labeling[e2 as usize] = 9;
    let mut next = 0;
    for b in s10.blocks() {
        if b.contains(&e1) && b.contains(&e2) {
            for &p in b.iter().filter(|&&p| p != e1 && p != e2) {
                labeling[p as usize] = next;
                next += 1;
            }
        }
    }
    debug_assert_eq!(next, 8, "a verified SQS(10) has four blocks through a pair");
    let design = s10.relabel(&labeling, 10)?;
    Ok(NormalizedS10 { design, labeling })
}

/// `Sa` on `[0,n)`, `Sb` on `[n,2n)` and the bipartite design across; the
/// result is verified and contains both halves verbatim.
pub fn double(sa: &Design, sb: &Design, bbd: &Bbd) -> Result<Design> {
    if sa.kind() != sb.kind() {
        return Err(Error::KindMismatch(sa.kind().to_string(), sb.kind().to_string()));
    }
    if sa.kind() == Kind::Partial {
        return Err(Error::KindMismatch("sqs or s46".into(), Kind::Partial.to_string()));
    }
    let n = sa.v();
    if sb.v() != n || bbd.m() != n {
        return Err(Error::OrderMismatch(format!(
            "halves of order {} and {}, bipartite design with groups of {}",
            n,
            sb.v(),
            bbd.m()
        )));
    }
    let mut blocks = Vec::with_capacity(sa.len() + sb.len() + bbd.len());
    blocks.extend(sa.blocks().iter().cloned());
    blocks.extend(sb.shifted(n));
    blocks.extend(bbd.embedded(0, n));
    let out = Design::new(sa.kind(), 2 * n, blocks)?;
    ensure_exact(&out, "doubled design")?;
    Ok(out)
}

/// Point layout of the `8n+2` assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLayout {
    n: u32,
}

impl GroupLayout {
    pub fn new(n: u32) -> Self {
        GroupLayout { n }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn v(&self) -> u32 {
        8 * self.n + 2
    }

    /// Label of `(i, δ)`.
    pub fn label(i: u32, delta: u32) -> u32 {
        2 * i + delta
    }

    /// First point of `A_l`.
    pub fn group_start(&self, label: u32) -> u32 {
        label * self.n
    }

    pub fn e1(&self) -> u32 {
        8 * self.n
    }

    pub fn e2(&self) -> u32 {
        8 * self.n + 1
    }

    /// Group label of `p`, `None` for `e₁` and `e₂`.
    pub fn group_of(&self, p: u32) -> Option<u32> {
        (p < 8 * self.n).then(|| p / self.n)
    }

    /// Support of hole `i`: `A_(i,0) ∪ A_(i,1) ∪ {e₁,e₂}`.
    pub fn hole(&self, i: u32) -> Hole {
        let mut pts: Vec<u32> = (2 * i * self.n..(2 * i + 2) * self.n).collect();
        pts.extend([self.e1(), self.e2()]);
        Hole::new(pts, Kind::Sqs).expect("hole has at least 4 points")
    }

    /// Local point `j` of an SQS(2n+2) placed on hole `i`.
    pub fn hole_point(&self, i: u32, j: u32) -> u32 {
        if j < 2 * self.n {
            2 * i * self.n + j
        } else {
            self.e1() + (j - 2 * self.n)
        }
    }

    /// Coverage category of a triple; see [`CATEGORY_LABELS`].
    pub fn category(&self, t: [u32; 3]) -> usize {
        let g = t.map(|p| self.group_of(p));
        let es = g.iter().filter(|x| x.is_none()).count();
        if es >= 2 {
            return E1E2;
        }
        let labels: Vec<u32> = g.iter().flatten().copied().collect();
        let same_i = labels.iter().all(|&l| l / 2 == labels[0] / 2);
        if same_i {
            return HOLE;
        }
        if es == 1 {
            return ONE_E;
        }
        if labels[0] != labels[1] && labels[0] != labels[2] && labels[1] != labels[2] {
            THREE_GROUPS
        } else {
            TWO_SAME
        }
    }
}

const THREE_GROUPS: usize = 0;
const ONE_E: usize = 1;
const TWO_SAME: usize = 2;
const HOLE: usize = 3;
const E1E2: usize = 4;

/// Triple categories of the assembly, indexed by [`GroupLayout::category`].
pub const CATEGORY_LABELS: [&str; 5] =
    ["three-groups", "one-e-cross", "two-same-group-cross", "hole-internal", "e1-e2"];

/// The 24 label pairs `(l0, l1)`, `l0 < l1`, lying in different `i`.
pub fn cross_pairs() -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(24);
    for l0 in 0..8 {
        for l1 in l0 + 1..8 {
            if l0 / 2 != l1 / 2 {
                out.push((l0, l1));
            }
        }
    }
    out
}

/// Block counts of R1..R4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartCounts {
    pub r1: u64,
    pub r2: u64,
    pub r3: u64,
    pub r4: u64,
}

impl PartCounts {
    /// 14(n³−n²), 26n², 6n²(n−1) and (2n+2)(2n+1)n/3 (zero without R4).
    pub fn expected(n: u64, complete: bool) -> Self {
        PartCounts {
            r1: 14 * (n * n * n - n * n),
            r2: 26 * n * n,
            r3: 6 * n * n * (n - 1),
            r4: if complete { (2 * n + 2) * (2 * n + 1) * n / 3 } else { 0 },
        }
    }

    pub fn total(&self) -> u64 {
        self.r1 + self.r2 + self.r3 + self.r4
    }
}

#[derive(Debug, Clone)]
pub struct Theorem3Output {
    pub design: Design,
    pub holes: Vec<Hole>,
    pub part_counts: PartCounts,
}

/// Labels of `s` plus the smallest label outside it, ascending, and the
/// position of that extra label.
fn extended_coords(s: &[u32]) -> (Vec<usize>, usize) {
    let w = (0..8).find(|l| !s.contains(l)).expect("a 4-block misses some label");
    let mut coords: Vec<usize> = s.iter().map(|&l| l as usize).collect();
    coords.push(w as usize);
    coords.sort_unstable();
    let drop = coords.iter().position(|&c| c == w as usize).unwrap();
    (coords, drop)
}

/// `M_s` and its distance-2 extension `C_s` for a block `s` of the SQS(8).
pub fn r1_codes(m: &MdsCode, s: &[u32]) -> Result<(MdsCode, MdsCode)> {
    let (coords, drop) = extended_coords(s);
    let m5 = project(m, &coords)?;
    let c_s = extend_to_distance2(&m5, drop)?;
    let ms_coords: Vec<usize> = s.iter().map(|&l| l as usize).collect();
    let m_s = project(m, &ms_coords)?;
    Ok((m_s, c_s))
}

fn check_inputs(
    n: u32,
    s8: &Design,
    s10n: &Design,
    m: &MdsCode,
    bbds: &[Bbd],
    ds: Option<&[Design]>,
) -> Result<()> {
    let fail = |what: String| Err(Error::PreconditionFailure(what));
    if n < 2 || n % 2 != 0 || !is_admissible(2 * n + 2, Kind::Sqs) {
        return fail(format!("n={n} must be even with 2n+2 admissible"));
    }
    if s8.kind() != Kind::Sqs || s8.v() != 8 || !verify_design(s8)?.is_exact() {
        return fail("S8 is not a verified SQS(8)".into());
    }
    if s10n.kind() != Kind::Sqs || s10n.v() != 10 || !verify_design(s10n)?.is_exact() {
        return fail("S10 is not a verified SQS(10)".into());
    }
    let normal: Vec<Vec<u32>> = (0..4).map(|i| vec![2 * i, 2 * i + 1, 8, 9]).collect();
    if !s10n.contains_all(&normal) {
        return fail("S10 is not normalized: missing some {2i,2i+1,8,9}".into());
    }
    if m.d() != 8 || m.q() != n || m.dist() != 7 || !verify_mds(m)?.valid {
        return fail(format!("M is not a verified MDS(7,8,{n}) code"));
    }
    if bbds.len() != 24 {
        return fail(format!("{} bipartite designs supplied, 24 required", bbds.len()));
    }
    for (k, b) in bbds.iter().enumerate() {
        if b.m() != n || !verify_bbd(b)?.valid {
            return fail(format!("bipartite design {k} is not a verified 3-BBD with groups of {n}"));
        }
    }
    if let Some(ds) = ds {
        if ds.len() != 4 {
            return fail(format!("{} hole systems supplied, 4 required", ds.len()));
        }
        for (i, d) in ds.iter().enumerate() {
            if d.kind() != Kind::Sqs || d.v() != 2 * n + 2 || !verify_design(d)?.is_exact() {
                return fail(format!("D{i} is not a verified SQS({})", 2 * n + 2));
            }
        }
    }
    Ok(())
}

/// Assembles SQS(8n+2) from its ingredients, or the partial design with four
/// SQS(2n+2)-shaped holes when `ds` is `None`.
///
/// `bbds[k]` is placed on the pair `cross_pairs()[k]`. The output is checked:
/// complete designs by [`verify_design`], holes mode by the category profile
/// (every triple outside the holes once, every triple inside none).
pub fn theorem3_assemble(
    n: u32,
    s8: &Design,
    s10n: &Design,
    m: &MdsCode,
    bbds: &[Bbd],
    ds: Option<&[Design]>,
    opts: &CoverageOptions,
) -> Result<Theorem3Output> {
    check_inputs(n, s8, s10n, m, bbds, ds)?;
    let layout = GroupLayout::new(n);
    let nn = n as u64;
    let expected = PartCounts::expected(nn, ds.is_some());
    let mut blocks: Vec<Vec<u32>> = Vec::with_capacity(expected.total() as usize);
    let mut counts = PartCounts::default();

    for s in s8.blocks() {
        let (m_s, c_s) = r1_codes(m, s)?;
        let before = blocks.len();
        blocks.extend(
            c_s.words()
                .filter(|w| !m_s.contains(w))
                .map(|w| w.iter().zip(s).map(|(&x, &l)| l * n + x).collect()),
        );
        counts.r1 += (blocks.len() - before) as u64;
    }

    let (e1, e2) = (layout.e1(), layout.e2());
    let p_template: Vec<&Vec<u32>> =
        s10n.blocks().iter().filter(|b| !(b.contains(&8) && b.contains(&9))).collect();
    for w in m.words() {
        for b in &p_template {
            let mut blk: Vec<u32> = b
                .iter()
                .map(|&p| match p {
                    8 => e1,
                    9 => e2,
                    l => l * n + w[l as usize],
                })
                .collect();
            blk.sort_unstable();
            blocks.push(blk);
        }
        counts.r2 += p_template.len() as u64;
    }

    for (b, (l0, l1)) in bbds.iter().zip(cross_pairs()) {
        blocks.extend(b.embedded(layout.group_start(l0), layout.group_start(l1)));
        counts.r3 += b.len() as u64;
    }

    if let Some(ds) = ds {
        for (i, d) in ds.iter().enumerate() {
            blocks.extend(d.blocks().iter().map(|b| {
                b.iter().map(|&j| layout.hole_point(i as u32, j)).collect::<Vec<u32>>()
            }));
            counts.r4 += d.len() as u64;
        }
    }

    if counts != expected {
        return Err(Error::AssemblyInvariantBroken(format!(
            "part counts {counts:?}, expected {expected:?}"
        )));
    }
    if ds.is_some() && counts.total() != sqs_block_count(layout.v() as u64)? {
        return Err(Error::AssemblyInvariantBroken(format!(
            "{} blocks, expected SQS({}) count",
            counts.total(),
            layout.v()
        )));
    }
    debug_assert_eq!(bbd_block_count(nn) * 24, expected.r3);

    let kind = if ds.is_some() { Kind::Sqs } else { Kind::Partial };
    let design = Design::new(kind, layout.v(), blocks)?;
    let classify = |t: [u32; 3]| layout.category(t);
    let classifier = Classifier {
        labels: CATEGORY_LABELS.iter().map(|s| s.to_string()).collect(),
        classify: &classify,
    };
    let report = coverage_profile(design.v(), design.blocks(), &classifier, opts);
    let ok = if ds.is_some() {
        report.is_exact()
    } else {
        report.categories.iter().enumerate().all(|(c, cat)| match c {
            HOLE | E1E2 => cat.once == 0 && cat.multi == 0,
            _ => cat.uncovered == 0 && cat.multi == 0,
        })
    };
    if !ok {
        return Err(Error::VerificationFailure(format!(
            "assembly coverage {:?}, witnesses uncovered {:?} multi {:?}",
            report.categories, report.uncovered_witnesses, report.multi_witnesses
        )));
    }
    Ok(Theorem3Output {
        design,
        holes: (0..4).map(|i| layout.hole(i)).collect(),
        part_counts: counts,
    })
}

/// Standard inputs for [`theorem3_assemble`] apart from the hole systems.
#[derive(Debug, Clone)]
pub struct Theorem3Ingredients {
    pub s8: Design,
    pub s10: NormalizedS10,
    pub m: MdsCode,
    pub bbds: Vec<Bbd>,
}

/// Builds the boolean SQS(8), a searched and normalized SQS(10), the code
/// from 6 MOLS of order `n`, and 24 round-robin bipartite designs whose
/// factor pairings are rotated by the pair index.
pub fn theorem3_ingredients(n: u32, seed: u64) -> Result<Theorem3Ingredients> {
    if n < 2 || n % 2 != 0 || !is_admissible(2 * n + 2, Kind::Sqs) {
        return Err(Error::PreconditionFailure(format!("n={n} must be even with 2n+2 admissible")));
    }
    let family = mols_supply(n, 6).map_err(|e| {
        Error::PreconditionFailure(format!("no MDS(7,8,{n}) code available: {e}"))
    })?;
    let m = mds_from_mols(&family)?;
    let s10 = normalize_s10(&search_small_sqs(10, seed, DEFAULT_SEARCH_BUDGET)?, 8, 9)?;
    let f = round_robin_one_factorization(n)?;
    let r = n as usize - 1;
    let bbds = (0..24)
        .map(|k| {
            let pairing: Vec<usize> = (0..r).map(|i| (i + k) % r).collect();
            bbd_from_factorizations(&f, &f, &pairing)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Theorem3Ingredients {
        s8: boolean_sqs8(),
        s10,
        m,
        bbds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rr_bbd(m: u32) -> Bbd {
        let f = round_robin_one_factorization(m).unwrap();
        let pairing: Vec<usize> = (0..m as usize - 1).collect();
        bbd_from_factorizations(&f, &f, &pairing).unwrap()
    }

    #[test]
    fn sqs8() {
        let d = boolean_sqs8();
        assert_eq!(d.len(), 14);
        assert!(d.blocks().contains(&vec![0, 1, 2, 3]));
        let r = verify_design(&d).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.once, 56);
    }

    #[test]
    fn s46_bases() {
        assert!(s46_base(2).unwrap().is_empty());
        assert_eq!(s46_base(4).unwrap().blocks(), &[vec![0, 1, 2, 3]]);
        assert_eq!(s46_base(6).unwrap().blocks(), &[vec![0, 1, 2, 3, 4, 5]]);
        assert!(s46_base(8).is_err());
    }

    #[test]
    fn doubling() {
        let s8 = boolean_sqs8();
        let s16 = double(&s8, &s8, &rr_bbd(8)).unwrap();
        assert_eq!(s16.len(), 140);
        assert!(s16.contains_all(s8.blocks()));
        let s6 = s46_base(6).unwrap();
        let s12 = double(&s6, &s6, &rr_bbd(6)).unwrap();
        assert_eq!(s12.len(), 47);
        assert!(matches!(double(&s8, &s6, &rr_bbd(8)), Err(Error::KindMismatch(..))));
        assert!(matches!(double(&s8, &s8, &rr_bbd(6)), Err(Error::OrderMismatch(_))));
    }

    #[test]
    fn categories_partition_holes() {
        let l = GroupLayout::new(2);
        assert_eq!(l.category([0, 1, 2]), HOLE);
        assert_eq!(l.category([0, 4, 8]), THREE_GROUPS);
        assert_eq!(l.category([0, 1, 4]), TWO_SAME);
        assert_eq!(l.category([0, 4, 16]), ONE_E);
        assert_eq!(l.category([0, 16, 17]), E1E2);
        assert_eq!(l.category([0, 3, 17]), HOLE);
        assert_eq!(cross_pairs().len(), 24);
    }

    #[test]
    fn normalized_s10() {
        let s10 = search_small_sqs(10, 0, DEFAULT_SEARCH_BUDGET).unwrap();
        let e1 = s10.blocks()[0][0];
        let e2 = s10.blocks()[0][1];
        let norm = normalize_s10(&s10, e1, e2).unwrap();
        for i in 0..4 {
            assert!(norm.design.blocks().contains(&vec![2 * i, 2 * i + 1, 8, 9]));
        }
        let through: Vec<_> =
            norm.design.blocks().iter().filter(|b| b.contains(&8) && b.contains(&9)).collect();
        assert_eq!(through.len(), 4);
        assert_eq!(norm.labeling[e1 as usize], 8);
    }

    #[test]
    fn holes_mode_n16() {
        let ing = theorem3_ingredients(16, 0).unwrap();
        let opts = CoverageOptions::default();
        let out =
            theorem3_assemble(16, &ing.s8, &ing.s10.design, &ing.m, &ing.bbds, None, &opts).unwrap();
        assert_eq!(out.part_counts, PartCounts::expected(16, false));
        assert_eq!(out.design.kind(), Kind::Partial);
        assert_eq!(out.holes.len(), 4);
        assert_eq!(out.holes[3].points.len(), 34);
    }

    #[test]
    fn assembly_preconditions() {
        assert!(matches!(theorem3_ingredients(6, 0), Err(Error::PreconditionFailure(_))));
        assert!(matches!(theorem3_ingredients(5, 0), Err(Error::PreconditionFailure(_))));
        assert!(matches!(theorem3_ingredients(4, 0), Err(Error::PreconditionFailure(_))));
        let ing = theorem3_ingredients(16, 0).unwrap();
        let opts = CoverageOptions::default();
        let r = theorem3_assemble(16, &ing.s8, &ing.s10.design, &ing.m, &ing.bbds[1..], None, &opts);
        assert!(matches!(r, Err(Error::PreconditionFailure(_))));
        let ds = vec![boolean_sqs8(); 4];
        let r = theorem3_assemble(16, &ing.s8, &ing.s10.design, &ing.m, &ing.bbds, Some(&ds), &opts);
        assert!(matches!(r, Err(Error::PreconditionFailure(_))));
    }
}
