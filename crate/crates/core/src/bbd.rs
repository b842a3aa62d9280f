//! 3-wise bipartite balanced designs.
//!
//! A [`Bbd`] with group size `m` lives on points `0..2m` with groups
//! `[0,m)` and `[m,2m)`. Every block meets each group in two points, and
//! every triple meeting both groups lies in exactly one block.

use crate::error::{Error, Result};
use crate::latin::{symmetric_nilpotent_with_subsquares, OneFactorization};
use crate::mds::{subcode_swap, CoordBox, MdsCode, Quasigroup3};
use crate::verify::{verify_bbd_blocks, verify_eq1, verify_mds, BbdCheck};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bbd {
    m: u32,
    blocks: Vec<[u32; 4]>,
}

/// m²(m−1)/4.
pub fn bbd_block_count(m: u64) -> u64 {
    m * m * m.saturating_sub(1) / 4
}

impl Bbd {
    /// Sorts the blocks and runs the full verifier.
    pub fn new(m: u32, blocks: Vec<[u32; 4]>) -> Result<Self> {
        let bbd = Bbd::new_unchecked(m, blocks);
        let BbdCheck { valid, report } = verify_bbd_blocks(m, &bbd.blocks)?;
        if !valid {
            return Err(Error::VerificationFailure(format!(
                "not a 3-BBD with groups of size {m}: {} uncovered, {} multiply covered",
                report.uncovered, report.multi
            )));
        }
        Ok(bbd)
    }

    /// Sorted but unverified; for feeding possibly broken block sets to the verifier.
    pub fn new_unchecked(m: u32, mut blocks: Vec<[u32; 4]>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable();
        Bbd { m, blocks }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn blocks(&self) -> &[[u32; 4]] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks with group 1 mapped into `first` and group 2 into `second`.
    pub fn embedded(&self, first: u32, second: u32) -> impl Iterator<Item = Vec<u32>> + '_ {
        let m = self.m;
        self.blocks.iter().map(move |b| {
            b.iter()
                .map(|&p| if p < m { first + p } else { second + p - m })
                .collect()
        })
    }
}

/// Blocks `{x,y} ∪ {u+m, v+m}` for `{x,y} ∈ F1_i`, `{u,v} ∈ F2_{pairing[i]}`.
pub fn bbd_from_factorizations(
    f1: &OneFactorization,
    f2: &OneFactorization,
    pairing: &[usize],
) -> Result<Bbd> {
    let m = f1.order();
    if f2.order() != m {
        return Err(Error::OrderMismatch(format!("factorizations of order {m} and {}", f2.order())));
    }
    let r = f1.factors().len();
    let mut seen = vec![false; r];
    if pairing.len() != r || pairing.iter().any(|&j| j >= r || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::BadParams(format!("pairing {pairing:?} is not a permutation of 0..{r}")));
    }
    let mut blocks = Vec::with_capacity(bbd_block_count(m as u64) as usize);
    for (i, fi) in f1.factors().iter().enumerate() {
        for &(x, y) in fi {
            for &(u, v) in &f2.factors()[pairing[i]] {
                blocks.push([x, y, u + m, v + m]);
            }
        }
    }
    Bbd::new(m, blocks)
}

/// Reads a bipartite design off a length-4 distance-2 code closed under the
/// two coordinate swaps and containing all `(x,x,u,u)`: each word with
/// `x₁ ≠ x₂` gives the block `{x₁, x₂, x₃+q, x₄+q}`.
pub fn bbd_from_code(code: &MdsCode) -> Result<Bbd> {
    let q = code.q();
    if code.d() != 4 || code.dist() != 2 {
        return Err(Error::BadParams("expected a length-4 code of distance 2".into()));
    }
    if q % 2 != 0 {
        return Err(Error::OddOrder(q));
    }
    let chk = verify_mds(code)?;
    if !chk.valid {
        return Err(Error::VerificationFailure(format!("input is not MDS: {:?}", chk.witness)));
    }
    let eq1 = verify_eq1(code);
    if !eq1.holds {
        return Err(Error::SymmetryViolation(eq1.witness.unwrap_or_default()));
    }
    let mut blocks = Vec::new();
    for w in code.words() {
        if w[0] == w[1] {
            continue;
        }
        if w[2] == w[3] {
            return Err(Error::DegenerateWord(w.to_vec()));
        }
        if w[0] < w[1] && w[2] < w[3] {
            blocks.push([w[0], w[1], w[2] + q, w[3] + q]);
        }
    }
    let expected = (q as u64).pow(3) - (q as u64).pow(2);
    if 4 * blocks.len() as u64 != expected {
        return Err(Error::VerificationFailure(format!(
            "{} blocks, expected {}",
            blocks.len(),
            expected / 4
        )));
    }
    Bbd::new(q, blocks)
}

/// All four orderings of each block plus the diagonal words `(x,x,u,u)`.
pub fn code_from_bbd(bbd: &Bbd) -> Result<MdsCode> {
    let m = bbd.m;
    let mut words = Vec::with_capacity(4 * bbd.len() + (m * m) as usize);
    for b in &bbd.blocks {
        let (x, y, u, v) = (b[0], b[1], b[2] - m, b[3] - m);
        words.extend([vec![x, y, u, v], vec![y, x, u, v], vec![x, y, v, u], vec![y, x, v, u]]);
    }
    for x in 0..m {
        for u in 0..m {
            words.push(vec![x, x, u, u]);
        }
    }
    let code = MdsCode::new(4, m, 2, words)?.verified()?;
    let eq1 = verify_eq1(&code);
    if !eq1.holds {
        return Err(Error::SymmetryViolation(eq1.witness.unwrap_or_default()));
    }
    Ok(code)
}

/// `{(x,y,u,v) : f(x,y) = f(u,v)}` for a Latin square `f`.
pub fn equal_value_code(f: &crate::latin::LatinSquare) -> Result<MdsCode> {
    let q = f.order();
    let mut cells: Vec<Vec<(u32, u32)>> = vec![Vec::new(); q as usize];
    for u in 0..q {
        for v in 0..q {
            cells[f.get(u, v) as usize].push((u, v));
        }
    }
    let mut flat = Vec::with_capacity((q as usize).pow(3) * 4);
    for x in 0..q {
        for y in 0..q {
            for &(u, v) in &cells[f.get(x, y) as usize] {
                flat.extend_from_slice(&[x, y, u, v]);
            }
        }
    }
    MdsCode::from_flat(4, q, 2, flat)?.verified()
}

/// The coordinate permutations generated by the transpositions (01) and (23).
pub const SWAP_GROUP: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 2, 3], [0, 1, 3, 2], [1, 0, 3, 2]];

/// The equal-value code of `f` with the four boxes `K0×K1×K0×K1` (and their
/// images under [`SWAP_GROUP`]) replaced by coordinate-permuted copies of
/// `replacement`.
pub fn swapped_code(f: &crate::latin::LatinSquare, k: u32, replacement: &Quasigroup3) -> Result<MdsCode> {
    let q = f.order();
    if replacement.order() != k {
        return Err(Error::ParameterMismatch(format!(
            "replacement of order {} for k={k}",
            replacement.order()
        )));
    }
    let k0: Vec<u32> = (0..k).collect();
    let k1: Vec<u32> = (q - k..q).collect();
    let base = CoordBox::new(vec![k0.clone(), k1.clone(), k0, k1])?;
    let c = replacement.to_code();
    let mut code = equal_value_code(f)?;
    for tau in SWAP_GROUP {
        let permuted = MdsCode::new(
            4,
            k,
            2,
            c.words().map(|w| tau.iter().map(|&i| w[i]).collect()).collect(),
        )?;
        code = subcode_swap(&code, &base.permuted(&tau), &permuted)?;
    }
    let eq1 = verify_eq1(&code);
    if !eq1.holds {
        return Err(Error::SwapInvalid(format!("symmetry lost at {:?}", eq1.witness)));
    }
    Ok(code)
}

/// One bipartite design with groups of size `q` per replacement quasigroup of order `k`.
pub fn theorem2_family(q: u32, k: u32, replacements: &[Quasigroup3]) -> Result<Vec<Bbd>> {
    let f = symmetric_nilpotent_with_subsquares(q, k)?;
    replacements
        .iter()
        .map(|r| bbd_from_code(&swapped_code(&f, k, r)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::{round_robin_one_factorization, symmetric_nilpotent_ls};
    use crate::mds::random_quasigroup3;
    use crate::verify::verify_bbd;

    fn pairing_bbd(m: u32) -> Bbd {
        let f = round_robin_one_factorization(m).unwrap();
        let id: Vec<usize> = (0..m as usize - 1).collect();
        bbd_from_factorizations(&f, &f, &id).unwrap()
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(pairing_bbd(2).blocks(), &[[0, 1, 2, 3]]);
        let b4 = pairing_bbd(4);
        assert_eq!(b4.len(), 12);
        let chk = verify_bbd(&b4).unwrap();
        assert!(chk.valid);
        assert_eq!(chk.report.categories[0].once, 48);
        let f = round_robin_one_factorization(4).unwrap();
        let cyc = bbd_from_factorizations(&f, &f, &[1, 2, 0]).unwrap();
        assert_ne!(cyc, b4);
        for m in (2..=12).step_by(2) {
            assert_eq!(pairing_bbd(m).len() as u64, bbd_block_count(m as u64));
        }
    }

    #[test]
    fn missing_block_is_reported() {
        let mut blocks = pairing_bbd(4).blocks().to_vec();
        blocks.pop();
        let chk = verify_bbd(&Bbd::new_unchecked(4, blocks)).unwrap();
        assert!(!chk.valid);
        assert_eq!(chk.report.categories[0].uncovered, 4);
    }

    #[test]
    fn code_bridge() {
        let f2 = symmetric_nilpotent_ls(2).unwrap();
        let b = bbd_from_code(&equal_value_code(&f2).unwrap()).unwrap();
        assert_eq!(b.blocks(), &[[0, 1, 2, 3]]);
        assert_eq!(code_from_bbd(&b).unwrap().len(), 8);
        let f4 = symmetric_nilpotent_ls(4).unwrap();
        assert_eq!(bbd_from_code(&equal_value_code(&f4).unwrap()).unwrap().len(), 12);
        let c = code_from_bbd(&pairing_bbd(4)).unwrap();
        assert_eq!(c.len(), 64);
    }

    #[test]
    fn sum_code_violates_symmetry() {
        let mut words = Vec::new();
        for x in 0..4u32 {
            for y in 0..4 {
                for u in 0..4 {
                    words.push(vec![x, y, u, (x + y + 8 - u) % 4]);
                }
            }
        }
        let m = MdsCode::new(4, 4, 2, words).unwrap();
        assert!(matches!(bbd_from_code(&m), Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn round_trips() {
        for q in [2, 4, 8] {
            let b = pairing_bbd(q);
            let c = code_from_bbd(&b).unwrap();
            assert_eq!(bbd_from_code(&c).unwrap(), b);
            let f = symmetric_nilpotent_ls(q).unwrap();
            let code = equal_value_code(&f).unwrap();
            assert_eq!(code_from_bbd(&bbd_from_code(&code).unwrap()).unwrap(), code);
        }
    }

    #[test]
    fn family_small() {
        let reps: Vec<Quasigroup3> = [0, 1, 2, 3, 4, 5]
            .iter()
            .map(|&s| random_quasigroup3(2, s).unwrap())
            .collect();
        let fam = theorem2_family(8, 2, &reps).unwrap();
        for (i, a) in fam.iter().enumerate() {
            assert_eq!(a.m(), 8);
            for (j, b) in fam.iter().enumerate() {
                assert_eq!(a == b, reps[i] == reps[j]);
            }
        }
        assert!(matches!(theorem2_family(8, 3, &reps), Err(Error::BadK { .. })));
    }
}
