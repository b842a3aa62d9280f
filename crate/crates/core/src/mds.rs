//! MDS codes as word sets, and the operations that build and reshape them.
//!
//! An MDS code of length `d`, alphabet size `q` and minimum distance `dist`
//! has `q^k` words with `k = d − dist + 1`, and any `k` coordinates determine
//! the word. The same word set read as blocks over `d` groups of size `q` is
//! an H-design.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{prime_power, Gf};
use crate::latin::MolsFamily;
use crate::verify::{verify_mds, MdsWitness};

/// Words are stored flat, sorted lexicographically and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MdsCode {
    d: usize,
    q: u32,
    dist: usize,
    symbols: Vec<u32>,
}

impl MdsCode {
    /// Structural checks only (word length, distance range); use
    /// [`verify_mds`] for the MDS property itself.
    pub fn new(d: usize, q: u32, dist: usize, words: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.len() != d) {
            return Err(Error::BadParams(format!("word {w:?} does not have length {d}")));
        }
        let mut words = words;
        words.sort_unstable();
        words.dedup();
        Self::from_sorted_flat(d, q, dist, words.concat())
    }

    fn from_sorted_flat(d: usize, q: u32, dist: usize, symbols: Vec<u32>) -> Result<Self> {
        if d == 0 || dist == 0 || dist > d {
            return Err(Error::BadParams(format!("length {d} with distance {dist}")));
        }
        Ok(MdsCode { d, q, dist, symbols })
    }

    /// Flat word list in any order (length a multiple of `d`).
    pub fn from_flat(d: usize, q: u32, dist: usize, flat: Vec<u32>) -> Result<Self> {
        if d == 0 || flat.len() % d != 0 {
            return Err(Error::BadParams("flat word list not a multiple of d".into()));
        }
        Self::new(d, q, dist, flat.chunks_exact(d).map(<[u32]>::to_vec).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dist(&self) -> usize {
        self.dist
    }

    /// Number of information coordinates `d − dist + 1`.
    pub fn info_len(&self) -> usize {
        self.d - self.dist + 1
    }

    pub fn len(&self) -> usize {
        self.symbols.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn word(&self, i: usize) -> &[u32] {
        &self.symbols[i * self.d..(i + 1) * self.d]
    }

    pub fn words(&self) -> std::slice::ChunksExact<'_, u32> {
        self.symbols.chunks_exact(self.d)
    }

    pub fn contains(&self, w: &[u32]) -> bool {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(w) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Every word of `other` is a word here.
    pub fn contains_code(&self, other: &MdsCode) -> bool {
        other.words().all(|w| self.contains(w))
    }

    /// Fails with [`Error::VerificationFailure`] unless the code is MDS.
    pub fn verified(self) -> Result<Self> {
        let chk = verify_mds(&self)?;
        if chk.valid {
            Ok(self)
        } else {
            Err(Error::VerificationFailure(format!(
                "not an MDS({},{},{}) code: {:?}",
                self.dist, self.d, self.q, chk.witness
            )))
        }
    }

    /// Blocks of the equivalent H-design: coordinate `i` with symbol `s` is
    /// point `groups[i] * q + s`.
    pub fn h_design_blocks(&self, groups: &[u32]) -> Vec<Vec<u32>> {
        self.words()
            .map(|w| w.iter().zip(groups).map(|(&s, &g)| g * self.q + s).collect())
            .collect()
    }
}

/// Degree-≤1 evaluation code (distance `d−1`) or the mod-`q` parity code (distance 2).
pub fn rs_mds_code(q: u32, d: usize, dist: usize) -> Result<MdsCode> {
    if d < 2 {
        return Err(Error::BadParams(format!("length {d} < 2")));
    }
    if dist == 2 {
        let k = d - 1;
        let total = (q as u64).checked_pow(k as u32).filter(|&t| t <= 1 << 24);
        let total = total.ok_or_else(|| Error::BadParams("code too large".into()))?;
        let mut flat = Vec::with_capacity(total as usize * d);
        for idx in 0..total {
            let mut rest = idx;
            let mut info = vec![0u32; k];
            for s in info.iter_mut().rev() {
                *s = (rest % q as u64) as u32;
                rest /= q as u64;
            }
            let sum: u64 = info.iter().map(|&s| s as u64).sum();
            flat.extend_from_slice(&info);
            flat.push(((q as u64 - sum % q as u64) % q as u64) as u32);
        }
        return MdsCode::from_sorted_flat(d, q, 2, flat)?.verified();
    }
    if dist != d - 1 {
        return Err(Error::BadParams(format!("distance {dist} must be 2 or d-1={}", d - 1)));
    }
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    if d > q as usize {
        return Err(Error::BadParams(format!("{d} evaluation points needed, field has {q}")));
    }
    let f = Gf::new(q)?;
    let mut flat = Vec::with_capacity((q * q) as usize * d);
    for c0 in 0..q {
        for c1 in 0..q {
            flat.extend((0..d as u32).map(|a| f.add(c0, f.mul(c1, a))));
        }
    }
    MdsCode::from_flat(d, q, dist, flat)?.verified()
}

/// Words `(x, y, L_1(x,y), …, L_t(x,y))`: an MDS(t+1, t+2, q) code.
pub fn mds_from_mols(family: &MolsFamily) -> Result<MdsCode> {
    let q = family.order();
    let d = family.len() + 2;
    let mut flat = Vec::with_capacity((q * q) as usize * d);
    for x in 0..q {
        for y in 0..q {
            flat.push(x);
            flat.push(y);
            flat.extend(family.squares().iter().map(|l| l.get(x, y)));
        }
    }
    MdsCode::from_sorted_flat(d, q, d - 1, flat)?.verified()
}

/// Restriction to the ascending coordinate list `coords`; distance drops by
/// the number of deleted coordinates.
pub fn project(code: &MdsCode, coords: &[usize]) -> Result<MdsCode> {
    let needed = code.info_len();
    if coords.len() < needed {
        return Err(Error::TooFewCoords {
            given: coords.len(),
            needed,
        });
    }
    if coords.windows(2).any(|w| w[0] >= w[1]) || coords.last().is_some_and(|&c| c >= code.d) {
        return Err(Error::BadParams(format!("coordinates {coords:?} not ascending in range")));
    }
    let dist = code.dist - (code.d - coords.len());
    let words = code
        .words()
        .map(|w| coords.iter().map(|&c| w[c]).collect())
        .collect();
    MdsCode::new(coords.len(), code.q, dist, words)?.verified()
}

/// Extends the 4-coordinate projection of a length-5, distance-4 code to a
/// distance-2 code of length 4.
///
/// With the remaining coordinates read as `(x, y, u, v)` and the dropped one
/// as `h`, the quasigroup `φ(u, v) := h` is read off the words and the result
/// is `{(x, y, u, v) : φ(u, v) = h(x, y)}`.
pub fn extend_to_distance2(m5: &MdsCode, drop: usize) -> Result<MdsCode> {
    if m5.d != 5 || m5.dist != 4 || drop >= 5 {
        return Err(Error::BadParams("expected an MDS(4,5,q) code and drop < 5".into()));
    }
    let q = m5.q as usize;
    let rest: Vec<usize> = (0..5).filter(|&c| c != drop).collect();
    let (cx, cy, cu, cv) = (rest[0], rest[1], rest[2], rest[3]);
    let mut phi = vec![u32::MAX; q * q];
    let mut h_of = vec![u32::MAX; q * q];
    for w in m5.words() {
        if w.iter().any(|&s| s as usize >= q) {
            return Err(Error::AlphabetViolation {
                symbol: *w.iter().max().unwrap(),
                q: m5.q,
            });
        }
        let h = w[drop];
        for (table, key, what) in [
            (&mut phi, w[cu] as usize * q + w[cv] as usize, "φ(u,v)"),
            (&mut h_of, w[cx] as usize * q + w[cy] as usize, "h(x,y)"),
        ] {
            if table[key] != u32::MAX && table[key] != h {
                return Err(Error::NotWellDefined(format!(
                    "{what} assigned both {} and {h} (word {w:?})",
                    table[key]
                )));
            }
            table[key] = h;
        }
    }
    if phi.contains(&u32::MAX) || h_of.contains(&u32::MAX) {
        return Err(Error::NotWellDefined("φ or h is not total".into()));
    }
    // cells of φ grouped by value
    let mut by_value: Vec<Vec<(u32, u32)>> = vec![Vec::new(); q];
    for u in 0..q {
        for v in 0..q {
            let s = phi[u * q + v];
            if s as usize >= q {
                return Err(Error::AlphabetViolation { symbol: s, q: m5.q });
            }
            by_value[s as usize].push((u as u32, v as u32));
        }
    }
    let mut flat = Vec::with_capacity(q * q * q * 4);
    for x in 0..q as u32 {
        for y in 0..q as u32 {
            for &(u, v) in &by_value[h_of[x as usize * q + y as usize] as usize] {
                flat.extend_from_slice(&[x, y, u, v]);
            }
        }
    }
    let c = MdsCode::from_flat(4, m5.q, 2, flat)?;
    if c.len() != q * q * q {
        return Err(Error::NotWellDefined(format!("{} words, expected {}", c.len(), q * q * q)));
    }
    let c = c.verified()?;
    let projected = project(m5, &rest)?;
    if !c.contains_code(&projected) {
        return Err(Error::VerificationFailure("extension misses the projection".into()));
    }
    Ok(c)
}

/// Per-coordinate symbol subsets `A_1 × … × A_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordBox {
    sets: Vec<Vec<u32>>,
}

impl CoordBox {
    pub fn new(sets: Vec<Vec<u32>>) -> Result<Self> {
        let mut sets = sets;
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::BadParams("empty coordinate set in box".into()));
            }
        }
        Ok(CoordBox { sets })
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// Common side length; `None` for a mixed box.
    pub fn side(&self) -> Option<u32> {
        let k = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == k).then_some(k as u32)
    }

    fn local(&self, coord: usize, symbol: u32) -> Option<u32> {
        self.sets[coord].binary_search(&symbol).ok().map(|i| i as u32)
    }

    /// Maps a word over `[0,k)` back into the box.
    pub fn embed(&self, w: &[u32]) -> Vec<u32> {
        w.iter().enumerate().map(|(i, &s)| self.sets[i][s as usize]).collect()
    }

    /// Same box with coordinates reordered: coordinate `i` of the result is
    /// coordinate `perm[i]` of this box.
    pub fn permuted(&self, perm: &[usize]) -> CoordBox {
        CoordBox {
            sets: perm.iter().map(|&p| self.sets[p].clone()).collect(),
        }
    }
}

/// `code ∩ box`, relabeled to dense symbols `[0,k)` per coordinate.
///
/// The result keeps the ambient declared distance; it is MDS over the box
/// only if [`verify_mds`] says so. An empty intersection is an empty code.
pub fn subcode_extract(code: &MdsCode, bx: &CoordBox) -> Result<MdsCode> {
    if bx.sets.len() != code.d {
        return Err(Error::BadParams("box dimension differs from code length".into()));
    }
    let k = bx
        .side()
        .ok_or_else(|| Error::BadParams("box sides differ".into()))?;
    let words = code
        .words()
        .filter_map(|w| w.iter().enumerate().map(|(i, &s)| bx.local(i, s)).collect())
        .collect();
    MdsCode::new(code.d, k, code.dist, words)
}

/// Replaces the subcode of `code` inside `bx` by `replacement` (given over
/// `[0,k)` and embedded through the box).
pub fn subcode_swap(code: &MdsCode, bx: &CoordBox, replacement: &MdsCode) -> Result<MdsCode> {
    let sub = subcode_extract(code, bx)?;
    let same_shape = replacement.d == sub.d && replacement.dist == sub.dist && replacement.q == sub.q;
    if !same_shape || replacement.len() != sub.len() {
        return Err(Error::ParameterMismatch(format!(
            "replacement (d={}, q={}, dist={}, {} words) vs subcode (d={}, q={}, dist={}, {} words)",
            replacement.d,
            replacement.q,
            replacement.dist,
            replacement.len(),
            sub.d,
            sub.q,
            sub.dist,
            sub.len()
        )));
    }
    for (name, c) in [("subcode", &sub), ("replacement", replacement)] {
        if !verify_mds(c)?.valid {
            return Err(Error::ParameterMismatch(format!("{name} is not MDS over the box")));
        }
    }
    let mut words: Vec<Vec<u32>> = code
        .words()
        .filter(|w| !w.iter().enumerate().all(|(i, &s)| bx.local(i, s).is_some()))
        .map(<[u32]>::to_vec)
        .collect();
    words.extend(replacement.words().map(|w| bx.embed(w)));
    let out = MdsCode::new(code.d, code.q, code.dist, words)?;
    match verify_mds(&out)? {
        chk if chk.valid => Ok(out),
        chk => Err(Error::SwapInvalid(format!("{:?}", chk.witness))),
    }
}

/// A ternary quasigroup `φ(x,y,u)`; its graph `{(x,y,u,φ)}` is an MDS(2,4,k) code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quasigroup3 {
    k: u32,
    table: Vec<u32>,
}

impl Quasigroup3 {
    /// Table indexed `(x·k + y)·k + u`; rejected unless every line is a permutation.
    pub fn new(k: u32, table: Vec<u32>) -> Result<Self> {
        let qg = Quasigroup3 { k, table };
        if qg.table.len() != (k * k * k) as usize || !verify_mds(&qg.to_code())?.valid {
            return Err(Error::BadParams("table is not a ternary quasigroup".into()));
        }
        Ok(qg)
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn get(&self, x: u32, y: u32, u: u32) -> u32 {
        self.table[((x * self.k + y) * self.k + u) as usize]
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn to_code(&self) -> MdsCode {
        let k = self.k;
        let mut flat = Vec::with_capacity(self.table.len() * 4);
        for x in 0..k {
            for y in 0..k {
                for u in 0..k {
                    flat.extend_from_slice(&[x, y, u, self.get(x, y, u)]);
                }
            }
        }
        MdsCode::from_sorted_flat(4, k, 2, flat).expect("length 4, distance 2")
    }
}

pub const DEFAULT_QUASIGROUP_RESTARTS: u64 = 1_000;

/// Random ternary quasigroup by cell-by-cell completion with backtracking and
/// restarts. Deterministic per seed; not uniformly distributed.
pub fn random_quasigroup3(k: u32, seed: u64) -> Result<Quasigroup3> {
    random_quasigroup3_with_budget(k, seed, DEFAULT_QUASIGROUP_RESTARTS)
}

pub fn random_quasigroup3_with_budget(k: u32, seed: u64, restarts: u64) -> Result<Quasigroup3> {
    if k == 0 || k > 32 {
        return Err(Error::BadParams(format!("order {k} outside 1..=32")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = k as usize;
    let node_limit = 200 * (n * n * n) as u64;
    for _ in 0..restarts {
        let mut st = CubeState::new(n);
        let mut nodes = 0;
        if fill_random(&mut st, 0, &mut rng, &mut nodes, node_limit) {
            return Quasigroup3::new(k, st.table.iter().map(|&s| s as u32).collect());
        }
    }
    Err(Error::SearchExhausted { attempts: restarts })
}

/// Partial Latin cube with used-symbol masks along the three axis lines.
pub(crate) struct CubeState {
    pub n: usize,
    pub table: Vec<u8>,
    // masks indexed by the two fixed coordinates of each line
    pub xy: Vec<u32>,
    pub xu: Vec<u32>,
    pub yu: Vec<u32>,
}

impl CubeState {
    pub fn new(n: usize) -> Self {
        CubeState {
            n,
            table: vec![0; n * n * n],
            xy: vec![0; n * n],
            xu: vec![0; n * n],
            yu: vec![0; n * n],
        }
    }

    #[inline]
    pub fn free(&self, cell: usize) -> u32 {
        let n = self.n;
        let (x, y, u) = (cell / (n * n), cell / n % n, cell % n);
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        full & !(self.xy[x * n + y] | self.xu[x * n + u] | self.yu[y * n + u])
    }

    #[inline]
    pub fn toggle(&mut self, cell: usize, s: usize) {
        let n = self.n;
        let (x, y, u) = (cell / (n * n), cell / n % n, cell % n);
        let bit = 1u32 << s;
        self.xy[x * n + y] ^= bit;
        self.xu[x * n + u] ^= bit;
        self.yu[y * n + u] ^= bit;
        self.table[cell] = s as u8;
    }
}

fn fill_random(st: &mut CubeState, cell: usize, rng: &mut ChaCha8Rng, nodes: &mut u64, limit: u64) -> bool {
    if cell == st.table.len() {
        return true;
    }
    *nodes += 1;
    if *nodes > limit {
        return false;
    }
    let free = st.free(cell);
    let mut choices: Vec<usize> = (0..st.n).filter(|&s| free >> s & 1 == 1).collect();
    choices.shuffle(rng);
    for s in choices {
        st.toggle(cell, s);
        if fill_random(st, cell + 1, rng, nodes, limit) {
            return true;
        }
        st.toggle(cell, s);
    }
    false
}

/// Human-readable description of a failed MDS check.
pub fn describe_witness(w: &MdsWitness) -> String {
    match w {
        MdsWitness::Collision { coords, first, second } => {
            format!("words {first:?} and {second:?} agree on coordinates {coords:?}")
        }
        MdsWitness::EmptyFace { coords, values } => {
            format!("no word has {values:?} on coordinates {coords:?}")
        }
    }
}
