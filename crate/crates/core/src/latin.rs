//! Latin squares, MOLS families and 1-factorizations of complete graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{prime_power, prime_power_factors, Gf};

/// A q×q table over `0..q`, every row and column a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    q: u32,
    table: Vec<u32>,
}

fn is_latin(q: u32, table: &[u32]) -> bool {
    let n = q as usize;
    if table.len() != n * n {
        return false;
    }
    let mut rows = vec![0u64; n * n.div_ceil(64)];
    let mut cols = vec![0u64; n * n.div_ceil(64)];
    let stride = n.div_ceil(64);
    for x in 0..n {
        for y in 0..n {
            let s = table[x * n + y] as usize;
            if s >= n {
                return false;
            }
            let (w, bit) = (s / 64, 1u64 << (s % 64));
            if rows[x * stride + w] & bit != 0 || cols[y * stride + w] & bit != 0 {
                return false;
            }
            rows[x * stride + w] |= bit;
            cols[y * stride + w] |= bit;
        }
    }
    true
}

impl LatinSquare {
    /// Row-major table; rejected unless Latin.
    pub fn new(q: u32, table: Vec<u32>) -> Result<Self> {
        if !is_latin(q, &table) {
            return Err(Error::BadParams(format!("table is not a Latin square of order {q}")));
        }
        Ok(LatinSquare { q, table })
    }

    pub fn from_fn(q: u32, f: impl Fn(u32, u32) -> u32) -> Result<Self> {
        let table = (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).map(|(x, y)| f(x, y)).collect();
        LatinSquare::new(q, table)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.table[(x * self.q + y) as usize]
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.table.chunks_exact(self.q as usize)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.q).all(|x| (x + 1..self.q).all(|y| self.get(x, y) == self.get(y, x)))
    }

    pub fn is_nilpotent(&self) -> bool {
        (0..self.q).all(|x| self.get(x, x) == 0)
    }

    /// Cells `K0×K1` with `K0 = [0,k)`, `K1 = [q-k,q)` carry only symbols of
    /// `K1` and form a k×k Latin subsquare; likewise `K1×K0`.
    pub fn has_corner_subsquares(&self, k: u32) -> bool {
        let q = self.q;
        if 2 * k > q {
            return false;
        }
        let lo = q - k;
        let block_ok = |cell: &dyn Fn(u32, u32) -> u32| {
            let mut sub = Vec::with_capacity((k * k) as usize);
            for i in 0..k {
                for j in 0..k {
                    let s = cell(i, j);
                    if s < lo {
                        return false;
                    }
                    sub.push(s - lo);
                }
            }
            is_latin(k, &sub)
        };
        block_ok(&|i, j| self.get(i, lo + j)) && block_ok(&|i, j| self.get(lo + i, j))
    }
}

/// True if superimposing the two squares gives every ordered pair exactly once.
pub fn are_orthogonal(a: &LatinSquare, b: &LatinSquare) -> bool {
    if a.q != b.q {
        return false;
    }
    let q = a.q as usize;
    let mut hit = vec![false; q * q];
    for (x, y) in a.table.iter().zip(&b.table) {
        let cell = &mut hit[*x as usize * q + *y as usize];
        if *cell {
            return false;
        }
        *cell = true;
    }
    true
}

/// Pairwise orthogonal Latin squares of a common order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolsFamily {
    q: u32,
    squares: Vec<LatinSquare>,
}

impl MolsFamily {
    pub fn new(q: u32, squares: Vec<LatinSquare>) -> Result<Self> {
        if squares.iter().any(|s| s.q != q) {
            return Err(Error::BadParams("squares of mixed order".into()));
        }
        for i in 0..squares.len() {
            for j in i + 1..squares.len() {
                if !are_orthogonal(&squares[i], &squares[j]) {
                    return Err(Error::BadParams(format!("squares {i} and {j} are not orthogonal")));
                }
            }
        }
        Ok(MolsFamily { q, squares })
    }

    /// `count` copies of the 1×1 square; orthogonal vacuously.
    pub fn trivial(count: usize) -> Self {
        let one = LatinSquare { q: 1, table: vec![0] };
        MolsFamily {
            q: 1,
            squares: vec![one; count],
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn truncated(&self, count: usize) -> Self {
        MolsFamily {
            q: self.q,
            squares: self.squares[..count.min(self.squares.len())].to_vec(),
        }
    }
}

/// `L_a(x,y) = a·x + y` over GF(q) for `a = 1..=d` (as field element codes).
pub fn field_mols(q: u32, d: usize) -> Result<MolsFamily> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    if d >= q as usize {
        return Err(Error::TooMany {
            q,
            requested: d,
            max: q as usize - 1,
        });
    }
    let f = Gf::new(q)?;
    let squares = (1..=d as u32)
        .map(|a| LatinSquare::from_fn(q, |x, y| f.add(f.mul(a, x), y)))
        .collect::<Result<Vec<_>>>()?;
    MolsFamily::new(q, squares)
}

/// Componentwise product: `((x1,x2),(y1,y2)) ↦ (A_i(x1,y1), B_i(x2,y2))`,
/// with pairs encoded as `x1·q_B + x2`.
pub fn macneish_product(a: &MolsFamily, b: &MolsFamily) -> Result<MolsFamily> {
    let count = a.len().min(b.len());
    let (qa, qb) = (a.q, b.q);
    let q = qa * qb;
    let squares = a.squares[..count]
        .iter()
        .zip(&b.squares[..count])
        .map(|(sa, sb)| {
            LatinSquare::from_fn(q, |x, y| {
                sa.get(x / qb, y / qb) * qb + sb.get(x % qb, y % qb)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MolsFamily::new(q, squares)
}

/// Number of MOLS of order `n` reachable by fields and MacNeish products.
pub fn mols_capacity(n: u32) -> usize {
    if n < 2 {
        return usize::MAX;
    }
    prime_power_factors(n)
        .into_iter()
        .map(|q| q as usize - 1)
        .min()
        .unwrap_or(0)
}

/// `d` MOLS of order `n` from the prime-power factorization of `n`.
pub fn mols_supply(n: u32, d: usize) -> Result<MolsFamily> {
    if n < 2 {
        return Err(Error::BadParams(format!("order {n} < 2")));
    }
    let achievable = mols_capacity(n);
    if achievable < d {
        return Err(Error::SupplyGap {
            n,
            requested: d,
            achievable,
        });
    }
    let mut fam = MolsFamily::trivial(d);
    for q in prime_power_factors(n) {
        fam = macneish_product(&fam, &field_mols(q, d)?)?;
    }
    Ok(fam)
}

/// m−1 perfect matchings partitioning the edges of K_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFactorization {
    m: u32,
    factors: Vec<Vec<(u32, u32)>>,
}

impl OneFactorization {
    pub fn new(m: u32, factors: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        if m % 2 != 0 {
            return Err(Error::OddOrder(m));
        }
        if factors.len() != m.saturating_sub(1) as usize {
            return Err(Error::BadParams(format!("expected {} factors", m - 1)));
        }
        let n = m as usize;
        let mut used = vec![false; n * n];
        for f in &factors {
            let mut cover = vec![false; n];
            for &(a, b) in f {
                if a >= m || b >= m || a == b {
                    return Err(Error::BadParams(format!("bad edge {a}-{b}")));
                }
                let (a, b) = (a.min(b) as usize, a.max(b) as usize);
                if cover[a] || cover[b] || used[a * n + b] {
                    return Err(Error::BadParams(format!("edge {a}-{b} repeats a vertex or edge")));
                }
                cover[a] = true;
                cover[b] = true;
                used[a * n + b] = true;
            }
            if cover.iter().any(|c| !c) {
                return Err(Error::BadParams("factor is not perfect".into()));
            }
        }
        Ok(OneFactorization { m, factors })
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn factors(&self) -> &[Vec<(u32, u32)>] {
        &self.factors
    }
}

/// Circle method: factor `i` pairs `m−1` with `i`, and `i+j` with `i−j` (mod m−1).
pub fn round_robin_one_factorization(m: u32) -> Result<OneFactorization> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::OddOrder(m));
    }
    let r = m - 1;
    let factors = (0..r)
        .map(|i| {
            let mut f = vec![(i.min(r), i.max(r))];
            for j in 1..m / 2 {
                let a = (i + j) % r;
                let b = (i + r - j) % r;
                f.push((a.min(b), a.max(b)));
            }
            f
        })
        .collect();
    OneFactorization::new(m, factors)
}

/// `f(x,x) = 0`, `f(x,y) = 1 + colour of {x,y}` in the round-robin factorization.
pub fn symmetric_nilpotent_ls(q: u32) -> Result<LatinSquare> {
    let of = round_robin_one_factorization(q)?;
    let mut table = vec![0u32; (q * q) as usize];
    for (c, f) in of.factors.iter().enumerate() {
        for &(a, b) in f {
            table[(a * q + b) as usize] = c as u32 + 1;
            table[(b * q + a) as usize] = c as u32 + 1;
        }
    }
    LatinSquare::new(q, table)
}

/// Default restart budget for the randomized completion.
pub const DEFAULT_SQUARE_ATTEMPTS: u64 = 10_000;

/// A symmetric nilpotent square of even order `q` whose corner blocks
/// `K0×K1` and `K1×K0` (`K0=[0,k)`, `K1=[q−k,q)`) are Latin subsquares on the
/// symbols `K1`.
pub fn symmetric_nilpotent_with_subsquares(q: u32, k: u32) -> Result<LatinSquare> {
    symmetric_nilpotent_with_subsquares_seeded(q, k, 0, DEFAULT_SQUARE_ATTEMPTS)
}

pub fn symmetric_nilpotent_with_subsquares_seeded(
    q: u32,
    k: u32,
    seed: u64,
    attempts: u64,
) -> Result<LatinSquare> {
    if q % 2 != 0 {
        return Err(Error::OddOrder(q));
    }
    if k == 0 || 4 * k > q {
        return Err(Error::BadK { q, k });
    }
    let sq = if q % 4 == 0 {
        halves_construction(q, k)?
    } else {
        randomized_completion(q, k, seed, attempts)?
    };
    if !(sq.is_symmetric() && sq.is_nilpotent() && sq.has_corner_subsquares(k)) {
        return Err(Error::VerificationFailure(format!(
            "square of order {q} misses the subsquare contract for k={k}"
        )));
    }
    Ok(sq)
}

/// Kuhn's augmenting-path matching; `allowed(col, sym)`; returns `sym` per column.
fn perfect_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(
        c: usize,
        n: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for s in 0..n {
            if allowed(c, s) && !seen[s] {
                seen[s] = true;
                if owner[s].is_none_or(|o| augment(o, n, allowed, seen, owner)) {
                    owner[s] = Some(c);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n];
    for c in 0..n {
        let mut seen = vec![false; n];
        if !augment(c, n, &allowed, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; n];
    for (s, o) in owner.iter().enumerate() {
        out[o.expect("perfect")] = s;
    }
    Some(out)
}

/// Latin square of order `h` with a k×k subsquare on rows, columns and
/// symbols `[0,k)`; requires `2k <= h`. The first `k` rows are written
/// directly, the remaining rows are added one at a time by bipartite matching
/// (a Latin rectangle always extends).
fn latin_with_subsquare(h: u32, k: u32) -> Result<Vec<u32>> {
    let n = h as usize;
    let k = k as usize;
    let mut t = vec![0u32; n * n];
    for i in 0..k {
        for j in 0..n {
            t[i * n + j] = if j < k {
                ((i + j) % k) as u32
            } else {
                (k + (i + j - k) % (n - k)) as u32
            };
        }
    }
    let mut in_col = vec![vec![false; n]; n];
    for i in 0..k {
        for j in 0..n {
            in_col[j][t[i * n + j] as usize] = true;
        }
    }
    for i in k..n {
        let row = perfect_matching(n, |c, s| !in_col[c][s])
            .ok_or_else(|| Error::VerificationFailure("Latin rectangle failed to extend".into()))?;
        for (c, s) in row.into_iter().enumerate() {
            t[i * n + c] = s as u32;
            in_col[c][s] = true;
        }
    }
    Ok(t)
}

/// For `q ≡ 0 (mod 4)`: split the points into halves `X=[0,h)`, `Y=[h,q)`.
/// Edges inside each half take colours `1..h` from a round-robin
/// factorization of `K_h`; edges between the halves take colours `h..q` from
/// a Latin square of order `h` whose corner subsquare lands on `K0×K1`.
fn halves_construction(q: u32, k: u32) -> Result<LatinSquare> {
    let h = q / 2;
    let l0 = latin_with_subsquare(h, k)?;
    let mut table = vec![0u32; (q * q) as usize];
    let mut set = |x: u32, y: u32, s: u32| {
        table[(x * q + y) as usize] = s;
        table[(y * q + x) as usize] = s;
    };
    for x in 0..h {
        for y in h..q {
            let j = q - 1 - y;
            set(x, y, q - 1 - l0[(x * h + j) as usize]);
        }
    }
    let inner = round_robin_one_factorization(h)?;
    for (c, f) in inner.factors().iter().enumerate() {
        for &(a, b) in f {
            set(a, b, 1 + c as u32);
            set(a + h, b + h, 1 + c as u32);
        }
    }
    LatinSquare::new(q, table)
}

/// For `q ≡ 2 (mod 4)`: fix the `K1` colours (cyclic on `K0×K1`, round-robin
/// factors on the middle points), then peel random perfect matchings off the
/// leftover regular graph for the remaining colours, restarting on dead ends.
fn randomized_completion(q: u32, k: u32, seed: u64, attempts: u64) -> Result<LatinSquare> {
    if q > 64 {
        return Err(Error::BadParams(format!("randomized completion supports q <= 64, got {q}")));
    }
    let n = q as usize;
    let lo = q - k;
    let mut base = vec![0u32; n * n];
    let set = |t: &mut [u32], x: u32, y: u32, s: u32| {
        t[(x * q + y) as usize] = s;
        t[(y * q + x) as usize] = s;
    };
    for x in 0..k {
        for t in 0..k {
            set(&mut base, x, lo + t, lo + (x + t) % k);
        }
    }
    let mid = round_robin_one_factorization(q - 2 * k)?;
    for (j, f) in mid.factors().iter().take(k as usize).enumerate() {
        for &(a, b) in f {
            set(&mut base, a + k, b + k, lo + j as u32);
        }
    }
    let mut free0 = vec![0u64; n];
    for x in 0..n {
        for y in 0..n {
            if x != y && base[x * n + y] == 0 {
                free0[x] |= 1 << y;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let mut free = free0.clone();
        let mut table = base.clone();
        let mut ok = true;
        for colour in 1..lo {
            match random_perfect_matching(&free, &mut rng, 20_000) {
                Some(mate) => {
                    for (x, &y) in mate.iter().enumerate() {
                        table[x * n + y] = colour;
                        free[x] &= !(1 << y);
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return LatinSquare::new(q, table);
        }
    }
    Err(Error::SearchExhausted { attempts })
}

fn random_perfect_matching(adj: &[u64], rng: &mut ChaCha8Rng, node_limit: u64) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut mate = vec![usize::MAX; n];
    let mut nodes = 0u64;
    let mut order: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut nb: Vec<usize> = (0..n).filter(|&y| adj[x] >> y & 1 == 1).collect();
            nb.shuffle(rng);
            nb
        })
        .collect();
    fn rec(mate: &mut [usize], adj: &[u64], order: &mut [Vec<usize>], nodes: &mut u64, limit: u64) -> bool {
        let Some(x) = mate.iter().position(|&m| m == usize::MAX) else {
            return true;
        };
        *nodes += 1;
        if *nodes > limit {
            return false;
        }
        for i in 0..order[x].len() {
            let y = order[x][i];
            if mate[y] == usize::MAX && y != x {
                mate[x] = y;
                mate[y] = x;
                if rec(mate, adj, order, nodes, limit) {
                    return true;
                }
                mate[x] = usize::MAX;
                mate[y] = usize::MAX;
            }
        }
        let _ = adj;
        false
    }
    rec(&mut mate, adj, &mut order, &mut nodes, node_limit).then_some(mate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_mols_examples() {
        let f = field_mols(4, 3).unwrap();
        assert_eq!(f.len(), 3);
        let one = field_mols(2, 1).unwrap();
        assert_eq!(one.squares()[0].table(), &[0, 1, 1, 0]);
        assert_eq!(field_mols(6, 2), Err(Error::NotPrimePower(6)));
        assert!(matches!(field_mols(4, 4), Err(Error::TooMany { .. })));
    }

    #[test]
    fn macneish_examples() {
        let p = macneish_product(&field_mols(3, 2).unwrap(), &field_mols(4, 2).unwrap()).unwrap();
        assert_eq!((p.order(), p.len()), (12, 2));
        let p = macneish_product(&field_mols(4, 3).unwrap(), &field_mols(5, 3).unwrap()).unwrap();
        assert_eq!((p.order(), p.len()), (20, 3));
        let a = field_mols(5, 4).unwrap();
        let p = macneish_product(&a, &MolsFamily::trivial(4)).unwrap();
        assert_eq!(p, a);
    }

    #[test]
    fn supply() {
        assert_eq!(mols_supply(16, 6).unwrap().len(), 6);
        assert_eq!(mols_supply(8, 7).unwrap().len(), 7);
        assert!(matches!(
            mols_supply(12, 6),
            Err(Error::SupplyGap { achievable: 2, .. })
        ));
        assert_eq!(mols_supply(12, 2).unwrap().order(), 12);
    }

    #[test]
    fn round_robin() {
        let f = round_robin_one_factorization(2).unwrap();
        assert_eq!(f.factors(), &[vec![(0, 1)]]);
        assert_eq!(round_robin_one_factorization(4).unwrap().factors().len(), 3);
        assert_eq!(round_robin_one_factorization(3), Err(Error::OddOrder(3)));
        for m in (2..=40).step_by(2) {
            round_robin_one_factorization(m).unwrap();
        }
    }

    #[test]
    fn symmetric_nilpotent() {
        assert_eq!(symmetric_nilpotent_ls(2).unwrap().table(), &[0, 1, 1, 0]);
        for q in (2..=32).step_by(2) {
            let s = symmetric_nilpotent_ls(q).unwrap();
            assert!(s.is_symmetric() && s.is_nilpotent());
        }
        assert_eq!(symmetric_nilpotent_ls(5), Err(Error::OddOrder(5)));
    }

    #[test]
    fn subsquare_examples() {
        let s = symmetric_nilpotent_with_subsquares(8, 2).unwrap();
        for x in 0..2 {
            for y in 6..8 {
                assert!(s.get(x, y) >= 6);
            }
        }
        let s = symmetric_nilpotent_with_subsquares(4, 1).unwrap();
        assert_eq!(s.get(0, 3), 3);
        assert_eq!(symmetric_nilpotent_with_subsquares(8, 3), Err(Error::BadK { q: 8, k: 3 }));
        assert_eq!(symmetric_nilpotent_with_subsquares(7, 1), Err(Error::OddOrder(7)));
        assert_eq!(symmetric_nilpotent_with_subsquares(2, 1), Err(Error::BadK { q: 2, k: 1 }));
    }

    #[test]
    fn subsquares_all_small_orders() {
        for q in (4..=30).step_by(2) {
            for k in 1..=q / 4 {
                let s = symmetric_nilpotent_with_subsquares(q, k)
                    .unwrap_or_else(|e| panic!("q={q} k={k}: {e}"));
                assert!(s.has_corner_subsquares(k));
            }
        }
    }
}
