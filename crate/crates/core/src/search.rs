//! Stochastic hill-climbing for small Steiner quadruple systems.
//!
//! The state is a packing: blocks covering no triple twice. Each step picks a
//! random uncovered triple `{a,b,c}`, chooses a fourth point `d` with the
//! fewest conflicts among zero, one or two (uniformly within a class, fully
//! random if all have three), ejects the conflicting blocks and adds
//! `{a,b,c,d}`.
//!
//! The climb can run over orbits of a cyclic group acting on the points: a
//! move then adds the whole orbit of `{a,b,c,d}` and conflicts are counted
//! between triple orbits. The trivial group gives the plain climb.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{binomial, is_admissible, Design, Kind, TripleIndex};

/// Largest order handed to the search by default.
pub const DEFAULT_SEARCH_CAP: u32 = 40;

/// Step budget used when the caller has no opinion.
pub const DEFAULT_SEARCH_BUDGET: u64 = 5_000_000;

const NONE: u32 = u32::MAX;

/// Point symmetry imposed on the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// No symmetry: plain block-level climb.
    None,
    /// `x -> x+1` on `Z_{v/2} x {0,1}`, point `(x,h)` stored as `h*v/2 + x`.
    TwoCycles,
    /// `x -> x+1 mod v`.
    Cyclic,
    /// `x -> x+1 mod (v-1)` fixing the point `v-1`.
    OneRotational,
}

struct Group {
    /// images[i][p] = g^i(p); images[0] is the identity
    images: Vec<Vec<u32>>,
}

impl Group {
    fn new(v: u32, sym: Symmetry) -> Self {
        let id: Vec<u32> = (0..v).collect();
        match sym {
            Symmetry::None => Group { images: vec![id] },
            Symmetry::TwoCycles => {
                let m = v / 2;
                let images = (0..m)
                    .map(|i| (0..v).map(|p| (p / m) * m + (p % m + i) % m).collect())
                    .collect();
                Group { images }
            }
            Symmetry::OneRotational => Group {
                images: (0..v - 1)
                    .map(|i| (0..v).map(|p| if p == v - 1 { p } else { (p + i) % (v - 1) }).collect())
                    .collect(),
            },
            Symmetry::Cyclic => Group {
                images: (0..v).map(|i| (0..v).map(|p| (p + i) % v).collect()).collect(),
            },
        }
    }

    fn image<const K: usize>(&self, i: usize, mut s: [u32; K]) -> [u32; K] {
        for p in s.iter_mut() {
            *p = self.images[i][*p as usize];
        }
        s.sort_unstable();
        s
    }
}

fn rank4(b: [u32; 4]) -> usize {
    (b[0] as u64 + binomial(b[1] as u64, 2) + binomial(b[2] as u64, 3) + binomial(b[3] as u64, 4))
        as usize
}

struct Climber {
    index: TripleIndex,
    group: Group,
    /// triple rank -> triple orbit id
    orbit_of: Vec<u32>,
    reps: Vec<[u32; 3]>,
    /// 4-set rank -> 0 unknown, 1 orbit is a packing, 2 it is not
    valid: Vec<u8>,
    /// triple orbit id -> slot of the block orbit covering it
    cover: Vec<u32>,
    slots: Vec<[u32; 4]>,
    free_slots: Vec<u32>,
    open: Vec<u32>,
    open_pos: Vec<u32>,
}

impl Climber {
    fn new(v: u32, sym: Symmetry) -> Self {
        let index = TripleIndex::new(v);
        let group = Group::new(v, sym);
        let n = index.len() as usize;
        let mut orbit_of = vec![NONE; n];
        let mut reps = Vec::new();
        index.for_each(|r, t| {
            if orbit_of[r as usize] != NONE {
                return;
            }
            let id = reps.len() as u32;
            reps.push(t);
            for i in 0..group.images.len() {
                let [a, b, c] = group.image(i, t);
                orbit_of[index.rank_unchecked(a, b, c) as usize] = id;
            }
        });
        let orbits = reps.len();
        Climber {
            valid: vec![0; binomial(v as u64, 4) as usize],
            index,
            group,
            orbit_of,
            reps,
            cover: vec![NONE; orbits],
            slots: Vec::new(),
            free_slots: Vec::new(),
            open: (0..orbits as u32).collect(),
            open_pos: (0..orbits as u32).collect(),
        }
    }

    fn orbit(&self, mut t: [u32; 3]) -> u32 {
        t.sort_unstable();
        self.orbit_of[self.index.rank_unchecked(t[0], t[1], t[2]) as usize]
    }

    fn block_orbits(&self, b: [u32; 4]) -> [u32; 4] {
        let [a, x, y, z] = b;
        [
            self.orbit([a, x, y]),
            self.orbit([a, x, z]),
            self.orbit([a, y, z]),
            self.orbit([x, y, z]),
        ]
    }

    /// Distinct blocks in the orbit of `b`.
    fn expand(&self, b: [u32; 4]) -> Vec<[u32; 4]> {
        let mut out: Vec<[u32; 4]> =
            (0..self.group.images.len()).map(|i| self.group.image(i, b)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn is_valid(&mut self, mut b: [u32; 4]) -> bool {
        b.sort_unstable();
        let r = rank4(b);
        if self.valid[r] == 0 {
            let mut ranks = Vec::new();
            for blk in self.expand(b) {
                crate::model::for_each_triple(&blk, |x, y, z| {
                    ranks.push(self.index.rank_unchecked(x, y, z));
                });
            }
            let n = ranks.len();
            ranks.sort_unstable();
            ranks.dedup();
            self.valid[r] = if ranks.len() == n { 1 } else { 2 };
        }
        self.valid[r] == 1
    }

    fn open_remove(&mut self, o: u32) {
        let pos = self.open_pos[o as usize] as usize;
        let last = *self.open.last().unwrap();
        self.open.swap_remove(pos);
        if last != o {
            self.open_pos[last as usize] = pos as u32;
        }
        self.open_pos[o as usize] = NONE;
    }

    fn open_insert(&mut self, o: u32) {
        self.open_pos[o as usize] = self.open.len() as u32;
        self.open.push(o);
    }

    fn remove(&mut self, slot: u32) {
        let mut os = self.block_orbits(self.slots[slot as usize]);
        os.sort_unstable();
        for (i, &o) in os.iter().enumerate() {
            if i > 0 && os[i - 1] == o {
                continue;
            }
            self.cover[o as usize] = NONE;
            self.open_insert(o);
        }
        self.free_slots.push(slot);
    }

    fn add(&mut self, b: [u32; 4]) {
        let slot = match self.free_slots.pop() {
            Some(s) => {
                self.slots[s as usize] = b;
                s
            }
            None => {
                self.slots.push(b);
                self.slots.len() as u32 - 1
            }
        };
        let mut os = self.block_orbits(b);
        os.sort_unstable();
        for (i, &o) in os.iter().enumerate() {
            if i > 0 && os[i - 1] == o {
                continue;
            }
            self.cover[o as usize] = slot;
            self.open_remove(o);
        }
    }

    /// Distinct slots in conflict with `b`, at most three.
    fn conflicts(&self, b: [u32; 4]) -> ([u32; 4], usize) {
        let mut out = [NONE; 4];
        let mut n = 0;
        for o in self.block_orbits(b) {
            let s = self.cover[o as usize];
            if s != NONE && !out[..n].contains(&s) {
                out[n] = s;
                n += 1;
            }
        }
        (out, n)
    }

    fn climb(&mut self, v: u32, rng: &mut ChaCha8Rng, budget: u64) -> bool {
        let mut zero = Vec::with_capacity(v as usize);
        let mut one = Vec::with_capacity(v as usize);
        let mut two = Vec::with_capacity(v as usize);
        for _ in 0..budget {
            if self.open.is_empty() {
                return true;
            }
            let o = self.open[rng.random_range(0..self.open.len())];
            let [a, b, c] = self.reps[o as usize];
            zero.clear();
            one.clear();
            two.clear();
            for d in 0..v {
                if d == a || d == b || d == c || !self.is_valid([a, b, c, d]) {
                    continue;
                }
                match self.conflicts([a, b, c, d]).1 {
                    0 => zero.push(d),
                    1 => one.push(d),
                    2 => two.push(d),
                    _ => {}
                }
            }
            let d = if !zero.is_empty() {
                zero[rng.random_range(0..zero.len())]
            } else if !one.is_empty() {
                one[rng.random_range(0..one.len())]
            } else if !two.is_empty() {
                two[rng.random_range(0..two.len())]
            } else {
                let mut d;
                loop {
                    d = rng.random_range(0..v);
                    if d != a && d != b && d != c && self.is_valid([a, b, c, d]) {
                        break;
                    }
                }
                d
            };
            let (slots, n) = self.conflicts([a, b, c, d]);
            for &s in &slots[..n] {
                self.remove(s);
            }
            self.add([a, b, c, d]);
        }
        self.open.is_empty()
    }

    fn into_blocks(self) -> Vec<Vec<u32>> {
        let mut dead = vec![false; self.slots.len()];
        for &s in &self.free_slots {
            dead[s as usize] = true;
        }
        self.slots
            .iter()
            .zip(dead)
            .filter(|(_, d)| !d)
            .flat_map(|(b, _)| self.expand(*b))
            .map(|b| b.to_vec())
            .collect()
    }
}

/// Steps per restart in [`search_small_sqs`].
pub const RESTART_STEPS: u64 = 100_000;

const RESTART_ORDER: [Symmetry; 4] =
    [Symmetry::TwoCycles, Symmetry::OneRotational, Symmetry::Cyclic, Symmetry::None];

/// Finds a verified SQS(v) by hill-climbing; deterministic per `(v, seed, budget)`.
///
/// Orders from 12 up run restarts of [`RESTART_STEPS`] steps cycling through
/// the symmetries; smaller orders run one plain climb. `budget` bounds the
/// total number of steps.
pub fn search_small_sqs(v: u32, seed: u64, budget: u64) -> Result<Design> {
    search_small_sqs_with_cap(v, seed, budget, DEFAULT_SEARCH_CAP)
}

pub fn search_small_sqs_with_cap(v: u32, seed: u64, budget: u64, cap: u32) -> Result<Design> {
    precheck(v, cap)?;
    if v < 12 {
        return search_with_symmetry(v, seed, budget, Symmetry::None);
    }
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut left = budget;
    let mut best = usize::MAX;
    for sym in RESTART_ORDER.iter().cycle() {
        if left == 0 {
            break;
        }
        let steps = left.min(RESTART_STEPS);
        left -= steps;
        match search_with_symmetry(v, seeds.random(), steps, *sym) {
            Err(Error::SearchTimeout { uncovered, .. }) => best = best.min(uncovered),
            other => return other,
        }
    }
    Err(Error::SearchTimeout {
        budget,
        uncovered: best,
    })
}

fn precheck(v: u32, cap: u32) -> Result<()> {
    if !is_admissible(v, Kind::Sqs) {
        return Err(Error::Inadmissible {
            v,
            kind: Kind::Sqs.to_string(),
        });
    }
    if v > cap {
        return Err(Error::PreconditionFailure(format!("search order {v} exceeds cap {cap}")));
    }
    Ok(())
}

/// Hill-climb under a fixed symmetry; `uncovered` in a timeout counts triple orbits.
pub fn search_with_symmetry(v: u32, seed: u64, budget: u64, sym: Symmetry) -> Result<Design> {
    precheck(v, u32::MAX)?;
    if v < 4 {
        return Design::new(Kind::Sqs, v, Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Climber::new(v, sym);
    if !c.climb(v, &mut rng, budget) {
        return Err(Error::SearchTimeout {
            budget,
            uncovered: c.open.len(),
        });
    }
    Design::from_unsorted(Kind::Sqs, v, c.into_blocks())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sqs_block_count;
    use crate::verify::verify_design;

    #[test]
    fn small_orders() {
        for v in [4, 8, 10, 14, 16] {
            let d = search_small_sqs(v, 1, DEFAULT_SEARCH_BUDGET).unwrap();
            assert_eq!(d.len() as u64, sqs_block_count(v as u64).unwrap());
            assert!(verify_design(&d).unwrap().is_exact());
        }
    }

    #[test]
    fn symmetric_climb_is_invariant() {
        let d = search_with_symmetry(10, 3, DEFAULT_SEARCH_BUDGET, Symmetry::TwoCycles).unwrap();
        assert!(verify_design(&d).unwrap().is_exact());
        let shift: Vec<u32> = (0..10).map(|p| (p / 5) * 5 + (p % 5 + 1) % 5).collect();
        assert_eq!(d.relabel(&shift, 10).unwrap(), d);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = search_small_sqs(14, 7, DEFAULT_SEARCH_BUDGET).unwrap();
        let b = search_small_sqs(14, 7, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(search_small_sqs(9, 0, 10), Err(Error::Inadmissible { .. })));
        assert!(matches!(search_small_sqs(44, 0, 10), Err(Error::PreconditionFailure(_))));
        assert!(matches!(search_small_sqs(16, 0, 1), Err(Error::SearchTimeout { .. })));
    }
}
