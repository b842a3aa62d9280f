//! Exact search for an SQS(v) invariant under `x -> x+1 mod v`.
//!
//! Columns are the triple orbits, rows the block orbits that cover no triple
//! twice; Algorithm X with a fewest-candidates column rule. Used to produce
//! the SQS(34) fixture of the acceptance suite:
//!
//! `cargo run --release -p steiner-core --example cyclic_sqs -- 34 > sqs34.txt`

use std::collections::BTreeSet;

use steiner_core::io::write_design;
use steiner_core::verify::verify_design;
use steiner_core::{Design, Kind, TripleIndex};

type Mask = Vec<u64>;

fn translate<const K: usize>(s: [u32; K], i: u32, v: u32) -> [u32; K] {
    let mut t = s.map(|p| (p + i) % v);
    t.sort_unstable();
    t
}

struct Problem {
    cols: usize,
    rows: Vec<(Mask, [u32; 4])>,
    by_col: Vec<Vec<usize>>,
}

fn build(v: u32) -> Problem {
    let index = TripleIndex::new(v);
    let mut orbit = vec![usize::MAX; index.len() as usize];
    let mut cols = 0;
    index.for_each(|r, t| {
        if orbit[r as usize] == usize::MAX {
            for i in 0..v {
                let [a, b, c] = translate(t, i, v);
                orbit[index.rank_unchecked(a, b, c) as usize] = cols;
            }
            cols += 1;
        }
    });
    let words = cols.div_ceil(64);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            for c in b + 1..v {
                for d in c + 1..v {
                    let blk = [a, b, c, d];
                    if seen.contains(&blk) {
                        continue;
                    }
                    let imgs: BTreeSet<[u32; 4]> = (0..v).map(|i| translate(blk, i, v)).collect();
                    let mut ranks = Vec::new();
                    for im in &imgs {
                        for skip in 0..4 {
                            let t: Vec<u32> =
                                (0..4).filter(|&j| j != skip).map(|j| im[j]).collect();
                            ranks.push(index.rank_unchecked(t[0], t[1], t[2]));
                        }
                    }
                    seen.extend(imgs);
                    let n = ranks.len();
                    ranks.sort_unstable();
                    ranks.dedup();
                    if ranks.len() != n {
                        continue;
                    }
                    let mut mask = vec![0u64; words];
                    for r in ranks {
                        let o = orbit[r as usize];
                        mask[o / 64] |= 1 << (o % 64);
                    }
                    rows.push((mask, blk));
                }
            }
        }
    }
    let mut by_col = vec![Vec::new(); cols];
    for (i, (m, _)) in rows.iter().enumerate() {
        for (o, col) in by_col.iter_mut().enumerate() {
            if m[o / 64] >> (o % 64) & 1 == 1 {
                col.push(i);
            }
        }
    }
    Problem { cols, rows, by_col }
}

fn disjoint(a: &Mask, b: &Mask) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn solve(p: &Problem, cover: &mut Mask, sol: &mut Vec<usize>) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for o in 0..p.cols {
        if cover[o / 64] >> (o % 64) & 1 == 1 {
            continue;
        }
        let c = p.by_col[o].iter().filter(|&&r| disjoint(&p.rows[r].0, cover)).count();
        if c == 0 {
            return false;
        }
        if best.is_none_or(|(_, bc)| c < bc) {
            best = Some((o, c));
        }
    }
    let Some((o, _)) = best else { return true };
    for &r in &p.by_col[o] {
        if !disjoint(&p.rows[r].0, cover) {
            continue;
        }
        for (c, m) in cover.iter_mut().zip(&p.rows[r].0) {
            *c |= m;
        }
        sol.push(r);
        if solve(p, cover, sol) {
            return true;
        }
        sol.pop();
        for (c, m) in cover.iter_mut().zip(&p.rows[r].0) {
            *c &= !m;
        }
    }
    false
}

fn main() {
    let v: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .expect("usage: cyclic_sqs <v>");
    let p = build(v);
    let mut cover = vec![0u64; p.cols.div_ceil(64)];
    let mut sol = Vec::new();
    if !solve(&p, &mut cover, &mut sol) {
        eprintln!("no cyclic SQS({v})");
        std::process::exit(1);
    }
    let blocks: BTreeSet<[u32; 4]> = sol
        .iter()
        .flat_map(|&r| {
            let base = p.rows[r].1;
            (0..v).map(move |i| translate(base, i, v))
        })
        .collect();
    let design =
        Design::new(Kind::Sqs, v, blocks.into_iter().map(|b| b.to_vec()).collect()).expect("well formed");
    assert!(verify_design(&design).expect("well formed").is_exact());
    print!("{}", write_design(&design));
}
