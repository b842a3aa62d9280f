//! Exhaustive labeled counts at tiny orders, and distinctness reports.
//!
//! Each enumerator runs in two independent branching orders; agreement of
//! the two counts is the anti-bug check. Root branches may be spread over
//! threads and the counts summed.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::mds::{CubeState, Quasigroup3};
use crate::model::{is_admissible, Design, Kind, TripleIndex};

/// Branching order of an enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// SQS and BBD: branch on the lowest-rank uncovered triple. Quasigroups:
    /// fill cells in `(x, y, u)` order.
    Forward,
    /// SQS and BBD: branch on the highest-rank uncovered triple. Quasigroups:
    /// fill cells in `(u, y, x)` order.
    Reverse,
}

/// Exact cover of a ≤128-element set, elements as bits.
struct Cover {
    full: u128,
    /// candidate rows through each element
    rows: Vec<Vec<(u128, [u32; 4])>>,
}

impl Cover {
    fn pick(&self, covered: u128, order: Order) -> Option<usize> {
        let open = self.full & !covered;
        if open == 0 {
            return None;
        }
        Some(match order {
            Order::Forward => open.trailing_zeros() as usize,
            Order::Reverse => 127 - open.leading_zeros() as usize,
        })
    }

    fn count(&self, covered: u128, order: Order) -> u64 {
        let Some(e) = self.pick(covered, order) else {
            return 1;
        };
        self.rows[e]
            .iter()
            .filter(|(m, _)| m & covered == 0)
            .map(|(m, _)| self.count(covered | m, order))
            .sum()
    }

    fn count_parallel(&self, order: Order, threads: usize) -> u64 {
        let Some(e) = self.pick(0, order) else {
            return 1;
        };
        let roots = &self.rows[e];
        let threads = threads.clamp(1, roots.len().max(1));
        if threads == 1 {
            return self.count(0, order);
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    s.spawn(move || {
                        roots.iter().skip(t).step_by(threads).map(|(m, _)| self.count(*m, order)).sum::<u64>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("census worker panicked")).sum()
        })
    }

    fn collect(&self, covered: u128, order: Order, stack: &mut Vec<[u32; 4]>, out: &mut Vec<Vec<[u32; 4]>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let Some(e) = self.pick(covered, order) else {
            out.push(stack.clone());
            return;
        };
        for (m, b) in &self.rows[e] {
            if m & covered == 0 {
                stack.push(*b);
                self.collect(covered | m, order, stack, out, limit);
                stack.pop();
            }
        }
    }
}

fn sqs_cover(v: u32) -> Cover {
    let index = TripleIndex::new(v);
    let n = index.len() as usize;
    let mut rows = vec![Vec::new(); n];
    for a in 0..v {
        for b in a + 1..v {
            for c in b + 1..v {
                for d in c + 1..v {
                    let ts = [[a, b, c], [a, b, d], [a, c, d], [b, c, d]];
                    let ranks = ts.map(|[x, y, z]| index.rank_unchecked(x, y, z) as usize);
                    let m = ranks.iter().fold(0u128, |m, &r| m | 1 << r);
                    for r in ranks {
                        rows[r].push((m, [a, b, c, d]));
                    }
                }
            }
        }
    }
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    Cover { full, rows }
}

fn sqs_pre(v: u32) -> Result<()> {
    if !is_admissible(v, Kind::Sqs) {
        return Err(Error::Inadmissible {
            v,
            kind: Kind::Sqs.to_string(),
        });
    }
    if v > 10 {
        return Err(Error::PreconditionFailure(format!("SQS enumeration limited to v ≤ 10, got {v}")));
    }
    Ok(())
}

/// Number of labeled SQS(v) on `0..v`, `v ≤ 10`.
pub fn enumerate_sqs(v: u32) -> Result<u64> {
    count_sqs(v, Order::Forward, 1)
}

pub fn count_sqs(v: u32, order: Order, threads: usize) -> Result<u64> {
    sqs_pre(v)?;
    Ok(sqs_cover(v).count_parallel(order, threads))
}

/// The first `limit` systems met by the enumerator.
pub fn sqs_witnesses(v: u32, order: Order, limit: usize) -> Result<Vec<Design>> {
    sqs_pre(v)?;
    let mut out = Vec::new();
    sqs_cover(v).collect(0, order, &mut Vec::new(), &mut out, limit);
    out.into_iter()
        .map(|bs| Design::new(Kind::Sqs, v, bs.iter().map(|b| b.to_vec()).collect()))
        .collect()
}

fn bbd_cover(m: u32) -> Cover {
    // crossing triples of [0,m) ∪ [m,2m), ranked in colex order
    let v = 2 * m;
    let index = TripleIndex::new(v);
    let mut id = HashMap::new();
    index.for_each(|r, t| {
        let low = t.iter().filter(|&&p| p < m).count();
        if low == 1 || low == 2 {
            let next = id.len();
            id.insert(r, next);
        }
    });
    let n = id.len();
    let mut rows = vec![Vec::new(); n];
    for a in 0..m {
        for b in a + 1..m {
            for c in m..v {
                for d in c + 1..v {
                    let ts = [[a, b, c], [a, b, d], [a, c, d], [b, c, d]];
                    let ids = ts.map(|[x, y, z]| id[&index.rank_unchecked(x, y, z)]);
                    let mask = ids.iter().fold(0u128, |acc, &i| acc | 1 << i);
                    for i in ids {
                        rows[i].push((mask, [a, b, c, d]));
                    }
                }
            }
        }
    }
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    Cover { full, rows }
}

/// Number of labeled 3-BBDs with groups `[0,m)` and `[m,2m)`, `m ≤ 4`.
pub fn enumerate_bbd(m: u32) -> Result<u64> {
    count_bbd(m, Order::Forward, 1)
}

pub fn count_bbd(m: u32, order: Order, threads: usize) -> Result<u64> {
    if m == 0 || m > 4 {
        return Err(Error::PreconditionFailure(format!("BBD enumeration limited to 1 ≤ m ≤ 4, got {m}")));
    }
    Ok(bbd_cover(m).count_parallel(order, threads))
}

fn cube_cells(k: usize, order: Order) -> Vec<usize> {
    let mut cells = Vec::with_capacity(k * k * k);
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                cells.push(match order {
                    Order::Forward => (a * k + b) * k + c,
                    Order::Reverse => (c * k + b) * k + a,
                });
            }
        }
    }
    cells
}

fn count_cubes(st: &mut CubeState, cells: &[usize], i: usize) -> u64 {
    if i == cells.len() {
        return 1;
    }
    let cell = cells[i];
    let mut free = st.free(cell);
    let mut total = 0;
    while free != 0 {
        let s = free.trailing_zeros() as usize;
        free &= free - 1;
        st.toggle(cell, s);
        total += count_cubes(st, cells, i + 1);
        st.toggle(cell, s);
    }
    total
}

/// Number of ternary quasigroups of order `k` (MDS(2,4,k) codes), `k ≤ 4`.
pub fn enumerate_quasigroups3(k: u32) -> Result<u64> {
    count_quasigroups3(k, Order::Forward, 1)
}

pub fn count_quasigroups3(k: u32, order: Order, threads: usize) -> Result<u64> {
    if k == 0 || k > 4 {
        return Err(Error::PreconditionFailure(format!(
            "quasigroup enumeration limited to 1 ≤ k ≤ 4, got {k}"
        )));
    }
    let n = k as usize;
    let cells = cube_cells(n, order);
    let first = cells[0];
    let threads = threads.clamp(1, n);
    let total = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let cells = &cells;
                s.spawn(move || {
                    (t..n)
                        .step_by(threads)
                        .map(|sym| {
                            let mut st = CubeState::new(n);
                            st.toggle(first, sym);
                            count_cubes(&mut st, cells, 1)
                        })
                        .sum::<u64>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("census worker panicked")).sum::<u64>()
    });
    Ok(total)
}

/// Every ternary quasigroup of order `k ≤ 3`, in enumeration order.
pub fn quasigroups3(k: u32) -> Result<Vec<Quasigroup3>> {
    if k == 0 || k > 3 {
        return Err(Error::PreconditionFailure(format!("listing limited to 1 ≤ k ≤ 3, got {k}")));
    }
    fn go(st: &mut CubeState, cells: &[usize], i: usize, out: &mut Vec<Vec<u32>>) {
        if i == cells.len() {
            out.push(st.table.iter().map(|&s| s as u32).collect());
            return;
        }
        let mut free = st.free(cells[i]);
        while free != 0 {
            let s = free.trailing_zeros() as usize;
            free &= free - 1;
            st.toggle(cells[i], s);
            go(st, cells, i + 1, out);
            st.toggle(cells[i], s);
        }
    }
    let n = k as usize;
    let mut tables = Vec::new();
    go(&mut CubeState::new(n), &cube_cells(n, Order::Forward), 0, &mut tables);
    tables.into_iter().map(|t| Quasigroup3::new(k, t)).collect()
}

/// Distinct members of a family and the index pairs that collide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctReport {
    pub distinct: usize,
    /// `(first, later)` where item `later` equals item `first`.
    pub collisions: Vec<(usize, usize)>,
}

pub fn distinct_family_report<T: Hash + Eq>(items: &[T]) -> DistinctReport {
    let mut first: HashMap<&T, usize> = HashMap::new();
    let mut collisions = Vec::new();
    for (i, it) in items.iter().enumerate() {
        match first.get(it) {
            Some(&j) => collisions.push((j, i)),
            None => {
                first.insert(it, i);
            }
        }
    }
    DistinctReport {
        distinct: first.len(),
        collisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_design;

    #[test]
    fn sqs_counts() {
        assert_eq!(enumerate_sqs(2).unwrap(), 1);
        assert_eq!(enumerate_sqs(4).unwrap(), 1);
        assert_eq!(enumerate_sqs(8).unwrap(), 30);
        assert_eq!(count_sqs(8, Order::Reverse, 2).unwrap(), 30);
        assert!(enumerate_sqs(14).is_err());
        assert!(enumerate_sqs(9).is_err());
    }

    fn automorphisms(d: &Design) -> usize {
        // Heap's algorithm over all relabelings
        let v = d.v() as usize;
        let blocks: std::collections::BTreeSet<Vec<u32>> = d.blocks().iter().cloned().collect();
        let mut perm: Vec<u32> = (0..v as u32).collect();
        let mut c = vec![0usize; v];
        let fixes = |p: &[u32]| {
            blocks.iter().all(|b| {
                let mut img: Vec<u32> = b.iter().map(|&x| p[x as usize]).collect();
                img.sort_unstable();
                blocks.contains(&img)
            })
        };
        let mut count = fixes(&perm) as usize;
        let mut i = 0;
        while i < v {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                count += fixes(&perm) as usize;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        count
    }

    #[test]
    fn sqs8_orbit_recount() {
        let w = &sqs_witnesses(8, Order::Forward, 1).unwrap()[0];
        let aut = automorphisms(w);
        assert_eq!(aut, 1344);
        assert_eq!(40320 / aut as u64, enumerate_sqs(8).unwrap());
    }

    #[test]
    fn sqs10_two_orders() {
        assert_eq!(count_sqs(10, Order::Forward, 2).unwrap(), 2520);
        assert_eq!(count_sqs(10, Order::Reverse, 1).unwrap(), 2520);
    }

    #[test]
    fn quasigroups_k2_brute_force() {
        let mut n = 0;
        for bits in 0u32..256 {
            let f = |x: u32, y: u32, z: u32| (bits >> (x * 4 + y * 2 + z)) & 1;
            let ok = (0..2).all(|a| {
                (0..2).all(|b| {
                    f(a, b, 0) != f(a, b, 1) && f(a, 0, b) != f(a, 1, b) && f(0, a, b) != f(1, a, b)
                })
            });
            n += ok as u64;
        }
        assert_eq!(n, enumerate_quasigroups3(2).unwrap());
    }

    #[test]
    fn sqs_witnesses_verify() {
        for d in sqs_witnesses(8, Order::Reverse, 30).unwrap() {
            assert!(verify_design(&d).unwrap().is_exact());
        }
    }

    #[test]
    fn quasigroup_counts() {
        assert_eq!(enumerate_quasigroups3(1).unwrap(), 1);
        assert_eq!(enumerate_quasigroups3(2).unwrap(), 2);
        assert_eq!(count_quasigroups3(3, Order::Reverse, 3).unwrap(), 24);
        assert_eq!(quasigroups3(3).unwrap().len(), 24);
    }

    #[test]
    fn bbd_counts() {
        assert_eq!(enumerate_bbd(2).unwrap(), 1);
        assert_eq!(enumerate_bbd(3).unwrap(), 0);
        assert_eq!(enumerate_bbd(4).unwrap(), count_bbd(4, Order::Reverse, 2).unwrap());
    }

    #[test]
    fn distinctness() {
        let r = distinct_family_report(&[1, 2, 1, 3, 2]);
        assert_eq!(r.distinct, 3);
        assert_eq!(r.collisions, vec![(0, 2), (1, 4)]);
        assert_eq!(distinct_family_report(&[7]).distinct, 1);
    }
}
