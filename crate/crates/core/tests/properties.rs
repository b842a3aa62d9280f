use proptest::prelude::*;

use steiner_core::bbd::{bbd_from_code, bbd_from_factorizations, bbd_block_count, code_from_bbd, theorem2_family};
use steiner_core::census::{count_bbd, count_sqs, distinct_family_report, quasigroups3, Order};
use steiner_core::io::{read_design, write_design};
use steiner_core::latin::{mols_supply, round_robin_one_factorization};
use steiner_core::mds::{mds_from_mols, project, random_quasigroup3, rs_mds_code};
use steiner_core::model::{binomial, rank_triple, unrank_triple};
use steiner_core::planner::{execute, plan, ExecOptions, PlannerOptions};
use steiner_core::search::search_small_sqs;
use steiner_core::sqs::{boolean_sqs8, double, r1_codes};
use steiner_core::verify::{verify_bbd, verify_design, verify_design_with, verify_mds, CoverageOptions};
use steiner_core::{is_admissible, sqs_block_count, Design, Kind};

fn small_sqs_order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![4u32, 8, 10, 14, 16, 20])
}

fn rr_bbd(m: u32, shift: usize) -> steiner_core::bbd::Bbd {
    let f = round_robin_one_factorization(m).unwrap();
    let r = m as usize - 1;
    let pairing: Vec<usize> = (0..r).map(|i| (i + shift) % r).collect();
    bbd_from_factorizations(&f, &f, &pairing).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_unrank_bijection(v in 3u32..200, r in any::<u64>()) {
        let r = r % binomial(v as u64, 3);
        let t = unrank_triple(v, r).unwrap();
        prop_assert!(t[0] < t[1] && t[1] < t[2] && t[2] < v);
        prop_assert_eq!(rank_triple(v, t).unwrap(), r);
    }

    #[test]
    fn rank_is_colex(v in 4u32..60, a in 0u32..60, b in 0u32..60, c in 0u32..60) {
        let mut t = [a % v, b % v, c % v];
        t.sort_unstable();
        prop_assume!(t[0] < t[1] && t[1] < t[2]);
        let expect = binomial(t[2] as u64, 3) + binomial(t[1] as u64, 2) + t[0] as u64;
        prop_assert_eq!(rank_triple(v, t).unwrap(), expect);
    }

    #[test]
    fn block_count_identity(k in 0u64..2000) {
        for v in [6 * k + 2, 6 * k + 4] {
            prop_assert_eq!(4 * sqs_block_count(v).unwrap(), binomial(v, 3));
        }
    }

    #[test]
    fn search_is_verified_and_deterministic(v in small_sqs_order(), seed in any::<u64>()) {
        let a = search_small_sqs(v, seed, 5_000_000).unwrap();
        prop_assert!(verify_design(&a).unwrap().is_exact());
        prop_assert_eq!(a.len() as u64, sqs_block_count(v as u64).unwrap());
        prop_assert_eq!(search_small_sqs(v, seed, 5_000_000).unwrap(), a);
    }

    #[test]
    fn doubling_contains_both_halves(v in prop::sample::select(vec![4u32, 8, 10, 14]), s1 in any::<u64>(), s2 in any::<u64>(), shift in 0usize..16) {
        let a = search_small_sqs(v, s1, 5_000_000).unwrap();
        let b = search_small_sqs(v, s2, 5_000_000).unwrap();
        let d = double(&a, &b, &rr_bbd(v, shift)).unwrap();
        prop_assert!(d.contains_all(a.blocks()));
        let shifted: Vec<Vec<u32>> = b.shifted(v).collect();
        prop_assert!(d.contains_all(&shifted));
        prop_assert_eq!(d.len() as u64, sqs_block_count(2 * v as u64).unwrap());
    }

    #[test]
    fn deleting_a_block_uncovers_four(v in small_sqs_order(), seed in any::<u64>(), idx in any::<prop::sample::Index>()) {
        let d = search_small_sqs(v, seed, 5_000_000).unwrap();
        let mut blocks = d.blocks().to_vec();
        let gone = blocks.remove(idx.index(blocks.len()));
        let r = verify_design(&Design::new(Kind::Partial, v, blocks.clone()).unwrap()).unwrap();
        prop_assert_eq!(r.uncovered, 4);
        prop_assert!(r.is_packing());
        // swap one point of the block for an outside point: abc stays, the
        // other three triples lose their block and three new ones collide
        prop_assume!(v > 4);
        let x = (0..v).find(|p| !gone.contains(p)).unwrap();
        blocks.push(vec![gone[0], gone[1], gone[2], x]);
        let r = verify_design(&Design::from_unsorted(Kind::Sqs, v, blocks).unwrap()).unwrap();
        prop_assert_eq!((r.uncovered, r.multi), (3, 3));
    }

    #[test]
    fn partitioned_coverage_matches(v in small_sqs_order(), seed in any::<u64>(), threads in 1usize..5, per_pass in 1u64..400) {
        let d = search_small_sqs(v, seed, 5_000_000).unwrap();
        let whole = verify_design(&d).unwrap();
        let opts = CoverageOptions { threads, max_triples_per_pass: per_pass };
        prop_assert_eq!(verify_design_with(&d, &opts).unwrap(), whole);
    }

    #[test]
    fn design_text_round_trip(v in small_sqs_order(), seed in any::<u64>()) {
        let d = search_small_sqs(v, seed, 5_000_000).unwrap();
        let text = write_design(&d);
        prop_assert_eq!(read_design(&text).unwrap(), d.clone());
        prop_assert_eq!(write_design(&read_design(&text).unwrap()), text);
    }

    #[test]
    fn projections_stay_mds(q in prop::sample::select(vec![4u32, 5, 7, 8, 9]), mask in 1u32..16) {
        // MDS(2,5,q) from 3 MOLS; keep coordinates 0 and 1 and any of the rest
        let code = mds_from_mols(&mols_supply(q, 3).unwrap()).unwrap();
        let mut coords = vec![0usize, 1];
        coords.extend((2..5).filter(|&c| mask >> (c - 2) & 1 == 1));
        let p = project(&code, &coords).unwrap();
        prop_assert_eq!(p.dist(), coords.len() - 1);
        prop_assert!(verify_mds(&p).unwrap().valid);
    }

    #[test]
    fn bbd_code_round_trip(m in prop::sample::select(vec![2u32, 4, 6, 8, 10]), shift in 0usize..16) {
        let b = rr_bbd(m, shift);
        prop_assert!(verify_bbd(&b).unwrap().valid);
        prop_assert_eq!(b.len() as u64, bbd_block_count(m as u64));
        prop_assert_eq!(bbd_from_code(&code_from_bbd(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn family_distinct_iff_replacements_differ(seeds in prop::collection::vec(0u64..6, 2..5)) {
        let reps: Vec<_> = seeds.iter().map(|&s| random_quasigroup3(2, s).unwrap()).collect();
        let fam = theorem2_family(8, 2, &reps).unwrap();
        prop_assert_eq!(distinct_family_report(&fam).distinct, distinct_family_report(&reps).distinct);
    }

    #[test]
    fn distinct_report_accounts_for_all(items in prop::collection::vec(0u8..5, 0..30)) {
        let r = distinct_family_report(&items);
        prop_assert_eq!(r.distinct + r.collisions.len(), items.len());
        for (a, b) in r.collisions {
            prop_assert!(a < b && items[a] == items[b]);
        }
    }
}

#[test]
fn parity_code_is_mds() {
    for q in [2, 3, 5, 6] {
        assert!(verify_mds(&rs_mds_code(q, 4, 2).unwrap()).unwrap().valid);
    }
}

#[test]
fn r1_projection_chain_all_blocks() {
    let m = mds_from_mols(&mols_supply(16, 6).unwrap()).unwrap();
    for s in boolean_sqs8().blocks() {
        let (m_s, c_s) = r1_codes(&m, s).unwrap();
        assert!(c_s.contains_code(&m_s));
        assert_eq!((c_s.d(), c_s.dist(), c_s.len()), (4, 2, 4096));
    }
}

#[test]
fn census_orderings_agree() {
    for v in [2, 4, 8] {
        assert_eq!(count_sqs(v, Order::Forward, 1).unwrap(), count_sqs(v, Order::Reverse, 3).unwrap());
    }
    for m in 1..=4 {
        assert_eq!(count_bbd(m, Order::Forward, 1).unwrap(), count_bbd(m, Order::Reverse, 2).unwrap());
    }
    let qs = quasigroups3(3).unwrap();
    assert_eq!(distinct_family_report(&qs).distinct, 24);
    for q in &qs {
        assert!(verify_mds(&q.to_code()).unwrap().valid);
    }
}

#[test]
fn planned_designs_verify() {
    let eo = ExecOptions::default();
    let o = PlannerOptions::default();
    for (v, kind) in [(16, Kind::Sqs), (28, Kind::Sqs), (26, Kind::Sqs), (64, Kind::Sqs), (24, Kind::S46), (6, Kind::S46)] {
        assert!(is_admissible(v, kind));
        let d = execute(&plan(v, kind, &o).unwrap(), 5, &eo).unwrap();
        assert!(verify_design(&d).unwrap().is_exact(), "{kind}({v})");
        assert_eq!(execute(&plan(v, kind, &o).unwrap(), 5, &eo).unwrap(), d);
    }
}

#[test]
fn corrupted_file_leaf_fails_at_leaf() {
    let dir = std::env::temp_dir().join(format!("steiner-leaf-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s14.txt");
    let good = search_small_sqs(14, 0, 5_000_000).unwrap();
    let mut blocks = good.blocks().to_vec();
    blocks[0][3] = (0..14).find(|p| !blocks[0].contains(p)).unwrap();
    std::fs::write(&path, write_design(&Design::from_unsorted(Kind::Sqs, 14, blocks).unwrap())).unwrap();
    let mut o = PlannerOptions::default();
    o.files.insert((Kind::Sqs, 14), path.clone());
    let p = plan(28, Kind::Sqs, &o).unwrap();
    let err = execute(&p, 0, &ExecOptions::default()).unwrap_err();
    assert!(matches!(err, steiner_core::Error::VerificationFailure(ref s) if s.contains("FILE")), "{err}");
    std::fs::remove_dir_all(dir).unwrap();
}
