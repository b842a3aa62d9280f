"""Smoke test for the `steiner` extension module.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/steiner-*.whl
"""

import steiner


def main():
    s8 = steiner.boolean_sqs8()
    assert len(s8) == 14 and s8.verify().is_exact()

    s10 = steiner.search_small_sqs(10, seed=1)
    assert len(s10) == steiner.sqs_block_count(10) == 30

    s32 = steiner.construct(32, "sqs", seed=0)
    r = s32.verify(threads=2)
    assert r.is_exact() and r.once == 4960 and len(s32) == 1240

    bbd = steiner.round_robin_bbd(8)
    assert bbd.verify() and len(bbd) == 8 * 8 * 7 // 4
    s16 = steiner.double(s8, s8, bbd)
    assert len(s16) == 140 and s16.verify().is_exact()
    assert steiner.Design.from_text(s16.to_text()) == s16

    m = steiner.mds_from_mols(16, 6)
    assert (m.d, m.q, m.dist, len(m)) == (8, 16, 7, 256) and m.verify()

    holes, hole_points = steiner.construct_holes(130)
    assert holes.kind == "partial" and len(holes) == 83456 and len(hole_points) == 4

    assert "THEOREM3 n=16" in steiner.plan(130)
    try:
        steiner.plan(50)
    except steiner.UnreachableError as e:
        assert "6n−10" in str(e)
    else:
        raise AssertionError("order 50 should be unreachable")

    bad = steiner.Design("sqs", 8, s8.blocks[1:] + [[0, 1, 2, 4]])
    r = bad.verify()
    assert not r.is_exact() and r.multi_witnesses

    assert steiner.enumerate_sqs(8) == 30
    assert steiner.enumerate_quasigroups3(2) == 2
    print("smoke test OK")


if __name__ == "__main__":
    main()
