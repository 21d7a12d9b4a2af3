"""Smoke test for the parapres extension module.

Build and run from the repository root:

    cargo build -p parapres-py --release --features extension-module
    cp target/release/libparapres.so python/parapres.so
    python3 python/smoke_test.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import parapres  # noqa: E402


def main():
    # (0,1) and (1,1) as 2x1 operators: a TEA pair, witness column 0 at phase +1.
    x = parapres.Operator([[0], [1]])
    y = parapres.Operator([[1], [1]])
    tea = x.tea(y)
    assert tea["holds"] and tea["witness"] == {"column": 0, "kind": "tea", "phase": "+1"}, tea

    e11 = parapres.Operator([[1, 0], [0, 0]])
    e12 = parapres.Operator([[0, 1], [0, 0]])
    verdict = e11.parallel(e12)
    assert not verdict["holds"] and verdict["reason"] == "no shared norming column", verdict

    assert parapres.norm([[1, "-1/2"], [3, 0]]) == 4
    assert parapres.norm([1, -2, 3], p="inf") == 3
    assert abs(parapres.norm([[1j, 0], [1 + 1j, 2]]) - (1 + 2 ** 0.5)) < 1e-12

    phases = parapres.feasible_phases([1j, 0], [1, 0])
    assert phases["parallel"] and not phases["tea"], phases
    rep = complex(*phases["representative"])
    assert abs(rep - 1j) < 1e-12, rep

    assert len(parapres.enumerate_extreme_contractions(2, 2)) == 16
    assert parapres.is_extreme([[0, -1], [1, 0]])
    assert parapres.is_smooth([[1, 2], [3, 0]]) is True
    assert parapres.is_smooth([[1, 2], [0, 0]]) is False

    ex = parapres.paper_example()
    assert ex["matches"] and ex["rank"] == 1, ex
    assert ex["image_x"] == [1, 0] and ex["image_y"] == [-2, 0]

    iso = parapres.PreserverMap.make_isometry([[0, 1], [-1, 0]], [[1, 0], [0, 1]], scale=2)
    assert iso.rank() == 4 and iso.is_invertible()
    record = iso.classify(trials=500, isometry_samples=200)
    assert record["theorem_consistent"], record
    assert record["scalar_isometry"]["constant"] == 2
    image = iso.apply(e11).to_list()
    assert image == [[0, 0], [-2, 0]], image

    rank1 = parapres.PreserverMap([[-3, 1], [0, 0]], m=2, n=1)
    assert rank1.rank() == 1
    r = rank1.classify(trials=300, isometry_samples=100)
    assert r["rank_one_exception"] and r["theorem_consistent"], r

    pair = parapres.find_nonparallel_in_span([[1, 0], [0, 0]], [[0, 0], [1, 0]])
    assert pair is not None and not pair[0].is_parallel(pair[1])

    report = parapres.mine(family="random-rank1", candidates=5, trials=200, isometry_samples=50)
    assert report["summary"]["inconsistent"] == 0
    assert report["summary"]["rank_one_exceptions"] == 5

    verify = parapres.verify_theorem(items=[1, 4, 9])
    assert verify["passed"], verify

    print("parapres", parapres.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
