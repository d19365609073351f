"""Smoke test for the modvertex Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import json

import modvertex


def main():
    assert modvertex.fp_binom(-1, 3, 5) == 4
    assert modvertex.fp_binom(10, 3, 7) == 120 % 7

    state = dict(modvertex.iota_state("h", 1, 3))
    assert state == {"h_{-1}^3": 1, "h_{-3}": 2}, state

    images = modvertex.wff_images(3, 1)
    assert set(images) == {"e", "h", "f"}

    top = [c for alpha, d, c in modvertex.mathieu_product(2, 0)]
    assert top == [1, 1]

    w = modvertex.BabyWakimoto(2)
    assert w.critical
    assert len(w.basis(0)) == 2
    assert w.act_on_highest_weight([("e", 0)]) == []
    assert w.act_on_highest_weight([("h", 0)]) == [("|0>", 1)]  # -1 = 1 mod 2
    assert w.singular_vectors(3) == []
    assert w.character(4) == modvertex.mathieu_product(2, 4)

    rows = modvertex.center_probe(2, 1, 2)
    assert rows[0] == (0, 1, 1) and rows[2][2] == 3

    result = modvertex.run_suite("lucas", p=[2, 3, 5, 7])
    assert result.passed
    report = json.loads(result.json())
    assert report["schema"] == "modvertex-report/1"
    assert len(report["checks"]) == 4

    result = modvertex.run_suite("pcenter-images", p=[2], kappa=["formal"], depth=2, mode_bound=1)
    assert result.passed, result.summary()

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
