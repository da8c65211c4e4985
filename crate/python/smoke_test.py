"""Smoke test for the `bott` extension module.

Build and install first, e.g. from crates/py:

    maturin build --release -o dist && pip install dist/bott-*.whl

then run `python python/smoke_test.py`.
"""

import pathlib

import bott

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(name):
    return bott.Tower.parse((DATA / name).read_text())


def main():
    b, b_prime = load("b.tower"), load("b_prime.tower")

    assert bott.Ring(b).relations(["x", "y"]) == ["x^3", "y^4 + x*y^3"]
    assert bott.Ring(b_prime).relations(["X", "Y"]) == ["X^3", "Y^4 + 2*X*Y^3"]
    assert bott.Ring(b).poincare_ranks() == [1, 2, 3, 3, 2, 1]
    assert bott.Ring(b).normal_form("x^3 + x*y^4", ["x", "y"]) == "-x^2*y^3"

    witness = bott.search_isomorphism(b, b_prime, over_integers=False, bound=2)
    assert witness is not None
    assert bott.is_isomorphism(witness, b, b_prime)
    assert bott.residues(witness, b, b_prime) == ["0", "0"]
    assert bott.search_isomorphism(b, b_prime, over_integers=True, bound=4) is None

    report = bott.full_report(b)
    assert not report.q_trivial and report.first_violation == (2, 2)

    for a in range(-3, 4):
        hirzebruch = bott.Tower([1, 1], [[[]], [[a]]])
        assert bott.is_q_trivial(hirzebruch)
        assert bott.is_z_trivial(hirzebruch) == (a % 2 == 0)

    mixed = bott.Tower([2, 1], [[[], []], [[0]]])
    perm, reordered = bott.decompose(mixed)
    assert perm == [2, 1] and reordered.fiber_dims == [1, 2]

    try:
        bott.Tower.parse("stage n=1\nstage n=1\nx\n")
    except ValueError as e:
        assert "line 3" in str(e)
    else:
        raise AssertionError("malformed tower accepted")

    records = bott.census(2, [1], 1)
    assert [(q, z) for _, q, z, _ in records] == [(True, False), (True, True), (True, False)]

    print("bott smoke test passed")


if __name__ == "__main__":
    main()
