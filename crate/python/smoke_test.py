"""Smoke test for the pyarboreq extension module."""

from fractions import Fraction

import pyarboreq


def main():
    t = pyarboreq.Tree("(and * *)")
    assert t.leaf_count == 2 and t.height == 1
    assert str(t) == "(and * *)"
    assert t.evaluate("11") is True and t.evaluate("10") is False

    d = t.d_values()
    assert Fraction(d["d0"]) == Fraction(3, 2)
    assert Fraction(d["d1"]) == 2 and Fraction(d["d"]) == 2

    eq = t.equilibrium(class_="df", filter="0")
    assert Fraction(eq["value"]) == Fraction(3, 2), eq
    assert eq["r_value"] == eq["p_value"] == eq["value"]

    report = pyarboreq.Tree("(and (or * *) (or * *))").analyze()
    assert report["passed"], report
    assert len(report["equilibria"]) == 9

    r = pyarboreq.Tree.random(4, max_arity=3, seed=7)
    assert str(r) == "(and (or * *) (or * *))"
    assert r == pyarboreq.Tree(str(r)) and hash(r) == hash(pyarboreq.Tree(str(r)))
    assert r.is_weakly_balanced()

    for check in ["collapse", "yao", "weak-balance", "chimera", "replacement", "mixture", "product"]:
        v = r.verify(check, seed=1, samples=3)
        assert v and v.passed and v.checks > 0, (check, v.failures)

    trees = pyarboreq.corpus_trees(3)
    assert len(trees) == 9
    small = pyarboreq.verify_corpus_report(3)
    assert small["passed"] and small["trees"] == 9

    try:
        pyarboreq.Tree("(and *)")
    except ValueError as e:
        assert "at least 2" in str(e)
    else:
        raise AssertionError("one-child gate accepted")

    print("pyarboreq smoke test passed")


if __name__ == "__main__":
    main()
