import os
from fractions import Fraction

import pytest

import fox

CORPUS = os.path.join(os.path.dirname(__file__), "..", "..", "corpus")


def read(name):
    with open(os.path.join(CORPUS, name)) as f:
        return f.read()


def test_typecheck():
    assert fox.typecheck("fun x -> x + 1") == "int -> int"
    with pytest.raises(fox.TypeError):
        fox.typecheck("1 + true")
    with pytest.raises(fox.ParseError):
        fox.typecheck("let x = in 1")
    with pytest.raises(ValueError):
        fox.typecheck("(")


def test_sup_term_progD():
    r = fox.sup_term(read("progD.fox"), 10)
    assert r["value"] == Fraction(1, 2)
    assert r["saturated"]


def test_sup_value_batch():
    src = read("batch_impl.fox")
    for k in range(4):
        assert fox.sup_value(src, str(k), 24)["value"] == Fraction(1, 4)


def test_run_distributions():
    d = fox.run(read("rand1.fox"), 10)
    assert d == {"0": Fraction(1, 2), "1": Fraction(1, 2)}
    assert sum(fox.run(read("batch_impl.fox"), 40, seed=3).values()) == 1


def test_refine_report():
    rep = fox.refine(read("batch_impl.fox"), read("batch_spec.fox"), 24, ["0", "3"], equiv=True)
    assert rep["verdict"] == "PASS"
    bad = fox.refine("0", "rand 1", 10, ["0"])
    assert bad["verdict"] == "FAIL"


def test_min_eps():
    assert fox.min_eps({0: "1/2", 1: "1/2"}, {0: "1/2", 1: "1/2"}, {(0, 0), (1, 1)}) == 0
    assert fox.min_eps({0: "1/2", 1: "1/2"}, {0: "1/2", 1: "1/2"}, {(0, 0), (1, 0)}) == Fraction(1, 2)
    got, budget = fox.check_query(read("q_shift.json"))
    assert got == Fraction(1, 2) and budget == Fraction(1, 4)


def test_corpus_and_lemmas():
    names = {e["name"] for e in fox.corpus()}
    assert {"batch-1-1", "rejection-3-1", "prog-a-vs-d"} <= names
    checks = fox.validate_fisch_lemmas(20, 3)
    assert checks and all(c["failures"] == 0 for c in checks)
