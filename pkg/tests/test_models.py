import time

import pytest

from cmlw.expr import UnboundVariableError, parse, parse_identity
from cmlw.models import (Exhaustive, FreeGroupModel, Random, Status, UnknownModelError, builtin_corpus,
                         check_identity, evaluate, model_from_spec)
from cmlw.words import Word, commutator


def test_corpus_shape():
    corpus = builtin_corpus()
    names = [i.name for i in corpus]
    assert len(corpus) >= 16 and len(set(names)) == len(names)
    assert sum(n.startswith("axiom") for n in names) == 5
    assert sum(n.startswith("intro") for n in names) == 5


def test_corpus_holds_in_free_model_fast():
    m = model_from_spec("free")
    start = time.perf_counter()
    for ident in builtin_corpus():
        v = check_identity(ident, m)
        assert v.holds, ident.name
        assert v.mode == "canonical" and v.checked == 1
    assert time.perf_counter() - start < 5.0


@pytest.mark.parametrize("spec", ["perm:S3", "perm:D4", "perm:Q8", "mat:UT(3,2)"])
def test_corpus_exhaustive_small(spec):
    m = model_from_spec(spec)
    for ident in builtin_corpus():
        v = check_identity(ident, m)
        assert v.holds, (spec, ident.name)
        if m.order ** len(ident.variables) <= 10**6:
            assert v.mode == "exhaustive" and v.checked == m.order ** len(ident.variables)


@pytest.mark.parametrize("spec", ["perm:S7", "mat:UT(4,2)", "mat:UT(5,3)"])
def test_corpus_sampled_large(spec):
    m = model_from_spec(spec)
    for ident in builtin_corpus():
        v = check_identity(ident, m, Random(300, seed=5))
        assert v.holds, (spec, ident.name)
        assert v.checked == 300 and v.mode == "random"


def test_symmetry_of_bracket_fails_with_counterexample():
    ident = parse_identity("sym: {x,y} = {y,x}")
    v = check_identity(ident, FreeGroupModel())
    assert v.status is Status.FAILS
    assert v.counterexample == {"x": Word.gen(1), "y": Word.gen(2)}
    # residue = [x,y][y,x]^-1 = [x,y]^2
    assert v.residue == commutator(Word.gen(1), Word.gen(2)) ** 2
    assert not check_identity(ident, model_from_spec("perm:S3")).holds


def test_abelian_identity_fails_in_s3():
    v = check_identity(parse_identity("ab: x*y = y*x"), model_from_spec("perm:S3"))
    assert v.status is Status.FAILS
    a, b = v.counterexample["x"], v.counterexample["y"]
    m = model_from_spec("perm:S3")
    assert m.mul(a, b) != m.mul(b, a)


def test_bracket_equals_commutator_in_every_model():
    ident = parse_identity("b: {x,y} = [x,y]")
    for spec in ["free", "perm:S4", "mat:UT(3,2)"]:
        assert check_identity(ident, model_from_spec(spec)).holds


def test_evaluate_and_unbound():
    m = FreeGroupModel()
    a = {"x": Word.gen(1), "y": Word.gen(2)}
    assert evaluate(parse("cj(x,y)"), m, a) == Word.gen(1) * Word.gen(2) * ~Word.gen(1)
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x*z"), m, a)


def test_sampling_determinism_and_budget():
    m = model_from_spec("perm:S7")
    ident = parse_identity("ab: x*y = y*x")
    v1 = check_identity(ident, m, Random(50, seed=3))
    v2 = check_identity(ident, m, Random(50, seed=3))
    assert v1.counterexample == v2.counterexample and v1.checked == v2.checked
    with pytest.raises(ValueError):
        Random(0)
    v = check_identity(parse_identity("t: x = x"), model_from_spec("perm:S3"), Exhaustive())
    assert v.checked == 6


@pytest.mark.parametrize("spec,order", [("perm:S3", 6), ("perm:S5", 120), ("perm:D4", 8), ("perm:Q8", 8),
                                        ("mat:UT(3,2)", 8), ("mat:UT(4,3)", 729), ("mat:UT(2,5)", 5)])
def test_model_specs(spec, order):
    assert model_from_spec(spec).order == order


@pytest.mark.parametrize("spec", ["perm:S9", "perm:S2", "mat:UT(6,2)", "mat:UT(3,4)", "nope", "perm:"])
def test_unknown_models(spec):
    with pytest.raises(UnknownModelError):
        model_from_spec(spec)
