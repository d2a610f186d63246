import itertools
import random
import time

import pytest

from cmlw.magnus import (NCPoly, bracket_word, format_weight, gamma_class, is_lyndon, lcs_weight, lyndon_basis,
                         lyndon_words, magnus_embed, mobius, standard_bracketing, witt_rank)
from cmlw.words import Word, commutator, reduce

x, y = Word.gen(1), Word.gen(2)


def naive_embed(w: Word, cap: int) -> dict:
    """Expand the product of per-letter series by plain dictionary convolution."""
    poly = {(): 1}
    for a in w.letters:
        i = abs(a)
        if a > 0:
            factor = {(): 1, (i,): 1}
        else:
            factor = {(i,) * k: (-1) ** k for k in range(cap + 1)}
        out = {}
        for m1, c1 in poly.items():
            for m2, c2 in factor.items():
                m = m1 + m2
                if len(m) <= cap:
                    out[m] = out.get(m, 0) + c1 * c2
        poly = {m: c for m, c in out.items() if c}
    return poly


def random_word(rng, rank=3, length=12):
    return reduce(rng.choice([i for g in range(1, rank + 1) for i in (g, -g)]) for _ in range(rng.randrange(length)))


def test_embedding_examples():
    assert magnus_embed(x, 1, 1).terms == {(): 1, (1,): 1}
    assert magnus_embed(~x, 1, 2).terms == {(): 1, (1,): -1, (1, 1): 1}
    assert magnus_embed(commutator(x, y), 2, 2).terms == {(): 1, (1, 2): 1, (2, 1): -1}


def test_embedding_matches_naive_oracle():
    rng = random.Random(1)
    for _ in range(200):
        w = random_word(rng)
        assert magnus_embed(w, 3, 4).terms == naive_embed(w, 4)


def test_multiplicative_and_inverse_laws_500_pairs():
    rng = random.Random(8)
    one = NCPoly.one(3, 5)
    for _ in range(500):
        a, b = random_word(rng), random_word(rng)
        ea, eb = magnus_embed(a, 3, 5), magnus_embed(b, 3, 5)
        assert magnus_embed(a * b, 3, 5) == ea * eb
        assert ea * magnus_embed(~a, 3, 5) == one


def test_rank_check():
    with pytest.raises(ValueError):
        magnus_embed(Word.gen(3), 2, 3)


def test_weights():
    assert lcs_weight(x, 2) == 1
    assert lcs_weight(commutator(x, y), 2) == 2
    assert lcs_weight(commutator(commutator(x, y), x), 2) == 3
    assert lcs_weight(Word.identity(), 2) is None
    deep = commutator(commutator(commutator(x, y), x), y)
    assert lcs_weight(deep, 2, cap=3) == 4  # cap + 1: at least 4
    assert format_weight(4, 3) == ">= 4"
    assert format_weight(None, 3) == "identity"


def test_mobius():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_witt_examples():
    assert witt_rank(2, 2) == 1
    assert witt_rank(2, 3) == 2
    assert witt_rank(2, 4) == 3


def _lyndon_brute(r, n):
    out = []
    for w in itertools.product(range(1, r + 1), repeat=n):
        if all(w < w[k:] + w[:k] for k in range(1, n)):
            out.append(w)
    return out


def test_witt_equals_lyndon_count():
    start = time.perf_counter()
    for r in range(1, 4):
        for n in range(1, 7):
            assert witt_rank(r, n) == len(lyndon_words(r, n)) == len(_lyndon_brute(r, n))
    assert time.perf_counter() - start < 1.0


def test_lyndon_words():
    assert lyndon_words(2, 1) == ((1,), (2,))
    assert lyndon_words(2, 3) == ((1, 1, 2), (1, 2, 2))
    assert is_lyndon((1, 2)) and not is_lyndon((2, 1)) and not is_lyndon((1, 1))


def test_standard_bracketing():
    assert standard_bracketing((1, 2)) == (1, 2)
    assert standard_bracketing((1, 1, 2)) == (1, (1, 2))
    assert standard_bracketing((1, 2, 2)) == ((1, 2), 2)


def test_gamma_class_unit_vectors():
    for r in range(1, 4):
        for n in range(1, 6):
            basis = lyndon_basis(r, n)
            assert len(basis) == witt_rank(r, n)
            for k, b in enumerate(basis.bracketings):
                v = gamma_class(bracket_word(b), r, n)
                assert v == [int(j == k) for j in range(len(basis))]


def test_gamma_class_examples():
    assert gamma_class(commutator(x, y), 2, 2) == [1]
    assert gamma_class(Word.identity(), 2, 3) == [0, 0]
    assert gamma_class(commutator(y, x), 2, 2) == [-1]
    with pytest.raises(ValueError):
        gamma_class(x, 2, 2)


def test_gamma_class_is_additive():
    rng = random.Random(4)
    basis = lyndon_basis(2, 3).bracketings
    for _ in range(50):
        cs = [rng.randint(-2, 2) for _ in basis]
        w = Word.identity()
        for c, b in zip(cs, basis):
            w = w * bracket_word(b) ** c
        assert gamma_class(w, 2, 3) == cs
