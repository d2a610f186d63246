import itertools
import json
import random
from math import gcd

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from cmlw.intlin import (FinAbPresentation, IntMatrix, WellDefinednessError, canonical_form, kernel_rank_and_torsion,
                         make_hom, smith_normal_form)


def random_matrix(rng, max_dim=8, lo=-50, hi=50):
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)])


def check_snf(M):
    d = smith_normal_form(M)
    assert d.U @ M @ d.V == d.S
    assert abs(d.U.det()) == 1 and abs(d.V.det()) == 1
    assert d.S.is_diagonal()
    diag = d.S.diagonal()
    nz = [a for a in diag if a]
    assert all(a > 0 for a in nz)
    assert diag[:len(nz)] == nz  # zeros last
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return nz


def test_snf_examples():
    assert check_snf(IntMatrix.from_rows([[2, 4], [6, 8]])) == [2, 4]
    assert check_snf(IntMatrix.from_rows([[3, 0], [0, 1]])) == [1, 3]
    assert check_snf(IntMatrix.zeros(2, 3)) == []


def test_snf_property_suite_500():
    rng = random.Random(11)
    for _ in range(500):
        check_snf(random_matrix(rng))


def test_snf_against_sympy():
    rng = random.Random(5)
    for _ in range(60):
        M = random_matrix(rng, max_dim=5, lo=-9, hi=9)
        ours = check_snf(M)
        theirs = [abs(int(a)) for a in sympy_invariants(Matrix(M.entries)) if a != 0]
        assert ours == theirs


def _minor_gcd(M, k):
    g = 0
    for rows in itertools.combinations(range(M.rows), k):
        for cols in itertools.combinations(range(M.cols), k):
            g = gcd(g, IntMatrix.from_rows([[M.entries[i][j] for j in cols] for i in rows]).det())
    return g


def test_snf_against_determinantal_divisors():
    rng = random.Random(3)
    for _ in range(40):
        M = random_matrix(rng, max_dim=4, lo=-6, hi=6)
        nz = check_snf(M)
        prev = 1
        for k in range(1, min(M.rows, M.cols) + 1):
            dk = _minor_gcd(M, k)
            if dk == 0:
                assert len(nz) < k
                break
            assert nz[k - 1] == dk // prev
            prev = dk


def test_matrix_json_round_trip():
    M = IntMatrix.from_rows([[1, -2], [0, 7]])
    assert IntMatrix.from_json(json.dumps(M.to_json())) == M
    with pytest.raises(ValueError):
        IntMatrix.from_json({"rows": 1, "cols": 1, "entries": [[1.5]]})
    with pytest.raises(ValueError):
        IntMatrix.from_json({"rows": 1})


def test_presentation_basics():
    P = FinAbPresentation(["g"], [[3]])
    assert canonical_form([5], P) == [2]
    assert P.is_zero([3]) and P.order == 3
    free = FinAbPresentation(["a", "b"])
    assert canonical_form([4, -1], free) == [4, -1]
    assert free.order is None and free.describe() == "Z x Z"
    assert FinAbPresentation(["a"], [[1]]).describe() == "0"
    V = FinAbPresentation(["a", "b"], [[2, 0], [0, 2]])
    assert V.describe() == "Z/2 x Z/2" and len(V.elements()) == 4


def test_canonical_form_is_coset_invariant():
    rng = random.Random(17)
    for _ in range(100):
        g = rng.randint(1, 5)
        rels = [[rng.randint(-6, 6) for _ in range(g)] for _ in range(rng.randint(0, 5))]
        P = FinAbPresentation(range(g), rels)
        for r in rels:
            assert P.is_zero(r)
        v = [rng.randint(-20, 20) for _ in range(g)]
        w = list(v)
        for r in rels:
            c = rng.randint(-3, 3)
            w = [a + c * b for a, b in zip(w, r)]
        assert P.coords(v) == P.coords(w)
        assert P.canonical_form(v) == P.canonical_form(w)
        assert P.coords(P.canonical_form(v)) == P.coords(v)


def _brute_well_defined(src, tgt, images, box=5):
    seen = {}
    for v in itertools.product(range(-box, box + 1), repeat=src.ngens):
        img = [sum(a * images[i][j] for i, a in enumerate(v)) for j in range(tgt.ngens)]
        key, val = src.coords(v), tgt.coords(img)
        if seen.setdefault(key, val) != val:
            return False
    return True


def test_make_hom_against_brute_force():
    rng = random.Random(23)
    for _ in range(60):
        src = FinAbPresentation(range(2), [[rng.choice([0, 2, 3, 4]), 0], [0, rng.choice([2, 3, 6])]])
        tgt = FinAbPresentation(range(2), [[rng.choice([2, 3, 4]), 0], [0, rng.choice([2, 6])]])
        images = [[rng.randint(0, 5) for _ in range(2)] for _ in range(2)]
        try:
            make_hom(src, tgt, images)
            ok = True
        except WellDefinednessError:
            ok = False
        assert ok == _brute_well_defined(src, tgt, images)


def test_well_definedness_examples():
    P = FinAbPresentation(["g"], [[2]])
    make_hom(P, P, [[1]])
    with pytest.raises(WellDefinednessError) as info:
        make_hom(P, FinAbPresentation(["h"], [[3]]), [[1]])
    assert info.value.relation == [2]


def test_kernels():
    Z = FinAbPresentation(["g"])
    assert kernel_rank_and_torsion(make_hom(Z, Z, [[0]])).describe() == "Z"
    Z6 = FinAbPresentation(["g"], [[6]])
    assert kernel_rank_and_torsion(make_hom(Z6, Z6, [[1]])).order == 1
    Z9 = FinAbPresentation(["g"], [[9]])
    assert kernel_rank_and_torsion(make_hom(Z9, Z9, [[3]])).describe() == "Z/3"


def test_kernel_order_against_enumeration():
    rng = random.Random(29)
    for _ in range(40):
        src = FinAbPresentation(range(2), [[rng.choice([2, 4, 6]), rng.randint(0, 3)], [0, rng.choice([2, 3, 4])]])
        tgt = FinAbPresentation(range(2), [[rng.choice([2, 4]), 0], [0, rng.choice([2, 4, 6])]])
        for _ in range(20):
            images = [[rng.randint(0, 5) for _ in range(2)] for _ in range(2)]
            try:
                h = make_hom(src, tgt, images)
            except WellDefinednessError:
                continue
            zero = sum(1 for y in src.elements() if not any(h.apply_coords(y)))
            assert kernel_rank_and_torsion(h).order == zero
            break


def test_compose():
    Z12 = FinAbPresentation(["g"], [[12]])
    f = make_hom(Z12, Z12, [[2]])
    g = make_hom(Z12, Z12, [[3]])
    assert g.compose(f).apply_coords(Z12.coords([1])) == Z12.coords([6])
