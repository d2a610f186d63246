import itertools
import math
import random

import pytest

from cmlw.groups import get_group
from cmlw.intlin import FinAbPresentation, IntMatrix, WellDefinednessError, kernel_rank_and_torsion, make_hom
from cmlw.tensor import (COMMUTATOR_MAPS, ActionTensorSpec, TensorCalc, build_tensor, calc_for, delta_image,
                         tensor_element)


def _unit(n, i):
    return [int(j == i) for j in range(n)]


def _dense_to_fox(dense, fox):
    images = [fox.pres.lift(fox.element(_unit(dense.G.ngens, i), h)) for i, h in dense.pres.labels]
    return make_hom(dense.pres, fox.pres, IntMatrix.from_rows(images, cols=fox.pres.ngens), "dense->fox")


@pytest.mark.parametrize("name", ["Z4", "S3", "S4", "D4", "Q8", "H27", "UT(4,2)", "D6"])
def test_fox_presentation_isomorphic_to_dense(name):
    dense, fox = TensorCalc(get_group(name), method="dense"), TensorCalc(get_group(name), method="fox")
    for attr in ("T3", "D"):
        d, f = getattr(dense, attr), getattr(fox, attr)
        assert d.order == f.order
        h = _dense_to_fox(d, f)  # raises unless dense relations hold in fox
        assert kernel_rank_and_torsion(h).order == 1
    if get_group(name).order <= 27:
        d, f = dense.T2, fox.T2
        assert d.order == f.order
        assert kernel_rank_and_torsion(_dense_to_fox(d, f)).order == 1


def test_trivial_action_tensor_is_ordinary_tensor():
    # with trivial actions A (x) H = A (x)_Z H_ab = sum of Z/gcd(a_i, b_j)
    for name in ["D4", "Q8", "H27", "UT(4,2)", "UT(5,2)", "S3xZ2"]:
        c = calc_for(get_group(name))
        a = c.g2g3.pres.invariant_factors()
        b = c.ab.pres.invariant_factors()
        expected = math.prod(math.gcd(x, y) for x in a for y in b)
        assert c.D.order == expected, name


@pytest.mark.parametrize("name", ["S3", "S4", "D4", "H27", "UT(4,2)"])
def test_element_respects_factorizations(name):
    # g (x) h1 h2 = g (x) h1 + ^h1 g (x) ^h1 h2, computed both ways
    c = calc_for(get_group(name))
    rng = random.Random(name)
    for T in (c.T3, c.T2):
        H, k = T.H, T.G.ngens
        for _ in range(500):
            g = [rng.randrange(6) for _ in range(k)]
            h1, h2 = rng.randrange(H.order), rng.randrange(H.order)
            lhs = tensor_element(T, g, H.mul(h1, h2))
            rhs = T.pres.add(T.element(g, h1), T.element(T.act(h1, g), H.conj(h1, h2)))
            assert lhs == rhs
            assert T.expand(g, [h1, h2]) == lhs


def test_element_is_additive_in_left_factor():
    c = calc_for(get_group("UT(4,2)"))
    T = c.T2
    rng = random.Random(3)
    for _ in range(200):
        g1 = [rng.randrange(2) for _ in range(T.G.ngens)]
        g2 = [rng.randrange(2) for _ in range(T.G.ngens)]
        h = rng.randrange(T.H.order)
        assert T.element([a + b for a, b in zip(g1, g2)], h) == T.pres.add(T.element(g1, h), T.element(g2, h))


@pytest.mark.parametrize("name,t3,t2,d", [
    ("S3", [3], [3, 3], []),
    ("S4", [3], [3, 3], []),
    ("D4", [2, 2], [2, 2], [2, 2]),
    ("Q8", [2, 2], [2, 2], [2, 2]),
    ("H27", [3, 3], [3, 3], [3, 3]),
    ("UT(4,2)", [2] * 6, [2] * 7, [2] * 6),
    ("UT(5,2)", [2] * 12, [2] * 15, [2] * 12),
    ("D4xZ2", [2] * 3, [2] * 3, [2] * 3),
])
def test_frozen_tensor_invariants(name, t3, t2, d):
    c = calc_for(get_group(name))
    assert c.T3.pres.invariant_factors() == t3
    assert c.T2.pres.invariant_factors() == t2
    assert c.D.pres.invariant_factors() == d


def test_q8_tensor_pair():
    c = calc_for(get_group("Q8"))
    assert c.T2.order == 4 and c.T2.pres.describe() == "Z/2 x Z/2"


def test_delta_vanishes_on_s3():
    c = calc_for(get_group("S3"))
    assert all(not any(c.delta(x, y, z)) for x, y, z in itertools.product(range(6), repeat=3))


def test_delta_nonzero_where_h2_is_nontrivial():
    for name in ["UT(4,2)", "D4xZ2"]:
        c = calc_for(get_group(name))
        n = c.P.order
        assert any(any(delta_image(c, x, y, z)) for x in range(n) for y in range(0, n, 3) for z in range(0, n, 5))


def test_delta_alternating_in_equal_arguments():
    c = calc_for(get_group("UT(4,2)"))
    rng = random.Random(0)
    for _ in range(300):
        x, z = rng.randrange(64), rng.randrange(64)
        assert not any(c.delta(x, x, z))
        assert not any(c.delta(x, z, x))


def test_ut42_delta_witness():
    # e12 and e34 commute, yet delta(e12, e34; e23) = e13 (x) e34 + e24 (x) e12 != 0
    P = get_group("UT(4,2)")
    R = P.realization
    e12, e34, e23 = (P.index_of(R.elementary(i, j)) for i, j in [(0, 1), (2, 3), (1, 2)])
    assert P.comm(e12, e34) == 0
    c = calc_for(P)
    assert any(c.delta(e12, e34, e23))
    with pytest.raises(WellDefinednessError):
        c.delta_star
    with pytest.raises(WellDefinednessError):  # cached failure
        c.delta_star


@pytest.mark.parametrize("name", ["S3", "S4", "D4", "Q8", "H27"])
def test_delta_star_certificate(name):
    c = calc_for(get_group(name))
    h = c.delta_star
    assert c.delta_star_checked == ("exhaustive", c.P.order ** 3)
    assert h.target is c.T3.pres or h.target == c.T3.pres


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "H27", "UT(4,2)", "UT(5,2)", "D4xZ2"])
def test_commutator_maps_well_defined(name):
    c = calc_for(get_group(name))
    for m in COMMUTATOR_MAPS:
        c.commutator_map(m)


def test_alpha2_on_ut42_matches_commutators():
    c = calc_for(get_group("UT(4,2)"))
    a2 = c.commutator_map("alpha2")
    rng = random.Random(9)
    g2 = sorted(c.g2)
    for _ in range(200):
        x, z = rng.choice(g2), rng.randrange(64)
        assert a2.apply_coords(c.d_element(x, z)) == c.g3g4.coords(c.P.comm(x, z))


def test_beta1_on_s3_matches_commutators():
    c = calc_for(get_group("S3"))
    b1 = c.commutator_map("beta1")
    for x in c.g2:
        for p in range(6):
            assert b1.apply_coords(c.t2(x, p)) == c.g3_g32.coords(c.P.comm(x, p))


def test_beta2_on_abelian_group_is_zero():
    c = calc_for(get_group("Z6"))
    h = c.commutator_map("beta2")
    assert h.target.order == 1


def test_unknown_map_and_method():
    c = calc_for(get_group("S3"))
    with pytest.raises(ValueError):
        c.commutator_map("gamma9")
    with pytest.raises(ValueError):
        build_tensor(ActionTensorSpec(FinAbPresentation([0], [[2]]), get_group("Z2"), [[[1]], [[1]]], 3), method="x")


def test_spec_validation():
    with pytest.raises(ValueError):
        ActionTensorSpec(FinAbPresentation([0], [[2]]), get_group("Z2"), [[[1]], [[1]]], 1)
    with pytest.raises(ValueError):
        ActionTensorSpec(FinAbPresentation([0], [[2]]), get_group("Z2"), [[[1]]], 3)


def test_small_explicit_tensor():
    # Z/2 (x) Z/2 with trivial actions is Z/2; Z/3 (x) Z/2 is trivial
    for m, expected in [(2, 2), (3, 1), (4, 2)]:
        T = build_tensor(ActionTensorSpec(FinAbPresentation([0], [[m]]), get_group("Z2"), [[[1]], [[1]]], 3),
                         method="dense")
        assert T.order == expected
