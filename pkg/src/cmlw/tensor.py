"""Abelianized tensor groups G (x) H for finite P and the maps between them.

Only the two kinds with an abelian G acting trivially on H are built:
G an abelian section of P under the conjugation action of H = P, or
H = P_ab.  They are materialized as presented abelian groups on symbols
(generator of G) (x) (element of H), with the relations of G and

    g (x) hh' = g (x) h + (^h g) (x) (^h h').

Additivity in the left slot is built into the encoding.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

from cmlw.groups import AbelianRealization, FiniteGroup, QuotientMap
from cmlw.intlin import AbHom, FinAbPresentation, IntMatrix, WellDefinednessError, make_hom

TENSOR_GENERATOR_BOUND = 4096
EXHAUSTIVE_LIMIT = 10**6
DEFAULT_SAMPLES = 2000
DEFAULT_SEED = 42


class TensorBoundError(ValueError):
    pass


@dataclass
class ActionTensorSpec:
    """Data for G (x) H: *action[h]* is the matrix whose row i holds the
    generator coordinates of ^h g_i."""

    G: FinAbPresentation
    H: FiniteGroup
    action: list[list[list[int]]]
    kind: int
    name: str = ""

    def __post_init__(self):
        if self.kind not in (2, 3):
            raise ValueError("only tensor kinds 2 and 3 are materialized")
        if len(self.action) != self.H.order:
            raise ValueError("need one action matrix per element of H")


class TensorGroup:
    def __init__(self, spec: ActionTensorSpec, bound: int = TENSOR_GENERATOR_BOUND):
        G, H = spec.G, spec.H
        k, nh = G.ngens, H.order
        if k * nh > bound:
            raise TensorBoundError(f"{spec.name}: {k * nh} tensor generators exceed bound {bound}")
        self.spec = spec
        self.name = spec.name
        self.G, self.H = G, H
        self._check_action()
        self.nh = nh

        def col(i, h):
            return i * nh + h

        rels: list[list[int]] = []
        for rho in G.relations.entries:
            for h in range(nh):
                r = [0] * (k * nh)
                for i, a in enumerate(rho):
                    if a:
                        r[col(i, h)] += a
                rels.append(r)
        for h in range(nh):
            A = spec.action[h]
            row_h = H.row(h)
            for h2 in range(nh):
                hh2 = row_h[h2]
                ch2 = H.conj(h, h2)
                for i in range(k):
                    r = [0] * (k * nh)
                    r[col(i, hh2)] += 1
                    r[col(i, h)] -= 1
                    for j, a in enumerate(A[i]):
                        if a:
                            r[col(j, ch2)] -= a
                    if any(r):
                        rels.append(r)
        labels = [(i, h) for i in range(k) for h in range(nh)]
        self.pres = FinAbPresentation(labels, rels)
        self._gen_coords = self.pres.generator_coords()

    def _check_action(self):
        G, H, A = self.G, self.H, self.spec.action
        for h in range(H.order):
            try:
                make_hom(G, G, A[h], f"action of {h}")
            except WellDefinednessError as exc:
                raise ValueError(f"{self.name}: action table is not an endomorphism: {exc}") from None
            hinv = H.inv(h)
            for i in range(G.ngens):
                v = [0] * G.ngens
                for j, a in enumerate(A[h][i]):
                    for l, b in enumerate(A[hinv][j]):
                        v[l] += a * b
                v[i] -= 1
                if not G.is_zero(v):
                    raise ValueError(f"{self.name}: action of element {h} is not an automorphism")

    @property
    def order(self) -> int | None:
        return self.pres.order

    def element(self, g: Sequence[int], h: int) -> tuple[int, ...]:
        """Normal form of g (x) h, for g in generator coordinates of G and h an index of H."""
        if len(g) != self.G.ngens:
            raise ValueError("left factor has the wrong length")
        if not 0 <= h < self.nh:
            raise ValueError(f"{h} is not an element index of H")
        nh = self.nh
        return self.pres.combine((a, self._gen_coords[i * nh + h]) for i, a in enumerate(g) if a)

    def expand(self, g: Sequence[int], factors: Sequence[int]) -> tuple[int, ...]:
        """g (x) (h1 h2 ... hn) expanded letter by letter:
        g (x) h1 r = g (x) h1 + (^h1 g) (x) (^h1 r)."""
        H = self.H
        if not factors:
            return self.pres.zero()
        h1, rest = factors[0], list(factors[1:])
        head = self.element(g, h1)
        if not rest:
            return head
        moved = self.act(h1, g)
        return self.pres.add(head, self.expand(moved, [H.conj(h1, r) for r in rest]))

    def act(self, h: int, g: Sequence[int]) -> list[int]:
        A = self.spec.action[h]
        out = [0] * self.G.ngens
        for i, a in enumerate(g):
            if a:
                for j, b in enumerate(A[i]):
                    out[j] += a * b
        return out

    def __repr__(self):
        return f"TensorGroup({self.name}: {self.pres.describe()})"


class FoxTensorGroup(TensorGroup):
    """The same group through G (x) H = IH (x)_ZH G, g (x) h <-> (h - 1) (x) g.

    IH is presented as a right ZH-module on the symbols s - 1 for the
    generators s of H, with one relator per non-tree edge of the Cayley
    graph; the relator rows come from right Fox derivatives along the
    spanning tree.  Generators: (j, s) for j a generator of G, so this
    scales with |H| * #gens instead of |H|^2.
    """

    def __init__(self, spec: ActionTensorSpec, bound: int = TENSOR_GENERATOR_BOUND):
        G, H = spec.G, spec.H
        k, ns = G.ngens, len(H.generators)
        if k * ns > bound:
            raise TensorBoundError(f"{spec.name}: {k * ns} tensor generators exceed bound {bound}")
        self.spec, self.name = spec, spec.name
        self.G, self.H = G, H
        self.nh = H.order
        self.ns = ns
        e = G.moduli[-1] if G.free_rank == 0 and G.moduli else 0
        self._mod = e
        A = [self._reduce_matrix(spec.action[s]) for s in H.generators]
        self._check_left_action(A)
        # Y[h][i] is the k x k matrix of the slot-i Fox coefficient of h
        ident = [[int(a == b) for b in range(k)] for a in range(k)]
        zero = [[0] * k for _ in range(k)]
        Y = [[zero] * ns]
        parent, via, rmul = H._parent, H._via, H._rmul
        for b in range(1, H.order):
            s = via[b]
            Yp = Y[parent[b]]
            Y.append([self._reduce_matrix(_matadd(_matmul(A[s], Yp[i]), ident if i == s else None)) for i in range(ns)])
        self._Y = Y
        rels: list[list[int]] = []
        for rho in G.relations.entries:
            for i in range(ns):
                r = [0] * (k * ns)
                r[i * k:(i + 1) * k] = rho
                rels.append(r)
        seen = set()
        for a in range(H.order):
            for s in range(ns):
                q = rmul[a][s]
                if parent[q] == a and via[q] == s:
                    continue
                Z = [self._reduce_matrix(_matadd(_matadd(_matmul(A[s], Y[a][i]), ident if i == s else None),
                                                 Y[q][i], -1)) for i in range(ns)]
                for j in range(k):
                    r = tuple(x for i in range(ns) for x in Z[i][j])
                    if any(r) and r not in seen:
                        seen.add(r)
                        rels.append(list(r))
        labels = [(j, H.generators[i]) for i in range(ns) for j in range(k)]
        self.pres = FinAbPresentation(labels, rels)

    def _reduce_matrix(self, M):
        e = self._mod
        return [[x % e for x in row] for row in M] if e else [list(row) for row in M]

    def _check_left_action(self, A):
        H, act = self.H, self.spec.action
        for a in range(H.order):
            Aa = self._reduce_matrix(act[a])
            for s, g in enumerate(H.generators):
                want = self._reduce_matrix(act[H._rmul[a][s]])
                got = self._reduce_matrix(_matmul(A[s], Aa))
                for i in range(self.G.ngens):
                    diff = [x - y for x, y in zip(got[i], want[i])]
                    if not self.G.is_zero(diff):
                        raise ValueError(f"{self.name}: action tables do not form a left action")

    def element(self, g: Sequence[int], h: int) -> tuple[int, ...]:
        if len(g) != self.G.ngens:
            raise ValueError("left factor has the wrong length")
        if not 0 <= h < self.nh:
            raise ValueError(f"{h} is not an element index of H")
        k = self.G.ngens
        v = [0] * (k * self.ns)
        for i, Yi in enumerate(self._Y[h]):
            for a, coef in enumerate(g):
                if coef:
                    row = Yi[a]
                    for b in range(k):
                        if row[b]:
                            v[i * k + b] += coef * row[b]
        return self.pres.coords(v)

    def __repr__(self):
        return f"FoxTensorGroup({self.name}: {self.pres.describe()})"


def _matmul(X, Y):
    n, m = len(X), len(Y[0]) if Y else 0
    out = [[0] * m for _ in range(n)]
    for i, row in enumerate(X):
        o = out[i]
        for l, a in enumerate(row):
            if a:
                for j, b in enumerate(Y[l]):
                    if b:
                        o[j] += a * b
    return out


def _matadd(X, Y, sign=1):
    if Y is None:
        return X
    return [[a + sign * b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def build_tensor(spec: ActionTensorSpec, bound: int = TENSOR_GENERATOR_BOUND, method: str = "dense") -> TensorGroup:
    """*method* "dense" uses all elements of H as right-hand symbols,
    "fox" the generators of H only."""
    if method == "dense":
        return TensorGroup(spec, bound)
    if method == "fox":
        return FoxTensorGroup(spec, bound)
    raise ValueError(f"unknown tensor method {method!r}")


def tensor_element(T: TensorGroup, g: Sequence[int], h: int) -> tuple[int, ...]:
    return T.element(g, h)


# -- per-group workbench -----------------------------------------------------


class TensorCalc:
    """Sections of the lower central series of a finite group P and the
    tensor groups and maps built from them."""

    def __init__(self, P: FiniteGroup, bound: int = TENSOR_GENERATOR_BOUND, method: str = "fox"):
        self.P = P
        self.bound = bound
        self.method = method
        L = P.lcs
        self.g2, self.g3, self.g4 = L[2], L[3], L[4]
        self.g22 = P.commutator_subgroup(self.g2, self.g2)
        self._t3_cache: dict = {}
        self._t2_cache: dict = {}
        self._delta_cache: dict = {}
        self._delta_star = None
        self.delta_star_checked: tuple[str, int] | None = None
        self._comm = P.fast_ops()[3] if P.order <= 2048 else P.comm

    @cached_property
    def g32(self) -> frozenset[int]:
        return self.P.commutator_subgroup(self.g3, self.g2)

    # the commutator [x, y] chosen for each element of gamma_2 that is one
    @cached_property
    def commutator_pairs(self) -> dict[int, tuple[int, int]]:
        P = self.P
        # [^g s, ^g t] over all g and generator pairs generate gamma_2
        pairs: dict[int, tuple[int, int]] = {}
        gens = P.generators
        for g in range(P.order):
            cg = [P.conj(g, s) for s in gens]
            for a in range(len(gens)):
                for b in range(len(gens)):
                    if a != b:
                        pairs.setdefault(P.comm(cg[a], cg[b]), (cg[a], cg[b]))
        return pairs

    @cached_property
    def ab(self) -> QuotientMap:
        P = self.P
        return QuotientMap(P, P.all, self.g2, P.generators + sorted(P.all), name="P_ab")

    @cached_property
    def Pab(self) -> FiniteGroup:
        pres = self.ab.pres
        gens = pres.generator_coords()
        return FiniteGroup(f"{self.P.name}_ab", AbelianRealization(pres), gens)

    @cached_property
    def ab_index(self) -> list[int]:
        """P element -> index of its image in Pab."""
        H = self.Pab
        return [H.index[self.ab.coords(p)] for p in range(self.P.order)]

    @cached_property
    def ab_lift(self) -> list[int]:
        return [self.ab.lift(c) for c in self.Pab.elements]

    @cached_property
    def dab(self) -> QuotientMap:
        """[P,P]_ab on commutator generators."""
        cands = list(self.commutator_pairs)
        return QuotientMap(self.P, self.g2, self.g22, cands, name="[P,P]_ab")

    @cached_property
    def g2g3(self) -> QuotientMap:
        """gamma_2/gamma_3 on the same generators as [P,P]_ab."""
        return QuotientMap(self.P, self.g2, self.g3, name="g2/g3", generators=self.dab.generators)

    def section(self, N: frozenset[int], M: frozenset[int], name: str) -> QuotientMap:
        return QuotientMap(self.P, N, M, name=name)

    @cached_property
    def g3_g22(self) -> QuotientMap:
        return self.section(self.g3, self.g22, "g3/[g2,g2]")

    @cached_property
    def g3g4(self) -> QuotientMap:
        return self.section(self.g3, self.g4, "g3/g4")

    @cached_property
    def g4_g32(self) -> QuotientMap:
        return self.section(self.g4, self.g32, "g4/[g3,g2]")

    @cached_property
    def g3_g32(self) -> QuotientMap:
        return self.section(self.g3, self.g32, "g3/[g3,g2]")

    # -- tensor groups --

    def _over_pab(self, q: QuotientMap, trivial: bool, name: str) -> TensorGroup:
        H = self.Pab
        k = q.pres.ngens
        action = []
        for h in range(H.order):
            if trivial:
                action.append([[int(i == j) for j in range(k)] for i in range(k)])
            else:
                p = self.ab_lift[h]
                action.append([q.vector(self.P.conj(p, s)) for s in q.generators])
        return build_tensor(ActionTensorSpec(q.pres, H, action, 3, name), self.bound, self.method)

    def _over_p(self, q: QuotientMap, name: str) -> TensorGroup:
        P = self.P
        action = [[q.vector(P.conj(p, s)) for s in q.generators] for p in range(P.order)]
        return build_tensor(ActionTensorSpec(q.pres, P, action, 2, name), self.bound, self.method)

    @cached_property
    def T3(self) -> TensorGroup:
        """[P,P]_ab (x) P_ab."""
        return self._over_pab(self.dab, False, "[P,P]_ab(x)P_ab")

    @cached_property
    def D(self) -> TensorGroup:
        """(gamma_2/gamma_3) (x) P_ab, both actions trivial."""
        return self._over_pab(self.g2g3, True, "(g2/g3)(x)P_ab")

    @cached_property
    def T2(self) -> TensorGroup:
        """[P,P]_ab (x) P."""
        return self._over_p(self.dab, "[P,P]_ab(x)P")

    def tensor_over_p(self, which: str) -> TensorGroup:
        sections = {
            "g3/[g2,g2]": self.g3_g22,
            "[P,P]_ab": self.dab,
            "g2/g3": self.g2g3,
            "g3/[g3,g2]": self.g3_g32,
        }
        return self._over_p(sections[which], f"({which})(x)P")

    # -- elements --

    def t3(self, c: int, z: int) -> tuple[int, ...]:
        """[P,P]_ab (x) P_ab symbol for c in gamma_2, z in P."""
        key = (c, self.ab_index[z])
        v = self._t3_cache.get(key)
        if v is None:
            v = self.T3.element(self.dab.vector(c), key[1])
            self._t3_cache[key] = v
        return v

    def t2(self, c: int, p: int) -> tuple[int, ...]:
        key = (c, p)
        v = self._t2_cache.get(key)
        if v is None:
            v = self.T2.element(self.dab.vector(c), p)
            self._t2_cache[key] = v
        return v

    def delta(self, x: int, y: int, z: int) -> tuple[int, ...]:
        """[x,y] (x) z + [z,x] (x) y + [y,z] (x) x in [P,P]_ab (x) P_ab."""
        key = (x, y, z)
        v = self._delta_cache.get(key)
        if v is None:
            c = self._comm
            v = self.T3.pres.add(self.t3(c(x, y), z), self.t3(c(z, x), y), self.t3(c(y, z), x))
            self._delta_cache[key] = v
        return v

    def d_element(self, c: int, z: int) -> tuple[int, ...]:
        """(gamma_2/gamma_3) (x) P_ab symbol."""
        return self.D.element(self.g2g3.vector(c), self.ab_index[z])

    # -- maps --

    @property
    def delta_star(self) -> AbHom:
        """(gamma_2/gamma_3) (x) P_ab -> [P,P]_ab (x) P_ab,
        [x,y] (x) z -> [x,y] (x) z + [z,x] (x) y + [y,z] (x) x.

        The hom is fixed by its values on generators; the certificate also
        compares it with the formula on every symbol [x,y] (x) z (all
        triples when there are at most EXHAUSTIVE_LIMIT, else seeded samples).
        Raises WellDefinednessError, cached, when either step fails.
        """
        if self._delta_star is None:
            try:
                self._delta_star = self._build_delta_star()
            except WellDefinednessError as exc:
                self._delta_star = exc
        if isinstance(self._delta_star, WellDefinednessError):
            raise self._delta_star
        return self._delta_star

    def _build_delta_star(self) -> AbHom:
        D, T3 = self.D, self.T3
        images = []
        for i, h in D.pres.labels:
            x, y = self.commutator_pairs[self.g2g3.generators[i]]
            images.append(T3.pres.lift(self.delta(x, y, self.ab_lift[h])))
        hom = make_hom(D.pres, T3.pres, IntMatrix.from_rows(images, cols=T3.pres.ngens), "delta*")
        n = self.P.order
        if n**3 <= EXHAUSTIVE_LIMIT:
            triples = itertools.product(range(n), repeat=3)
            self.delta_star_checked = ("exhaustive", n**3)
        else:
            rng = random.Random(f"{DEFAULT_SEED}/delta*")
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(DEFAULT_SAMPLES))
            self.delta_star_checked = ("random", DEFAULT_SAMPLES)
        comm, sub = self._comm, T3.pres.signed_sum
        for x, y, z in triples:
            r = sub([hom.apply_coords(self.d_element(comm(x, y), z))], [self.delta(x, y, z)])
            if any(r):
                raise WellDefinednessError([x, y, z], r, "delta* against [x,y](x)z+[z,x](x)y+[y,z](x)x at (x, y, z)")
        return hom

    @cached_property
    def i_prime(self) -> AbHom:
        """Projection [P,P]_ab (x) P_ab -> (gamma_2/gamma_3) (x) P_ab."""
        n = self.T3.pres.ngens
        return make_hom(self.T3.pres, self.D.pres, IntMatrix.identity(n), "i'")

    def _commutator_hom(self, T: TensorGroup, q: QuotientMap, target: QuotientMap, lift: Callable[[int], int], name: str) -> AbHom:
        P = self.P
        images = []
        for i, h in T.pres.labels:
            images.append(target.vector(P.comm(q.generators[i], lift(h))))
        return make_hom(T.pres, target.pres, IntMatrix.from_rows(images, cols=target.pres.ngens), name)

    def commutator_map(self, map_id: str) -> AbHom:
        """The commutator maps [c] (x) p -> [c, p] between presented sections."""
        lift_ab = self.ab_lift.__getitem__

        def same(p):
            return p

        if map_id == "alpha1":
            return self._commutator_hom(self.T3, self.dab, self.g3_g22, lift_ab, map_id)
        if map_id == "alpha2":
            return self._commutator_hom(self.D, self.g2g3, self.g3g4, lift_ab, map_id)
        if map_id == "beta0":
            T = self.tensor_over_p("g3/[g2,g2]")
            return self._commutator_hom(T, self.g3_g22, self.g4_g32, same, map_id)
        if map_id == "beta1":
            return self._commutator_hom(self.T2, self.dab, self.g3_g32, same, map_id)
        if map_id == "beta2":
            T = self.tensor_over_p("g2/g3")
            return self._commutator_hom(T, self.g2g3, self.g3g4, same, map_id)
        if map_id == "alpha'":
            T = self.tensor_over_p("g3/[g3,g2]")
            return self._commutator_hom(T, self.g3_g32, self.g4_g32, same, map_id)
        raise ValueError(f"unknown commutator map {map_id!r}")


COMMUTATOR_MAPS = ("alpha1", "alpha2", "beta0", "beta1", "beta2", "alpha'")

_calc_cache: dict[tuple, TensorCalc] = {}


def calc_for(P: FiniteGroup, bound: int = TENSOR_GENERATOR_BOUND, method: str = "fox") -> TensorCalc:
    key = (P.name, P.order, bound, method)
    c = _calc_cache.get(key)
    if c is None or c.P is not P:
        c = TensorCalc(P, bound, method)
        _calc_cache[key] = c
    return c


def delta_image(calc: TensorCalc, x: int, y: int, z: int) -> tuple[int, ...]:
    return calc.delta(x, y, z)
