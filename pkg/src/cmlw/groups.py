"""Finite groups given by permutations or unitriangular matrices over Z/p.

Groups are enumerated once by breadth-first closure, after which every
operation works on element indices (index 0 is the identity).  Subgroups are
frozensets of indices.
"""
from __future__ import annotations

import json
import re
from collections import deque
from functools import cached_property
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

from cmlw.intlin import FinAbPresentation

DEFAULT_ORDER_BOUND = 5000


class GroupError(ValueError):
    pass


class BoundExceeded(GroupError):
    pass


# -- realizations -------------------------------------------------------------


class PermRealization:
    """Permutations of range(n) as image tuples; (a*b)(i) = a(b(i))."""

    def __init__(self, degree: int):
        self.degree = degree

    def identity(self) -> tuple[int, ...]:
        return tuple(range(self.degree))

    def mul(self, a, b):
        return tuple(a[i] for i in b)

    def inv(self, a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def validate(self, a):
        if sorted(a) != list(range(self.degree)):
            raise GroupError(f"not a permutation of {self.degree} points: {a}")
        return tuple(a)

    def render(self, a) -> str:
        return "[" + ",".join(map(str, a)) + "]"


class UTRealization:
    """n x n upper unitriangular matrices over Z/p, as tuples of rows."""

    def __init__(self, n: int, p: int):
        self.n, self.p = n, p

    def identity(self):
        n = self.n
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    def mul(self, a, b):
        n, p = self.n, self.p
        rows = []
        for i in range(n):
            ai = a[i]
            row = [0] * n
            for k in range(i, n):
                x = ai[k]
                if x:
                    bk = b[k]
                    for j in range(k, n):
                        if bk[j]:
                            row[j] += x * bk[j]
            rows.append(tuple(v % p for v in row))
        return tuple(rows)

    def inv(self, a):
        # solve B a = I row by row; a is unitriangular so no division is needed
        n, p = self.n, self.p
        rows = []
        for i in range(n):
            row = [0] * n
            row[i] = 1
            for j in range(i + 1, n):
                row[j] = -sum(row[k] * a[k][j] for k in range(i, j)) % p
            rows.append(tuple(row))
        return tuple(rows)

    def elementary(self, i: int, j: int, value: int = 1):
        n = self.n
        return tuple(
            tuple(int(r == c) + (value if (r, c) == (i, j) else 0) for c in range(n)) for r in range(n)
        )

    def validate(self, a):
        a = tuple(tuple(int(x) % self.p for x in r) for r in a)
        if len(a) != self.n or any(len(r) != self.n for r in a):
            raise GroupError(f"not a {self.n}x{self.n} matrix")
        for i in range(self.n):
            for j in range(self.n):
                if (i == j and a[i][j] != 1) or (i > j and a[i][j]):
                    raise GroupError("matrix is not upper unitriangular")
        return a

    def render(self, a) -> str:
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in a) + "]"


class AbelianRealization:
    """Normal forms of a finite abelian presentation under addition."""

    def __init__(self, pres: FinAbPresentation):
        self.pres = pres

    def identity(self):
        return self.pres.zero()

    def mul(self, a, b):
        return self.pres.add(a, b)

    def inv(self, a):
        return self.pres.reduce_coords([-x for x in a])

    def render(self, a) -> str:
        return "(" + ",".join(map(str, a)) + ")"


class ProductRealization:
    """Direct product of realized groups; elements are tuples."""

    def __init__(self, factors: Sequence):
        self.factors = list(factors)

    def identity(self):
        return tuple(R.identity() for R in self.factors)

    def mul(self, a, b):
        return tuple(R.mul(x, y) for R, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(R.inv(x) for R, x in zip(self.factors, a))

    def render(self, a) -> str:
        return "(" + "; ".join(R.render(x) for R, x in zip(self.factors, a)) + ")"


# -- enumerated groups --------------------------------------------------------


class FiniteGroup:
    """An enumerated finite group; elements are addressed by BFS index."""

    def __init__(self, name: str, realization, generators: Sequence[Hashable], bound: int = DEFAULT_ORDER_BOUND):
        self.name = name
        self.realization = realization
        one = realization.identity()
        gens = []
        for g in generators:
            if g != one and g not in gens:
                gens.append(g)
        self.generator_values = gens
        elements = [one]
        index = {one: 0}
        parent = [-1]
        via = [-1]
        rmul: list[list[int]] = []
        i = 0
        while i < len(elements):
            a = elements[i]
            row = []
            for k, g in enumerate(gens):
                b = realization.mul(a, g)
                j = index.get(b)
                if j is None:
                    j = len(elements)
                    if j >= bound:
                        raise BoundExceeded(f"{name}: order exceeds bound {bound}")
                    index[b] = j
                    elements.append(b)
                    parent.append(i)
                    via.append(k)
                row.append(j)
            rmul.append(row)
            i += 1
        self.elements = elements
        self.index = index
        self._parent = parent
        self._via = via
        self._rmul = rmul
        self._rows: dict[int, list[int]] = {}
        self.generators = [index[g] for g in gens]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def row(self, a: int) -> list[int]:
        """row(a)[b] == index of a*b."""
        r = self._rows.get(a)
        if r is None:
            n = self.order
            r = [0] * n
            r[0] = a
            rmul, parent, via = self._rmul, self._parent, self._via
            for b in range(1, n):
                r[b] = rmul[r[parent[b]]][via[b]]
            if n <= 2048:
                self._rows[a] = r
        return r

    @cached_property
    def table(self) -> list[list[int]]:
        return [self.row(a) for a in range(self.order)]

    @cached_property
    def inverses(self) -> list[int]:
        ix = self.index
        inv = self.realization.inv
        return [ix[inv(x)] for x in self.elements]

    def mul(self, a: int, b: int) -> int:
        return self.row(a)[b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def conj(self, a: int, b: int) -> int:
        """Left conjugate a b a^-1."""
        return self.row(self.row(a)[b])[self.inverses[a]]

    def comm(self, a: int, b: int) -> int:
        """a b a^-1 b^-1."""
        inv = self.inverses
        return self.row(self.row(self.row(a)[b])[inv[a]])[inv[b]]

    def product(self, items: Iterable[int]) -> int:
        out = 0
        for x in items:
            out = self.row(out)[x]
        return out

    def power(self, a: int, n: int) -> int:
        base = a if n >= 0 else self.inverses[a]
        out = 0
        for _ in range(abs(n)):
            out = self.row(out)[base]
        return out

    def index_of(self, value) -> int:
        v = self.realization.validate(value) if hasattr(self.realization, "validate") else value
        try:
            return self.index[v]
        except KeyError:
            raise GroupError(f"{value!r} is not an element of {self.name}") from None

    def render(self, a: int) -> str:
        return self.realization.render(self.elements[a])

    def fast_ops(self):
        """(mul, inv, conj, comm) as closures over the full Cayley table."""
        t, iv = self.table, self.inverses

        def mul(a, b):
            return t[a][b]

        def inv(a):
            return iv[a]

        def conj(a, b):
            return t[t[a][b]][iv[a]]

        def comm(a, b):
            return t[t[t[a][b]][iv[a]]][iv[b]]

        return mul, inv, conj, comm

    # -- subgroups --

    def subgroup(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in dict.fromkeys(gens) if g != 0]
        seen = {0}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            r = self.row(a)
            for g in gens:
                b = r[g]
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return frozenset(seen)

    def normal_closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(dict.fromkeys(g for g in gens if g != 0))
        H = self.subgroup(gens)
        pending = list(gens)
        while pending:
            s = pending.pop()
            for t in self.generators:
                c = self.conj(t, s)
                if c not in H:
                    gens.append(c)
                    pending.append(c)
                    H = self.subgroup(gens)
        return H

    def generating_set(self, H: Iterable[int], candidates: Iterable[int] | None = None) -> list[int]:
        """A small subgroup generating set of H, chosen greedily from candidates."""
        H = frozenset(H)
        cands = sorted(H) if candidates is None else [c for c in candidates if c in H]
        gens: list[int] = []
        span = frozenset([0])
        for c in cands:
            if len(span) == len(H):
                break
            if c not in span:
                gens.append(c)
                span = self.subgroup(gens)
        if len(span) != len(H):
            raise GroupError("candidates do not generate the subgroup")
        return gens

    def is_normal(self, H: frozenset[int]) -> bool:
        return all(self.conj(t, h) in H for t in self.generators for h in H)

    def commutator_subgroup(self, A: frozenset[int], B: frozenset[int]) -> frozenset[int]:
        """[A, B] for normal subgroups A, B: normal closure of [a, b] over generators."""
        ga = self.generating_set(A)
        gb = self.generating_set(B)
        return self.normal_closure(self.comm(a, b) for a in ga for b in gb)

    @cached_property
    def all(self) -> frozenset[int]:
        return frozenset(range(self.order))

    @cached_property
    def lcs(self) -> "NormalSubgroupChain":
        return NormalSubgroupChain(self)

    def gamma(self, i: int) -> frozenset[int]:
        return self.lcs[i]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.comm(a, b) == 0 for a in gens for b in gens)


class NormalSubgroupChain:
    """Lower central series gamma_1 = G, gamma_{i+1} = [gamma_i, G], computed on demand."""

    def __init__(self, G: FiniteGroup):
        self.G = G
        self._terms: list[frozenset[int]] = [G.all]
        self._gens: list[list[int]] = [list(G.generators)]

    def __getitem__(self, i: int) -> frozenset[int]:
        if i < 1:
            raise IndexError("lower central series is indexed from 1")
        G = self.G
        while len(self._terms) < i:
            prev = self._terms[-1]
            if len(self._terms) > 1 and prev == self._terms[-2]:
                self._terms.append(prev)
                self._gens.append(self._gens[-1])
                continue
            # gamma_{k+1} is generated as a subgroup by [c, x], c in gamma_k, x in G;
            # as a normal subgroup it suffices to take c over subgroup generators
            gens = [G.comm(c, t) for c in G.generating_set(prev) for t in G.generators]
            self._terms.append(G.normal_closure(gens))
        return self._terms[i - 1]

    def terms(self, depth: int) -> list[frozenset[int]]:
        return [self[i] for i in range(1, depth + 1)]

    def nilpotency_class(self, max_depth: int = 64) -> int | None:
        """Least c with gamma_{c+1} trivial, or None if the series stalls above 1."""
        for i in range(1, max_depth + 1):
            if len(self[i + 1]) == 1:
                return i
            if self[i + 1] == self[i]:
                return None
        return None

    def commutator_candidates(self, i: int) -> list[int]:
        """Commutator-shaped elements of gamma_i in a fixed order ([x,y] for i = 2)."""
        G = self.G
        if i == 1:
            return list(range(G.order))
        prev = self[i - 1]
        seen = dict.fromkeys(G.comm(c, x) for c in sorted(prev) for x in range(G.order))
        return list(seen)


# -- abelian sections ---------------------------------------------------------


class QuotientMap:
    """The abelian section N/M of G, presented on images of chosen elements of N.

    ``vector(n)`` gives generator coordinates of the image of n in N,
    ``coords(n)`` its normal form; ``lift(y)`` returns the first element of N
    (in index order) with normal form y.
    """

    def __init__(self, G: FiniteGroup, N: frozenset[int], M: frozenset[int], candidates: Iterable[int] | None = None,
                 name: str = "", generators: Sequence[int] | None = None):
        if not M <= N:
            raise GroupError("kernel is not contained in the subgroup")
        if not G.is_normal(M):
            raise GroupError("kernel is not normal in the group")
        self.G, self.source, self.kernel, self.name = G, N, M, name
        coset_of: dict[int, int] = {}
        reps: list[int] = []
        for n in sorted(N):
            if n in coset_of:
                continue
            cid = len(reps)
            reps.append(n)
            r = G.row(n)
            for m in M:
                coset_of[r[m]] = cid
        self._coset_of = coset_of
        ncos = len(reps)
        if generators is not None:
            gens = list(generators)
            if any(g not in N for g in gens):
                raise GroupError("generator outside the source subgroup")
            span = self._coset_closure(gens, reps)
        else:
            # greedy generators at the quotient level
            if candidates is None:
                candidates = sorted(N)
            gens = []
            span = {0}
            for c in candidates:
                if len(span) == ncos:
                    break
                if c in N and coset_of[c] not in span:
                    gens.append(c)
                    span = self._coset_closure(gens, reps)
        if len(span) != ncos:
            raise GroupError("candidates do not generate the quotient")
        for a in gens:
            for b in gens:
                if coset_of[G.comm(a, b)] != 0:
                    raise GroupError(f"quotient {name or ''} is not abelian")
        self.generators = gens
        k = len(gens)
        vec: dict[int, tuple[int, ...]] = {0: (0,) * k}
        queue = deque([0])
        relations = []
        steps = []
        while queue:
            c = queue.popleft()
            r = G.row(reps[c])
            for i, g in enumerate(gens):
                d = coset_of[r[g]]
                step = list(vec[c])
                step[i] += 1
                if d not in vec:
                    vec[d] = tuple(step)
                    queue.append(d)
                else:
                    steps.append((step, d))
        for step, d in steps:
            rel = [x - y for x, y in zip(step, vec[d])]
            if any(rel):
                relations.append(rel)
        self._vec = vec
        self.pres = FinAbPresentation([f"g{i + 1}" for i in range(k)], relations)
        self._coords_of_coset = {c: self.pres.coords(v) for c, v in vec.items()}
        self._lift: dict[tuple[int, ...], int] = {}
        for c in range(ncos):
            self._lift.setdefault(self._coords_of_coset[c], reps[c])

    def _coset_closure(self, gens, reps):
        span = {0}
        queue = deque([0])
        while queue:
            c = queue.popleft()
            r = self.G.row(reps[c])
            for g in gens:
                d = self._coset_of[r[g]]
                if d not in span:
                    span.add(d)
                    queue.append(d)
        return span

    @property
    def order(self) -> int:
        return len(self._lift)

    def vector(self, n: int) -> list[int]:
        try:
            return list(self._vec[self._coset_of[n]])
        except KeyError:
            raise GroupError(f"element {n} is not in the source subgroup") from None

    def coords(self, n: int) -> tuple[int, ...]:
        try:
            return self._coords_of_coset[self._coset_of[n]]
        except KeyError:
            raise GroupError(f"element {n} is not in the source subgroup") from None

    def contains(self, n: int) -> bool:
        return n in self.source

    def lift(self, y: Sequence[int]) -> int:
        return self._lift[tuple(y)]

    def elements(self) -> list[tuple[int, ...]]:
        return sorted(self._lift)

    def action_vector(self, p: int, v: Sequence[int]) -> list[int]:
        """Generator coordinates of the conjugate ^p g, for g with coordinates v."""
        G = self.G
        g = G.product(G.power(s, a) for s, a in zip(self.generators, v))
        return self.vector(G.conj(p, g))


def abelianization(G: FiniteGroup) -> tuple[FinAbPresentation, QuotientMap]:
    q = QuotientMap(G, G.all, G.gamma(2), G.generators + sorted(G.all), name="ab")
    return q.pres, q


def abelian_quotient(G: FiniteGroup, N: frozenset[int], M: frozenset[int], candidates=None, name: str = "",
                     generators=None) -> tuple[FinAbPresentation, QuotientMap]:
    q = QuotientMap(G, N, M, candidates, name, generators)
    return q.pres, q


# -- catalog ------------------------------------------------------------------


def symmetric_group(n: int, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    R = PermRealization(n)
    if n < 2:
        return FiniteGroup(f"S{n}", R, [], bound)
    transposition = (1, 0) + tuple(range(2, n))
    cycle = tuple(list(range(1, n)) + [0])
    return FiniteGroup(f"S{n}", R, [transposition, cycle], bound)


def dihedral_group(n: int, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    R = PermRealization(n)
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return FiniteGroup(f"D{n}", R, [rot, ref], bound)


def quaternion_group() -> FiniteGroup:
    """Q8 in its regular permutation representation on 8 points."""
    # units 1,i,j,k with signs: index = 2*unit + (sign<0)
    table = {  # unit products u*v = (sign, unit)
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def left(u: int):
        perm = []
        for x in range(8):
            v, neg = divmod(x, 2)
            sign, w = table[(u, v)]
            perm.append(2 * w + ((sign < 0) != bool(neg)))
        return tuple(perm)

    return FiniteGroup("Q8", PermRealization(8), [left(1), left(2)])


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(f"Z{n}", PermRealization(n), [tuple((i + 1) % n for i in range(n))])


def unitriangular_group(n: int, p: int, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    R = UTRealization(n, p)
    gens = [R.elementary(i, i + 1) for i in range(n - 1)]
    return FiniteGroup(f"UT({n},{p})", R, gens, bound)


def direct_product(*groups: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if not groups:
        raise GroupError("need at least one factor")
    R = ProductRealization([G.realization for G in groups])
    ones = [G.realization.identity() for G in groups]
    gens = []
    for k, G in enumerate(groups):
        for g in G.generator_values:
            gens.append(tuple(g if i == k else ones[i] for i in range(len(groups))))
    return FiniteGroup("x".join(G.name for G in groups), R, gens, bound)


def from_permutations(name: str, perms: Sequence[Sequence[int]], bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    if not perms:
        raise GroupError("need at least one generator")
    degree = len(perms[0])
    flat = [x for p in perms for x in p]
    one_based = min(flat) == 1 and max(flat) == degree
    R = PermRealization(degree)
    gens = [R.validate([x - 1 for x in p] if one_based else list(p)) for p in perms]
    return FiniteGroup(name, R, gens, bound)


def load_group_file(path: str | Path, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Read a JSON list of one-line permutations (0- or 1-based)."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("generators", [])
    if not isinstance(data, list) or not all(isinstance(p, list) for p in data):
        raise GroupError(f"{path}: expected a list of permutation arrays")
    return from_permutations(Path(path).stem, data, bound)


CATALOG_NAMES = ("S3", "S4", "D4", "Q8", "H27", "UT(4,2)", "UT(5,2)")

_UT = re.compile(r"UT\((\d+),(\d+)\)")


def catalog() -> dict[str, Callable[[], FiniteGroup]]:
    return {
        "S3": lambda: symmetric_group(3),
        "S4": lambda: symmetric_group(4),
        "D4": lambda: dihedral_group(4),
        "Q8": quaternion_group,
        "H27": lambda: _renamed(unitriangular_group(3, 3), "H27"),
        "UT(4,2)": lambda: unitriangular_group(4, 2),
        "UT(5,2)": lambda: unitriangular_group(5, 2),
    }


def _renamed(G: FiniteGroup, name: str) -> FiniteGroup:
    G.name = name
    return G


_cache: dict[tuple[str, int], FiniteGroup] = {}


def get_group(spec: str, bound: int = DEFAULT_ORDER_BOUND) -> FiniteGroup:
    """Resolve a group name: catalog names, Sn, Dn, Zn, UT(n,p), direct
    products written AxB, optional "perm:"/"mat:" prefix, or a path to a
    JSON permutation file."""
    key = (spec, bound)
    if key in _cache:
        return _cache[key]
    name = spec.strip()
    for prefix in ("perm:", "mat:"):
        if name.startswith(prefix):
            name = name[len(prefix):]
    name = name.replace(" ", "")
    if name.endswith(".json") and Path(name).exists():
        G = load_group_file(name, bound)
    elif "x" in name:
        G = direct_product(*(get_group(part, bound) for part in name.split("x")), bound=bound)
    elif name in catalog():
        G = catalog()[name]()
        if G.order > bound:
            raise BoundExceeded(f"{name}: order {G.order} exceeds bound {bound}")
    elif m := re.fullmatch(r"S(\d+)", name):
        G = symmetric_group(int(m.group(1)), bound)
    elif m := re.fullmatch(r"D(\d+)", name):
        G = dihedral_group(int(m.group(1)), bound)
    elif m := re.fullmatch(r"Z(\d+)", name):
        G = cyclic_group(int(m.group(1)))
    elif m := _UT.fullmatch(name):
        G = unitriangular_group(int(m.group(1)), int(m.group(2)), bound)
    else:
        raise GroupError(f"unknown group {spec!r}")
    _cache[key] = G
    return G
