"""Magnus expansion of free-group words into truncated noncommutative
polynomials, with lower-central-series weights and coordinates of
gamma_n/gamma_{n+1} in the Lyndon basis.

Monomials are tuples of generator indices (1-based); the empty tuple is the
constant term.  Coefficients are Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Union

from cmlw.words import Word, commutator

DEFAULT_CAP = 5

Monomial = tuple[int, ...]
Bracket = Union[int, tuple["Bracket", "Bracket"]]


class NCPoly:
    """Noncommutative polynomial in X_1..X_rank truncated above degree cap."""

    __slots__ = ("rank", "cap", "terms")

    def __init__(self, rank: int, cap: int, terms: Mapping[Monomial, int] | None = None):
        self.rank = rank
        self.cap = cap
        self.terms: dict[Monomial, int] = {}
        for m, c in (terms or {}).items():
            if c and len(m) <= cap:
                if any(not 1 <= i <= rank for i in m):
                    raise ValueError(f"monomial {m} uses a generator outside 1..{rank}")
                self.terms[tuple(m)] = c

    @classmethod
    def one(cls, rank: int, cap: int) -> "NCPoly":
        return cls(rank, cap, {(): 1})

    @classmethod
    def _raw(cls, rank, cap, terms) -> "NCPoly":
        p = cls.__new__(cls)
        p.rank, p.cap, p.terms = rank, cap, terms
        return p

    def _compatible(self, other: "NCPoly"):
        if (self.rank, self.cap) != (other.rank, other.cap):
            raise ValueError("polynomials with different rank or cap")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._compatible(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return NCPoly._raw(self.rank, self.cap, out)

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw(self.rank, self.cap, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        self._compatible(other)
        cap = self.cap
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            room = cap - len(m1)
            for m2, c2 in other.terms.items():
                if len(m2) <= room:
                    m = m1 + m2
                    out[m] = out.get(m, 0) + c1 * c2
        return NCPoly._raw(self.rank, cap, {m: c for m, c in out.items() if c})

    def __eq__(self, other):
        return (
            isinstance(other, NCPoly)
            and (self.rank, self.cap) == (other.rank, other.cap)
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"NCPoly(rank={self.rank}, cap={self.cap}, {self.render()})"

    def homogeneous(self, n: int) -> dict[Monomial, int]:
        return {m: c for m, c in self.terms.items() if len(m) == n}

    def is_one(self) -> bool:
        return self.terms == {(): 1}

    def render(self, names=None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            mono = "".join((names[i - 1] if names else f"X{i}") for i in m) or "1"
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _step(terms: dict, i: int, sign: int, cap: int) -> dict:
    """terms * x_i^sign, where x_i = 1 + X_i and x_i^-1 = sum_k (-X_i)^k."""
    out = dict(terms)
    if sign > 0:
        for m, c in terms.items():
            if len(m) < cap:
                key = m + (i,)
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out
    for m, c in terms.items():
        ext = m
        coeff = c
        for _ in range(cap - len(m)):
            ext = ext + (i,)
            coeff = -coeff
            v = out.get(ext, 0) + coeff
            if v:
                out[ext] = v
            else:
                out.pop(ext, None)
    return out


def magnus_embed(w: Word, rank: int, cap: int = DEFAULT_CAP) -> NCPoly:
    if w.max_generator() > rank:
        raise ValueError(f"word uses generator x{w.max_generator()} but rank is {rank}")
    terms: dict[Monomial, int] = {(): 1}
    for a in w.letters:
        terms = _step(terms, abs(a), 1 if a > 0 else -1, cap)
    return NCPoly._raw(rank, cap, terms)


def lcs_weight(w: Word, rank: int, cap: int = DEFAULT_CAP) -> int | None:
    """Lower-central-series weight of w read off its Magnus expansion.

    Returns None for the identity, n in 1..cap when the lowest nonzero
    component of embed(w) - 1 has degree n, and cap + 1 when every component
    up to the cap vanishes (meaning "at least cap + 1").
    """
    if w.is_identity():
        return None
    p = magnus_embed(w, rank, cap)
    degrees = [len(m) for m in p.terms if m]
    return min(degrees) if degrees else cap + 1


def format_weight(weight: int | None, cap: int) -> str:
    if weight is None:
        return "identity"
    if weight > cap:
        return f">= {cap + 1}"
    return str(weight)


# -- Witt ranks and Lyndon words -------------------------------------------


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def witt_rank(r: int, n: int) -> int:
    """Rank of gamma_n(F_r)/gamma_{n+1}(F_r): (1/n) sum_{d|n} mu(d) r^(n/d)."""
    if r < 1 or n < 1:
        raise ValueError("rank and weight must be >= 1")
    total = sum(mobius(d) * r ** (n // d) for d in range(1, n + 1) if n % d == 0)
    return total // n


def _duval(r: int, n: int) -> Iterator[tuple[int, ...]]:
    """Lyndon words of length <= n over 1..r in lexicographic order."""
    w = [0]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == r:
            w.pop()


@lru_cache(maxsize=None)
def lyndon_words(r: int, n: int) -> tuple[tuple[int, ...], ...]:
    if r < 1 or n < 1:
        raise ValueError("rank and degree must be >= 1")
    return tuple(w for w in _duval(r, n) if len(w) == n)


def is_lyndon(w: tuple[int, ...]) -> bool:
    return bool(w) and all(w < w[k:] + w[:k] for k in range(1, len(w)))


def standard_bracketing(w: tuple[int, ...]) -> Bracket:
    """Bracket tree of a Lyndon word via its standard factorization w = uv,
    v the longest proper Lyndon suffix."""
    if len(w) == 1:
        return w[0]
    for k in range(1, len(w)):
        if is_lyndon(w[k:]):
            return (standard_bracketing(w[:k]), standard_bracketing(w[k:]))
    raise ValueError(f"{w} is not a Lyndon word")


def bracket_polynomial(b: Bracket) -> dict[Monomial, int]:
    if isinstance(b, int):
        return {(b,): 1}
    left, right = bracket_polynomial(b[0]), bracket_polynomial(b[1])
    out: dict[Monomial, int] = {}
    for m1, c1 in left.items():
        for m2, c2 in right.items():
            out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
            out[m2 + m1] = out.get(m2 + m1, 0) - c1 * c2
    return {m: c for m, c in out.items() if c}


def bracket_word(b: Bracket) -> Word:
    """The bracket tree read as iterated group commutators."""
    if isinstance(b, int):
        return Word.gen(b)
    return commutator(bracket_word(b[0]), bracket_word(b[1]))


def render_bracket(b: Bracket, names=None) -> str:
    if isinstance(b, int):
        return names[b - 1] if names else f"x{b}"
    return f"[{render_bracket(b[0], names)},{render_bracket(b[1], names)}]"


@dataclass(frozen=True)
class LyndonBasis:
    rank: int
    degree: int
    words: tuple[tuple[int, ...], ...]
    bracketings: tuple[Bracket, ...]

    def __len__(self):
        return len(self.words)


@lru_cache(maxsize=None)
def lyndon_basis(r: int, n: int) -> LyndonBasis:
    words = lyndon_words(r, n)
    return LyndonBasis(r, n, words, tuple(standard_bracketing(w) for w in words))


@lru_cache(maxsize=None)
def _basis_polys(r: int, n: int) -> dict[tuple[int, ...], dict[Monomial, int]]:
    B = lyndon_basis(r, n)
    return {w: bracket_polynomial(b) for w, b in zip(B.words, B.bracketings)}


class LieResidueError(RuntimeError):
    """Elimination left a component that is not a Lie element."""


def lie_coordinates(component: Mapping[Monomial, int], r: int, n: int) -> list[int]:
    """Coordinates of a homogeneous Lie element over the Lyndon basis.

    The bracketing of a Lyndon word w has w as its smallest monomial with
    coefficient 1, so repeatedly clearing the smallest monomial is a
    triangular back-substitution.
    """
    polys = _basis_polys(r, n)
    words = lyndon_basis(r, n).words
    position = {w: k for k, w in enumerate(words)}
    f = {m: c for m, c in component.items() if c}
    coords = [0] * len(words)
    while f:
        m = min(f)
        if m not in position:
            raise LieResidueError(f"monomial {m} survives elimination; not a Lie element")
        c = f[m]
        coords[position[m]] += c
        for mono, a in polys[m].items():
            v = f.get(mono, 0) - c * a
            if v:
                f[mono] = v
            else:
                f.pop(mono, None)
    return coords


def gamma_class(w: Word, rank: int, n: int) -> list[int]:
    """Coordinates of w in gamma_n/gamma_{n+1} over lyndon_basis(rank, n)."""
    p = magnus_embed(w, rank, n)
    low = [m for m in p.terms if 0 < len(m) < n]
    if low:
        raise ValueError(f"word has weight {min(map(len, low))} < {n}; not in gamma_{n}")
    return lie_coordinates(p.homogeneous(n), rank, n)
