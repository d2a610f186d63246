"""Exact integer linear algebra: Smith normal form and finitely generated
abelian groups presented as Z^g / rowspan(relations).

Everything works on Python ints, so there is no overflow anywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence


@dataclass
class IntMatrix:
    rows: int
    cols: int
    entries: list[list[int]]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not form a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        entries = [[int(a) for a in r] for r in rows]
        if cols is None:
            if not entries:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(entries[0])
        return cls(len(entries), cols, entries)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_b = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            self.rows,
            other.cols,
            [[sum(a * b for a, b in zip(r, c)) for c in cols_b] for r in self.entries],
        )

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, [list(c) for c in zip(*self.entries)] if self.rows else [[] for _ in range(self.cols)])

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(a == 0 for i, r in enumerate(self.entries) for j, a in enumerate(r) if i != j)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": self.entries}

    @classmethod
    def from_json(cls, data: dict | str) -> "IntMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            rows, cols, entries = int(data["rows"]), int(data["cols"]), data["entries"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"matrix JSON needs rows, cols, entries: {exc}") from None
        if any(not isinstance(a, int) or isinstance(a, bool) for r in entries for a in r):
            raise ValueError("matrix entries must be integers")
        return cls(rows, cols, [list(r) for r in entries])


@dataclass
class SNFDecomposition:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def invariants(self) -> list[int]:
        return self.S.diagonal()


def _snf(a: list[list[int]], m: int, n: int, track_u: bool):
    """In-place Smith reduction of ``a``; returns (U, V, Vinv) as lists."""
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track_u else None
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vinv = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if track_u:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_sub(i, t, q):  # row_i -= q * row_t
        ri, rt = a[i], a[t]
        a[i] = [x - q * y for x, y in zip(ri, rt)]
        if track_u:
            U[i] = [x - q * y for x, y in zip(U[i], U[t])]

    def col_sub(j, t, q):  # col_j -= q * col_t
        for r in a:
            r[j] -= q * r[t]
        for r in V:
            r[j] -= q * r[t]
        Vinv[t] = [x + q * y for x, y in zip(Vinv[t], Vinv[j])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = a[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return U, V, Vinv
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    row_sub(i, t, a[i][t] // p)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    col_sub(j, t, a[t][j] // p)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(x % p for x in a[i][t + 1 :])),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            if track_u:
                U[t] = [x + y for x, y in zip(U[t], U[bad])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if track_u:
                U[t] = [-x for x in U[t]]
    return U, V, Vinv


def smith_normal_form(M: IntMatrix) -> SNFDecomposition:
    """U @ M @ V == S with U, V unimodular and S = diag(d1 | d2 | ...), d_i >= 0."""
    a = [list(r) for r in M.entries]
    U, V, _ = _snf(a, M.rows, M.cols, track_u=True)
    return SNFDecomposition(
        IntMatrix(M.rows, M.rows, U), IntMatrix(M.rows, M.cols, a), IntMatrix(M.cols, M.cols, V)
    )


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def echelon(rows: Iterable[Sequence[int]], ncols: int, width: int | None = None):
    """Integer row echelon basis of the row lattice, by unimodular row operations.

    Only the first *width* columns (default all) are used for pivoting; rows
    that vanish there are returned separately, so appending an identity block
    to the input yields a left-kernel basis.
    Returns (basis, vanished) with basis a list of rows ordered by pivot.
    """
    width = ncols if width is None else width
    basis: dict[int, list[int]] = {}
    vanished: list[list[int]] = []
    for src in rows:
        r = list(src)
        c = 0
        while True:
            while c < width and r[c] == 0:
                c += 1
            if c == width:
                if any(r):
                    vanished.append(r)
                break
            b = basis.get(c)
            if b is None:
                basis[c] = r if r[c] > 0 else [-x for x in r]
                break
            if r[c] % b[c] == 0:
                q = r[c] // b[c]
                r = [x - q * y for x, y in zip(r, b)]
            else:
                g, s, t = _egcd(b[c], r[c])
                u, v = r[c] // g, b[c] // g
                basis[c] = [s * x + t * y for x, y in zip(b, r)]
                r = [u * x - v * y for x, y in zip(b, r)]
                if basis[c][c] < 0:
                    basis[c] = [-x for x in basis[c]]
            c += 1
    return [basis[c] for c in sorted(basis)], vanished


def _solve_echelon(basis: list[list[int]], r: Sequence[int]) -> list[int]:
    """Coefficients x with x @ basis == r, for r in the row lattice of an echelon basis."""
    r = list(r)
    coeffs = []
    for b in basis:
        c = next(k for k, x in enumerate(b) if x)
        q, rem = divmod(r[c], b[c])
        if rem:
            raise ValueError("vector is not in the lattice")
        coeffs.append(q)
        if q:
            r = [x - q * y for x, y in zip(r, b)]
    if any(r):
        raise ValueError("vector is not in the lattice")
    return coeffs


class WellDefinednessError(ValueError):
    def __init__(self, relation: Sequence[int], image: Sequence[int], context: str = ""):
        self.relation = list(relation)
        self.image = list(image)
        where = f" ({context})" if context else ""
        super().__init__(
            f"map is not well defined{where}: relation {self.relation} has nonzero image {self.image}"
        )


class FinAbPresentation:
    """The abelian group Z^g / rowspan(relations) with canonical element forms.

    ``coords`` gives the compact normal form used for arithmetic: coordinates
    in the Smith basis, reduced modulo the invariant factors, with trivial
    factors dropped.  ``canonical_form`` maps the same normal form back to
    the original generators.
    """

    def __init__(self, labels: Sequence, relations: Iterable[Sequence[int]] = ()):
        self.labels = list(labels)
        g = len(self.labels)
        rels = [list(map(int, r)) for r in relations]
        for r in rels:
            if len(r) != g:
                raise ValueError(f"relation of length {len(r)} for {g} generators")
        self.relations = IntMatrix(len(rels), g, rels)
        basis, _ = echelon(rels, g)
        a = [list(r) for r in basis]
        _, self._V, self._Vinv = _snf(a, len(a), g, track_u=False)
        diag = [a[i][i] if i < len(a) else 0 for i in range(g)]
        self._diag = diag
        self._kept = [i for i, d in enumerate(diag) if d != 1]
        self.moduli: tuple[int, ...] = tuple(diag[i] for i in self._kept)
        # columns of V restricted to the kept Smith coordinates
        self._Vk = [[row[i] for i in self._kept] for row in self._V]

    @property
    def ngens(self) -> int:
        return len(self.labels)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.moduli if d == 0)

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.moduli if d > 1]

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        return None if self.free_rank else prod(self.moduli)

    def invariant_factors(self) -> list[int]:
        """Invariant factors d1 | d2 | ..., with 0 standing for a copy of Z."""
        return list(self.moduli)

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "0"

    def _check_len(self, v: Sequence[int]):
        if len(v) != self.ngens:
            raise ValueError(f"vector of length {len(v)} for {self.ngens} generators")

    def coords(self, v: Sequence[int]) -> tuple[int, ...]:
        self._check_len(v)
        out = []
        for k, d in enumerate(self.moduli):
            y = 0
            for x, row in zip(v, self._Vk):
                if x:
                    y += x * row[k]
            out.append(y % d if d else y)
        return tuple(out)

    def reduce_coords(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(a % d if d else a for a, d in zip(y, self.moduli))

    def add(self, *ys: Sequence[int]) -> tuple[int, ...]:
        return self.reduce_coords([sum(c) for c in zip(*ys)] if ys else [0] * self.rank)

    def combine(self, terms: Iterable[tuple[int, Sequence[int]]]) -> tuple[int, ...]:
        acc = [0] * self.rank
        for c, y in terms:
            for k, a in enumerate(y):
                acc[k] += c * a
        return self.reduce_coords(acc)

    def signed_sum(self, plus: Sequence[Sequence[int]], minus: Sequence[Sequence[int]] = ()) -> tuple[int, ...]:
        """sum(plus) - sum(minus) in normal form."""
        if minus:
            return tuple((a - b) % d if d else a - b
                         for a, b, d in zip(map(sum, zip(*plus)), map(sum, zip(*minus)), self.moduli))
        return tuple(a % d if d else a for a, d in zip(map(sum, zip(*plus)), self.moduli))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def lift(self, y: Sequence[int]) -> list[int]:
        """Generator-coordinate vector whose normal form is *y*."""
        full = [0] * self.ngens
        for k, i in enumerate(self._kept):
            full[i] = y[k]
        out = [0] * self.ngens
        for i, a in enumerate(full):
            if a:
                row = self._Vinv[i]
                for j in range(self.ngens):
                    out[j] += a * row[j]
        return out

    def canonical_form(self, v: Sequence[int]) -> list[int]:
        return self.lift(self.coords(v))

    def is_zero(self, v: Sequence[int]) -> bool:
        return not any(self.coords(v))

    def elements(self) -> list[tuple[int, ...]]:
        """All normal forms, in lexicographic order (finite groups only)."""
        if self.free_rank:
            raise ValueError("infinite group has no element list")
        out = [()]
        for d in self.moduli:
            out = [e + (a,) for e in out for a in range(d)]
        return out

    def generator_coords(self) -> list[tuple[int, ...]]:
        return [self.coords([int(i == j) for j in range(self.ngens)]) for i in range(self.ngens)]

    def __repr__(self):
        return f"FinAbPresentation({self.ngens} gens, {self.relations.rows} rels: {self.describe()})"


def canonical_form(v: Sequence[int], P: FinAbPresentation) -> list[int]:
    return P.canonical_form(v)


@dataclass
class AbHom:
    source: FinAbPresentation
    target: FinAbPresentation
    images: IntMatrix
    name: str = ""
    _image_coords: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self._image_coords = [self.target.coords(r) for r in self.images.entries]

    def apply(self, v: Sequence[int]) -> list[int]:
        out = [0] * self.target.ngens
        for a, row in zip(v, self.images.entries):
            if a:
                for j, b in enumerate(row):
                    out[j] += a * b
        return out

    def apply_coords(self, y: Sequence[int]) -> tuple[int, ...]:
        """Image of a source normal form, as a target normal form."""
        v = self.source.lift(y)
        return self.target.combine((a, c) for a, c in zip(v, self._image_coords) if a)

    def compose(self, first: "AbHom") -> "AbHom":
        """self o first."""
        return make_hom(first.source, self.target, first.images @ self.images, f"{self.name}o{first.name}")


def make_hom(source: FinAbPresentation, target: FinAbPresentation, images, name: str = "") -> AbHom:
    """Build the homomorphism sending generator i to row i of *images*.

    Raises WellDefinednessError unless every source relation maps to zero;
    a successful return is the well-definedness certificate.
    """
    if not isinstance(images, IntMatrix):
        images = IntMatrix.from_rows(images, cols=target.ngens)
    if images.rows != source.ngens or images.cols != target.ngens:
        raise ValueError(
            f"images must be {source.ngens}x{target.ngens}, got {images.rows}x{images.cols}"
        )
    h = AbHom(source, target, images, name)
    for r in source.relations.entries:
        img = h.apply(r)
        if not target.is_zero(img):
            raise WellDefinednessError(r, target.coords(img), name)
    return h


@dataclass(frozen=True)
class KernelInfo:
    free_rank: int
    torsion: tuple[int, ...]

    @property
    def order(self) -> int | None:
        return None if self.free_rank else prod(self.torsion)

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "0"


def kernel_rank_and_torsion(h: AbHom) -> KernelInfo:
    """Structure of ker h, for a well-defined h."""
    a, b = h.source.ngens, h.target.ngens
    target_basis, _ = echelon(h.target.relations.entries, b)
    # left kernel of [images; target relations]: rows (u, w) with u@images + w@RB == 0
    stacked = []
    for i, row in enumerate(h.images.entries):
        stacked.append(list(row) + [int(i == j) for j in range(a)])
    for row in target_basis:
        stacked.append(list(row) + [0] * a)
    basis, vanished = echelon(stacked, b + a, width=b)
    lattice = [r[b:] for r in vanished]
    if not lattice:
        return KernelInfo(0, ())
    k_basis, _ = echelon(lattice, a)
    rel_coords = [_solve_echelon(k_basis, r) for r in h.source.relations.entries]
    quotient = FinAbPresentation(range(len(k_basis)), rel_coords)
    return KernelInfo(quotient.free_rank, tuple(quotient.torsion))
