"""Evaluation models for commutator expressions and the identity checker.

Every model is a group whose Lie product is the group commutator, so an
identity that holds here holds in the commutator model of that group.  The
free model decides universal validity outright: an identity holds in every
group iff it holds for distinct free generators.
"""
from __future__ import annotations

import enum
import itertools
import random
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping

from cmlw import expr as E
from cmlw.expr import Expr, Identity, UnboundVariableError, load_identities
from cmlw.groups import FiniteGroup, PermRealization, UTRealization, get_group
from cmlw.words import Word

EXHAUSTIVE_LIMIT = 10**6
DEFAULT_SAMPLES = 2000
DEFAULT_SEED = 42


class UnknownModelError(ValueError):
    pass


class Model:
    name = "model"

    def one(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def conj(self, a, b):
        return self.mul(self.mul(a, b), self.inv(a))

    def commutator(self, a, b):
        return self.mul(self.mul(self.mul(a, b), self.inv(a)), self.inv(b))

    def bracket(self, a, b):
        return self.commutator(a, b)

    def eq(self, a, b) -> bool:
        return a == b

    def render(self, a) -> str:
        return str(a)


class FreeGroupModel(Model):
    name = "free"

    def one(self):
        return Word.identity()

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return ~a

    def generic_assignment(self, variables: Iterable[str]) -> dict[str, Word]:
        return {v: Word.gen(i + 1) for i, v in enumerate(variables)}

    def render(self, a) -> str:
        return a.render()


class FiniteGroupModel(Model):
    """A finite group given by its multiplication, an element enumerator and
    a uniform sampler; neither needs the group to be enumerated up front."""

    def __init__(self, name: str, one, mul: Callable, inv: Callable, order: int,
                 elements: Callable[[], Iterable], sample: Callable[[random.Random], Any],
                 render: Callable[[Any], str] = str):
        self.name = name
        self._one, self._mul, self._inv = one, mul, inv
        self.order = order
        self._elements, self._sample, self._render = elements, sample, render

    def one(self):
        return self._one

    def mul(self, a, b):
        return self._mul(a, b)

    def inv(self, a):
        return self._inv(a)

    def elements(self) -> Iterable:
        return self._elements()

    def random_element(self, rng: random.Random):
        return self._sample(rng)

    def render(self, a) -> str:
        return self._render(a)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroupModel":
        R = PermRealization(n)
        order = 1
        for k in range(2, n + 1):
            order *= k

        def sample(rng):
            p = list(range(n))
            rng.shuffle(p)
            return tuple(p)

        return cls(f"perm:S{n}", R.identity(), R.mul, R.inv, order,
                   lambda: itertools.permutations(range(n)), sample, R.render)

    @classmethod
    def unitriangular(cls, n: int, p: int) -> "FiniteGroupModel":
        R = UTRealization(n, p)
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]

        def build(values):
            m = [[int(i == j) for j in range(n)] for i in range(n)]
            for (i, j), v in zip(slots, values):
                m[i][j] = v
            return tuple(tuple(r) for r in m)

        return cls(f"mat:UT({n},{p})", R.identity(), R.mul, R.inv, p ** len(slots),
                   lambda: (build(v) for v in itertools.product(range(p), repeat=len(slots))),
                   lambda rng: build([rng.randrange(p) for _ in slots]), R.render)

    @classmethod
    def from_group(cls, G: FiniteGroup, name: str | None = None) -> "FiniteGroupModel":
        return cls(name or G.name, 0, G.mul, G.inv, G.order, lambda: range(G.order),
                   lambda rng: rng.randrange(G.order), G.render)


_UT_SPEC = re.compile(r"mat:UT\((\d+),(\d+)\)")


def model_from_spec(spec: str) -> Model:
    s = spec.strip().replace(" ", "")
    if s == "free":
        return FreeGroupModel()
    if m := re.fullmatch(r"perm:S(\d+)", s):
        n = int(m.group(1))
        if not 3 <= n <= 8:
            raise UnknownModelError(f"symmetric model degree must be 3..8, got {n}")
        return FiniteGroupModel.symmetric(n)
    if s in ("perm:D4", "perm:Q8"):
        return FiniteGroupModel.from_group(get_group(s[5:]), s)
    if m := _UT_SPEC.fullmatch(s):
        n, p = int(m.group(1)), int(m.group(2))
        if not 2 <= n <= 5 or p not in (2, 3, 5):
            raise UnknownModelError(f"UT(n,p) needs 2 <= n <= 5 and p in {{2,3,5}}, got UT({n},{p})")
        return FiniteGroupModel.unitriangular(n, p)
    raise UnknownModelError(f"unknown model {spec!r}")


def evaluate(e: Expr, m: Model, assignment: Mapping[str, Any]):
    if isinstance(e, E.Var):
        try:
            return assignment[e.name]
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, E.One):
        return m.one()
    if isinstance(e, E.Mul):
        return m.mul(evaluate(e.left, m, assignment), evaluate(e.right, m, assignment))
    if isinstance(e, E.Inv):
        return m.inv(evaluate(e.arg, m, assignment))
    if isinstance(e, E.Conj):
        return m.conj(evaluate(e.actor, m, assignment), evaluate(e.target, m, assignment))
    if isinstance(e, E.GrpComm):
        return m.commutator(evaluate(e.left, m, assignment), evaluate(e.right, m, assignment))
    if isinstance(e, E.LieBracket):
        return m.bracket(evaluate(e.left, m, assignment), evaluate(e.right, m, assignment))
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class Random:
    n: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"sampling budget must be positive, got {self.n}")


class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"


@dataclass
class Verdict:
    identity: Identity
    model: str
    status: Status
    checked: int
    mode: str
    counterexample: dict[str, Any] | None = None
    residue: Any = None

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS


def _assignments(variables, model: Model, sampling) -> tuple[str, Iterator[dict]]:
    k = len(variables)
    if isinstance(model, FreeGroupModel):
        return "canonical", iter([model.generic_assignment(variables)])
    if not isinstance(model, FiniteGroupModel):
        raise UnknownModelError(f"cannot sample model {model!r}")
    if sampling is None:
        sampling = Exhaustive() if model.order ** k <= EXHAUSTIVE_LIMIT else Random(DEFAULT_SAMPLES)
    if isinstance(sampling, Exhaustive):
        elems = list(model.elements())
        return "exhaustive", (dict(zip(variables, t)) for t in itertools.product(elems, repeat=k))
    rng = random.Random(sampling.seed)
    return "random", (
        {v: model.random_element(rng) for v in variables} for _ in range(sampling.n)
    )


def check_identity(identity: Identity, m: Model, sampling: Exhaustive | Random | None = None) -> Verdict:
    """Decide lhs == rhs in the commutator model of m.

    The free model uses the single generic assignment; finite models
    enumerate all tuples when that is at most 10^6 evaluations (or when
    asked to) and otherwise draw seeded random tuples.
    """
    mode, gen = _assignments(identity.variables, m, sampling)
    checked = 0
    for a in gen:
        checked += 1
        lhs = evaluate(identity.lhs, m, a)
        rhs = evaluate(identity.rhs, m, a)
        if not m.eq(lhs, rhs):
            residue = m.mul(lhs, m.inv(rhs))
            return Verdict(identity, m.name, Status.FAILS, checked, mode, dict(a), residue)
    return Verdict(identity, m.name, Status.HOLDS, checked, mode)


CORPUS_TEXT = """\
# Lie product axioms
axiom1: {x,x} = 1
axiom2: {x,y*y'} = {x,y}*cj(y,{x,y'})
axiom3: {x*x',y} = cj(x,{x',y})*{x,y}
axiom4: {{y,x},cj(x,z)}*{{x,z},cj(z,y)}*{{z,y},cj(y,x)} = 1
axiom5: cj(z,{x,y}) = {cj(z,x),cj(z,y)}
# consequences of the axioms
derived7a: {1,x} = 1
derived7b: {x,1} = 1
derived8: {y,x} = {x,y}^-1
derived9: cj({x,y},{x',y'}) = cj([x,y],{x',y'})
derived10: {[x,y],x'} = [{x,y},x']
derived11a: {x^-1,y} = cj(x^-1,{x,y}^-1)
derived11b: {x,y^-1} = cj(y^-1,{x,y}^-1)
# the five universal group commutator identities
intro1: [x,x] = 1
intro2: [x,y*z] = [x,y]*cj(y,[x,z])
intro3: [x*y,z] = cj(x,[y,z])*[x,z]
intro4: [[y,x],cj(x,z)]*[[x,z],cj(z,y)]*[[z,y],cj(y,x)] = 1
intro5: cj(z,[x,y]) = [cj(z,x),cj(z,y)]
"""


def builtin_corpus() -> list[Identity]:
    return load_identities(CORPUS_TEXT)
