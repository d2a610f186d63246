"""Verification suites for the tensor-group lemmas and the weight-4
congruences.

Each suite is a list of families; a family is a residue function on tuples
of group elements that must vanish for every tuple.  Tuples are enumerated
when the tuple space has at most ``limit`` points, otherwise drawn with a
PRNG seeded from (seed, suite, family) so that reports do not depend on
which other suites ran.
"""
from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from cmlw.groups import FiniteGroup, get_group
from cmlw.intlin import WellDefinednessError
from cmlw.magnus import lcs_weight
from cmlw.tensor import DEFAULT_SAMPLES, DEFAULT_SEED, EXHAUSTIVE_LIMIT, TensorCalc, calc_for
from cmlw.words import Word, commutator, conjugate

SUITES = ("lemma1", "lemma2", "lemma3", "lemma4", "lemma5b", "lemma6thm7")
FREE_MODULUS_WEIGHT = 5


@dataclass(frozen=True)
class Sampling:
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    exhaustive: bool | None = None  # None: enumerate iff the space is within limit
    limit: int = EXHAUSTIVE_LIMIT

    def __post_init__(self):
        if self.samples <= 0:
            raise ValueError("sample count must be positive")

    def tuples(self, n: int, arity: int, key: str):
        exhaustive = self.exhaustive if self.exhaustive is not None else n**arity <= self.limit
        if exhaustive:
            return "exhaustive", n**arity, itertools.product(range(n), repeat=arity)
        rng = random.Random(f"{self.seed}/{key}")
        return "random", self.samples, (
            tuple(rng.randrange(n) for _ in range(arity)) for _ in range(self.samples)
        )


@dataclass
class FamilyResult:
    suite: str
    group: str
    instance: str
    variables: tuple[str, ...]
    mode: str
    checked: int = 0
    failures: int = 0
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "group": self.group,
            "instance": self.instance,
            "status": "pass" if self.passed else "fail",
            "mode": self.mode,
            "checked": self.checked,
            "failures": self.failures,
            "witness": self.witness,
        }


@dataclass
class SuiteReport:
    suite: str
    group: str
    families: list[FamilyResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    preconditions: dict[str, str] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families)

    @property
    def instances_checked(self) -> int:
        return sum(f.checked for f in self.families)

    @property
    def failures(self) -> list[FamilyResult]:
        return [f for f in self.families if not f.passed]

    def summary(self) -> dict:
        return {
            "suite": self.suite,
            "group": self.group,
            "instance": "summary",
            "status": "pass" if self.passed else "fail",
            "checked": self.instances_checked,
            "failures": sum(f.failures for f in self.families),
            "preconditions": self.preconditions,
            "notes": self.notes,
        }

    def json_lines(self) -> list[str]:
        lines = [json.dumps(f.to_json(), sort_keys=True) for f in self.families]
        lines.append(json.dumps(self.summary(), sort_keys=True))
        return lines

    def text_lines(self) -> list[str]:
        out = []
        for f in self.families:
            status = "pass" if f.passed else "FAIL"
            line = f"{status} {f.suite}/{f.instance} [{f.group}] {f.mode} checked={f.checked}"
            if not f.passed:
                line += f" failures={f.failures} witness={json.dumps(f.witness, sort_keys=True)}"
            out.append(line)
        out.extend(f"note {self.suite} [{self.group}]: {n}" for n in self.notes)
        return out


def run_family(report: SuiteReport, name: str, variables: Sequence[str], residue: Callable, ok: Callable[[Any], bool],
               n: int, sampling: Sampling, render_elem: Callable[[int], str], render_residue: Callable = list):
    mode, _, tuples = sampling.tuples(n, len(variables), f"{report.suite}/{name}")
    fr = FamilyResult(report.suite, report.group, name, tuple(variables), mode)
    for t in tuples:
        fr.checked += 1
        r = residue(*t)
        if not ok(r):
            fr.failures += 1
            if fr.witness is None:
                fr.witness = {
                    "tuple": {v: render_elem(x) for v, x in zip(variables, t)},
                    "residue": render_residue(r),
                }
    report.families.append(fr)
    return fr


def _is_zero(v) -> bool:
    return not any(v)


# -- tensor suites -------------------------------------------------------------


def lemma1_suite(calc, sampling: Sampling = Sampling()) -> SuiteReport:
    calc = _as_calc(calc)
    P, T = calc.P, calc.T3.pres
    mul, _, cj, c = P.fast_ops()
    t3, S = calc.t3, T.signed_sum
    rep = SuiteReport("lemma1", P.name)
    start = time.perf_counter()

    def i(x, y, x2, y2, z):
        a, b = c(x, y), c(x2, y2)
        return S([t3(mul(a, b), z)], [t3(a, z), t3(b, z)])

    def ii(a, b, x, y):
        ab = c(a, b)
        return S([t3(c(ab, y), x), t3(c(x, ab), y)])

    def iii(p, z, x, y):
        pz = cj(p, z)
        return S([t3(c(pz, x), y), t3(c(y, pz), x)], [t3(c(z, x), y), t3(c(y, z), x)])

    n, r = P.order, P.render
    run_family(rep, "i", ("x", "y", "x'", "y'", "z"), i, _is_zero, n, sampling, r)
    run_family(rep, "ii", ("a", "b", "x", "y"), ii, _is_zero, n, sampling, r)
    run_family(rep, "iii", ("p", "z", "x", "y"), iii, _is_zero, n, sampling, r)
    rep.seconds = time.perf_counter() - start
    return rep


def delta_relation_check(calc, sampling: Sampling = Sampling()) -> SuiteReport:
    """The relations of (P (x) P) (x) P, pushed through delta, vanish."""
    calc = _as_calc(calc)
    P, T = calc.P, calc.T3.pres
    mul, _, cj, c = P.fast_ops()
    d, S = calc.delta, T.signed_sum
    rep = SuiteReport("lemma2", P.name)
    start = time.perf_counter()

    def d1a(x, y, x2, y2, z):
        return S([d(x2, y2, cj(c(x, y), z))], [d(x2, y2, z)])

    def d1b(x, y, x2, y2, z):
        k = c(x, y)
        return S([d(cj(k, x2), cj(k, y2), cj(k, z))], [d(x2, y2, z)])

    def d2(x, y, z, z2):
        return S([d(x, y, mul(z, z2))], [d(cj(z, x), cj(z, y), cj(z, z2)), d(x, y, z)])

    def d4(x, x2, y, z):
        return S([d(mul(x, x2), y, z)], [d(cj(x, x2), cj(x, y), z), d(x, y, z)])

    def d5(x, y, y2, z):
        return S([d(x, mul(y, y2), z)], [d(x, y, z), d(cj(y, x), cj(y, y2), z)])

    def conj_invariance(x, y, z, p):
        return S([d(cj(p, x), cj(p, y), cj(p, z))], [d(x, y, z)])

    n, r = P.order, P.render
    run_family(rep, "d1", ("x", "y", "x'", "y'", "z"), d1a, _is_zero, n, sampling, r)
    run_family(rep, "d1-conjugated", ("x", "y", "x'", "y'", "z"), d1b, _is_zero, n, sampling, r)
    run_family(rep, "d2", ("x", "y", "z", "z'"), d2, _is_zero, n, sampling, r)
    run_family(rep, "d4", ("x", "x'", "y", "z"), d4, _is_zero, n, sampling, r)
    run_family(rep, "d5", ("x", "y", "y'", "z"), d5, _is_zero, n, sampling, r)
    run_family(rep, "conjugation-invariance", ("x", "y", "z", "p"), conj_invariance, _is_zero, n, sampling, r)
    rep.seconds = time.perf_counter() - start
    return rep


def _as_calc(group) -> TensorCalc:
    if isinstance(group, TensorCalc):
        return group
    if isinstance(group, str):
        group = get_group(group)
    return calc_for(group)


def delta_star(group):
    """Raises WellDefinednessError when delta does not factor."""
    return _as_calc(group).delta_star


def commutator_map(map_id: str, group):
    return _as_calc(group).commutator_map(map_id)


def _try_delta_star(calc: TensorCalc, rep: SuiteReport):
    try:
        dstar = calc.delta_star
    except WellDefinednessError as exc:
        where = exc.relation
        if len(where) == 3 and exc.args and "(x, y, z)" in exc.args[0]:
            where = {v: calc.P.render(a) for v, a in zip("xyz", where)}
        rep.notes.append(f"delta* is not well defined: {json.dumps(where, sort_keys=True)} gives residue {list(exc.image)}")
        rep.preconditions["delta*"] = "not well defined"
        return None
    mode, count = calc.delta_star_checked
    rep.notes.append("delta* well defined: hom on generators that agrees with the formula on every checked symbol")
    rep.preconditions["delta*"] = "well defined"
    if rep.suite == "lemma3":
        rep.families.append(FamilyResult(rep.suite, rep.group, "delta*-certificate", ("x", "y", "z"), mode, count))
    return dstar


def lemma3_suite(calc, sampling: Sampling = Sampling()) -> SuiteReport:
    calc = _as_calc(calc)
    P, T = calc.P, calc.T3.pres
    c, d, t3 = P.fast_ops()[3], calc.delta, calc.t3
    rep = SuiteReport("lemma3", P.name)
    rep.notes.append("the hypothesis H2(P) = 0 is not checked; the factor-through claim is not asserted")
    start = time.perf_counter()
    _try_delta_star(calc, rep)

    def v1(x, z):
        return d(x, x, z)

    def v2(x, y, z, p):
        k = c(x, y)
        return T.signed_sum([t3(c(k, z), p), t3(c(p, k), z), t3(c(z, p), k)])

    def v3(x, y, p, q):
        k = c(p, q)
        return T.signed_sum([t3(c(x, y), k), t3(c(k, x), y), t3(c(y, k), x)])

    n, r = P.order, P.render
    run_family(rep, "x(x)x(x)z", ("x", "z"), v1, _is_zero, n, sampling, r)
    run_family(rep, "[x,y](x)z(x)p", ("x", "y", "z", "p"), v2, _is_zero, n, sampling, r)
    run_family(rep, "x(x)y(x)[p,q]", ("x", "y", "p", "q"), v3, _is_zero, n, sampling, r)
    rep.seconds = time.perf_counter() - start
    return rep


def lemma4_3w_suite(calc, sampling: Sampling = Sampling()) -> SuiteReport:
    calc = _as_calc(calc)
    P, T = calc.P, calc.T3.pres
    rep = SuiteReport("lemma4", P.name)
    rep.notes.append("checks Im delta* in Ker alpha1 only; Ker alpha1 = Im delta* is a statement about free groups")
    start = time.perf_counter()
    dstar = _try_delta_star(calc, rep)
    if dstar is None:
        rep.notes.append("precondition unmet: delta* is not well defined, nothing to check")
        rep.seconds = time.perf_counter() - start
        return rep
    ip = calc.i_prime
    alpha1 = calc.commutator_map("alpha1")

    def three_w(x, y, z):
        w = calc.delta(x, y, z)
        return T.combine([(1, dstar.apply_coords(ip.apply_coords(w))), (-3, w)])

    run_family(rep, "delta*i'(w)=3w", ("x", "y", "z"), three_w, _is_zero, P.order, sampling, P.render)
    fr = FamilyResult(rep.suite, rep.group, "alpha1.delta*=0", ("generator",), "exhaustive")
    comp_rows = dstar.images.entries
    for j, row in enumerate(comp_rows):
        fr.checked += 1
        img = alpha1.target.coords(alpha1.apply(row))
        if any(img):
            fr.failures += 1
            if fr.witness is None:
                fr.witness = {"generator": j, "residue": list(img)}
    rep.families.append(fr)
    rep.seconds = time.perf_counter() - start
    return rep


def lemma5b_suite(calc, sampling: Sampling = Sampling()) -> SuiteReport:
    calc = _as_calc(calc)
    P, T = calc.P, calc.T2.pres
    _, inv, cj, c = P.fast_ops()
    t2, S = calc.t2, T.signed_sum
    rep = SuiteReport("lemma5b", P.name)
    start = time.perf_counter()

    def rhs(k, x, y):
        # [y, ^{y^-1} k] (x) x + [^{y^-1} k, x] (x) ^x y
        u = cj(inv(y), k)
        return S([t2(c(y, u), x), t2(c(u, x), cj(x, y))])

    def e1(x, y):
        k = c(x, y)
        return S([t2(k, k)], [rhs(k, x, y)])

    def e2(p, q, x, y):
        k, l = c(p, q), c(x, y)
        return S([t2(k, l)], [rhs(k, x, y)])

    def e_sym(p, q, x, y):
        k, l = c(p, q), c(x, y)
        return S([t2(k, l), t2(l, k)], [rhs(k, x, y), rhs(l, p, q)])

    n, r = P.order, P.render
    run_family(rep, "[x,y](x)[x,y]", ("x", "y"), e1, _is_zero, n, sampling, r)
    run_family(rep, "[p,q](x)[x,y]", ("p", "q", "x", "y"), e2, _is_zero, n, sampling, r)
    run_family(rep, "[p,q](x)[x,y]+[x,y](x)[p,q]", ("p", "q", "x", "y"), e_sym, _is_zero, n, sampling, r)
    rep.seconds = time.perf_counter() - start
    return rep


# -- weight-4 congruences --------------------------------------------------------


def _congruence_families(comm, conj, inv, mul):
    """Residues that must lie in [gamma_3, gamma_2], written over an abstract group."""

    def lemma6_pair(x, y, p, q):
        # ([y, ^{y^-1}[p,q]] , x) and ([^{y^-1}[p,q], x], ^x y) commutated, multiplied
        u = conj(inv(y), comm(p, q))
        return mul(comm(comm(y, u), x), comm(comm(u, x), conj(x, y)))

    def l6a(x, y):
        return lemma6_pair(x, y, x, y)

    def l6b(p, q, x, y):
        return mul(lemma6_pair(x, y, p, q), lemma6_pair(p, q, x, y))

    def c1(z1, z2, z, z2p, z3):
        k = comm(z1, z2)
        return mul(comm(comm(k, conj(z, z2p)), z3), inv(comm(comm(k, z2p), z3)))

    def c2(z1, z2, z3, z, z2p):
        k = comm(comm(z1, z2), z3)
        return mul(comm(k, conj(z, z2p)), inv(comm(k, z2p)))

    def c3(z1, z2, z3, z, z2p, z4):
        k = comm(comm(z1, z2), z3)
        return mul(comm(k, conj(comm(z, z2p), z4)), inv(comm(k, z4)))

    def close1(x, y):
        # product == ([[x,y],[x,y]])^-1
        k = comm(x, y)
        return mul(l6a(x, y), comm(k, k))

    def close2(p, q, x, y):
        # product == [[x,y],[p,q]]^-1 [[p,q],[x,y]]^-1
        k, l = comm(x, y), comm(p, q)
        return mul(mul(l6b(p, q, x, y), comm(l, k)), comm(k, l))

    return [
        ("lemma6-two-variable", ("x", "y"), l6a),
        ("lemma6-four-variable", ("p", "q", "x", "y"), l6b),
        ("theorem7-congruence-1", ("z1", "z2", "z", "z'", "z3"), c1),
        ("theorem7-congruence-2", ("z1", "z2", "z3", "z", "z'"), c2),
        ("theorem7-congruence-3", ("z1", "z2", "z3", "z", "z'", "z4"), c3),
        ("theorem7-closing-1", ("x", "y"), close1),
        ("theorem7-closing-2", ("p", "q", "x", "y"), close2),
    ]


def lemma6_thm7_suite(calc, sampling: Sampling = Sampling(), magnus_cap: int = 4) -> SuiteReport:
    """Finite P: residues are tested for membership in [gamma_3, gamma_2],
    computed exactly (for class <= 4 that subgroup is trivial).  "free"
    runs the free-model check instead."""
    if isinstance(calc, str) and calc == "free":
        return lemma6_thm7_free(magnus_cap)
    calc = _as_calc(calc)
    P = calc.P
    rep = SuiteReport("lemma6thm7", P.name)
    start = time.perf_counter()
    K = calc.g32
    rep.notes.append(f"modulus [gamma_3,gamma_2] has order {len(K)}")
    mul, inv, cj, c = P.fast_ops()
    families = _congruence_families(c, cj, inv, mul)
    for name, variables, fn in families:
        run_family(rep, name, variables, fn, K.__contains__, P.order, sampling, P.render, P.render)
    rep.seconds = time.perf_counter() - start
    return rep


def lemma6_thm7_free(cap: int = 4) -> SuiteReport:
    """Free model: each residue word, at distinct generators, must lie in
    gamma_5, i.e. vanish through degree 4 of its Magnus expansion."""
    if cap < FREE_MODULUS_WEIGHT - 1:
        raise ValueError(f"Magnus cap must be at least {FREE_MODULUS_WEIGHT - 1} for the mod gamma_5 check")
    rep = SuiteReport("lemma6thm7", "free")
    rep.notes.append("free model: congruences checked modulo gamma_5, which contains [gamma_3,gamma_2]")
    start = time.perf_counter()
    families = _congruence_families(commutator, conjugate, Word.inverse, Word.__mul__)
    for name, variables, fn in families:
        gens = [Word.gen(i + 1) for i in range(len(variables))]
        w = fn(*gens)
        weight = lcs_weight(w, len(variables), cap)
        fr = FamilyResult(rep.suite, rep.group, name, tuple(variables), "canonical", 1)
        if weight is not None and weight < FREE_MODULUS_WEIGHT:
            fr.failures = 1
            fr.witness = {
                "tuple": {v: g.render() for v, g in zip(variables, gens)},
                "residue": w.render(),
                "weight": weight,
            }
        rep.families.append(fr)
    rep.seconds = time.perf_counter() - start
    return rep


_RUNNERS = {
    "lemma1": lemma1_suite,
    "lemma2": delta_relation_check,
    "lemma3": lemma3_suite,
    "lemma4": lemma4_3w_suite,
    "lemma5b": lemma5b_suite,
    "lemma6thm7": lemma6_thm7_suite,
}


def run_suite(name: str, group: FiniteGroup | str, sampling: Sampling = Sampling(), magnus_cap: int = 4) -> list[SuiteReport]:
    """Run one suite, or all of them for name == "all"; group "free" runs
    only the congruence suite in the free model."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {n!r}")
    if group == "free":
        if name not in ("all", "lemma6thm7"):
            raise ValueError(f"suite {name} needs a finite group; only lemma6thm7 runs in the free model")
        return [lemma6_thm7_free(magnus_cap)]
    calc = _as_calc(group)
    return [_RUNNERS[n](calc, sampling) for n in names]
