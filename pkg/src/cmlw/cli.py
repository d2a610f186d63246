"""cmlw command line.

Exit status: 0 when every check passes, 1 when some check fails, 2 for
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from cmlw.expr import LieBracket, ParseError, UnboundVariableError, free_variables, load_identities, parse, parse_identity, walk
from cmlw.groups import DEFAULT_ORDER_BOUND, GroupError, get_group
from cmlw.intlin import IntMatrix, WellDefinednessError, smith_normal_form
from cmlw.magnus import DEFAULT_CAP, LieResidueError, gamma_class, lyndon_basis, lyndon_words, render_bracket, witt_rank
from cmlw.models import (DEFAULT_SAMPLES, DEFAULT_SEED, EXHAUSTIVE_LIMIT, Exhaustive, FreeGroupModel, Random, UnknownModelError,
                         builtin_corpus, check_identity, evaluate, model_from_spec)
from cmlw.suites import SUITES, Sampling, run_suite
from cmlw.tensor import TensorBoundError, calc_for
from cmlw.words import Word

MAX_SEED = 2**64
MAX_CAP = 12
MAX_RANK = 10
MAX_WEIGHT = 12
TENSOR_PAIRS = ("DPab_Pab", "DPab_P", "G2G3_Pab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _bounded(lo: int, hi: int | None = None):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            rng = f"{lo}..{hi}" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{v} out of range ({rng})")
        return v
    return conv


def _samples(text: str):
    if text == "all":
        return "all"
    return _bounded(1)(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=_bounded(0, MAX_SEED - 1), default=DEFAULT_SEED)
    common.add_argument("--samples", type=_samples, default=None,
                        help='seeded sample count, or "all" to enumerate; default: enumerate up to 10^6 tuples')
    common.add_argument("--magnus-cap", type=_bounded(1, MAX_CAP), default=DEFAULT_CAP)
    common.add_argument("--order-bound", type=_bounded(1), default=DEFAULT_ORDER_BOUND)

    p = _Parser(prog="cmlw", description="commutator calculus workbench")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("check", parents=[common], help="check identities in a model")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", choices=("builtin",))
    src.add_argument("--file", type=Path)
    src.add_argument("--expr")
    c.add_argument("--model", default="free")

    w = sub.add_parser("witt", parents=[common], help="Witt rank of the free Lie algebra")
    w.add_argument("--rank", type=_bounded(1, MAX_RANK), required=True)
    w.add_argument("--weight", type=_bounded(1, MAX_WEIGHT), required=True)

    k = sub.add_parser("class", parents=[common], help="class of a word in gamma_n/gamma_n+1")
    k.add_argument("--rank", type=_bounded(1, MAX_RANK), required=True)
    k.add_argument("--weight", type=_bounded(1, MAX_WEIGHT), required=True)
    k.add_argument("--word", required=True)

    t = sub.add_parser("tensor", parents=[common], help="build a tensor group and print it")
    t.add_argument("--group", required=True)
    t.add_argument("--pair", choices=TENSOR_PAIRS, required=True)

    v = sub.add_parser("verify", parents=[common], help="run lemma suites")
    v.add_argument("--suite", choices=SUITES + ("all",), required=True)
    v.add_argument("--group", required=True)

    s = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    s.add_argument("--matrix", type=Path, required=True)
    return p


def _emit(out, args, payload: dict, text: str):
    out.write((json.dumps(payload, sort_keys=True) if args.output == "json" else text) + "\n")


# -- subcommands --


def cmd_check(args, out) -> int:
    if args.corpus:
        identities = builtin_corpus()
    elif args.file:
        identities = load_identities(args.file.read_text())
    else:
        identities = [parse_identity(args.expr, name="expr")]
    m = model_from_spec(args.model)
    ok = True
    for ident in identities:
        v = check_identity(ident, m, _check_sampling(m, ident, args))
        ok &= v.holds
        cex = {k: m.render(a) for k, a in v.counterexample.items()} if v.counterexample else None
        residue = m.render(v.residue) if v.residue is not None else None
        payload = {"identity": ident.name, "model": v.model, "status": "pass" if v.holds else "fail",
                   "mode": v.mode, "checked": v.checked, "counterexample": cex, "residue": residue}
        text = f"{'pass' if v.holds else 'FAIL'} {ident.name} [{v.model}] {v.mode} checked={v.checked}"
        if not v.holds:
            text += f" counterexample={json.dumps(cex, sort_keys=True)} residue={residue}"
        _emit(out, args, payload, text)
    return 0 if ok else 1


def _check_sampling(m, ident, args):
    if isinstance(m, FreeGroupModel):
        return None
    if args.samples == "all":
        return Exhaustive()
    if args.samples is not None:
        return Random(args.samples, args.seed)
    if m.order ** len(ident.variables) <= EXHAUSTIVE_LIMIT:
        return Exhaustive()
    return Random(DEFAULT_SAMPLES, args.seed)


def cmd_witt(args, out) -> int:
    r, n = args.rank, args.weight
    value, count = witt_rank(r, n), len(lyndon_words(r, n))
    _emit(out, args, {"rank": r, "weight": n, "witt_rank": value, "lyndon_words": count}, str(value))
    return 0 if value == count else 1


def _word_of(text: str, rank: int) -> Word:
    e = parse(text)
    if any(isinstance(node, LieBracket) for node in walk(e)):
        raise UsageError("class needs a bracket-free expression; use [a,b] for group commutators")
    names = free_variables(e)
    if all(v[0] == "x" and v[1:].isdigit() and int(v[1:]) >= 1 for v in names):
        env = {v: Word.gen(int(v[1:])) for v in names}
    else:
        env = {v: Word.gen(i + 1) for i, v in enumerate(names)}
    top = max((w.max_generator() for w in env.values()), default=0)
    if top > rank:
        raise UsageError(f"expression uses {top} generators but --rank is {rank}")
    return evaluate(e, FreeGroupModel(), env)


def cmd_class(args, out) -> int:
    w = _word_of(args.word, args.rank)
    try:
        coords = gamma_class(w, args.rank, args.weight)
    except ValueError as exc:
        _emit(out, args, {"word": args.word, "weight": args.weight, "error": str(exc)}, f"FAIL {exc}")
        return 1
    basis = lyndon_basis(args.rank, args.weight)
    names = [render_bracket(b) for b in basis.bracketings]
    lines = [f"{c} {nm}" for c, nm in zip(coords, names) if c] or ["0"]
    _emit(out, args, {"word": args.word, "rank": args.rank, "weight": args.weight,
                      "basis": names, "coordinates": coords}, "\n".join(lines))
    return 0


def cmd_tensor(args, out) -> int:
    calc = calc_for(get_group(args.group, args.order_bound))
    T = {"DPab_Pab": calc.T3, "DPab_P": calc.T2, "G2G3_Pab": calc.D}[args.pair]
    pres = T.pres
    payload = {"group": calc.P.name, "pair": args.pair, "tensor": T.name, "generators": pres.ngens,
               "invariant_factors": pres.invariant_factors(), "order": pres.order, "describe": pres.describe()}
    _emit(out, args, payload, f"{T.name} of {calc.P.name}: {pres.describe()} (order {pres.order})")
    return 0


def cmd_verify(args, out) -> int:
    if args.samples == "all":
        sampling = Sampling(seed=args.seed, exhaustive=True)
    elif args.samples is not None:
        sampling = Sampling(samples=args.samples, seed=args.seed, exhaustive=False)
    else:
        sampling = Sampling(seed=args.seed)
    group = "free" if args.group == "free" else get_group(args.group, args.order_bound)
    try:
        reports = run_suite(args.suite, group, sampling, args.magnus_cap)
    except ValueError as exc:
        if isinstance(exc, WellDefinednessError):
            raise
        raise UsageError(str(exc)) from None
    for rep in reports:
        lines = rep.json_lines() if args.output == "json" else rep.text_lines()
        for line in lines:
            out.write(line + "\n")
    return 0 if all(r.passed for r in reports) else 1


def cmd_snf(args, out) -> int:
    data = json.loads(args.matrix.read_text())
    M = IntMatrix.from_rows(data) if isinstance(data, list) else IntMatrix.from_json(data)
    d = smith_normal_form(M)
    ok = d.U @ M @ d.V == d.S
    invs = d.invariants
    payload = {"invariants": invs, "U": d.U.entries, "S": d.S.entries, "V": d.V.entries, "verified": ok}
    _emit(out, args, payload, " ".join(map(str, invs)) if invs else "(no nonzero invariants)")
    return 0 if ok else 1


COMMANDS = {"check": cmd_check, "witt": cmd_witt, "class": cmd_class, "tensor": cmd_tensor,
            "verify": cmd_verify, "snf": cmd_snf}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        env_seed = os.environ.get("CMLW_SEED")
        if env_seed is not None:
            try:
                args.seed = _bounded(0, MAX_SEED - 1)(env_seed)
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"CMLW_SEED: {exc}") from None
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 2
    except (ParseError, UnboundVariableError, UnknownModelError, GroupError, TensorBoundError,
            LieResidueError, OSError, json.JSONDecodeError) as exc:
        err.write(f"cmlw: error: {exc}\n")
        return 2
    except WellDefinednessError as exc:
        err.write(f"cmlw: {exc}\n")
        return 1
    except ValueError as exc:
        err.write(f"cmlw: error: {exc}\n")
        return 2


def main():
    sys.exit(run())
