"""Commutator expressions: AST, parser, renderer and substitution.

Grammar::

    expr   := factor { "*" factor }
    factor := atom [ "^-1" ]
    atom   := NAME | "1" | "(" expr ")" | "[" expr "," expr "]"
            | "{" expr "," expr "}" | "cj" "(" expr "," expr ")"

``[a,b]`` is the group commutator a b a^-1 b^-1, ``{a,b}`` the abstract Lie
product, and ``cj(a,b)`` the left conjugate a b a^-1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Inv:
    arg: "Expr"


@dataclass(frozen=True)
class Conj:
    actor: "Expr"
    target: "Expr"


@dataclass(frozen=True)
class GrpComm:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class LieBracket:
    left: "Expr"
    right: "Expr"


Expr = Union[Var, One, Mul, Inv, Conj, GrpComm, LieBracket]


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: Expr
    rhs: Expr
    variables: tuple[str, ...] = field(default=())

    def __post_init__(self):
        fv = free_variables(Mul(self.lhs, self.rhs))
        if not self.variables:
            object.__setattr__(self, "variables", tuple(fv))
        elif not set(fv) <= set(self.variables):
            missing = [v for v in fv if v not in self.variables]
            raise ValueError(f"identity {self.name!r}: variables list misses {missing}")

    def render(self) -> str:
        return f"{self.name}: {render(self.lhs)} = {render(self.rhs)}"


class ParseError(ValueError):
    def __init__(self, offset: int, expected: Iterable[str], found: str):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        exp = " or ".join(repr(e) for e in self.expected)
        super().__init__(f"syntax error at offset {offset}: expected {exp}, found {found}")


class UnboundVariableError(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_']*)|(?P<inv>\^-1)|(?P<one>1(?![0-9]))|(?P<punct>[*()\[\]{},]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(self._bytes(pos), ["expression"], repr(text[pos]))
            start = m.start(m.lastgroup)
            kind = m.lastgroup
            value = m.group(kind)
            self.tokens.append((kind if kind != "punct" else value, value, start))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0
        self.inverted = False

    def _bytes(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode())

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def fail(self, expected: Iterable[str]):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "eof" else repr(value)
        raise ParseError(self._bytes(pos), expected, found)

    def expect(self, kind: str, also: Iterable[str] = ()):
        if self.peek()[0] != kind:
            self.fail([kind, *also])
        self.i += 1

    def expr(self) -> Expr:
        e = self.factor()
        while self.peek()[0] == "*":
            self.i += 1
            e = Mul(e, self.factor())
        return e

    def factor(self) -> Expr:
        e = self.atom()
        self.inverted = self.peek()[0] == "inv"
        if self.inverted:
            self.i += 1
            e = Inv(e)
        return e

    @property
    def _after_operand(self) -> tuple[str, ...]:
        return ("*",) if self.inverted else ("*", "^-1")

    def _pair(self, close: str) -> tuple[Expr, Expr]:
        a = self.expr()
        self.expect(",", self._after_operand)
        b = self.expr()
        self.expect(close, self._after_operand)
        return a, b

    def atom(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "name":
            self.i += 1
            if value == "cj" and self.peek()[0] == "(":
                self.i += 1
                return Conj(*self._pair(")"))
            return Var(value)
        if kind == "one":
            self.i += 1
            return One()
        if kind == "(":
            self.i += 1
            e = self.expr()
            self.expect(")", self._after_operand)
            return e
        if kind == "[":
            self.i += 1
            return GrpComm(*self._pair("]"))
        if kind == "{":
            self.i += 1
            return LieBracket(*self._pair("}"))
        self.fail(["NAME", "1", "(", "[", "{"])

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "eof":
            self.fail(["end of input", *self._after_operand])
        return e


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def parse_identity(line: str, name: str | None = None) -> Identity:
    """Parse ``NAME: LHS = RHS`` (or ``LHS = RHS`` when *name* is given)."""
    body = line
    if ":" in line:
        head, body = line.split(":", 1)
        name = head.strip()
        if not re.fullmatch(r"[A-Za-z0-9_'.-]+", name):
            raise ValueError(f"bad identity name {name!r}")
    if name is None:
        raise ValueError(f"identity line lacks a name: {line!r}")
    if body.count("=") != 1:
        raise ValueError(f"identity {name!r} needs exactly one '='")
    lhs, rhs = body.split("=")
    return Identity(name, parse(lhs), parse(rhs))


def load_identities(text: str) -> list[Identity]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_identity(line))
    return out


def _render(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, One):
        return "1"
    if isinstance(e, Mul):
        right = _render(e.right)
        if isinstance(e.right, Mul):
            right = f"({right})"
        return f"{_render(e.left)}*{right}"
    if isinstance(e, Inv):
        inner = _render(e.arg)
        if isinstance(e.arg, (Mul, Inv)):
            inner = f"({inner})"
        return inner + "^-1"
    if isinstance(e, Conj):
        return f"cj({_render(e.actor)},{_render(e.target)})"
    if isinstance(e, GrpComm):
        return f"[{_render(e.left)},{_render(e.right)}]"
    if isinstance(e, LieBracket):
        return f"{{{_render(e.left)},{_render(e.right)}}}"
    raise TypeError(f"not an expression: {e!r}")


def render(e: Expr) -> str:
    return _render(e)


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Var, One)):
        return ()
    if isinstance(e, Inv):
        return (e.arg,)
    if isinstance(e, Conj):
        return (e.actor, e.target)
    return (e.left, e.right)


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def _walk_vars(e: Expr) -> Iterator[str]:
    return (node.name for node in walk(e) if isinstance(node, Var))


def free_variables(e: Expr) -> list[str]:
    return list(dict.fromkeys(_walk_vars(e)))


def substitute(e: Expr, env: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, One):
        return e
    if isinstance(e, Inv):
        return Inv(substitute(e.arg, env))
    if isinstance(e, Conj):
        return Conj(substitute(e.actor, env), substitute(e.target, env))
    return type(e)(substitute(e.left, env), substitute(e.right, env))


def depth(e: Expr) -> int:
    return 1 + max((depth(c) for c in children(e)), default=0)
