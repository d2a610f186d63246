"""Freely reduced words in a free group.

A letter is a nonzero integer: ``i`` stands for the generator x_i and ``-i``
for its inverse.  Words are reduced on construction, so two words are equal
as group elements iff their letter tuples are equal.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence


class Letter(NamedTuple):
    gen: int
    sign: int

    def encode(self) -> int:
        if self.gen < 1:
            raise ValueError(f"generator index must be >= 1, got {self.gen}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        return self.gen * self.sign


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


class Word:
    """An element of the free group, stored as its reduced letter tuple."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int | Letter] = ()):
        object.__setattr__(
            self,
            "letters",
            _free_reduce(a.encode() if isinstance(a, Letter) else int(a) for a in letters),
        )

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def gen(cls, i: int) -> "Word":
        if i < 1:
            raise ValueError(f"generator index must be >= 1, got {i}")
        return cls((i,))

    @classmethod
    def identity(cls) -> "Word":
        return _IDENTITY

    def __mul__(self, other: "Word") -> "Word":
        a, b = self.letters, other.letters
        # cancel at the seam only; both halves are already reduced
        k = 0
        while k < len(a) and k < len(b) and a[-1 - k] == -b[k]:
            k += 1
        w = Word.__new__(Word)
        object.__setattr__(w, "letters", a[: len(a) - k] + b[k:])
        return w

    def __invert__(self) -> "Word":
        w = Word.__new__(Word)
        object.__setattr__(w, "letters", tuple(-a for a in reversed(self.letters)))
        return w

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else ~self
        out = _IDENTITY
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        # the identity is falsy, like an empty sequence
        return bool(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def max_generator(self) -> int:
        return max((abs(a) for a in self.letters), default=0)

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.letters:
            return "1"
        parts = []
        for a in self.letters:
            i = abs(a)
            name = names[i - 1] if names is not None else f"x{i}"
            parts.append(name if a > 0 else name + "^-1")
        return "*".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Word({list(self.letters)!r})"


_IDENTITY = Word()


def reduce(letters: Iterable[int | Letter]) -> Word:
    return Word(letters)


def mul(a: Word, b: Word) -> Word:
    return a * b


def inv(a: Word) -> Word:
    return ~a


def conjugate(a: Word, b: Word) -> Word:
    """Left conjugation ``a b a^-1``."""
    return a * b * ~a


def commutator(a: Word, b: Word) -> Word:
    """``a b a^-1 b^-1``."""
    return a * b * ~a * ~b
