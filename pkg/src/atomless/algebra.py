"""Concrete Boolean algebras used as carriers.

Three carriers live here:

* ``IntervalSet`` -- finite unions of half-open rational intervals in [0, 1).
  This is the computable atomless algebra the solver runs on.
* ``Bit`` -- the two-element algebra.
* ``FiniteSet`` -- subsets of a fixed finite universe, kept as a bitmask.
  Only used as a brute-force oracle carrier in tests.

Every carrier value supports ``&`` (meet), ``|`` (join), ``~`` (complement),
``^`` (ring sum), ``is_zero()`` and carries its ``sort``.
"""
from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class SortError(TypeError):
    """Raised when values or terms of different sorts are combined."""


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str  # "interval", "two-element", "finite", "nso"
    size: int = 0

    @property
    def atomless(self) -> bool:
        return self.kind in ("interval", "nso")

    def zero(self):
        if self.kind == "interval":
            return IntervalSet.ZERO
        if self.kind == "two-element":
            return Bit.ZERO
        if self.kind == "finite":
            return FiniteSet(self.size, 0)
        from atomless.nso import LtaElement
        return LtaElement.zero()

    def one(self):
        if self.kind == "interval":
            return IntervalSet.ONE
        if self.kind == "two-element":
            return Bit.ONE
        if self.kind == "finite":
            return FiniteSet(self.size, (1 << self.size) - 1)
        from atomless.nso import LtaElement
        return LtaElement.one()

    def __str__(self) -> str:
        return self.name


T = Sort("T", "interval")
B2 = Sort("B2", "two-element")
NSO = Sort("NSO", "nso")


def finite_sort(n: int) -> Sort:
    if n < 1:
        raise ValueError("finite universe must be nonempty")
    return Sort(f"F{n}", "finite", n)


def sort_by_name(name: str) -> Sort:
    if name == "T":
        return T
    if name == "B2":
        return B2
    if name == "NSO":
        return NSO
    m = re.fullmatch(r"F([1-9][0-9]*)", name)
    if m:
        return finite_sort(int(m.group(1)))
    raise KeyError(name)


def _check_same(a, b) -> None:
    if a.sort != b.sort:
        raise SortError(f"cannot combine {a.sort} and {b.sort} values")


# ---------------------------------------------------------------------------
# interval algebra

_ZERO_Q = Fraction(0)
_ONE_Q = Fraction(1)


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("float endpoints are not allowed; use Fraction or int")
    return Fraction(x)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint half-open intervals ``[lo, hi)`` in ``[0, 1)``.

    The representation is canonical: sorted, nonempty, and no two pieces touch,
    so two sets are equal iff their ``intervals`` tuples are equal.
    Use :meth:`of` to build from arbitrary (possibly overlapping) pairs.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.intervals:
            if not (isinstance(lo, Fraction) and isinstance(hi, Fraction)):
                raise TypeError("endpoints must be Fractions")
            if not (0 <= lo < hi <= 1):
                raise ValueError(f"bad interval [{lo}, {hi})")
            if prev_hi is not None and not prev_hi < lo:
                raise ValueError("intervals must be sorted, disjoint and non-adjacent")
            prev_hi = hi

    @classmethod
    def of(cls, pairs: Iterable[Sequence]) -> "IntervalSet":
        cleaned = sorted((_q(lo), _q(hi)) for lo, hi in pairs)
        out: list[list[Fraction]] = []
        for lo, hi in cleaned:
            lo, hi = max(lo, _ZERO_Q), min(hi, _ONE_Q)
            if lo >= hi:
                continue
            if out and lo <= out[-1][1]:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in out))

    @classmethod
    def interval(cls, lo, hi) -> "IntervalSet":
        return cls.of([(lo, hi)])

    @property
    def sort(self) -> Sort:
        return T

    # -- membership-based combination -------------------------------------
    def _cuts(self) -> list[Fraction]:
        return [p for pair in self.intervals for p in pair]

    def _combine(self, other: "IntervalSet", op) -> "IntervalSet":
        cuts = sorted(set(self._cuts()) | set(other._cuts()) | {_ZERO_Q, _ONE_Q})
        a_cuts, b_cuts = self._cuts(), other._cuts()
        pieces = []
        for lo, hi in zip(cuts, cuts[1:]):
            # canonical form: membership of a segment is the parity of the
            # number of breakpoints at or left of its start
            in_a = bisect_right(a_cuts, lo) % 2 == 1
            in_b = bisect_right(b_cuts, lo) % 2 == 1
            if op(in_a, in_b):
                if pieces and pieces[-1][1] == lo:
                    pieces[-1] = (pieces[-1][0], hi)
                else:
                    pieces.append((lo, hi))
        return IntervalSet(tuple(pieces))

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        _check_same(self, other)
        if not self.intervals or not other.intervals:
            return IntervalSet.ZERO
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        _check_same(self, other)
        if not self.intervals:
            return other
        if not other.intervals:
            return self
        return self._combine(other, lambda a, b: a or b)

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        _check_same(self, other)
        return self._combine(other, lambda a, b: a != b)

    def __invert__(self) -> "IntervalSet":
        pieces = []
        prev = _ZERO_Q
        for lo, hi in self.intervals:
            if lo > prev:
                pieces.append((prev, lo))
            prev = hi
        if prev < _ONE_Q:
            pieces.append((prev, _ONE_Q))
        return IntervalSet(tuple(pieces))

    def is_zero(self) -> bool:
        return not self.intervals

    def is_one(self) -> bool:
        return self.intervals == ((_ZERO_Q, _ONE_Q),)

    def leq(self, other: "IntervalSet") -> bool:
        return (self & ~other).is_zero()

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), _ZERO_Q)

    def split(self, n: int) -> list["IntervalSet"]:
        """Cut into ``n`` equal-measure parts, walking the pieces left to right."""
        if n < 1:
            raise ValueError("n must be positive")
        if self.is_zero():
            raise ValueError("cannot split the zero element")
        share = self.measure() / n
        parts: list[list[tuple[Fraction, Fraction]]] = [[] for _ in range(n)]
        idx, room = 0, share
        for lo, hi in self.intervals:
            while lo < hi:
                take = min(hi - lo, room) if idx < n - 1 else hi - lo
                parts[idx].append((lo, lo + take))
                lo += take
                room -= take
                if room == 0 and idx < n - 1:
                    idx, room = idx + 1, share
        return [IntervalSet.of(p) for p in parts]

    def __str__(self) -> str:
        if not self.intervals:
            return "0"
        if self.is_one():
            return "1"
        return "|".join(f"[{lo},{hi})" for lo, hi in self.intervals)

    def __repr__(self) -> str:
        return f"IntervalSet({self})"

    @classmethod
    def parse(cls, text: str) -> "IntervalSet":
        """Parse ``0``, ``1`` or ``[p/q,r/s)|[...)`` literal syntax."""
        text = text.strip()
        if text == "0":
            return cls.ZERO
        if text == "1":
            return cls.ONE
        pairs = []
        for chunk in text.split("|"):
            m = re.fullmatch(r"\s*\[\s*([0-9]+(?:/[0-9]+)?)\s*,\s*([0-9]+(?:/[0-9]+)?)\s*\)\s*", chunk)
            if not m:
                raise ValueError(f"bad interval literal: {chunk!r}")
            pairs.append((Fraction(m.group(1)), Fraction(m.group(2))))
        return cls.of(pairs)


IntervalSet.ZERO = IntervalSet(())
IntervalSet.ONE = IntervalSet(((_ZERO_Q, _ONE_Q),))


# ---------------------------------------------------------------------------
# two-element algebra

@dataclass(frozen=True)
class Bit:
    value: bool

    @property
    def sort(self) -> Sort:
        return B2

    def __and__(self, other: "Bit") -> "Bit":
        _check_same(self, other)
        return Bit(self.value and other.value)

    def __or__(self, other: "Bit") -> "Bit":
        _check_same(self, other)
        return Bit(self.value or other.value)

    def __xor__(self, other: "Bit") -> "Bit":
        _check_same(self, other)
        return Bit(self.value != other.value)

    def __invert__(self) -> "Bit":
        return Bit(not self.value)

    def is_zero(self) -> bool:
        return not self.value

    def leq(self, other: "Bit") -> bool:
        return (self & ~other).is_zero()

    def __str__(self) -> str:
        return "1" if self.value else "0"


Bit.ZERO = Bit(False)
Bit.ONE = Bit(True)


# ---------------------------------------------------------------------------
# finite powerset algebra (oracle carrier)

@dataclass(frozen=True)
class FiniteSet:
    universe_size: int
    element: int

    def __post_init__(self):
        if self.element < 0 or self.element >> self.universe_size:
            raise ValueError("element outside the universe")

    @property
    def sort(self) -> Sort:
        return finite_sort(self.universe_size)

    def __and__(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self, other)
        return FiniteSet(self.universe_size, self.element & other.element)

    def __or__(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self, other)
        return FiniteSet(self.universe_size, self.element | other.element)

    def __xor__(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self, other)
        return FiniteSet(self.universe_size, self.element ^ other.element)

    def __invert__(self) -> "FiniteSet":
        full = (1 << self.universe_size) - 1
        return FiniteSet(self.universe_size, full & ~self.element)

    def is_zero(self) -> bool:
        return self.element == 0

    def leq(self, other: "FiniteSet") -> bool:
        return (self & ~other).is_zero()

    def atoms(self) -> list["FiniteSet"]:
        return [FiniteSet(self.universe_size, 1 << i)
                for i in range(self.universe_size) if self.element >> i & 1]

    def __str__(self) -> str:
        members = [str(i + 1) for i in range(self.universe_size) if self.element >> i & 1]
        return "{" + ",".join(members) + "}"


# ---------------------------------------------------------------------------
# carrier-generic operations

def meet(a, b):
    _check_same(a, b)
    return a & b


def join(a, b):
    _check_same(a, b)
    return a | b


def complement(a):
    return ~a


def xor(a, b):
    _check_same(a, b)
    return a ^ b


def leq(a, b) -> bool:
    """``a <= b`` iff ``a & ~b`` is zero."""
    _check_same(a, b)
    return (a & ~b).is_zero()


def split(a, n: int) -> list:
    """Split a nonzero element into ``n`` disjoint nonzero parts joining to it."""
    if a.is_zero():
        raise ValueError("cannot split the zero element")
    splitter = getattr(a, "split", None)
    if splitter is None:
        raise SortError(f"sort {a.sort} is not atomless; no split available")
    return splitter(n)
