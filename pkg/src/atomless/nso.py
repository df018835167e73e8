"""Self-referential layer: quoted sentences as elements of a Boolean algebra.

A quote ``{phi}`` denotes the class of ``phi`` modulo logical equivalence.
Identifiers free inside a quote are uninterpreted constants; they stay
symbolic, so the class is represented by the pruned DNF that quantifier
elimination leaves over those constants.  Equality is logical equivalence,
decided as emptiness of the symmetric difference; deeper quotes inside a body
appear as coefficient values, which is what makes the recursion on bracket
depth terminate.
"""
from __future__ import annotations

import zlib
from functools import lru_cache
from typing import Iterable, Optional

from atomless.algebra import NSO, SortError
from atomless.boolfun import BoolFun, Quote
from atomless.firstorder import Clause, Formula, dnf_product, dnf_to_formula, free_vars
from atomless.qelim import _clause_sorts, is_valid, negate_dnf, prune, qe_dnf


class LtaElement:
    """An element of the Lindenbaum-Tarski algebra of NSO sentences."""

    __slots__ = ("clauses", "depth", "_hash", "_constants")

    def __init__(self, clauses: Iterable[Clause], depth: int = 0):
        self.clauses = tuple(clauses)
        self.depth = depth
        self._hash: Optional[int] = None
        self._constants: Optional[frozenset] = None

    _ZERO: "LtaElement"
    _ONE: "LtaElement"

    @staticmethod
    def zero() -> "LtaElement":
        return LtaElement._ZERO

    @staticmethod
    def one() -> "LtaElement":
        return LtaElement._ONE

    @property
    def sort(self):
        return NSO

    @property
    def constants(self) -> frozenset:
        if self._constants is None:
            self._constants = frozenset(v for c in self.clauses for v in c.variables())
        return self._constants

    def _check(self, other) -> None:
        if not isinstance(other, LtaElement):
            raise SortError(f"cannot combine NSO and {getattr(other, 'sort', other)} values")

    def __and__(self, other: "LtaElement") -> "LtaElement":
        self._check(other)
        if not self.clauses or not other.clauses:
            return LtaElement._ZERO
        return LtaElement(prune(dnf_product(list(self.clauses), list(other.clauses))),
                          max(self.depth, other.depth))

    def __or__(self, other: "LtaElement") -> "LtaElement":
        self._check(other)
        return LtaElement(prune(self.clauses + other.clauses), max(self.depth, other.depth))

    def __invert__(self) -> "LtaElement":
        return LtaElement(negate_dnf(list(self.clauses)), self.depth)

    def __xor__(self, other: "LtaElement") -> "LtaElement":
        return (self & ~other) | (~self & other)

    def is_zero(self) -> bool:
        return not self.clauses

    def is_one(self) -> bool:
        return (~self).is_zero()

    def leq(self, other: "LtaElement") -> bool:
        return (self & ~other).is_zero()

    def split(self, n: int) -> list["LtaElement"]:
        """``n`` disjoint nonzero parts, cut by fresh constants ``__s1, __s2, ...``."""
        if n < 1:
            raise ValueError("n must be positive")
        if self.is_zero():
            raise ValueError("cannot split the zero element")
        from atomless.boolfun import MintermNF
        taken = self.constants
        names = []
        i = 1
        while len(names) < n - 1:
            if f"__s{i}" not in taken:
                names.append(f"__s{i}")
            i += 1
        parts = []
        rest = self
        for name in names:
            c = MintermNF.var(NSO, name)
            parts.append(rest & LtaElement([Clause.make([c], [])]))
            rest = rest & LtaElement([Clause.make([], [c])])
        parts.append(rest)
        return parts

    def to_formula(self) -> Formula:
        return dnf_to_formula(self.clauses)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LtaElement):
            return NotImplemented
        if self is other or self.clauses == other.clauses:
            return True
        if hash(self) != hash(other):
            return False
        return (self ^ other).is_zero()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(_probe(self.clauses, k) for k in range(6)))
        return self._hash

    def __str__(self) -> str:
        from atomless.frontend.printer import format_value
        return format_value(self)

    def __repr__(self) -> str:
        return f"LtaElement({self})"


LtaElement._ZERO = LtaElement(())
LtaElement._ONE = LtaElement((Clause.true(),))

QuotedConstant = LtaElement


def _probe_bit(name: str, k: int) -> int:
    if k == 0:
        return 0
    if k == 1:
        return 1
    return zlib.crc32(name.encode()) >> (k - 2) & 1


def _probe(clauses: tuple[Clause, ...], k: int) -> bool:
    """Truth of the DNF when every constant is sent to 0 or 1 by a fixed rule.

    The rule depends only on the constant's name, so equivalent elements get
    equal results: this is a semantic invariant, safe to hash.
    """
    for clause in clauses:
        current: Optional[Clause] = clause
        for v, sort in sorted(_clause_sorts(clause).items()):
            value = sort.one() if _probe_bit(v, k) else sort.zero()
            current = Clause.make(
                [p.assign(v, value) if v in p.variables else p for p in current.positives],
                [g.assign(v, value) if v in g.variables else g for g in current.negatives])
            if current is None:
                break
        if current is not None:
            return True
    return False


def quote_depth(phi) -> int:
    """Deepest bracket nesting inside a formula or term."""
    if isinstance(phi, Quote):
        return 1 + quote_depth(phi.body)
    if isinstance(phi, BoolFun):
        return max((quote_depth(c) for c in phi.children()), default=0)
    from atomless.firstorder import Eq0, Neq0
    if isinstance(phi, (Eq0, Neq0)):
        return quote_depth(phi.bf)
    return max((quote_depth(c) for c in phi.children()), default=0)


@lru_cache(maxsize=4096)
def lta_of(body: Formula) -> LtaElement:
    """The class of ``body``; free identifiers act as uninterpreted constants."""
    return LtaElement(qe_dnf(body), quote_depth(body) + 1)


def lta_meet(a: LtaElement, b: LtaElement) -> LtaElement:
    return a & b


def lta_join(a: LtaElement, b: LtaElement) -> LtaElement:
    return a | b


def lta_complement(a: LtaElement) -> LtaElement:
    return ~a


def is_zero_element(q) -> bool:
    """True iff the quoted sentence is refutable."""
    if isinstance(q, Quote):
        q = lta_of(q.body)
    return q.is_zero()


def decide_nso(sentence: Formula) -> bool:
    """Truth of an NSO sentence; free constants are read universally."""
    sentence.free_var_sorts  # raises SortError on ill-sorted input
    return is_valid(sentence)


def uninterpreted_constants(sentence: Formula) -> set[str]:
    return free_vars(sentence)
