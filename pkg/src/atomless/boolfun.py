"""Boolean functions: term trees, evaluation, and normal forms.

A ``BoolFun`` is a Boolean combination of variables and constants of a single
sort.  Its canonical form is the ``MintermNF``: the table of values ``f(A)``
over all bit vectors ``A`` of its variables.  Two BFs are equal as functions
iff their minterm tables agree, so the table doubles as the equality oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Mapping, Optional

from atomless.algebra import B2, Sort, SortError


def _unify(a: Optional[Sort], b: Optional[Sort]) -> Optional[Sort]:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise SortError(f"mixed-sort Boolean function: {a} and {b}")


class BoolFun:
    """Base class of term nodes.  Operators build new terms."""

    sort: Optional[Sort]

    def __and__(self, other: "BoolFun") -> "BoolFun":
        return Meet(self, other)

    def __or__(self, other: "BoolFun") -> "BoolFun":
        return Join(self, other)

    def __xor__(self, other: "BoolFun") -> "BoolFun":
        return Xor(self, other)

    def __invert__(self) -> "BoolFun":
        return Comp(self)

    def children(self) -> tuple["BoolFun", ...]:
        return ()

    @cached_property
    def var_sorts(self) -> dict[str, Sort]:
        out: dict[str, Sort] = {}
        for c in self.children():
            out.update(c.var_sorts)
        return out

    def variables(self) -> frozenset[str]:
        return frozenset(self.var_sorts)

    def is_simple(self) -> bool:
        """True for an SBF: every constant is 0 or 1."""
        return all(c.is_simple() for c in self.children())

    def __str__(self) -> str:
        from atomless.frontend.printer import format_term
        return format_term(self)


@dataclass(frozen=True)
class Var(BoolFun):
    name: str
    var_sort: Sort

    @property
    def sort(self) -> Sort:
        return self.var_sort

    @cached_property
    def var_sorts(self) -> dict[str, Sort]:
        return {self.name: self.var_sort}


@dataclass(frozen=True)
class Const(BoolFun):
    """An interpreted constant: a concrete carrier value, optionally named."""

    value: object
    name: Optional[str] = field(default=None, compare=False)

    @property
    def sort(self) -> Sort:
        return self.value.sort

    def is_simple(self) -> bool:
        return False


@dataclass(frozen=True)
class Zero(BoolFun):
    sort = None


@dataclass(frozen=True)
class One(BoolFun):
    sort = None


@dataclass(frozen=True)
class Quote(BoolFun):
    """Curly-bracket quotation ``{phi}``: the LTA element of a sentence."""

    body: object  # firstorder.Formula

    @property
    def sort(self) -> Sort:
        from atomless.algebra import NSO
        return NSO

    def is_simple(self) -> bool:
        return False


@dataclass(frozen=True)
class Comp(BoolFun):
    arg: BoolFun

    @property
    def sort(self) -> Optional[Sort]:
        return self.arg.sort

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(BoolFun):
    left: BoolFun
    right: BoolFun
    _sort: Optional[Sort] = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_sort", _unify(self.left.sort, self.right.sort))

    @property
    def sort(self) -> Optional[Sort]:
        return self._sort

    def children(self):
        return (self.left, self.right)


class Meet(_Binary):
    pass


class Join(_Binary):
    pass


class Xor(_Binary):
    pass


ZERO = Zero()
ONE = One()


def meet_all(terms) -> BoolFun:
    terms = list(terms)
    if not terms:
        return ONE
    out = terms[0]
    for t in terms[1:]:
        out = Meet(out, t)
    return out


def join_all(terms) -> BoolFun:
    terms = list(terms)
    if not terms:
        return ZERO
    out = terms[0]
    for t in terms[1:]:
        out = Join(out, t)
    return out


# ---------------------------------------------------------------------------
# evaluation and substitution

def _leaf_value(f: BoolFun, sort: Sort):
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Zero):
        return sort.zero()
    if isinstance(f, One):
        return sort.one()
    if isinstance(f, Quote):
        from atomless.nso import lta_of
        return lta_of(f.body)
    raise TypeError(f)


def evaluate(f: BoolFun, env: Mapping[str, object], sort: Optional[Sort] = None):
    """Fold ``f`` to a carrier value, reading variables from ``env``."""
    sort = f.sort or sort or B2

    def go(t: BoolFun):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise KeyError(f"missing assignment for {t.name}") from None
        if isinstance(t, Comp):
            return ~go(t.arg)
        if isinstance(t, Meet):
            return go(t.left) & go(t.right)
        if isinstance(t, Join):
            return go(t.left) | go(t.right)
        if isinstance(t, Xor):
            return go(t.left) ^ go(t.right)
        return _leaf_value(t, sort)

    return go(f)


def eval_binary(f: BoolFun, bits: Mapping[str, int], sort: Optional[Sort] = None):
    """Value of ``f`` at a 0/1 assignment of its variables."""
    sort = f.sort or sort or B2
    missing = f.variables() - set(bits)
    if missing:
        raise KeyError(f"missing assignment for {sorted(missing)}")
    env = {v: (sort.one() if bits[v] else sort.zero()) for v in f.variables()}
    return evaluate(f, env, sort)


def substitute(f: BoolFun, name: str, g: BoolFun) -> BoolFun:
    """Replace every occurrence of variable ``name`` in ``f`` by ``g``."""
    var_sort = f.var_sorts.get(name)
    if var_sort is not None and g.sort is not None and g.sort != var_sort:
        raise SortError(f"cannot substitute a {g.sort} term for {name}:{var_sort}")

    def go(t: BoolFun) -> BoolFun:
        if isinstance(t, Var):
            return g if t.name == name else t
        if isinstance(t, Comp):
            return Comp(go(t.arg))
        if isinstance(t, _Binary):
            return type(t)(go(t.left), go(t.right))
        return t

    return go(f)


def simplify(f: BoolFun) -> BoolFun:
    """Best-effort constant folding on the term tree."""
    if isinstance(f, Comp):
        a = simplify(f.arg)
        if isinstance(a, Zero):
            return ONE
        if isinstance(a, One):
            return ZERO
        if isinstance(a, Comp):
            return a.arg
        return Comp(a)
    if isinstance(f, _Binary):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(f, Meet):
            if isinstance(a, Zero) or isinstance(b, Zero):
                return ZERO
            if isinstance(a, One):
                return b
            if isinstance(b, One):
                return a
            if a == b:
                return a
        elif isinstance(f, Join):
            if isinstance(a, One) or isinstance(b, One):
                return ONE
            if isinstance(a, Zero):
                return b
            if isinstance(b, Zero):
                return a
            if a == b:
                return a
        else:
            if isinstance(a, Zero):
                return b
            if isinstance(b, Zero):
                return a
            if a == b:
                return ZERO
            if isinstance(a, One):
                return simplify(Comp(b))
            if isinstance(b, One):
                return simplify(Comp(a))
        return type(f)(a, b)
    return f


# ---------------------------------------------------------------------------
# normal forms

@dataclass(frozen=True)
class MintermNF:
    """``f(X) = U_A c_A X^A`` stored as a dense table.

    ``table[m]`` is ``c_A`` for the bit vector ``A`` whose bit ``i`` is
    ``(m >> i) & 1``, paired with ``variables[i]``.  Variables are sorted.
    """

    sort: Sort
    variables: tuple[str, ...]
    table: tuple

    def __post_init__(self):
        if len(self.table) != 1 << len(self.variables):
            raise ValueError("table size does not match variable count")

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, sort: Sort, value) -> "MintermNF":
        return cls(sort, (), (value,))

    @classmethod
    def zero(cls, sort: Sort) -> "MintermNF":
        return cls(sort, (), (sort.zero(),))

    @classmethod
    def one(cls, sort: Sort) -> "MintermNF":
        return cls(sort, (), (sort.one(),))

    @classmethod
    def var(cls, sort: Sort, name: str) -> "MintermNF":
        return cls(sort, (name,), (sort.zero(), sort.one()))

    # -- structure ------------------------------------------------------
    @property
    def is_ground(self) -> bool:
        return not self.variables

    @property
    def value(self):
        if self.variables:
            raise ValueError("not a ground function")
        return self.table[0]

    @property
    def coefficients(self) -> dict[tuple[int, ...], object]:
        n = len(self.variables)
        return {tuple((m >> i) & 1 for i in range(n)): c
                for m, c in enumerate(self.table) if not c.is_zero()}

    def extend(self, variables) -> "MintermNF":
        """Re-express over a superset of the current variables (sorted)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        try:
            src = [pos[v] for v in self.variables]
        except KeyError as e:
            raise ValueError(f"{e.args[0]} missing from extension") from None
        table = []
        for m in range(1 << len(variables)):
            k = 0
            for j, i in enumerate(src):
                k |= ((m >> i) & 1) << j
            table.append(self.table[k])
        return MintermNF(self.sort, variables, tuple(table))

    def _aligned(self, other: "MintermNF"):
        if self.sort != other.sort:
            raise SortError(f"cannot combine {self.sort} and {other.sort} functions")
        if self.variables == other.variables:
            return self, other
        vs = tuple(sorted(set(self.variables) | set(other.variables)))
        return self.extend(vs), other.extend(vs)

    def _zip(self, other: "MintermNF", op) -> "MintermNF":
        a, b = self._aligned(other)
        return MintermNF(a.sort, a.variables, tuple(op(x, y) for x, y in zip(a.table, b.table)))

    def __and__(self, other):
        return self._zip(other, lambda x, y: x & y)

    def __or__(self, other):
        return self._zip(other, lambda x, y: x | y)

    def __xor__(self, other):
        return self._zip(other, lambda x, y: x ^ y)

    def __invert__(self):
        return MintermNF(self.sort, self.variables, tuple(~c for c in self.table))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.table)

    def leq(self, other: "MintermNF") -> bool:
        return (self & ~other).is_zero()

    def equivalent(self, other: "MintermNF") -> bool:
        return (self ^ other).is_zero()

    def depends_on(self, name: str) -> bool:
        if name not in self.variables:
            return False
        bit = 1 << self.variables.index(name)
        return any(self.table[m] != self.table[m | bit]
                   for m in range(len(self.table)) if not m & bit)

    def restrict(self, name: str, bit: int) -> "MintermNF":
        """Partial evaluation ``f[name := bit]``; other variables stay symbolic."""
        if name not in self.variables:
            return self
        i = self.variables.index(name)
        keep = self.variables[:i] + self.variables[i + 1:]
        table = []
        low_mask = (1 << i) - 1
        for m in range(1 << len(keep)):
            full = (m & low_mask) | ((m >> i) << (i + 1)) | (bit << i)
            table.append(self.table[full])
        return MintermNF(self.sort, keep, tuple(table))

    def reduce(self) -> "MintermNF":
        """Drop variables the function does not depend on (structural check)."""
        out = self
        for v in self.variables:
            if not out.depends_on(v):
                out = out.restrict(v, 0)
        return out

    def substitute(self, name: str, g: "MintermNF") -> "MintermNF":
        """``f[name := g] = g f(1) U g' f(0)`` (Boole's expansion)."""
        if name not in self.variables:
            return self
        return (g & self.restrict(name, 1)) | (~g & self.restrict(name, 0))

    def assign(self, name: str, value) -> "MintermNF":
        return self.substitute(name, MintermNF.constant(self.sort, value))

    def evaluate(self, env: Mapping[str, object]):
        out = self
        for v in self.variables:
            out = out.assign(v, env[v])
        return out.value

    def rename(self, mapping: Mapping[str, str]) -> "MintermNF":
        new = [mapping.get(v, v) for v in self.variables]
        if len(set(new)) != len(new):
            raise ValueError("renaming merges variables")
        order = sorted(range(len(new)), key=lambda i: new[i])
        renamed = MintermNF(self.sort, tuple(new), self.table)
        if order == list(range(len(new))):
            return renamed
        # reorder bits to keep variables sorted
        vs = tuple(new[i] for i in order)
        table = []
        for m in range(len(self.table)):
            k = 0
            for j, i in enumerate(order):
                k |= ((m >> j) & 1) << i
            table.append(self.table[k])
        return MintermNF(self.sort, vs, tuple(table))

    # -- back to terms --------------------------------------------------
    def to_boolfun(self) -> BoolFun:
        """A compact term for this function: equal coefficients share a cover."""
        n = len(self.variables)
        groups: dict[object, list[int]] = {}
        for m, c in enumerate(self.table):
            if not c.is_zero():
                groups.setdefault(c, []).append(m)
        terms = []
        one = self.sort.one()
        for c, masks in groups.items():
            cover = _cover(masks, n)
            products = []
            for care, bits in cover:
                lits = []
                for i, v in enumerate(self.variables):
                    if care >> i & 1:
                        x = Var(v, self.sort)
                        lits.append(x if bits >> i & 1 else Comp(x))
                products.append(meet_all(lits))
            body = join_all(products)
            if c == one:
                terms.append(body)
            elif isinstance(body, One):
                terms.append(Const(c))
            else:
                terms.append(Meet(Const(c), body))
        return join_all(terms)

    def __str__(self) -> str:
        return str(self.to_boolfun())


def _cover(minterms: list[int], n: int) -> list[tuple[int, int]]:
    """Prime-implicant cover (care mask, bit values) of a set of minterms."""
    full = (1 << n) - 1
    current = {(full, m) for m in minterms}
    primes: set[tuple[int, int]] = set()
    while current:
        merged = set()
        used = set()
        items = sorted(current)
        for i, (c1, b1) in enumerate(items):
            for c2, b2 in items[i + 1:]:
                if c1 != c2:
                    continue
                diff = b1 ^ b2
                if diff and not diff & (diff - 1):
                    merged.add((c1 & ~diff, b1 & ~diff))
                    used.add((c1, b1))
                    used.add((c2, b2))
        primes |= current - used
        current = merged
    targets = set(minterms)
    chosen = []

    def covers(imp, m):
        care, bits = imp
        return m & care == bits

    ranked = sorted(primes, key=lambda p: (bin(p[0]).count("1"), -p[0], p[1]))
    while targets:
        best = max(ranked, key=lambda p: sum(covers(p, m) for m in targets))
        chosen.append(best)
        targets = {m for m in targets if not covers(best, m)}
    return sorted(chosen, key=lambda p: (-p[1] & p[0], p))


def to_minterm_nf(f: BoolFun, variables=None, sort: Optional[Sort] = None) -> MintermNF:
    """Minterm normal form of ``f`` over ``variables`` (default: its own, sorted)."""
    sort = f.sort or sort or B2
    if variables is None:
        variables = sorted(f.variables())
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    size = 1 << len(variables)
    memo: dict[int, list] = {}

    def go(t: BoolFun) -> list:
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Var):
            if t.var_sort != sort:
                raise SortError(f"variable {t.name} has sort {t.var_sort}, expected {sort}")
            i = index[t.name]
            z, o = sort.zero(), sort.one()
            out = [o if m >> i & 1 else z for m in range(size)]
        elif isinstance(t, Comp):
            out = [~c for c in go(t.arg)]
        elif isinstance(t, Meet):
            out = [a & b for a, b in zip(go(t.left), go(t.right))]
        elif isinstance(t, Join):
            out = [a | b for a, b in zip(go(t.left), go(t.right))]
        elif isinstance(t, Xor):
            out = [a ^ b for a, b in zip(go(t.left), go(t.right))]
        else:
            out = [_leaf_value(t, sort)] * size
        memo[key] = out
        return out

    return MintermNF(sort, variables, tuple(go(f)))


def is_identically_zero(f: BoolFun, sort: Optional[Sort] = None) -> bool:
    """True iff ``f(A) = 0`` at every bit vector ``A``."""
    return to_minterm_nf(f, sort=sort).is_zero()


def functions_equal(f: BoolFun, g: BoolFun, sort: Optional[Sort] = None) -> bool:
    return is_identically_zero(Xor(f, g), sort=sort)


@dataclass(frozen=True)
class BooleNF:
    """``f = high & x | low & x'`` with ``high = f(1)``, ``low = f(0)``."""

    x: str
    high: BoolFun
    low: BoolFun

    def to_boolfun(self, sort: Sort) -> BoolFun:
        v = Var(self.x, sort)
        return Join(Meet(self.high, v), Meet(self.low, Comp(v)))


def boole_nf(f: BoolFun, x: str) -> BooleNF:
    return BooleNF(x, simplify(substitute(f, x, ONE)), simplify(substitute(f, x, ZERO)))


def algebraic_nf(f: BoolFun, x: str) -> tuple[BoolFun, BoolFun]:
    """``(a, b)`` with ``f = a x + b``: ``a = f(1) + f(0)``, ``b = f(0)``."""
    nf = boole_nf(f, x)
    return simplify(Xor(nf.high, nf.low)), nf.low


def all_bit_vectors(n: int):
    return product((0, 1), repeat=n)
