"""First-order formulas over the Boolean-algebra signature.

Atoms are ``f = 0`` and ``f != 0``; an equation ``f = g`` is stored as
``f + g = 0``.  Quantifier-free matrices convert to a list of ``Clause``
objects (a DNF) whose positive parts are squeezed into one function per sort.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import count
from typing import Iterable, Optional

from atomless.algebra import B2, Sort, SortError
from atomless.boolfun import (
    ONE, ZERO, BoolFun, Comp, Const, MintermNF, One, Var, Zero, meet_all,
    substitute, to_minterm_nf,
)


class QuantifierError(ValueError):
    """A quantifier-free formula was required."""


class Formula:
    def __and__(self, other: "Formula") -> "Formula":
        return conj([self, other])

    def __or__(self, other: "Formula") -> "Formula":
        return disj([self, other])

    def __invert__(self) -> "Formula":
        return Not(self)

    def children(self) -> tuple["Formula", ...]:
        return ()

    @cached_property
    def free_var_sorts(self) -> dict[str, Sort]:
        out: dict[str, Sort] = {}
        for c in self.children():
            _merge_sorts(out, c.free_var_sorts)
        return out

    def __str__(self) -> str:
        from atomless.frontend.printer import format_formula
        return format_formula(self)


def _merge_sorts(into: dict[str, Sort], more: dict[str, Sort]) -> None:
    for name, sort in more.items():
        old = into.setdefault(name, sort)
        if old != sort:
            raise SortError(f"variable {name} used at sorts {old} and {sort}")


@dataclass(frozen=True)
class Truth(Formula):
    value: bool

    @cached_property
    def free_var_sorts(self) -> dict[str, Sort]:
        return {}


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Eq0(Formula):
    bf: BoolFun

    @cached_property
    def free_var_sorts(self) -> dict[str, Sort]:
        return dict(self.bf.var_sorts)


@dataclass(frozen=True)
class Neq0(Formula):
    bf: BoolFun

    @cached_property
    def free_var_sorts(self) -> dict[str, Sort]:
        return dict(self.bf.var_sorts)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: Sort
    body: Formula

    def children(self):
        return (self.body,)

    @cached_property
    def free_var_sorts(self) -> dict[str, Sort]:
        inner = dict(self.body.free_var_sorts)
        bound = inner.pop(self.var, self.sort)
        if bound != self.sort:
            raise SortError(f"{self.var} bound at {self.sort} but used at {bound}")
        return inner


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: Sort
    body: Formula

    def children(self):
        return (self.body,)

    free_var_sorts = Exists.free_var_sorts


# ---------------------------------------------------------------------------
# smart constructors

def _is_zero_term(f: BoolFun) -> bool:
    return isinstance(f, Zero)


def eq(f: BoolFun, g: BoolFun = ZERO) -> Formula:
    """``f = g`` as a single ``= 0`` atom."""
    if _is_zero_term(g):
        return Eq0(f)
    if _is_zero_term(f):
        return Eq0(g)
    return Eq0(f ^ g)


def neq(f: BoolFun, g: BoolFun = ZERO) -> Formula:
    if _is_zero_term(g):
        return Neq0(f)
    if _is_zero_term(f):
        return Neq0(g)
    return Neq0(f ^ g)


def conj(args: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif a == TRUE:
            continue
        elif a == FALSE:
            return FALSE
        else:
            flat.append(a)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(args: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif a == FALSE:
            continue
        elif a == TRUE:
            return TRUE
        else:
            flat.append(a)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def implies(a: Formula, b: Formula) -> Formula:
    return disj([Not(a), b])


def iff(a: Formula, b: Formula) -> Formula:
    return conj([implies(a, b), implies(b, a)])


def exists_many(variables, body: Formula) -> Formula:
    """``ex v1. ex v2. ... body`` for ``(name, sort)`` pairs, first outermost."""
    for name, sort in reversed(list(variables)):
        body = Exists(name, sort, body)
    return body


def forall_many(variables, body: Formula) -> Formula:
    for name, sort in reversed(list(variables)):
        body = Forall(name, sort, body)
    return body


# ---------------------------------------------------------------------------
# variables and substitution

def free_vars(phi: Formula) -> set[str]:
    return set(phi.free_var_sorts)


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Exists, Forall)):
        return False
    return all(is_quantifier_free(c) for c in phi.children())


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    for i in count(1):
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand


def substitute_formula(phi: Formula, name: str, g: BoolFun) -> Formula:
    """Capture-avoiding ``phi[name := g]``."""
    sort = phi.free_var_sorts.get(name)
    if sort is not None and g.sort is not None and g.sort != sort:
        raise SortError(f"cannot substitute a {g.sort} term for {name}:{sort}")
    g_vars = set(g.var_sorts)

    def go(p: Formula) -> Formula:
        if isinstance(p, Eq0):
            return Eq0(substitute(p.bf, name, g))
        if isinstance(p, Neq0):
            return Neq0(substitute(p.bf, name, g))
        if isinstance(p, And):
            return And(tuple(go(a) for a in p.args))
        if isinstance(p, Or):
            return Or(tuple(go(a) for a in p.args))
        if isinstance(p, Not):
            return Not(go(p.arg))
        if isinstance(p, (Exists, Forall)):
            if p.var == name or name not in p.body.free_var_sorts:
                return p
            var, body = p.var, p.body
            if var in g_vars:
                taken = g_vars | set(body.free_var_sorts) | {name}
                new = fresh_name(var, taken)
                body = substitute_formula(body, var, Var(new, p.sort))
                var = new
            return type(p)(var, p.sort, go(body))
        return p

    return go(phi)


def rename_free(phi: Formula, mapping: dict[str, str]) -> Formula:
    """Simultaneous renaming of free variables (sorts are kept)."""
    sorts = phi.free_var_sorts
    tmp = {}
    for i, old in enumerate(mapping):
        if old in sorts:
            t = f"__ren{i}"
            phi = substitute_formula(phi, old, Var(t, sorts[old]))
            tmp[t] = (mapping[old], sorts[old])
    for t, (new, sort) in tmp.items():
        phi = substitute_formula(phi, t, Var(new, sort))
    return phi


# ---------------------------------------------------------------------------
# normal forms

def to_nnf(phi: Formula) -> Formula:
    """Push negations to the atoms; quantifiers are kept."""

    def pos(p: Formula) -> Formula:
        if isinstance(p, Not):
            return neg(p.arg)
        if isinstance(p, And):
            return conj(pos(a) for a in p.args)
        if isinstance(p, Or):
            return disj(pos(a) for a in p.args)
        if isinstance(p, (Exists, Forall)):
            return type(p)(p.var, p.sort, pos(p.body))
        return p

    def neg(p: Formula) -> Formula:
        if isinstance(p, Truth):
            return Truth(not p.value)
        if isinstance(p, Eq0):
            return Neq0(p.bf)
        if isinstance(p, Neq0):
            return Eq0(p.bf)
        if isinstance(p, Not):
            return pos(p.arg)
        if isinstance(p, And):
            return disj(neg(a) for a in p.args)
        if isinstance(p, Or):
            return conj(neg(a) for a in p.args)
        if isinstance(p, Exists):
            return Forall(p.var, p.sort, neg(p.body))
        if isinstance(p, Forall):
            return Exists(p.var, p.sort, neg(p.body))
        raise TypeError(p)

    return pos(phi)


def atom_nf(f: BoolFun) -> MintermNF:
    """Minterm NF of an atom's function, with irrelevant variables dropped."""
    return to_minterm_nf(f, sort=f.sort or B2).reduce()


@dataclass(frozen=True)
class Clause:
    """``positive_s = 0`` for each sort ``s`` and ``negative_i != 0`` for each ``i``.

    Build with :meth:`make`, which squeezes the positives and decides ground
    atoms; it returns ``None`` for a clause that is false outright.
    """

    positives: tuple[MintermNF, ...]
    negatives: tuple[MintermNF, ...]

    @staticmethod
    def make(positives: Iterable[MintermNF], negatives: Iterable[MintermNF]) -> Optional["Clause"]:
        by_sort: dict[Sort, MintermNF] = {}
        for p in positives:
            by_sort[p.sort] = by_sort[p.sort] | p if p.sort in by_sort else p
        squeezed = []
        for sort in sorted(by_sort, key=lambda s: s.name):
            p = by_sort[sort].reduce()
            if p.is_zero():
                continue
            if p.is_ground:
                return None
            squeezed.append(p)
        kept: dict[MintermNF, None] = {}
        for g in negatives:
            g = g.reduce()
            if g.is_zero():
                return None
            if g.is_ground:
                continue
            kept[g] = None
        negs = tuple(sorted(kept, key=_nf_key))
        return Clause(tuple(squeezed), negs)

    @staticmethod
    def true() -> "Clause":
        return Clause((), ())

    @property
    def positive(self) -> Optional[MintermNF]:
        """The squeezed positive part when the clause is single-sorted."""
        if len(self.positives) > 1:
            raise SortError("clause has positives at several sorts")
        return self.positives[0] if self.positives else None

    def positive_at(self, sort: Sort) -> MintermNF:
        for p in self.positives:
            if p.sort == sort:
                return p
        return MintermNF.zero(sort)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.positives + self.negatives:
            out.update(p.variables)
        return out

    def conjoin(self, other: "Clause") -> Optional["Clause"]:
        return Clause.make(self.positives + other.positives, self.negatives + other.negatives)

    def to_formula(self) -> Formula:
        atoms = [Eq0(p.to_boolfun()) for p in self.positives]
        atoms += [Neq0(g.to_boolfun()) for g in self.negatives]
        return conj(atoms)

    def __str__(self) -> str:
        return str(self.to_formula())


def _nf_key(nf: MintermNF):
    return (nf.sort.name, nf.variables, str(nf))


def _atom_clauses(p: Formula) -> list[Clause]:
    if isinstance(p, Eq0):
        c = Clause.make([atom_nf(p.bf)], [])
    else:
        c = Clause.make([], [atom_nf(p.bf)])
    return [c] if c is not None else []


def dnf_product(left: list[Clause], right: list[Clause]) -> list[Clause]:
    out = []
    for a in left:
        for b in right:
            c = a.conjoin(b)
            if c is not None:
                out.append(c)
    return dedupe(out)


def dedupe(clauses: Iterable[Clause]) -> list[Clause]:
    return list(dict.fromkeys(clauses))


def to_dnf_matrix(phi: Formula) -> list[Clause]:
    """DNF of a quantifier-free formula; the empty list is ``false``."""

    def go(p: Formula) -> list[Clause]:
        if isinstance(p, Truth):
            return [Clause.true()] if p.value else []
        if isinstance(p, (Eq0, Neq0)):
            return _atom_clauses(p)
        if isinstance(p, And):
            acc = [Clause.true()]
            for a in p.args:
                acc = dnf_product(acc, go(a))
                if not acc:
                    break
            return acc
        if isinstance(p, Or):
            return dedupe(c for a in p.args for c in go(a))
        raise QuantifierError("quantifier inside a matrix passed to to_dnf_matrix")

    if not is_quantifier_free(phi):
        raise QuantifierError("to_dnf_matrix needs a quantifier-free formula")
    return go(to_nnf(phi))


def dnf_to_formula(clauses: Iterable[Clause]) -> Formula:
    return disj(c.to_formula() for c in clauses)


def _minterm_atoms(nf: MintermNF) -> list[BoolFun]:
    """One ``c X^A`` term per nonzero coefficient."""
    out = []
    one = nf.sort.one()
    for bits, c in nf.coefficients.items():
        lits = []
        for v, b in zip(nf.variables, bits):
            x = Var(v, nf.sort)
            lits.append(x if b else Comp(x))
        term = meet_all(lits)
        if c != one:
            term = Const(c) if isinstance(term, One) else Const(c) & term
        out.append(term)
    return out


def to_minterm_form(phi: Formula) -> Formula:
    """Rewrite each atom into atoms ``c X^A = 0`` using ``a|b = 0 <-> a = 0 && b = 0``."""
    if not is_quantifier_free(phi):
        raise QuantifierError("to_minterm_form needs a quantifier-free formula")

    def go(p: Formula) -> Formula:
        if isinstance(p, Eq0):
            return conj(Eq0(t) for t in _minterm_atoms(to_minterm_nf(p.bf, sort=p.bf.sort or B2)))
        if isinstance(p, Neq0):
            return disj(Neq0(t) for t in _minterm_atoms(to_minterm_nf(p.bf, sort=p.bf.sort or B2)))
        if isinstance(p, And):
            return conj(go(a) for a in p.args)
        if isinstance(p, Or):
            return disj(go(a) for a in p.args)
        if isinstance(p, Not):
            inner = go(p.arg)
            if isinstance(inner, Truth):
                return Truth(not inner.value)
            return Not(inner)
        return p

    return go(phi)


def is_minterm_atom(f: BoolFun) -> bool:
    """True for ``c X^A`` shapes: an optional constant meet a product of literals."""
    if isinstance(f, (Var, Const, One)):
        return True
    if isinstance(f, Comp):
        return isinstance(f.arg, Var)
    from atomless.boolfun import Meet
    if isinstance(f, Meet):
        return is_minterm_atom(f.left) and is_minterm_atom(f.right)
    return False


def atoms(phi: Formula) -> list[Formula]:
    if isinstance(phi, (Eq0, Neq0)):
        return [phi]
    return [a for c in phi.children() for a in atoms(c)]
