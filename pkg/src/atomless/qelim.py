"""Quantifier elimination over atomless Boolean algebras.

The workhorse is :func:`eliminate_exists_clause`: for one DNF clause
``f(x) = 0 && g_1(x) != 0 && ...`` the existential over ``x`` is equivalent to

    f(0) f(1) = 0  &&  /\\_i  f'(1) g_i(1) | f'(0) g_i(0) != 0

whenever the carrier is atomless.  Everything else here is plumbing around it:
DNF bookkeeping, pruning, ground decision, and witness extraction.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from atomless.algebra import B2, T, Sort, SortError, split
from atomless.boolfun import BoolFun, Const, MintermNF, Xor, evaluate, substitute, to_minterm_nf
from atomless.firstorder import (
    FALSE, TRUE, And, Clause, Eq0, Exists, Forall, Formula, Neq0, Not, Or, Truth,
    conj, dedupe, dnf_product, dnf_to_formula, disj, forall_many, is_quantifier_free,
)


class InconsistentError(ValueError):
    """``f(x) = 0`` has no solution: ``f(0) f(1) != 0``."""


class InfeasibleError(ValueError):
    """Minterm lower bounds that overlap across distinct minterms."""

    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"bounds for minterms {pair[0]} and {pair[1]} are not disjoint")


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


# ---------------------------------------------------------------------------
# Boole's consistency condition and solution intervals

def consistency_eq(f: BoolFun, variables: Iterable[str]) -> Formula:
    """Quantifier-free condition equivalent to ``ex X. f(X) = 0``: ``/\\_A f(A) = 0``."""
    nf = to_minterm_nf(f)
    for v in variables:
        nf = nf.restrict(v, 0) & nf.restrict(v, 1)
    return Eq0(nf.reduce().to_boolfun())


def consistency_neq(f: BoolFun, variables: Iterable[str]) -> Formula:
    """Dual: ``ex X. f(X) != 0`` iff ``\\/_A f(A) != 0``."""
    nf = to_minterm_nf(f)
    for v in variables:
        nf = nf.restrict(v, 0) | nf.restrict(v, 1)
    return Neq0(nf.reduce().to_boolfun())


@dataclass(frozen=True)
class SolutionInterval:
    """All solutions of ``f(x) = 0``: ``lo <= x <= hi``."""

    lo: BoolFun
    hi: BoolFun

    def contains(self, x, env: Mapping[str, object] = {}) -> bool:
        lo = evaluate(self.lo, env, x.sort)
        hi = evaluate(self.hi, env, x.sort)
        return lo.leq(x) and x.leq(hi)


def solution_interval(f: BoolFun, x: str) -> SolutionInterval:
    nf = to_minterm_nf(f)
    high, low = nf.restrict(x, 1), nf.restrict(x, 0)
    if not (high & low).is_zero():
        raise InconsistentError(f"f(0) f(1) != 0 for {x}")
    return SolutionInterval(low.reduce().to_boolfun(), (~high).reduce().to_boolfun())


def reproductive_solution(f: BoolFun, x: str, t: BoolFun) -> BoolFun:
    """``t + f(t)``: ranges over exactly the solutions of ``f(x) = 0`` as ``t`` varies."""
    return Xor(t, substitute(f, x, t))


# ---------------------------------------------------------------------------
# minterm lower bounds

def witness_minterm_bounds(constraints: Sequence[tuple[Sequence[int], object]],
                           variables: Sequence[str], sort: Optional[Sort] = None) -> dict:
    """Find ``X`` with ``X^A >= b`` for each ``(A, b)``.

    Bounds for the same ``A`` are merged by join.  Feasible iff the merged
    bounds are pairwise disjoint; then ``x_j`` is the join of the bounds whose
    ``A`` has bit ``j`` set.  Raises :class:`InfeasibleError` otherwise.
    """
    merged: dict[tuple[int, ...], object] = {}
    for bits, b in constraints:
        bits = tuple(int(v) for v in bits)
        if len(bits) != len(variables):
            raise ValueError("bit vector length does not match the variables")
        merged[bits] = merged[bits] | b if bits in merged else b
    items = list(merged.items())
    for i, (a1, b1) in enumerate(items):
        for a2, b2 in items[i + 1:]:
            if not (b1 & b2).is_zero():
                raise InfeasibleError((a1, a2))
    if sort is None:
        if not items:
            raise ValueError("sort is needed when there are no constraints")
        sort = items[0][1].sort
    out = {}
    for j, v in enumerate(variables):
        acc = sort.zero()
        for bits, b in items:
            if bits[j]:
                acc = acc | b
        out[v] = acc
    return out


# ---------------------------------------------------------------------------
# clause-level elimination

def _check_atomless(sort: Sort) -> None:
    if not sort.atomless:
        raise SortError(f"atomless elimination does not apply to sort {sort}")


def eliminate_in_clause(clause: Clause, x: str, sort: Sort) -> Optional[Clause]:
    """``ex x. clause`` as a single clause, or ``None`` when it is false."""
    _check_atomless(sort)
    f = clause.positive_at(sort)
    f1, f0 = f.restrict(x, 1), f.restrict(x, 0)
    positives = [p for p in clause.positives if p.sort != sort]
    positives.append(f1 & f0)
    nf1, nf0 = ~f1, ~f0
    negatives = []
    for g in clause.negatives:
        if g.sort != sort or x not in g.variables:
            negatives.append(g)
        else:
            negatives.append((nf1 & g.restrict(x, 1)) | (nf0 & g.restrict(x, 0)))
    return Clause.make(positives, negatives)


def expand_two_element(clause: Clause, x: str) -> list[Clause]:
    """``ex x:B2. clause`` as ``clause[x:=0] || clause[x:=1]``."""
    out = []
    for bit in (0, 1):
        c = Clause.make([p.restrict(x, bit) for p in clause.positives],
                        [g.restrict(x, bit) for g in clause.negatives])
        if c is not None:
            out.append(c)
    return dedupe(out)


def _eliminate_clause(clause: Clause, x: str, sort: Sort) -> list[Clause]:
    if x not in clause.variables():
        return [clause]
    if sort == B2:
        return expand_two_element(clause, x)
    c = eliminate_in_clause(clause, x, sort)
    return [c] if c is not None else []


def eliminate_exists_clause(clause: Clause, x: str, sort: Sort) -> Formula:
    """Quantifier-free formula equivalent to ``ex x. clause`` (atomless ``sort``)."""
    _check_atomless(sort)
    c = eliminate_in_clause(clause, x, sort)
    return FALSE if c is None else c.to_formula()


def _clause_sorts(clause: Clause) -> dict[str, Sort]:
    out = {}
    for nf in clause.positives + clause.negatives:
        for v in nf.variables:
            out[v] = nf.sort
    return out


@lru_cache(maxsize=65536)
def clause_satisfiable(clause: Clause) -> bool:
    """Existential closure of the clause decided by eliminating every variable."""
    pending = [clause]
    for v, sort in sorted(_clause_sorts(clause).items()):
        nxt = []
        for c in pending:
            nxt.extend(_eliminate_clause(c, v, sort))
        pending = dedupe(nxt)
        if not pending:
            return False
    return bool(pending)


def _subsumes(a: Clause, b: Clause) -> bool:
    """True when ``b`` implies ``a`` by a pointwise check."""
    for p in a.positives:
        if not p.leq(b.positive_at(p.sort)):
            return False
    for g in a.negatives:
        if not any(h.sort == g.sort and h.leq(g) for h in b.negatives):
            return False
    return True


def prune(clauses: Iterable[Clause]) -> list[Clause]:
    """Drop unsatisfiable and subsumed clauses; order is canonical."""
    live = [c for c in dedupe(clauses) if clause_satisfiable(c)]
    if any(not c.positives and not c.negatives for c in live):
        return [Clause.true()]
    live.sort(key=lambda c: (len(c.positives) + len(c.negatives), str(c)))
    kept: list[Clause] = []
    for c in live:
        if not any(_subsumes(k, c) for k in kept):
            kept.append(c)
    kept.sort(key=str)
    return kept


def negate_dnf(clauses: Sequence[Clause]) -> list[Clause]:
    result = [Clause.true()]
    for c in clauses:
        options = [Clause.make([], [p]) for p in c.positives]
        options += [Clause.make([g], []) for g in c.negatives]
        result = prune(dnf_product(result, [o for o in options if o is not None]))
        if not result:
            break
    return result


def qe_dnf(phi: Formula) -> list[Clause]:
    """Pruned DNF of a quantifier-free equivalent of ``phi``, innermost quantifier first."""
    if isinstance(phi, Truth):
        return [Clause.true()] if phi.value else []
    if isinstance(phi, (Eq0, Neq0)):
        f = to_minterm_nf(phi.bf, sort=phi.bf.sort or B2).reduce()
        c = Clause.make([f], []) if isinstance(phi, Eq0) else Clause.make([], [f])
        return prune([c] if c is not None else [])
    if isinstance(phi, And):
        acc = [Clause.true()]
        for a in phi.args:
            acc = prune(dnf_product(acc, qe_dnf(a)))
            if not acc:
                break
        return acc
    if isinstance(phi, Or):
        return prune(c for a in phi.args for c in qe_dnf(a))
    if isinstance(phi, Not):
        return negate_dnf(qe_dnf(phi.arg))
    if isinstance(phi, Exists):
        return _exists_dnf(qe_dnf(phi.body), phi.var, phi.sort)
    if isinstance(phi, Forall):
        inner = negate_dnf(qe_dnf(phi.body))
        return negate_dnf(_exists_dnf(inner, phi.var, phi.sort))
    raise TypeError(phi)


def _exists_dnf(clauses: list[Clause], x: str, sort: Sort) -> list[Clause]:
    if sort != B2:
        _check_atomless(sort)
    out = []
    for c in clauses:
        out.extend(_eliminate_clause(c, x, sort))
    return prune(out)


def eliminate_all(phi: Formula) -> Formula:
    """Quantifier-free formula with the same truth function on the free variables."""
    return dnf_to_formula(qe_dnf(phi))


def is_valid(phi: Formula) -> bool:
    """Truth under every assignment of the free variables."""
    return not qe_dnf(Not(phi))


def is_satisfiable(phi: Formula) -> bool:
    return bool(qe_dnf(phi))


def equivalent(phi: Formula, psi: Formula) -> bool:
    return is_valid(Or((And((phi, psi)), And((Not(phi), Not(psi))))))


# ---------------------------------------------------------------------------
# ground decision

def holds(phi: Formula, env: Mapping[str, object]) -> bool:
    """Truth of a quantifier-free formula under a total assignment."""
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Eq0):
        return evaluate(phi.bf, env).is_zero()
    if isinstance(phi, Neq0):
        return not evaluate(phi.bf, env).is_zero()
    if isinstance(phi, And):
        return all(holds(a, env) for a in phi.args)
    if isinstance(phi, Or):
        return any(holds(a, env) for a in phi.args)
    if isinstance(phi, Not):
        return not holds(phi.arg, env)
    raise ValueError("holds() needs a quantifier-free formula")


def decide_sentence(phi: Formula) -> bool:
    """Truth value of a ground quantifier-free sentence."""
    if phi.free_var_sorts:
        raise ValueError(f"not ground: free variables {sorted(phi.free_var_sorts)}")
    return holds(phi, {})


def instantiate(phi: Formula, assignment: Mapping[str, object]) -> Formula:
    from atomless.firstorder import substitute_formula
    for name, value in assignment.items():
        phi = substitute_formula(phi, name, Const(value))
    return phi


# ---------------------------------------------------------------------------
# satisfying assignments

def _solve_univariate(clause: Clause, x: str, sort: Sort):
    """A value for ``x`` satisfying a clause whose only variable is ``x``."""
    f = clause.positive_at(sort)
    a = f.restrict(x, 1).value if f.variables else f.value
    b = f.restrict(x, 0).value if f.variables else f.value
    if not (a & b).is_zero():
        return None
    free = ~a & ~b
    demands = []  # (set, polarity): polarity 1 wants z & set != 0, 0 wants set - z != 0
    for g in clause.negatives:
        if g.sort != sort:
            continue
        g1, g0 = g.restrict(x, 1).value, g.restrict(x, 0).value
        if not ((b & g1) | (a & g0)).is_zero():
            continue
        p = free & g1
        if not p.is_zero():
            demands.append((p, 1))
            continue
        q = free & g0
        if q.is_zero():
            return None
        demands.append((q, 0))
    if not demands:
        return b
    users: dict[int, list[int]] = {}
    cells = []
    for mask in range(1 << len(demands)):
        cell = free
        for j, (s, _) in enumerate(demands):
            cell = cell & (s if mask >> j & 1 else ~s)
        cells.append(cell)
    for j, (s, _) in enumerate(demands):
        for mask, cell in enumerate(cells):
            if mask >> j & 1 and not cell.is_zero():
                users.setdefault(mask, []).append(j)
                break
    bounds = []
    for mask, js in sorted(users.items()):
        for j, part in zip(js, split(cells[mask], len(js))):
            bounds.append(((demands[j][1],), part))
    z = witness_minterm_bounds(bounds, ["z"], sort)["z"]
    return b | z


def _assign_clause(clause: Clause, x: str, value) -> Optional[Clause]:
    return Clause.make([p.assign(x, value) if x in p.variables else p for p in clause.positives],
                       [g.assign(x, value) if x in g.variables else g for g in clause.negatives])


def _solve_clause(clause: Clause, order: Sequence[tuple[str, Sort]]) -> Optional[dict]:
    out = {}
    current = clause
    for i, (v, sort) in enumerate(order):
        rest = order[i + 1:]
        if current is None:
            return None
        if v not in current.variables():
            out[v] = sort.zero()
            continue
        if sort == B2:
            chosen = None
            for value in (sort.zero(), sort.one()):
                cand = _assign_clause(current, v, value)
                if cand is not None and clause_satisfiable(cand):
                    chosen = value
                    break
            if chosen is None:
                return None
            out[v] = chosen
            current = _assign_clause(current, v, chosen)
            continue
        projected = [current]
        for w, wsort in rest:
            projected = [c2 for c in projected for c2 in _eliminate_clause(c, w, wsort)]
        value = None
        for c in projected:
            value = _solve_univariate(c, v, sort)
            if value is not None:
                break
        if value is None:
            return None
        out[v] = value
        current = _assign_clause(current, v, value)
    return out if current is not None else None


def find_assignment(phi: Formula, variables: Optional[Iterable[str]] = None) -> Optional[dict]:
    """A satisfying assignment of a quantifier-free formula, or ``None`` if unsat.

    Clauses are tried in canonical order.  Within a clause, variables are
    solved in sorted order: each is projected by eliminating the later ones,
    then placed in its solution interval and refined to meet the
    inequations with disjoint split parts.
    """
    if not is_quantifier_free(phi):
        raise ValueError("find_assignment needs a quantifier-free formula")
    sorts = dict(phi.free_var_sorts)
    if variables is not None:
        for v in variables:
            sorts.setdefault(v, None)
    order = sorted(sorts.items())
    for clause in qe_dnf(phi):
        csorts = _clause_sorts(clause)
        full = [(v, s or csorts.get(v) or T) for v, s in order]
        for _, s in full:
            if not (s.atomless or s == B2):
                raise SortError(f"no witness extraction for sort {s}")
        result = _solve_clause(clause, full)
        if result is None:
            continue
        if not decide_sentence(instantiate(phi, result)):
            raise InvariantError(f"extracted assignment fails verification: {result}")
        return result
    return None
