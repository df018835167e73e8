"""Guarded-successor temporal specifications over input/output streams.

A spec combines temporal literals with ``&&``, ``||`` and ``!``:

* ``always psi``: ``psi`` holds at every time ``t``;
* ``sometimes psi``: ``psi`` holds at some time ``t``.

``psi`` is a Boolean-algebra formula over stream terms ``s[t]``, ``s[t-1]``, ...
Normalization turns the spec into clauses, each a universal core plus at most
one liveness obligation tracked by a hidden two-element flag stream.  The
semantic normal form of a core is its fixed point ``phi_inf`` under

    phi_0 = core,   phi_n = core && all x[t+1]. ex y[t+1]. shift(phi_{n-1}),

the set of windows from which an infinite continuation exists.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from atomless.algebra import B2, T, Sort
from atomless.boolfun import Const, Join, Var, Comp, join_all
from atomless.firstorder import (
    TRUE, Eq0, Exists, Formula, Neq0, Not, conj, disj, exists_many, forall_many, iff,
    implies, rename_free, substitute_formula,
)
from atomless.qelim import InvariantError, eliminate_all, find_assignment, is_valid
from atomless.recurrence import FixedPointResult, RecurrenceDef, is_monotone, iterate


class MalformedSpecError(ValueError):
    """Stream terms with non-literal offsets, unknown streams, or similar."""


class SignatureError(ValueError):
    """Two specs disagree on their stream declarations."""


class ExecutionError(RuntimeError):
    """No output satisfies the spec at the current step."""


# ---------------------------------------------------------------------------
# streams and window variables

@dataclass(frozen=True)
class Stream:
    name: str
    sort: Sort = T
    direction: str = "out"  # "in" or "out"
    hidden: bool = False


_TERM = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)\[t(?:(?P<sign>[+-])(?P<off>[0-9]+))?\]$")


def window_var(stream: str, offset: int) -> str:
    """Name of ``stream`` at time ``t - offset`` (negative offsets look ahead)."""
    if offset == 0:
        return f"{stream}[t]"
    if offset > 0:
        return f"{stream}[t-{offset}]"
    return f"{stream}[t+{-offset}]"


def parse_window_var(name: str) -> Optional[tuple[str, int]]:
    m = _TERM.match(name)
    if not m:
        return None
    off = int(m.group("off") or 0)
    return m.group("name"), (-off if m.group("sign") == "+" else off)


def max_offset(phi: Formula) -> int:
    offs = [parse_window_var(v)[1] for v in phi.free_var_sorts if parse_window_var(v)]
    return max(offs, default=0)


def shift_formula(phi: Formula, by: int) -> Formula:
    """Move every stream term ``by`` steps into the past."""
    mapping = {}
    for v in phi.free_var_sorts:
        parsed = parse_window_var(v)
        if parsed:
            mapping[v] = window_var(parsed[0], parsed[1] + by)
    return rename_free(phi, mapping)


# ---------------------------------------------------------------------------
# surface AST

class GsFormula:
    def __str__(self) -> str:
        return format_gs(self)


@dataclass(frozen=True)
class Always(GsFormula):
    body: Formula


@dataclass(frozen=True)
class Sometimes(GsFormula):
    body: Formula


@dataclass(frozen=True)
class GsAnd(GsFormula):
    args: tuple[GsFormula, ...]


@dataclass(frozen=True)
class GsOr(GsFormula):
    args: tuple[GsFormula, ...]


@dataclass(frozen=True)
class GsNot(GsFormula):
    arg: GsFormula


@dataclass(frozen=True)
class GsSpec:
    streams: tuple[Stream, ...]
    formula: GsFormula

    @property
    def inputs(self) -> tuple[Stream, ...]:
        return tuple(s for s in self.streams if s.direction == "in")

    @property
    def outputs(self) -> tuple[Stream, ...]:
        return tuple(s for s in self.streams if s.direction == "out")

    def __str__(self) -> str:
        return format_spec(self)


def _literal_level(g: GsFormula) -> int:
    return {GsOr: 1, GsAnd: 2}.get(type(g), 3)


def format_gs(g: GsFormula, level: int = 0) -> str:
    from atomless.frontend.printer import format_formula
    own = _literal_level(g)
    if isinstance(g, (Always, Sometimes)):
        kw = "always" if isinstance(g, Always) else "sometimes"
        body = format_formula(g.body)
        if not isinstance(g.body, (Eq0, Neq0)):
            body = f"({body})"
        text = f"{kw} {body}"
    elif isinstance(g, GsNot):
        text = "!" + format_gs(g.arg, 3)
    elif isinstance(g, GsAnd):
        text = " && ".join(format_gs(a, 3) for a in g.args)
    else:
        text = " || ".join(format_gs(a, 2) for a in g.args)
    return f"({text})" if own < level else text


def format_spec(spec: GsSpec, show_hidden: bool = True) -> str:
    lines = []
    for s in spec.streams:
        if s.hidden and not show_hidden:
            continue
        lines.append(f"{s.direction} {s.name} : {s.sort.name}")
    lines.append(format_gs(spec.formula))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# normalization

def _nnf(g: GsFormula, negate: bool = False) -> GsFormula:
    if isinstance(g, GsNot):
        return _nnf(g.arg, not negate)
    if isinstance(g, Always):
        return Sometimes(Not(g.body)) if negate else g
    if isinstance(g, Sometimes):
        return Always(Not(g.body)) if negate else g
    args = tuple(_nnf(a, negate) for a in g.args)
    if isinstance(g, GsAnd):
        return GsOr(args) if negate else GsAnd(args)
    return GsAnd(args) if negate else GsOr(args)


def _dnf(g: GsFormula) -> list[list[GsFormula]]:
    if isinstance(g, (Always, Sometimes)):
        return [[g]]
    if isinstance(g, GsOr):
        return [c for a in g.args for c in _dnf(a)]
    acc: list[list[GsFormula]] = [[]]
    for a in g.args:
        acc = [x + y for x in acc for y in _dnf(a)]
    return acc


def _check_terms(phi: Formula, streams: dict[str, Stream]) -> None:
    for v, sort in phi.free_var_sorts.items():
        parsed = parse_window_var(v)
        if parsed is None:
            raise MalformedSpecError(f"{v} is not a stream term with a literal offset")
        if parsed[0] not in streams:
            raise MalformedSpecError(f"unknown stream {parsed[0]}")
        if streams[parsed[0]].sort != sort:
            raise MalformedSpecError(f"{v} used at sort {sort}, declared {streams[parsed[0]].sort}")


def _to_present(phi: Formula) -> Formula:
    """Shift a literal so that its latest stream term sits at ``t``."""
    offs = [parse_window_var(v)[1] for v in phi.free_var_sorts]
    ahead = -min(offs, default=0)
    return shift_formula(phi, ahead) if ahead > 0 else phi


CLOCK = "__r"


@dataclass(frozen=True)
class NormClause:
    """``always core && always flag_definitions && sometimes flag_atom``."""

    core: Formula
    flag_definitions: Formula = TRUE
    flag_atom: Optional[Formula] = None
    hidden: tuple[Stream, ...] = ()
    lookback: int = 1

    @property
    def full_core(self) -> Formula:
        return conj([self.core, self.flag_definitions])

    @property
    def has_flag(self) -> bool:
        return self.flag_atom is not None


@dataclass
class NormalizedSpec:
    streams: tuple[Stream, ...]
    clauses: tuple[NormClause, ...]
    max_steps: Optional[int] = None
    _analysis: dict = field(default_factory=dict, repr=False)

    @property
    def inputs(self) -> tuple[Stream, ...]:
        return tuple(s for s in self.streams if s.direction == "in")

    @property
    def outputs(self) -> tuple[Stream, ...]:
        return tuple(s for s in self.streams if s.direction == "out")

    @property
    def lookback(self) -> int:
        return max((c.lookback for c in self.clauses), default=1)

    def analysis(self, i: int) -> "ClauseAnalysis":
        if i not in self._analysis:
            self._analysis[i] = ClauseAnalysis(self, i)
        return self._analysis[i]

    def to_spec(self) -> GsSpec:
        streams = list(self.streams)
        terms = []
        for c in self.clauses:
            lits = [Always(c.core)]
            if c.has_flag:
                lits.append(Always(c.flag_definitions))
                lits.append(Sometimes(c.flag_atom))
                streams.extend(h for h in c.hidden if h not in streams)
            terms.append(lits[0] if len(lits) == 1 else GsAnd(tuple(lits)))
        if not terms:
            formula: GsFormula = Always(Neq0(Const(T.zero())))
        else:
            formula = terms[0] if len(terms) == 1 else GsOr(tuple(terms))
        return GsSpec(tuple(streams), formula)

    def __str__(self) -> str:
        return format_spec(self.to_spec())


def normalize(spec: GsSpec, max_steps: Optional[int] = None) -> NormalizedSpec:
    """Outer DNF; universal literals merged; liveness literals become flag streams."""
    by_name = {s.name: s for s in spec.streams}
    clauses = []
    for ci, lits in enumerate(_dnf(_nnf(spec.formula))):
        cores, lives = [], []
        for lit in lits:
            _check_terms(lit.body, by_name)
            body = _to_present(lit.body)
            (cores if isinstance(lit, Always) else lives).append(body)
        core = conj(cores)
        k = max([1] + [max_offset(b) for b in cores + lives])
        if not lives:
            clauses.append(NormClause(core, lookback=k))
            continue
        clock = Var(window_var(CLOCK, 0), B2)
        hidden = [Stream(CLOCK, B2, "out", True)]
        defs = [Eq0(Comp(clock))]
        flags = []
        for j, chi in enumerate(lives):
            name = f"__e{ci}" if len(lives) == 1 else f"__e{ci}_{j}"
            hidden.append(Stream(name, B2, "out", True))
            now, before = Var(window_var(name, 0), B2), Var(window_var(name, 1), B2)
            kchi = max_offset(chi)
            gate = Neq0(Var(window_var(CLOCK, kchi), B2)) if kchi > 0 else TRUE
            defs.append(iff(Eq0(now), disj([conj([chi, gate]), Eq0(before)])))
            flags.append(now)
        clauses.append(NormClause(core, conj(defs), Eq0(join_all(flags)), tuple(hidden), k))
    return NormalizedSpec(spec.streams, tuple(clauses), max_steps)


# ---------------------------------------------------------------------------
# fixed points

@dataclass(frozen=True)
class PhiInfinity:
    formula: Formula
    recurrence_index: int
    result: FixedPointResult
    monotone: tuple[bool, ...]


def successor(phi: Formula, inputs: Sequence[Stream], outputs: Sequence[Stream]) -> Formula:
    """``all x[t+1]. ex y[t+1]. phi`` read one step later."""
    shifted = shift_formula(phi, -1)
    ys = [(window_var(s.name, -1), s.sort) for s in outputs]
    xs = [(window_var(s.name, -1), s.sort) for s in inputs]
    return forall_many(xs, exists_many(ys, shifted))


def phi_infinity(core: Formula, inputs: Sequence[Stream], outputs: Sequence[Stream],
                 max_steps: Optional[int] = None) -> PhiInfinity:
    """Iterate ``phi_n = core && successor(phi_{n-1})`` to its certified fixed point."""

    def step(prev: Formula) -> Formula:
        return conj([core, successor(prev, inputs, outputs)])

    res = iterate(RecurrenceDef(step, (core,)), max_steps)
    if res.status != "fixed_point":
        raise InvariantError(f"no fixed point for the core ({res.status} at n={res.index})")
    mono = tuple(is_monotone(res.history))
    if not all(mono):
        raise InvariantError("phi_n sequence is not monotone")
    return PhiInfinity(res.formula, res.index, res, mono)


def _all_streams(spec: NormalizedSpec, clause: NormClause):
    streams = list(spec.streams) + [h for h in clause.hidden if h not in spec.streams]
    ins = [s for s in streams if s.direction == "in"]
    outs = [s for s in streams if s.direction == "out"]
    return streams, ins, outs


def virtual_history(phi: Formula, streams: Sequence[Stream], real: int, k: int) -> Formula:
    """Read ``phi`` at a time ``t`` where only offsets ``0..real`` are real.

    Earlier positions are virtual: hidden flags read 1, the clock reads 0, and
    user streams are projected out existentially.
    """
    if real >= k:
        return phi
    virtual_user = []
    for s in streams:
        for j in range(real + 1, k + 1):
            v = window_var(s.name, j)
            if s.hidden:
                value = B2.zero() if s.name == CLOCK else B2.one()
                phi = substitute_formula(phi, v, Const(value))
            else:
                virtual_user.append((v, s.sort))
    return eliminate_all(exists_many(virtual_user, phi))


def initial_sentence(phi: Formula, streams: Sequence[Stream], k: int) -> Formula:
    """``all x[t]. ex y[t]. phi`` at time 0, earlier positions virtual."""
    present = virtual_history(phi, streams, 0, k)
    xs = [(window_var(s.name, 0), s.sort) for s in streams if s.direction == "in"]
    ys = [(window_var(s.name, 0), s.sort) for s in streams if s.direction == "out"]
    return forall_many(xs, exists_many(ys, present))


class ClauseAnalysis:
    """Fixed points and the liveness attractor of one normalized clause."""

    def __init__(self, spec: NormalizedSpec, index: int):
        self.spec = spec
        self.clause = spec.clauses[index]
        self.streams, self.inputs, self.outputs = _all_streams(spec, self.clause)
        self.k = self.clause.lookback

    @cached_property
    def phi_inf(self) -> PhiInfinity:
        return phi_infinity(self.clause.full_core, self.inputs, self.outputs, self.spec.max_steps)

    @cached_property
    def attractor(self) -> tuple[Formula, ...]:
        """``G_0 = U && flag = 0``, ``G_{n+1} = G_n || (U && successor(G_n))``.

        ``G_n`` holds the windows from which the flag can be forced down within
        ``n`` steps while staying inside ``U = phi_inf``.
        """
        if not self.clause.has_flag:
            return ()
        u = self.phi_inf.formula

        def step(prev: Formula) -> Formula:
            return disj([prev, conj([u, successor(prev, self.inputs, self.outputs)])])

        res = iterate(RecurrenceDef(step, (conj([u, self.clause.flag_atom]),)), self.spec.max_steps)
        if res.status != "fixed_point":
            raise InvariantError(f"liveness attractor did not converge ({res.status})")
        return res.history

    @cached_property
    def satisfiable(self) -> bool:
        target = self.attractor[-1] if self.clause.has_flag else self.phi_inf.formula
        return is_valid(initial_sentence(target, self.streams, self.k))


def is_satisfiable(spec: NormalizedSpec) -> bool:
    return any(spec.analysis(i).satisfiable for i in range(len(spec.clauses)))


def _same_signature(a: NormalizedSpec, b: NormalizedSpec) -> None:
    key = lambda spec: sorted((s.name, s.sort.name, s.direction) for s in spec.streams)
    if key(a) != key(b):
        raise SignatureError("specs declare different streams")


def _hidden(spec: NormalizedSpec) -> list[tuple[str, str]]:
    return sorted({(h.name, h.sort.name) for c in spec.clauses for h in c.hidden})


def includes(lhs: NormalizedSpec, rhs: NormalizedSpec) -> bool:
    """Every time-compatible model of ``lhs`` is a model of ``rhs``.

    Decided as validity of ``phi_inf(lhs) -> phi_inf(rhs)`` over the window,
    with flag streams treated as ordinary outputs.  Specs with liveness flags
    are only compared when both sides declare the same flag streams, and
    ``rhs`` must have a single clause.
    """
    _same_signature(lhs, rhs)
    if _hidden(lhs) != _hidden(rhs):
        raise NotImplementedError("inclusion needs both sides to carry the same flag streams")
    if len(rhs.clauses) != 1:
        raise NotImplementedError("inclusion needs a single-clause right-hand side")
    right = rhs.analysis(0).phi_inf.formula
    left = [lhs.analysis(i).phi_inf.formula for i in range(len(lhs.clauses))
            if lhs.analysis(i).satisfiable]
    return is_valid(implies(disj(left), right))


# ---------------------------------------------------------------------------
# execution

class Executor:
    """Step-wise runner: each call picks outputs for the current inputs.

    The first satisfiable clause is committed to.  While its liveness flag is
    up, outputs are chosen inside the lowest attractor level reachable now, so
    the level strictly drops until the flag does.
    """

    def __init__(self, spec: NormalizedSpec):
        self.spec = spec
        self.time = 0
        self.history: list[dict[str, object]] = []
        self.flag_dropped = False
        self.clause_index: Optional[int] = None
        for i in range(len(spec.clauses)):
            if spec.analysis(i).satisfiable:
                self.clause_index = i
                break
        self._projected: dict = {}

    @property
    def analysis(self) -> ClauseAnalysis:
        return self.spec.analysis(self.clause_index)

    def _window_formula(self, phi: Formula) -> Formula:
        a = self.analysis
        real = min(self.time, a.k)
        key = (phi, real)
        if key not in self._projected:
            self._projected[key] = virtual_history(phi, a.streams, real, a.k)
        phi = self._projected[key]
        for j in range(1, real + 1):
            for name, value in self.history[-j].items():
                phi = substitute_formula(phi, window_var(name, j), Const(value))
        return phi

    def _candidates(self) -> list[Formula]:
        a = self.analysis
        if not a.clause.has_flag or self.flag_dropped:
            return [a.phi_inf.formula]
        return list(a.attractor)

    def step(self, inputs: dict[str, object]) -> dict[str, object]:
        if self.clause_index is None:
            raise ExecutionError(f"spec is unsatisfiable; no output at t={self.time}")
        a = self.analysis
        names = {s.name for s in a.inputs}
        if set(inputs) != names:
            raise ExecutionError(f"expected inputs {sorted(names)}, got {sorted(inputs)}")
        outputs = [window_var(s.name, 0) for s in a.outputs]
        for phi in self._candidates():
            current = self._window_formula(phi)
            for name, value in inputs.items():
                current = substitute_formula(current, window_var(name, 0), Const(value))
            found = find_assignment(current, outputs)
            if found is not None:
                break
        else:
            raise ExecutionError(f"no output satisfies the spec at t={self.time}")
        record = dict(inputs)
        for s in a.outputs:
            record[s.name] = found[window_var(s.name, 0)]
        if a.clause.has_flag and not self.flag_dropped:
            flags = [s.name for s in a.clause.hidden if s.name != CLOCK]
            self.flag_dropped = all(record[f].is_zero() for f in flags)
        self.history.append(record)
        if len(self.history) > a.k:
            self.history.pop(0)
        self.time += 1
        return {s.name: record[s.name] for s in a.outputs if not s.hidden}

    def visible_record(self) -> dict[str, object]:
        hidden = {s.name for s in self.analysis.streams if s.hidden}
        return {k: v for k, v in self.history[-1].items() if k not in hidden}
