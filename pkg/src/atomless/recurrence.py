"""Formula-valued recurrences iterated until they repeat.

Over a theory with finitely many formulas per finite signature (up to
equivalence) any recurrence ``phi_n = step(phi_{n-1}, ..., phi_{n-d})`` must
eventually revisit an earlier value.  :func:`iterate` unrolls it, keeps every
step in quantifier-free canonical form, and reports the first repeat.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from atomless.firstorder import Formula, forall_many, iff, implies
from atomless.qelim import InvariantError, decide_sentence, eliminate_all, is_valid

DEFAULT_MAX_STEPS = 64


def default_max_steps() -> int:
    """Step budget, overridable through ``ATOMLESS_MAX_STEPS``."""
    raw = os.environ.get("ATOMLESS_MAX_STEPS")
    if raw is None:
        return DEFAULT_MAX_STEPS
    value = int(raw)
    if value < 1:
        raise ValueError("ATOMLESS_MAX_STEPS must be positive")
    return value


@dataclass(frozen=True)
class RecurrenceDef:
    """``step`` receives the previous ``depth`` formulas, newest first."""

    step: Callable[..., Formula]
    base: tuple[Formula, ...]
    depth: int = 1

    def __post_init__(self):
        if len(self.base) != self.depth:
            raise ValueError("need exactly one base formula per unit of depth")


@dataclass(frozen=True)
class FixedPointResult:
    status: str  # "fixed_point", "cycle" or "step_limit"
    index: int
    formula: Formula
    period: int = 0
    history: tuple[Formula, ...] = field(default=(), repr=False)

    @property
    def converged(self) -> bool:
        return self.status == "fixed_point"


def canonical(phi: Formula) -> Formula:
    return eliminate_all(phi)


def equivalent(phi: Formula, psi: Formula) -> bool:
    """Logical equivalence, free variables read universally."""
    if phi == psi:
        return True
    return is_valid(iff(phi, psi))


def certify_equivalence(phi: Formula, psi: Formula) -> bool:
    """Re-check an equivalence by eliminating the closed biconditional and deciding it."""
    closure = forall_many(sorted(_sorts(phi, psi).items()), iff(phi, psi))
    return decide_sentence(eliminate_all(closure))


def _sorts(*formulas: Formula) -> dict:
    out = {}
    for f in formulas:
        out.update(f.free_var_sorts)
    return out


def iterate(definition: RecurrenceDef, max_steps: Optional[int] = None) -> FixedPointResult:
    """Unroll until ``phi_n`` repeats an earlier state.

    ``index`` is the ``n`` of the formula that closed the loop, counting the
    first base formula as ``n = 0``.
    """
    if max_steps is None:
        max_steps = default_max_steps()
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    d = definition.depth
    history = [canonical(b) for b in definition.base]
    for _ in range(max_steps):
        n = len(history)
        new = canonical(definition.step(*reversed(history[n - d:])))
        history.append(new)
        state = history[n + 1 - d:]
        for period in range(1, n + 2 - d):
            earlier = history[n + 1 - d - period:n + 1 - period]
            if all(equivalent(a, b) for a, b in zip(state, earlier)):
                if not all(certify_equivalence(a, b) for a, b in zip(state, earlier)):
                    raise InvariantError("loop detected by equivalence but not certified")
                status = "fixed_point" if period == 1 else "cycle"
                return FixedPointResult(status, n, new, period, tuple(history))
    return FixedPointResult("step_limit", len(history) - 1, history[-1], 0, tuple(history))


def is_monotone(history: Sequence[Formula]) -> list[bool]:
    """For each ``n``, whether ``phi_{n+1} -> phi_n`` is valid."""
    return [is_valid(implies(b, a)) for a, b in zip(history, history[1:])]


def formula_count_bound(n: int, k: int) -> int:
    """``2^(2^(k 2^n))``: formulas in ``n`` variables over ``k`` constants, up to equivalence."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    return 1 << (1 << (k << n))
