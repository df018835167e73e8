"""Helpers for temporal-spec tests: loading specs and brute-force bounded search."""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from atomless.algebra import IntervalSet
from atomless.frontend.parser import parse
from atomless.gstemporal import (
    Always, GsAnd, Sometimes, normalize, parse_window_var, window_var,
)
from atomless.qelim import decide_sentence, holds, instantiate

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

QUARTERS = IntervalSet.ONE.split(4)
SIXTEEN = [IntervalSet.of([iv for i, q in enumerate(QUARTERS) if m >> i & 1 for iv in q.intervals])
           for m in range(16)]


def spec(text: str, max_steps=None):
    return normalize(parse(text, "gs_spec").parsed, max_steps)


def corpus_spec(name: str):
    return spec((CORPUS / name).read_text())


def random_values(rng: random.Random, n: int, denominator=8):
    """``n`` random interval values with endpoints on a grid."""
    out = []
    for _ in range(n):
        pts = sorted(rng.sample(range(denominator + 1), 2 * rng.randint(0, 2)))
        out.append(IntervalSet.of([(Fraction(pts[i], denominator), Fraction(pts[i + 1], denominator))
                                   for i in range(0, len(pts), 2)]) if pts else IntervalSet.ZERO)
    return out


def window_env(records, t, k):
    """Assignment of window variables at time ``t`` from a list of per-step records."""
    env = {}
    for j in range(k + 1):
        for name, value in records[t - j].items():
            env[window_var(name, j)] = value
    return env


def windows_satisfy(formula, records, k) -> bool:
    """Every full window of the trace satisfies ``formula`` (checked on ground sentences)."""
    needed = formula.free_var_sorts
    for t in range(k, len(records)):
        env = {v: val for v, val in window_env(records, t, k).items() if v in needed}
        if not decide_sentence(instantiate(formula, env)):
            return False
    return True


def _literals(g):
    if isinstance(g, (Always, Sometimes)):
        return [g]
    if isinstance(g, GsAnd):
        return [l for a in g.args for l in _literals(a)]
    raise ValueError("bounded search handles conjunctions of literals only")


def _offset_range(body):
    offs = [parse_window_var(v)[1] for v in body.free_var_sorts]
    return min(offs, default=0), max(offs, default=0)


def bounded_model(text: str, horizon: int, values=SIXTEEN) -> bool:
    """Search output-only specs for a finite run of ``horizon`` steps.

    Positions before time 0 are chosen freely (they stand for the unknown
    past).  ``always`` literals must hold at every step; each ``sometimes``
    literal must hold at some step whose window is entirely real.
    """
    unit = parse(text, "gs_spec")
    gs = unit.parsed
    if gs.inputs:
        raise ValueError("bounded search supports output-only specs")
    names = [s.name for s in gs.outputs]
    if len(names) != 1:
        raise ValueError("bounded search supports a single output stream")
    lits = _literals(gs.formula)
    k = max(max(_offset_range(l.body)[1], -_offset_range(l.body)[0]) for l in lits) or 1
    name = names[0]

    def value_at(seq, t):
        return seq[t + k]

    def holds_at(body, seq, t):
        env = {}
        for v in body.free_var_sorts:
            _, off = parse_window_var(v)
            env[v] = value_at(seq, t - off)
        return holds(body, env)

    always = [l.body for l in lits if isinstance(l, Always)]
    sometimes = [(l.body, _offset_range(l.body)) for l in lits if isinstance(l, Sometimes)]
    lead = max([0] + [-lo for _, (lo, _) in sometimes] + [-_offset_range(b)[0] for b in always])

    def search(seq):
        t_done = len(seq) - k - 1  # last fully assigned time
        for body in always:
            lo, hi = _offset_range(body)
            t = t_done + lo  # the newest time whose window just became complete
            if 0 <= t < horizon and not holds_at(body, seq, t):
                return False
        if len(seq) == k + horizon + lead:
            return all(any(hi <= t and holds_at(body, seq, t) for t in range(0, horizon))
                       for body, (lo, hi) in sometimes)
        return any(search(seq + [v]) for v in values)

    # the first k positions are the free past; check nothing until time 0 exists
    def seed(prefix):
        if len(prefix) == k:
            return search(prefix)
        return any(seed(prefix + [v]) for v in values)

    return seed([])
