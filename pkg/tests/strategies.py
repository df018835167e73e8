"""Hypothesis strategies for carrier values and random Boolean functions."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from atomless.algebra import Bit, FiniteSet, IntervalSet

endpoint = st.builds(Fraction, st.integers(0, 24), st.just(24))


@st.composite
def interval_sets(draw, max_pieces=4):
    pts = sorted(set(draw(st.lists(endpoint, max_size=2 * max_pieces))))
    pairs = [(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)]
    return IntervalSet.of(pairs)


nonzero_interval_sets = interval_sets().filter(lambda a: not a.is_zero())
bits = st.sampled_from([Bit.ZERO, Bit.ONE])
finite_sets = st.integers(0, 15).map(lambda e: FiniteSet(4, e))

carrier_triples = st.one_of(
    st.tuples(interval_sets(), interval_sets(), interval_sets()),
    st.tuples(bits, bits, bits),
    st.tuples(finite_sets, finite_sets, finite_sets),
)


@st.composite
def expressions(draw, variables=("x", "y", "z"), n_constants=2, depth=3):
    """Tuple-encoded Boolean expressions understood by ``oracle``."""
    leaves = [("var", v) for v in variables] + [("const", i) for i in range(n_constants)]
    leaves += [("zero",), ("one",)]
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(leaves))
    op = draw(st.sampled_from(["meet", "join", "xor", "comp"]))
    sub = expressions(variables, n_constants, depth - 1)
    if op == "comp":
        return ("comp", draw(sub))
    return (op, draw(sub), draw(sub))
