import time

import pytest
from hypothesis import given, settings, strategies as st

from atomless.algebra import NSO, T, IntervalSet, SortError
from atomless.boolfun import Quote, Var
from atomless.firstorder import And, Not, Or, eq, iff, neq, to_nnf
from atomless.frontend.parser import parse_formula
from atomless.nso import (
    LtaElement, decide_nso, is_zero_element, lta_complement, lta_join, lta_meet, lta_of,
    quote_depth, uninterpreted_constants,
)
from atomless.firstorder import dnf_to_formula, to_dnf_matrix
from oracle import to_boolfun
from strategies import expressions


def nso(text):
    return parse_formula(text, "nso_sentence")


def q(text):
    """The LTA element of a quoted sentence given in surface syntax."""
    return lta_of(nso(text))


def test_lta_examples():
    phi = q("c != 0")
    assert lta_meet(phi, lta_complement(phi)).is_zero()
    assert lta_join(phi, lta_complement(phi)).is_one()
    assert (q("c != 0") & q("c = 0")) == LtaElement.zero()


def test_zero_element_examples():
    assert is_zero_element(q("ex x:T. x != 0 && x = 0"))
    assert not is_zero_element(q("ex x:T. x != 0"))
    assert not is_zero_element(q("c != 0"))
    assert is_zero_element(Quote(nso("ex x:T. x != 0 && x = 0")))


def test_decide_examples():
    assert decide_nso(nso("{ex x:T. x != 0 && x = 0} = 0"))
    assert decide_nso(nso("all u:NSO. u & u' = 0"))
    assert decide_nso(nso("ex u:NSO. u != 0 && u != 1 && u & {c = 0}' = 0"))


def test_false_sentences():
    assert not decide_nso(nso("{ex x:T. x != 0} = 0"))
    assert not decide_nso(nso("ex u:NSO. u != 0 && u & {c = 0} = 0 && u & {c = 0}' = 0"))


def test_quoted_constants_are_uninterpreted():
    # c = 0 is satisfiable but not valid, so its class is strictly intermediate
    assert not decide_nso(nso("{c = 0} = 0"))
    assert decide_nso(nso("{c = 0} != 0 && {c = 0} != 1"))
    assert decide_nso(nso("{c = 0} & {c != 0} = 0"))
    assert uninterpreted_constants(nso("{c = 0} = 0")) == set()


def test_top_level_constants_read_universally():
    assert uninterpreted_constants(nso("k = 0")) == {"k"}
    assert not decide_nso(nso("k = 0"))
    assert not decide_nso(nso("k != 0"))
    assert decide_nso(nso("k & k' = 0"))


def test_depth_two_and_three():
    s2 = nso("{ {ex x:T. x != 0 && x = 0} = 0 } = 1")
    assert quote_depth(s2) == 2 and decide_nso(s2)
    s3 = nso("{ { {ex x:T. x != 0} = 0 } = 0 } = 1")
    assert quote_depth(s3) == 3 and decide_nso(s3)


def test_split_gives_disjoint_nonzero_parts():
    a = q("c != 0")
    parts = a.split(3)
    assert all(not p.is_zero() for p in parts)
    assert (parts[0] & parts[1]).is_zero() and (parts[1] & parts[2]).is_zero()
    assert (parts[0] | parts[1] | parts[2]) == a
    with pytest.raises(ValueError):
        LtaElement.zero().split(2)


def test_mixing_with_interval_values_fails():
    with pytest.raises(SortError):
        q("c = 0") & IntervalSet.ONE


@st.composite
def bodies(draw):
    """Small quantifier-free sentences over uninterpreted constants c, d."""
    bf = to_boolfun(draw(expressions(variables=("c", "d"), n_constants=0, depth=2)), [], NSO)
    return eq(bf) if draw(st.booleans()) else neq(bf)


@settings(max_examples=60, deadline=None)
@given(bodies(), bodies(), bodies())
def test_lta_laws(p1, p2, p3):
    a, b, c = lta_of(p1), lta_of(p2), lta_of(p3)
    zero, one = LtaElement.zero(), LtaElement.one()
    assert (a & (b & c)) == ((a & b) & c)
    assert (a | b) == (b | a)
    assert (a & (b | c)) == ((a & b) | (a & c))
    assert ~(a | b) == (~a & ~b)
    assert ~~a == a
    assert (a & ~a) == zero and (a | ~a) == one
    assert hash(a & b) == hash(b & a)


@settings(max_examples=40, deadline=None)
@given(bodies(), st.sampled_from(["{P} = 0", "{P} = 1", "{P} & {c = 0} = 0",
                                  "ex u:NSO. u != 0 && u & {P}' = 0", "{P} = {d != 0}"]))
def test_quoting_respects_equivalence(body, context):
    from atomless.frontend.printer import format_formula
    other = dnf_to_formula(to_dnf_matrix(to_nnf(Not(Not(body)))))
    first = nso(context.replace("P", format_formula(body)))
    second = nso(context.replace("P", format_formula(other)))
    assert decide_nso(first) == decide_nso(second)


def test_decisions_are_fast():
    start = time.perf_counter()
    for text in ["{ex x:T. x != 0 && x = 0} = 0", "all u:NSO. u & u' = 0",
                 "ex u:NSO. u != 0 && u != 1 && u & {c = 0}' = 0",
                 "{ {ex x:T. x != 0 && x = 0} = 0 } = 1"]:
        assert decide_nso(nso(text))
    assert time.perf_counter() - start < 10
