import pytest
from hypothesis import given, settings, strategies as st

from atomless.algebra import T
from atomless.boolfun import Comp, Const, Meet, Var
from atomless.firstorder import (
    Exists, Not, conj, disj, eq, implies, is_quantifier_free, neq, substitute_formula,
)
from atomless.qelim import is_valid
from atomless.recurrence import (
    DEFAULT_MAX_STEPS, RecurrenceDef, certify_equivalence, default_max_steps, equivalent,
    formula_count_bound, is_monotone, iterate,
)
from oracle import clause_formula, random_clause

x, y, a = Var("x", T), Var("y", T), Var("a", T)


def test_equivalence_examples():
    phi = Exists("y", T, neq(Meet(x, y)))
    renamed = Exists("z", T, neq(Meet(x, Var("z", T))))
    assert equivalent(phi, renamed)
    assert equivalent(neq(Meet(x, a)), neq(Meet(a, x)))
    assert not equivalent(neq(x), eq(x))
    assert certify_equivalence(phi, neq(x))


def test_identity_recurrence_is_a_fixed_point_at_one():
    res = iterate(RecurrenceDef(lambda prev: prev, (eq(x),)))
    assert res.status == "fixed_point" and res.index == 1 and res.period == 1


def test_negation_recurrence_cycles():
    res = iterate(RecurrenceDef(lambda prev: Not(prev), (eq(x),)))
    assert res.status == "cycle" and res.period == 2 and not res.converged


def test_step_limit():
    res = iterate(RecurrenceDef(lambda prev: Not(prev), (eq(x),)), max_steps=1)
    assert res.status == "step_limit"
    with pytest.raises(ValueError):
        iterate(RecurrenceDef(lambda prev: prev, (eq(x),)), max_steps=0)


def test_depth_two_recurrence():
    # phi_n = phi_{n-1} || phi_{n-2} settles once both states repeat
    res = iterate(RecurrenceDef(lambda p1, p2: disj([p1, p2]), (eq(x), eq(Comp(x))), depth=2))
    assert res.converged
    assert is_valid(implies(eq(x), res.formula))


def test_base_length_must_match_depth():
    with pytest.raises(ValueError):
        RecurrenceDef(lambda p: p, (eq(x),), depth=2)


def test_step_budget_from_environment(monkeypatch):
    monkeypatch.delenv("ATOMLESS_MAX_STEPS", raising=False)
    assert default_max_steps() == DEFAULT_MAX_STEPS
    monkeypatch.setenv("ATOMLESS_MAX_STEPS", "5")
    assert default_max_steps() == 5
    monkeypatch.setenv("ATOMLESS_MAX_STEPS", "0")
    with pytest.raises(ValueError):
        default_max_steps()


def test_formula_count_bound():
    assert formula_count_bound(0, 1) == 4
    assert formula_count_bound(1, 1) == 16
    assert formula_count_bound(2, 1) == 65536
    assert formula_count_bound(1, 2) == 2 ** 16
    with pytest.raises(ValueError):
        formula_count_bound(1, 0)


def _shrinking_step(guard):
    # phi_n(x) = phi_{n-1}(x) && ex y. phi_{n-1}(y) && guard(x, y)
    def step(prev):
        moved = substitute_formula(prev, "x", Var("y", T))
        return conj([prev, Exists("y", T, conj([moved, guard]))])
    return step


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_monotone_recurrences_reach_fixed_points(rnd):
    f, gs, consts = random_clause(rnd, ["x"], max_negatives=2)
    base = clause_formula(f, gs, consts)
    gf, ggs, _ = random_clause(rnd, ["x", "y"], max_constants=0, max_negatives=1)
    guard = clause_formula(gf, ggs, [])
    res = iterate(RecurrenceDef(_shrinking_step(guard), (base,)), max_steps=16)
    assert all(is_monotone(res.history))
    assert res.status == "fixed_point" and res.period == 1


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_result_is_canonical_and_rerun_is_a_no_op(rnd):
    f, gs, consts = random_clause(rnd, ["x"], max_negatives=2)
    res = iterate(RecurrenceDef(_shrinking_step(neq(Meet(x, Comp(y)))),
                                (clause_formula(f, gs, consts),)), max_steps=16)
    assert is_quantifier_free(res.formula)
    again = iterate(RecurrenceDef(lambda prev: prev, (res.formula,)))
    assert again.formula == res.formula and again.index == 1
