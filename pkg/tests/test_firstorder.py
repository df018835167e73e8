import pytest
from hypothesis import given, settings, strategies as st

from atomless.algebra import B2, T, IntervalSet, SortError
from atomless.boolfun import ZERO, Const, Join, Meet, Var
from atomless.firstorder import (
    FALSE, TRUE, And, Clause, Eq0, Exists, Forall, Neq0, Not, Or, QuantifierError, atom_nf,
    atoms, conj, dnf_to_formula, eq, free_vars, iff, is_minterm_atom, neq, rename_free,
    substitute_formula, to_dnf_matrix, to_minterm_form, to_nnf,
)
from atomless.qelim import decide_sentence, holds
from oracle import to_boolfun
from strategies import expressions, interval_sets

x, y = Var("x", T), Var("y", T)
HALF = Const(IntervalSet.parse("[0,1/2)"), "c")


@st.composite
def qf_formulas(draw, depth=2):
    consts = draw(st.lists(interval_sets(), min_size=2, max_size=2))
    return _formula(draw, consts, depth), consts


def _formula(draw, consts, depth):
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        bf = to_boolfun(draw(expressions(variables=("x", "y"), depth=2)), consts)
        return Eq0(bf) if draw(st.booleans()) else Neq0(bf)
    kind = draw(st.sampled_from(["and", "or", "not"]))
    if kind == "not":
        return Not(_formula(draw, consts, depth - 1))
    parts = tuple(_formula(draw, consts, depth - 1) for _ in range(draw(st.integers(2, 3))))
    return And(parts) if kind == "and" else Or(parts)


points = st.fixed_dictionaries({"x": interval_sets(), "y": interval_sets()})


def test_ground_substitution_decides():
    assert not decide_sentence(substitute_formula(eq(x), "x", Const(T.one())))


def test_substitution_avoids_capture():
    phi = Exists("y", T, neq(Meet(x, y)))
    out = substitute_formula(phi, "x", y)
    assert isinstance(out, Exists) and out.var != "y"
    assert free_vars(out) == {"y"}


def test_rename_is_simultaneous():
    phi = eq(Meet(x, Var("y", T)))
    swapped = rename_free(phi, {"x": "y", "y": "x"})
    assert free_vars(swapped) == {"x", "y"}
    assert swapped == eq(Meet(Var("y", T), x))


def test_sort_conflicts_detected():
    with pytest.raises(SortError):
        conj([eq(Var("x", T)), eq(Var("x", B2))]).free_var_sorts


def test_nnf_pushes_negation():
    phi = Not(And((eq(x), Forall("y", T, neq(Meet(x, y))))))
    out = to_nnf(phi)
    assert isinstance(out, Or)
    assert out.args[0] == neq(x)
    assert isinstance(out.args[1], Exists) and isinstance(out.args[1].body, Eq0)


def test_constructors():
    assert eq(x, x) == Eq0(x ^ x)
    assert neq(x) == Neq0(x)
    assert conj([TRUE, eq(x)]) == eq(x)
    assert conj([FALSE, eq(x)]) == FALSE


def test_dnf_rejects_quantifiers():
    with pytest.raises(QuantifierError):
        to_dnf_matrix(Exists("x", T, eq(x)))


def test_clause_squeezes_positives():
    c = Clause.make([atom_nf(Meet(x, HALF)), atom_nf(y)], [])
    assert len(c.positives) == 1
    assert c.positive.equivalent(atom_nf(Join(Meet(x, HALF), y)).extend(["x", "y"]))


def test_clause_decides_ground_atoms():
    assert Clause.make([atom_nf(ZERO)], []) == Clause.true()
    assert Clause.make([], [atom_nf(ZERO)]) is None
    assert Clause.make([atom_nf(HALF)], []) is None


def test_dnf_example():
    phi = And((Or((eq(x), eq(y))), neq(Meet(x, y))))
    clauses = to_dnf_matrix(phi)
    assert len(clauses) == 2


@settings(max_examples=150, deadline=None)
@given(qf_formulas(), points)
def test_dnf_preserves_truth(pair, env):
    phi, _ = pair
    assert holds(dnf_to_formula(to_dnf_matrix(phi)), env) == holds(phi, env)
    assert holds(to_nnf(phi), env) == holds(phi, env)


@settings(max_examples=100, deadline=None)
@given(st.lists(expressions(variables=("x", "y")), min_size=1, max_size=3),
       st.lists(interval_sets(), min_size=2, max_size=2), points)
def test_squeezing(exprs, consts, env):
    fs = [to_boolfun(e, consts) for e in exprs]
    joined = fs[0]
    for f in fs[1:]:
        joined = Join(joined, f)
    assert holds(conj(eq(f) for f in fs), env) == holds(eq(joined), env)


@settings(max_examples=100, deadline=None)
@given(qf_formulas(), points)
def test_minterm_form(pair, env):
    phi, _ = pair
    out = to_minterm_form(phi)
    for a in atoms(out):
        assert is_minterm_atom(a.bf)
    assert holds(out, env) == holds(phi, env)


def test_iff_truth_table():
    for a in (TRUE, FALSE):
        for b in (TRUE, FALSE):
            assert holds(iff(a, b), {}) == (a == b)
