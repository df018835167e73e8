"""Surface-syntax printing for terms and formulas.

Output re-parses to the same tree: term precedence is ``'`` > ``&`` > ``+``
> ``|`` and formula precedence is ``!`` > ``&&`` > ``||`` > quantifiers.
"""
from __future__ import annotations

from atomless.boolfun import BoolFun, Comp, Const, Join, Meet, One, Quote, Var, Xor, Zero
from atomless.firstorder import And, Eq0, Exists, Forall, Formula, Neq0, Not, Or, Truth

_JOIN, _XOR, _MEET, _POSTFIX, _ATOM = 1, 2, 3, 4, 5


def _term_level(f: BoolFun) -> int:
    if isinstance(f, Join):
        return _JOIN
    if isinstance(f, Xor):
        return _XOR
    if isinstance(f, Meet):
        return _MEET
    if isinstance(f, Comp):
        return _POSTFIX
    return _ATOM


def format_value(value) -> str:
    from atomless.nso import LtaElement
    if isinstance(value, LtaElement):
        return "{" + format_formula(value.to_formula()) + "}"
    return str(value)


def format_term(f: BoolFun, level: int = 0) -> str:
    own = _term_level(f)
    if isinstance(f, Var):
        text = f.name
    elif isinstance(f, Const):
        text = f.name or format_value(f.value)
    elif isinstance(f, Zero):
        text = "0"
    elif isinstance(f, One):
        text = "1"
    elif isinstance(f, Quote):
        text = "{" + format_formula(f.body) + "}"
    elif isinstance(f, Comp):
        text = format_term(f.arg, _POSTFIX) + "'"
    else:
        op = {Join: "|", Xor: "+", Meet: "&"}[type(f)]
        text = f"{format_term(f.left, own)} {op} {format_term(f.right, own + 1)}"
    return f"({text})" if own < level else text


_OR, _AND, _NOT, _UNIT = 1, 2, 3, 4


def _formula_level(p: Formula) -> int:
    if isinstance(p, (Exists, Forall)):
        return 0
    if isinstance(p, Or):
        return _OR
    if isinstance(p, And):
        return _AND
    if isinstance(p, Not):
        return _NOT
    return _UNIT


def format_formula(p: Formula, level: int = 0) -> str:
    own = _formula_level(p)
    if isinstance(p, Truth):
        text = "true" if p.value else "false"
    elif isinstance(p, Eq0):
        text = f"{format_term(p.bf)} = 0"
    elif isinstance(p, Neq0):
        text = f"{format_term(p.bf)} != 0"
    elif isinstance(p, Not):
        inner = format_formula(p.arg, _UNIT)
        text = f"!({inner})" if isinstance(p.arg, (Eq0, Neq0)) else "!" + inner
    elif isinstance(p, And):
        text = " && ".join(format_formula(a, _AND + 1) for a in p.args)
    elif isinstance(p, Or):
        text = " || ".join(format_formula(a, _OR + 1) for a in p.args)
    elif isinstance(p, (Exists, Forall)):
        q = "ex" if isinstance(p, Exists) else "all"
        text = f"{q} {p.var}:{p.sort.name}. {format_formula(p.body)}"
    else:
        raise TypeError(p)
    return f"({text})" if own < level else text
