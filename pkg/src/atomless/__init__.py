"""Decision procedures for atomless Boolean algebras, NSO quotes and temporal specs."""
from atomless.algebra import B2, NSO, T, Bit, FiniteSet, IntervalSet, SortError
from atomless.boolfun import BoolFun, Const, MintermNF, Var, to_minterm_nf
from atomless.firstorder import Formula, eq, neq
from atomless.qelim import decide_sentence, eliminate_all, find_assignment, is_valid

__all__ = [
    "B2", "NSO", "T", "Bit", "FiniteSet", "IntervalSet", "SortError",
    "BoolFun", "Const", "MintermNF", "Var", "to_minterm_nf",
    "Formula", "eq", "neq",
    "decide_sentence", "eliminate_all", "find_assignment", "is_valid",
]

__version__ = "0.1.0"
