"""Command-line entry point.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
parse error, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager

from atomless.algebra import SortError
from atomless.frontend.parser import ParseError, SourceUnit, parse_assignments, parse_file
from atomless.frontend.printer import format_formula, format_value
from atomless.frontend.results import ResultDocument
from atomless.qelim import InvariantError, eliminate_all, find_assignment, is_satisfiable, is_valid

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


@contextmanager
def _timed(doc: ResultDocument, name: str):
    start = time.perf_counter()
    yield
    doc.timings[name] = time.perf_counter() - start


def _load(path: str, *kinds: str) -> SourceUnit:
    unit = parse_file(path)
    if kinds and unit.kind not in kinds:
        wanted = " or ".join(kinds)
        raise UsageError(f"{path}: expected a {wanted} file, got {unit.kind}")
    return unit


def _normalized(unit: SourceUnit, max_steps=None):
    from atomless.gstemporal import normalize
    return normalize(unit.parsed, max_steps)


def cmd_qelim(args) -> ResultDocument:
    unit = _load(args.file, "qe_query", "nso_sentence")
    doc = ResultDocument("qelim")
    with _timed(doc, "qelim"):
        doc.fields["formula"] = format_formula(eliminate_all(unit.parsed))
    return doc


def cmd_sat(args) -> ResultDocument:
    unit = _load(args.file)
    doc = ResultDocument("sat")
    with _timed(doc, "sat"):
        if unit.kind == "gs_spec":
            from atomless.gstemporal import is_satisfiable as gs_sat
            doc.verdict = "sat" if gs_sat(_normalized(unit, args.max_steps)) else "unsat"
            return doc
        phi = unit.parsed
        doc.verdict = "sat" if is_satisfiable(phi) else "unsat"
        if doc.verdict == "sat" and unit.kind == "qe_query" and phi.free_var_sorts:
            witness = find_assignment(eliminate_all(phi), list(phi.free_var_sorts))
            if witness is None:
                raise InvariantError("satisfiable formula without an extracted witness")
            doc.set_witness(witness)
    return doc


def cmd_decide(args) -> ResultDocument:
    unit = _load(args.file)
    if unit.kind == "gs_spec":
        doc = cmd_sat(args)
        doc.command = "decide"
        return doc
    doc = ResultDocument("decide")
    phi = unit.parsed
    with _timed(doc, "decide"):
        if unit.kind == "nso_sentence":
            from atomless.nso import decide_nso
            doc.verdict = "true" if decide_nso(phi) else "false"
        elif phi.free_var_sorts:
            doc.verdict = "valid" if is_valid(phi) else "invalid"
        else:
            doc.verdict = "true" if is_valid(phi) else "false"
    return doc


def cmd_normalize(args) -> ResultDocument:
    unit = _load(args.file, "gs_spec")
    doc = ResultDocument("normalize")
    with _timed(doc, "normalize"):
        spec = _normalized(unit, args.max_steps)
    doc.fields["clauses"] = str(len(spec.clauses))
    doc.fields["lookback"] = str(spec.lookback)
    text = str(spec).rstrip("\n").replace("\n", "\n  ")
    doc.fields["spec"] = "|\n  " + text
    return doc


def cmd_fixpoint(args) -> ResultDocument:
    unit = _load(args.file, "gs_spec")
    doc = ResultDocument("fixpoint")
    with _timed(doc, "fixpoint"):
        spec = _normalized(unit, args.max_steps)
        for i in range(len(spec.clauses)):
            phi = spec.analysis(i).phi_inf
            doc.fields[f"clause{i}.phi_inf"] = format_formula(phi.formula)
            doc.fields[f"clause{i}.index"] = str(phi.recurrence_index)
    if len(spec.clauses) == 1:
        doc.fixed_point_index = spec.analysis(0).phi_inf.recurrence_index
    return doc


def cmd_implies(args) -> ResultDocument:
    from atomless.gstemporal import includes
    lhs = _normalized(_load(args.file1, "gs_spec"), args.max_steps)
    rhs = _normalized(_load(args.file2, "gs_spec"), args.max_steps)
    doc = ResultDocument("implies")
    with _timed(doc, "implies"):
        doc.verdict = "valid" if includes(lhs, rhs) else "invalid"
    return doc


def cmd_bound(args) -> ResultDocument:
    from atomless.recurrence import formula_count_bound
    doc = ResultDocument("bound")
    doc.fields["bound"] = str(formula_count_bound(args.n, args.k))
    return doc


def cmd_run(args, stdin=None, stdout=None) -> int:
    from atomless.gstemporal import ExecutionError, Executor
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    spec = _normalized(_load(args.file, "gs_spec"), args.max_steps)
    ex = Executor(spec)
    sorts = {s.name: s.sort for s in spec.inputs}
    for lineno, raw in enumerate(stdin, 1):
        if raw.lstrip().startswith("#"):
            continue
        line = raw.split("#", 1)[0].strip()
        if not line and sorts:
            continue
        try:
            inputs = parse_assignments(line, sorts)
        except ParseError as e:
            print(f"error: line {lineno}: {e}", file=sys.stderr)
            return EXIT_USAGE
        try:
            outputs = ex.step(inputs)
        except ExecutionError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_NEGATIVE
        if args.debug:
            outputs = {k: v for k, v in ex.history[-1].items() if k not in sorts}
        stdout.write(" ".join(f"{k}={format_value(v)}" for k, v in outputs.items()) + "\n")
        stdout.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atomless", description=__doc__.splitlines()[0])
    p.add_argument("--timings", action="store_true", help="report wall-clock timings")
    p.add_argument("--max-steps", type=int, default=None,
                   help="recurrence step budget (default: $ATOMLESS_MAX_STEPS or 64)")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in [("qelim", "print a quantifier-free equivalent"),
                           ("sat", "satisfiability verdict, with a witness for .qe files"),
                           ("decide", "truth of a sentence (free variables read universally)"),
                           ("normalize", "print the normalized temporal spec"),
                           ("fixpoint", "print phi_inf and its index for each clause")]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("file")

    sp = sub.add_parser("implies", help="decide whether every model of FILE1 is a model of FILE2")
    sp.add_argument("file1")
    sp.add_argument("file2")

    sp = sub.add_parser("run", help="execute a temporal spec on input lines from stdin")
    sp.add_argument("file")
    sp.add_argument("--debug", action="store_true", help="show hidden flag streams")

    sp = sub.add_parser("bound", help="count bound 2^(2^(k 2^n)) on inequivalent formulas")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    return p


COMMANDS = {
    "qelim": cmd_qelim, "sat": cmd_sat, "decide": cmd_decide, "normalize": cmd_normalize,
    "fixpoint": cmd_fixpoint, "implies": cmd_implies, "bound": cmd_bound,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        doc = COMMANDS[args.command](args)
    except (ParseError, UsageError, SortError, OSError, NotImplementedError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    sys.stdout.write(doc.render(args.timings))
    return doc.exit_code


if __name__ == "__main__":
    sys.exit(main())
