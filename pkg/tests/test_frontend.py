import io
import subprocess
import sys
from pathlib import Path

import pytest

from atomless.algebra import NSO, T, IntervalSet
from atomless.boolfun import Quote
from atomless.firstorder import Exists, Neq0
from atomless.frontend.cli import build_parser, cmd_run, main
from atomless.frontend.parser import ParseError, parse, parse_assignments, parse_file, parse_formula, parse_value
from atomless.frontend.printer import format_formula, format_term
from atomless.frontend.results import ResultDocument
from atomless.nso import quote_depth

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


def test_parse_examples():
    phi = parse_formula("ex x:T. x & [0,1/2) != 0")
    assert isinstance(phi, Exists) and isinstance(phi.body, Neq0)
    s = parse_formula("{ all u:NSO. u & u' = 0 } = 1", "nso_sentence")
    assert quote_depth(s) == 1


def test_unbalanced_brace_diagnostic():
    with pytest.raises(ParseError) as info:
        parse_formula("x = 0 && {x = 0", "nso_sentence")
    assert (info.value.line, info.value.column) == (1, 10)


def test_decimal_literals_rejected():
    with pytest.raises(ParseError) as info:
        parse_formula("ex x:T. x & 0.5 = 0")
    assert "p/q" in info.value.message


def test_sort_errors_carry_position_or_message():
    with pytest.raises(ParseError):
        parse_formula("ex x:T. ex b:B2. x & b = 0")


def test_term_precedence():
    phi = parse_formula("var x : T\nvar y : T\nvar z : T\nx | y + z & w' = 0")
    assert format_term(phi.bf) == "x | y + z & w'"
    assert format_term(parse_formula("var x : T\n(x | y) & z = 0").bf) == "(x | y) & z"


def test_formula_precedence():
    phi = parse_formula("x = 0 || y = 0 && !(z = 0)")
    assert format_formula(phi) == "x = 0 || y = 0 && !(z = 0)"


def test_interval_union_is_one_token():
    phi = parse_formula("x & [0,1/4)|[1/2,3/4) = 0")
    assert "[0,1/4)|[1/2,3/4)" in format_formula(phi)
    joined = parse_formula("x & [0,1/4) | [1/2,3/4) = 0")
    assert format_formula(joined) == "x & [0,1/4) | [1/2,3/4) = 0"


@pytest.mark.parametrize("path", sorted(CORPUS.iterdir()), ids=lambda p: p.name)
def test_print_parse_round_trip(path):
    unit = parse_file(str(path))
    again = parse(unit.format(), unit.kind)
    assert again.parsed == unit.parsed
    assert again.format() == unit.format()


def test_unknown_extension(tmp_path):
    p = tmp_path / "spec.txt"
    p.write_text("x = 0")
    with pytest.raises(ParseError):
        parse_file(str(p))


def test_parse_values_and_assignments():
    assert parse_value("[0,1/2)", T) == IntervalSet.parse("[0,1/2)")
    assert parse_value("{c = 0} & {c != 0}", NSO).is_zero()
    got = parse_assignments("i1=[0,1/2) i2=1", {"i1": T, "i2": T})
    assert got == {"i1": IntervalSet.parse("[0,1/2)"), "i2": IntervalSet.ONE}
    with pytest.raises(ParseError):
        parse_assignments("i3=0", {"i1": T})
    with pytest.raises(ParseError):
        parse_assignments("i1=x", {"i1": T})


def test_result_document():
    doc = ResultDocument("sat", "sat")
    doc.set_witness({"x": IntervalSet.parse("[0,1/4)")})
    doc.timings["sat"] = 0.5
    text = doc.render(with_timings=True)
    assert ResultDocument.parse(text) == {"command": "sat", "verdict": "sat",
                                          "witness.x": "[0,1/4)", "time.sat": "0.500s"}
    assert doc.exit_code == 0
    with pytest.raises(ValueError):
        ResultDocument("sat", "unsat").set_witness({"x": IntervalSet.ZERO})
    with pytest.raises(ValueError):
        ResultDocument("sat", "maybe")
    assert ResultDocument("decide", "false").exit_code == 1


def _golden_cases():
    for path in sorted(GOLDEN.glob("*.out")):
        stem = path.stem
        command, _, rest = stem.partition("_")
        if command == "bound":
            args = ["bound", *rest.split("_")]
        elif command == "implies":
            a, b = rest.split("_")
            args = ["implies", str(CORPUS / f"{a}.gs"), str(CORPUS / f"{b}.gs")]
        else:
            match = [p for p in CORPUS.iterdir() if p.stem == rest]
            args = [command, str(match[0])]
        yield pytest.param(args, path, id=stem)


@pytest.mark.parametrize("args,golden", list(_golden_cases()))
def test_cli_matches_golden_documents(args, golden, capsys):
    code = main(args)
    out = capsys.readouterr().out
    assert out + f"exit={code}\n" == golden.read_text()


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.qe"
    bad.write_text("ex x:T. x & 0.5 = 0")
    assert main(["decide", str(bad)]) == 2
    assert "1:13" in capsys.readouterr().err
    assert main(["decide", str(tmp_path / "missing.qe")]) == 2
    assert main(["normalize", str(CORPUS / "split.qe")]) == 2
    assert main(["implies", str(CORPUS / "eventually.gs"), str(CORPUS / "copy.gs")]) == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_timings_flag(capsys):
    assert main(["--timings", "decide", str(CORPUS / "axiom.nso")]) == 0
    assert "time.decide:" in capsys.readouterr().out


def _run(spec, script, debug=False):
    args = build_parser().parse_args(["run", str(spec)] + (["--debug"] if debug else []))
    out = io.StringIO()
    code = cmd_run(args, io.StringIO(script), out)
    return code, out.getvalue()


def test_repl_copy():
    code, out = _run(CORPUS / "copy.gs", "# header\ni1=[0,1/2)\n\ni1=1\n")
    assert code == 0
    assert out == "o1=[0,1/2)\no1=1\n"


def test_repl_input_free_spec_steps_on_every_line():
    code, out = _run(CORPUS / "disjoint.gs", "\n\n\n")
    assert out == "o1=[0,1/2)\no1=[1/2,1)\no1=[0,1/2)\n"


def test_repl_debug_shows_hidden_streams():
    _, out = _run(CORPUS / "eventually.gs", "i1=[0,1/2)\n", debug=True)
    assert "__e0=" in out and "__r=" in out


def test_repl_errors():
    code, _ = _run(CORPUS / "copy.gs", "i1=0.5\n")
    assert code == 2
    code, _ = _run(CORPUS / "contradiction.gs", "\n")
    assert code == 1


def test_repl_replay_is_byte_identical():
    script = "".join(f"i1=[0,{k}/9)\n" for k in range(1, 9))
    assert _run(CORPUS / "eventually.gs", script) == _run(CORPUS / "eventually.gs", script)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "atomless", "bound", "2", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "bound: 65536" in proc.stdout
