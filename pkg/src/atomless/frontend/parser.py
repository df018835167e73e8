"""Recursive-descent parser for ``.qe``, ``.nso`` and ``.gs`` sources.

Term precedence, tightest first: postfix ``'``, ``&``, ``+``, ``|``.
Formula precedence: ``!``, ``&&``, ``||``; ``ex x:S.`` / ``all x:S.`` extend
as far right as possible.  Identifiers that are neither bound nor declared
take the sort of the other leaves in their atom, or the file kind's default
(``T`` for ``.qe``, ``NSO`` for ``.nso`` and inside quotes).

An interval constant is one token: pieces joined by ``|`` with no spaces, as
in ``[0,1/2)|[3/4,1)``.  A spaced ``|`` is the join operator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from atomless.algebra import NSO, T, IntervalSet, Sort, SortError, sort_by_name
from atomless.boolfun import ONE, ZERO, BoolFun, Comp, Const, Join, Meet, Quote, Var, Xor
from atomless.firstorder import FALSE, TRUE, Exists, Forall, Formula, Not, conj, disj, eq, neq
from atomless.gstemporal import (
    Always, GsAnd, GsFormula, GsNot, GsOr, GsSpec, Sometimes, Stream, window_var,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message, self.line, self.column = message, line, column
        super().__init__(f"{line}:{column}: {message}" if line else message)


_NUM = r"[0-9]+(?:/[0-9]+)?"
_INTERVAL = rf"\[\s*{_NUM}\s*,\s*{_NUM}\s*\)"
_TOKEN = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)"
    rf"|(?P<interval>{_INTERVAL}(?:\|{_INTERVAL})*)"
    r"|(?P<decimal>[0-9]*\.[0-9]+)"
    r"|(?P<num>[0-9]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]\n]*\])?)"
    r"|(?P<op>&&|\|\||!=|[!&|+'=(){}:.,])"
)
_OFFSET = re.compile(r"^t\s*(?:([+-])\s*([0-9]+))?$")
KEYWORDS = {"ex", "all", "true", "false", "always", "sometimes", "in", "out", "const", "var"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "decimal":
            raise ParseError("decimal literals are not accepted; write p/q", line, col)
        if kind == "ident" and "[" in chunk:
            name, inner = chunk[:-1].split("[", 1)
            om = _OFFSET.match(inner.strip())
            if not om:
                raise ParseError(f"stream offset must be t, t-k or t+k, got [{inner}]", line, col)
            off = int(om.group(2) or 0)
            chunk = window_var(name, -off if om.group(1) == "+" else off)
            kind = "stream"
        elif kind == "ident" and chunk in KEYWORDS:
            kind = "kw"
        if kind != "ws":
            tokens.append(Token(kind, chunk, line, col))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class SourceUnit:
    kind: str  # "qe_query", "nso_sentence" or "gs_spec"
    text: str
    parsed: object
    constants: dict[str, Const] = field(default_factory=dict)
    variables: dict[str, Sort] = field(default_factory=dict)

    def format(self) -> str:
        from atomless.frontend.printer import format_formula, format_value
        lines = [f"const {name} : {c.value.sort.name} = {format_value(c.value)}"
                 for name, c in self.constants.items()]
        lines += [f"var {name} : {sort.name}" for name, sort in self.variables.items()]
        if self.kind == "gs_spec":
            from atomless.gstemporal import format_spec
            return "\n".join(lines + [format_spec(self.parsed).rstrip("\n")]) + "\n"
        return "\n".join(lines + [format_formula(self.parsed)]) + "\n"


# raw term nodes, resolved to BoolFun once the atom's sort is known
@dataclass(frozen=True)
class _Id:
    name: str
    token: Token


class Parser:
    def __init__(self, text: str, kind: str):
        self.text = text
        self.kind = kind
        self.tokens = tokenize(text)
        self.i = 0
        self.constants: dict[str, Const] = {}
        self.variables: dict[str, Sort] = {}
        self.streams: dict[str, Stream] = {}
        self.scopes: list[dict[str, Sort]] = [{}]
        self.quote_level = 0

    # -- token helpers ----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def sort(self) -> Sort:
        tok = self.ident()
        try:
            return sort_by_name(tok.text)
        except KeyError:
            raise self.error(f"unknown sort {tok.text}", tok) from None

    # -- declarations -----------------------------------------------------
    def declarations(self) -> None:
        while self.tok.kind == "kw" and self.tok.text in ("in", "out", "const", "var"):
            kw = self.tok.text
            self.i += 1
            name = self.ident()
            self.expect(":")
            sort = self.sort()
            if name.text in self.constants or name.text in self.variables or name.text in self.streams:
                raise self.error(f"{name.text} declared twice", name)
            if kw == "const":
                self.expect("=")
                self.constants[name.text] = Const(self.literal(sort), name.text)
            elif kw == "var":
                self.variables[name.text] = sort
            else:
                if self.kind != "gs_spec":
                    raise self.error("stream declarations belong in .gs files", name)
                self.streams[name.text] = Stream(name.text, sort, kw)

    def literal(self, sort: Sort):
        tok = self.tok
        if tok.kind == "interval":
            self.i += 1
            if sort != T:
                raise self.error(f"interval literal for a {sort} constant", tok)
            return IntervalSet.parse(tok.text)
        if tok.kind == "num" and tok.text in ("0", "1"):
            self.i += 1
            return sort.one() if tok.text == "1" else sort.zero()
        if self.at("{"):
            if sort != NSO:
                raise self.error(f"quote literal for a {sort} constant", tok)
            raw = self.primary()
            return _quote_value(self.resolve(raw, NSO))
        raise self.error("expected a constant literal")

    # -- terms ------------------------------------------------------------
    def term(self):
        left = self.xor_term()
        while self.accept("|"):
            left = ("join", left, self.xor_term())
        return left

    def xor_term(self):
        left = self.meet_term()
        while self.accept("+"):
            left = ("xor", left, self.meet_term())
        return left

    def meet_term(self):
        left = self.postfix()
        while self.accept("&"):
            left = ("meet", left, self.postfix())
        return left

    def postfix(self):
        node = self.primary()
        while self.accept("'"):
            node = ("comp", node)
        return node

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            if tok.text not in ("0", "1"):
                raise self.error(f"only 0 and 1 are numeric terms, found {tok.text}")
            self.i += 1
            return ("one",) if tok.text == "1" else ("zero",)
        if tok.kind == "interval":
            self.i += 1
            return ("const", Const(IntervalSet.parse(tok.text)))
        if tok.kind == "ident":
            self.i += 1
            return _Id(tok.text, tok)
        if tok.kind == "stream":
            self.i += 1
            base = tok.text.split("[", 1)[0]
            if self.kind != "gs_spec" or base not in self.streams:
                raise self.error(f"unknown stream {base}", tok)
            return ("var", Var(tok.text, self.streams[base].sort))
        if self.at("{"):
            opening = self.tok
            self.i += 1
            self.scopes.append({})
            self.quote_level += 1
            try:
                body = self.formula()
            finally:
                self.scopes.pop()
                self.quote_level -= 1
            if not self.accept("}"):
                raise self.error("unbalanced '{': no matching '}'", opening)
            return ("quote", Quote(body))
        if self.accept("("):
            node = self.term()
            self.expect(")")
            return node
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def _lookup(self, name: str) -> Optional[Sort]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if self.quote_level == 0 and name in self.variables:
            return self.variables[name]
        return None

    def _leaf_sorts(self, raw, out: set) -> None:
        if isinstance(raw, _Id):
            if raw.name in self.constants:
                out.add(self.constants[raw.name].sort)
            else:
                s = self._lookup(raw.name)
                if s is not None:
                    out.add(s)
        elif raw[0] in ("const", "var", "quote"):
            out.add(raw[1].sort)
        elif raw[0] in ("comp", "meet", "join", "xor"):
            for sub in raw[1:]:
                self._leaf_sorts(sub, out)

    def default_sort(self) -> Sort:
        return NSO if self.kind == "nso_sentence" or self.quote_level else T

    def resolve(self, raw, sort: Sort) -> BoolFun:
        if isinstance(raw, _Id):
            if raw.name in self.constants:
                return self.constants[raw.name]
            if self.kind == "gs_spec" and raw.name in self.streams:
                raise self.error(f"stream {raw.name} needs a time offset such as [t]", raw.token)
            return Var(raw.name, self._lookup(raw.name) or sort)
        tag = raw[0]
        if tag == "zero":
            return ZERO
        if tag == "one":
            return ONE
        if tag in ("const", "var", "quote"):
            return raw[1]
        if tag == "comp":
            return Comp(self.resolve(raw[1], sort))
        cls = {"meet": Meet, "join": Join, "xor": Xor}[tag]
        return cls(self.resolve(raw[1], sort), self.resolve(raw[2], sort))

    # -- formulas ---------------------------------------------------------
    def formula(self) -> Formula:
        if self.at("ex") or self.at("all"):
            return self.quantified()
        return self.disjunction()

    def quantified(self) -> Formula:
        kw = self.tok.text
        self.i += 1
        name = self.ident()
        self.expect(":")
        sort = self.sort()
        self.expect(".")
        self.scopes.append({name.text: sort})
        try:
            body = self.formula()
        finally:
            self.scopes.pop()
        return (Exists if kw == "ex" else Forall)(name.text, sort, body)

    def disjunction(self) -> Formula:
        args = [self.conjunction()]
        while self.accept("||"):
            args.append(self.conjunction())
        return disj(args) if len(args) > 1 else args[0]

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.accept("&&"):
            args.append(self.unary())
        return conj(args) if len(args) > 1 else args[0]

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("ex") or self.at("all"):
            return self.quantified()
        if self.at("("):
            start = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = start
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self) -> Formula:
        first = self.tok
        left = self.term()
        if self.accept("="):
            make = eq
        elif self.accept("!="):
            make = neq
        else:
            raise self.error(f"expected '=' or '!=', found {self.tok.text or 'end of input'!r}")
        right = self.term()
        sorts: set = set()
        self._leaf_sorts(left, sorts)
        self._leaf_sorts(right, sorts)
        if len(sorts) > 1:
            names = ", ".join(sorted(s.name for s in sorts))
            raise self.error(f"atom mixes sorts {names}", first)
        sort = sorts.pop() if sorts else self.default_sort()
        try:
            return make(self.resolve(left, sort), self.resolve(right, sort))
        except SortError as e:
            raise self.error(str(e), first) from None

    # -- temporal layer ---------------------------------------------------
    def gs_formula(self) -> GsFormula:
        args = [self.gs_conjunction()]
        while self.accept("||"):
            args.append(self.gs_conjunction())
        return GsOr(tuple(args)) if len(args) > 1 else args[0]

    def gs_conjunction(self) -> GsFormula:
        args = [self.gs_unary()]
        while self.accept("&&"):
            args.append(self.gs_unary())
        return GsAnd(tuple(args)) if len(args) > 1 else args[0]

    def gs_unary(self) -> GsFormula:
        if self.accept("!"):
            return GsNot(self.gs_unary())
        if self.accept("always"):
            return Always(self.ba_unit())
        if self.accept("sometimes"):
            return Sometimes(self.ba_unit())
        if self.accept("("):
            inner = self.gs_formula()
            self.expect(")")
            return inner
        raise self.error("expected 'always', 'sometimes', '!' or '('")

    def ba_unit(self) -> Formula:
        if self.at("ex") or self.at("all"):
            raise self.error("parenthesize a quantified formula after always/sometimes")
        return self.unary()

    # -- entry points -----------------------------------------------------
    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    def parse(self) -> SourceUnit:
        self.declarations()
        if self.kind == "gs_spec":
            body = self.gs_formula()
            self.finish()
            parsed = GsSpec(tuple(self.streams.values()), body)
        else:
            parsed = self.formula()
            self.finish()
            try:
                parsed.free_var_sorts
            except SortError as e:
                raise ParseError(str(e)) from None
        return SourceUnit(self.kind, self.text, parsed, dict(self.constants), dict(self.variables))


def _quote_value(q: Quote):
    from atomless.nso import lta_of
    return lta_of(q.body)


KIND_BY_SUFFIX = {".qe": "qe_query", ".nso": "nso_sentence", ".gs": "gs_spec"}


def parse(text: str, kind: str) -> SourceUnit:
    if kind not in KIND_BY_SUFFIX.values():
        raise ValueError(f"unknown source kind {kind}")
    return Parser(text, kind).parse()


def parse_formula(text: str, kind: str = "qe_query") -> Formula:
    return parse(text, kind).parsed


def parse_file(path: str) -> SourceUnit:
    from pathlib import Path
    p = Path(path)
    kind = KIND_BY_SUFFIX.get(p.suffix)
    if kind is None:
        raise ParseError(f"unknown file extension {p.suffix!r}; expected .qe, .nso or .gs")
    return parse(p.read_text(), kind)


def parse_value(text: str, sort: Sort):
    """A ground term evaluated to a carrier value, e.g. ``[0,1/2)`` or ``{x = 0}``."""
    from atomless.boolfun import evaluate
    p = Parser(text, "nso_sentence" if sort == NSO else "qe_query")
    raw = p.term()
    p.finish()
    f = p.resolve(raw, sort)
    if f.variables():
        raise ParseError(f"value must be ground, found variables {sorted(f.variables())}")
    if f.sort is not None and f.sort != sort:
        raise ParseError(f"expected a {sort} value, found {f.sort}")
    return evaluate(f, {}, sort)


def parse_assignments(line: str, sorts: dict[str, Sort]) -> dict[str, object]:
    """``name=<term> name=<term> ...`` as used by the run REPL."""
    p = Parser(line, "qe_query")
    out = {}
    while p.tok.kind != "eof":
        name = p.ident()
        if name.text not in sorts:
            raise p.error(f"unknown input {name.text}", name)
        if name.text in out:
            raise p.error(f"{name.text} given twice", name)
        p.expect("=")
        sort = sorts[name.text]
        if sort == NSO:
            p.kind = "nso_sentence"
        raw = p.term()
        f = p.resolve(raw, sort)
        if f.variables():
            raise p.error(f"value for {name.text} must be ground", name)
        from atomless.boolfun import evaluate
        out[name.text] = evaluate(f, {}, sort)
    return out
