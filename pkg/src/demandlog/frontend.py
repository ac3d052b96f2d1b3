"""Text syntax for programs, queries and fact files.

    p(X,Z) :- e(X,Y), p(Y,Z), not q(X,Z).   % comment
    e(1,2).
    p(1,X)?

Identifiers starting with an upper-case letter or ``_`` are variables; a
lone ``_`` is anonymous.  Lower-case identifiers, integers and double-quoted
strings are constants.  Predicate names may contain ``.`` followed by a
lower-case letter so that transformed programs (``n.p``, ``d_n.p_bb``) read
back in.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

from .model import (
    Atom, DatalogError, Literal, Program, Query, Rule, const, var,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(DatalogError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<if>:-)
  | (?P<punct>[(),.?])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\.[a-z][A-Za-z0-9_]*)*)
  | (?P<number>-?[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    pos: int


def _tokenize(text: str, filename: str):
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            span = SourceSpan(filename, line, pos - line_start + 1, line, pos - line_start + 2)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        tok_text = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, tok_text, line, pos - line_start + 1, pos))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1, pos))
    return toks


class _Parser:
    def __init__(self, text: str, filename: str):
        self.toks = _tokenize(text, filename)
        self.i = 0
        self.file = filename
        self.fresh = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def span(self, start: _Tok, end: _Tok = None) -> SourceSpan:
        end = end or start
        return SourceSpan(self.file, start.line, start.col, end.line, end.col + len(end.text))

    def error(self, msg: str, tok: _Tok = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", self.span(tok))

    def take(self, text: str) -> _Tok:
        tok = self.peek()
        if tok.text != text or tok.kind == "string":
            self.error(f"expected {text!r}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.text == text and tok.kind in ("punct", "if"):
            self.i += 1
            return True
        return False

    def term(self):
        tok = self.peek()
        self.i += 1
        if tok.kind == "number":
            return const(tok.text)
        if tok.kind == "string":
            body = tok.text[1:-1]
            return const(re.sub(r"\\(.)", r"\1", body))
        if tok.kind == "name":
            if "." in tok.text:
                self.error("dotted name is not a term", tok)
            if tok.text == "_":
                self.fresh += 1
                return var(f"_G{self.fresh}")
            if tok.text[0].isupper() or tok.text[0] == "_":
                return var(tok.text)
            return const(tok.text)
        self.i -= 1
        self.error("expected a term")

    def atom(self) -> Atom:
        tok = self.peek()
        if tok.kind != "name" or not tok.text[0].islower() or tok.text == "not":
            self.error("expected a predicate name")
        self.i += 1
        args = []
        if self.accept("("):
            if not self.accept(")"):
                args.append(self.term())
                while self.accept(","):
                    args.append(self.term())
                self.take(")")
        return Atom(tok.text, tuple(args))

    def literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "not":
            nxt = self.toks[self.i + 1]
            if nxt.kind == "name":
                self.i += 1
                return Literal(self.atom(), True)
        return Literal(self.atom())

    def clause(self):
        start = self.peek()
        if start.kind == "name" and start.text == "not":
            self.error("negated conclusion")
        head = self.atom()
        body = []
        if self.accept(":-"):
            body.append(self.literal())
            while self.accept(","):
                body.append(self.literal())
        end = self.take(".")
        return head, tuple(body), self.span(start, end)


def parse_program(text: str, filename: str = "<string>", *, disjoint: bool = True) -> Program:
    """Parse clauses into a validated Program, preserving rule and hypothesis order.

    ``disjoint=False`` admits given facts for intensional predicates, which
    transformed programs need for their seed demand facts.
    """
    p = _Parser(text, filename)
    rules, facts = [], []
    arities = {}
    while p.peek().kind != "eof":
        head, body, span = p.clause()
        for a in (head, *(lit.atom for lit in body)):
            known = arities.setdefault(a.pred, (a.arity, span))
            if known[0] != a.arity:
                raise ParseError(
                    f"arity mismatch: {a.pred} has {a.arity} arguments here "
                    f"but {known[0]} at {known[1]}", span)
        if body:
            r = Rule(head, body, span)
            if not r.is_range_restricted():
                raise ParseError(f"conclusion variable not in any hypothesis: {r}", span)
            rules.append(r)
        else:
            if not head.is_ground():
                raise ParseError(f"variable in fact {head}", span)
            facts.append(head)
    prog = Program(tuple(rules), tuple(facts))
    try:
        prog.validate(disjoint=disjoint)
    except DatalogError as exc:
        raise ParseError(exc.message, exc.span) from None
    return prog


def parse_query(text: str) -> Query:
    p = _Parser(text, "<query>")
    a = p.atom()
    p.take("?")
    p.accept(".")
    if p.peek().kind != "eof":
        p.error("trailing input after query")
    return Query(a)


def parse_atom(text: str) -> Atom:
    p = _Parser(text, "<atom>")
    a = p.atom()
    if p.peek().kind != "eof":
        p.error("trailing input after atom")
    return a


def render_rule(r: Rule) -> str:
    return str(r)


def render_fact(a: Atom) -> str:
    return f"{a}."


def render_program(program: Program) -> str:
    lines = [render_rule(r) for r in program.rules]
    lines += [render_fact(f) for f in program.facts]
    return "".join(line + "\n" for line in lines)


def load_program(path) -> Program:
    path = Path(path)
    return parse_program(path.read_text(encoding="utf-8"), str(path))


# Fact files: one ``<pred>.facts`` per extensional predicate, TSV rows.

def read_facts_file(path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            rows.append(tuple(field.strip() for field in line.split("\t")))
    return rows


def load_facts_dir(directory) -> dict:
    """Map predicate -> list of tuples for every ``*.facts`` file in ``directory``."""
    out = {}
    for name in sorted(os.listdir(directory)):
        if name.endswith(".facts"):
            rows = read_facts_file(os.path.join(directory, name))
            arities = {len(r) for r in rows}
            if len(arities) > 1:
                raise ParseError(f"{name}: rows of differing arity {sorted(arities)}")
            out[name[: -len(".facts")]] = rows
    return out


def write_facts_dir(directory, facts: dict) -> None:
    os.makedirs(directory, exist_ok=True)
    for pred, rows in facts.items():
        with open(os.path.join(directory, f"{pred}.facts"), "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write("\t".join(row) + "\n")
