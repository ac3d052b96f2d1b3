"""Datalog data model: terms, atoms, rules, programs, queries, binding patterns.

All values are immutable.  Ground tuples handed to the engine are plain
tuples of constant names (``str``); the richer ``Atom`` form is used for
rules and queries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional


class DatalogError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self):
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


class ValidationError(DatalogError):
    pass


class NotStratifiedError(DatalogError):
    def __init__(self, message, cycle=()):
        super().__init__(message)
        self.cycle = tuple(cycle)


class FlounderingError(DatalogError):
    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = tuple(offenders)


class UnknownPredicateError(DatalogError):
    pass


@dataclass(frozen=True, slots=True)
class Term:
    is_var: bool
    name: str

    def __str__(self):
        if self.is_var or BARE_CONSTANT.fullmatch(self.name):
            return self.name
        return quote(self.name)


def var(name: str) -> Term:
    return Term(True, name)


def const(name) -> Term:
    return Term(False, str(name))


BARE_CONSTANT = re.compile(r"-?[0-9]+|[a-z][A-Za-z0-9_]*")


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self):
        """Variables in order of first occurrence."""
        seen = {}
        for t in self.args:
            if t.is_var:
                seen.setdefault(t, None)
        return list(seen)

    def is_ground(self) -> bool:
        return not any(t.is_var for t in self.args)

    def values(self) -> tuple:
        """Constant names of a ground atom."""
        return tuple(t.name for t in self.args)

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"


def atom(pred: str, *args) -> Atom:
    """Build an atom from strings: names starting upper-case or ``_`` are variables."""
    terms = []
    for a in args:
        if isinstance(a, Term):
            terms.append(a)
        else:
            a = str(a)
            terms.append(var(a) if a[:1].isupper() or a[:1] == "_" else const(a))
    return Atom(pred, tuple(terms))


def ground(pred: str, values: Iterable) -> Atom:
    return Atom(pred, tuple(const(v) for v in values))


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self):
        return ("not " if self.negated else "") + str(self.atom)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple
    span: object = field(default=None, compare=False, hash=False, repr=False)

    def variables(self):
        seen = {}
        for t in self.head.args:
            if t.is_var:
                seen.setdefault(t, None)
        for lit in self.body:
            for t in lit.atom.args:
                if t.is_var:
                    seen.setdefault(t, None)
        return list(seen)

    def is_range_restricted(self) -> bool:
        body_vars = {t for lit in self.body for t in lit.atom.args if t.is_var}
        return all(t in body_vars for t in self.head.args if t.is_var)

    def __str__(self):
        return f"{self.head} :- {', '.join(map(str, self.body))}."


def rule(head: Atom, *body) -> Rule:
    """Convenience constructor; body items may be Atoms or Literals."""
    lits = tuple(b if isinstance(b, Literal) else Literal(b) for b in body)
    return Rule(head, lits)


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    facts: tuple = ()

    def intensional(self) -> set:
        return {r.head.pred for r in self.rules}

    def predicates(self) -> dict:
        """Predicate -> arity for every predicate mentioned anywhere."""
        arities = {}
        for r in self.rules:
            arities.setdefault(r.head.pred, r.head.arity)
            for lit in r.body:
                arities.setdefault(lit.atom.pred, lit.atom.arity)
        for f in self.facts:
            arities.setdefault(f.pred, f.arity)
        return arities

    def extensional(self) -> set:
        return set(self.predicates()) - self.intensional()

    def rules_for(self, pred: str) -> list:
        return [r for r in self.rules if r.head.pred == pred]

    def edb(self) -> dict:
        """Inline facts grouped as predicate -> list of value tuples."""
        out = {}
        for f in self.facts:
            out.setdefault(f.pred, []).append(f.values())
        return out

    def validate(self, *, disjoint: bool = True) -> None:
        """Check arity consistency, groundness, range restriction, and
        (optionally) that no given fact belongs to an intensional predicate."""
        arities = {}

        def check(a: Atom, span):
            known = arities.setdefault(a.pred, a.arity)
            if known != a.arity:
                raise ValidationError(
                    f"arity mismatch for {a.pred}: used with {a.arity} and {known} arguments", span)

        for r in self.rules:
            check(r.head, r.span)
            for lit in r.body:
                check(lit.atom, r.span)
            if not r.body:
                raise ValidationError("rule without hypotheses", r.span)
            if not r.is_range_restricted():
                raise ValidationError(
                    f"conclusion variable not in any hypothesis in rule {r}", r.span)
        for f in self.facts:
            check(f, None)
            if not f.is_ground():
                raise ValidationError(f"variable in fact {f}")
        if disjoint:
            idb = self.intensional()
            for f in self.facts:
                if f.pred in idb:
                    raise ValidationError(
                        f"given fact {f} belongs to intensional predicate {f.pred}")


@dataclass(frozen=True, slots=True)
class Query:
    atom: Atom

    @property
    def pred(self) -> str:
        return self.atom.pred

    def pattern(self) -> str:
        return binding_pattern(self.atom)

    def __str__(self):
        return f"{self.atom}?"


def binding_pattern(a: Atom, bound=frozenset()) -> str:
    """b/f string: b where the argument is a constant or a variable in ``bound``."""
    return "".join("f" if t.is_var and t not in bound else "b" for t in a.args)


def bound_args(a: Atom, pattern: str) -> tuple:
    return tuple(t for t, c in zip(a.args, pattern) if c == "b")


@dataclass(frozen=True, slots=True)
class DemandPattern:
    pred: str
    pattern: str

    def __str__(self):
        return f"<{self.pred},{self.pattern}>"


def substitute(a: Atom, binding: Mapping) -> Atom:
    """Replace every variable that has an entry in ``binding``.

    Binding values may be Terms or raw constant names.
    """
    args = []
    for t in a.args:
        if t.is_var and t in binding:
            v = binding[t]
            args.append(v if isinstance(v, Term) else const(v))
        else:
            args.append(t)
    return Atom(a.pred, tuple(args))


def matches(fact: Atom, query) -> Optional[dict]:
    """Binding (variable -> constant Term) making ``query`` equal ``fact``, or None."""
    q = query.atom if isinstance(query, Query) else query
    if fact.pred != q.pred or fact.arity != q.arity:
        return None
    binding = {}
    for qt, ft in zip(q.args, fact.args):
        if qt.is_var:
            prev = binding.setdefault(qt, ft)
            if prev != ft:
                return None
        elif qt != ft:
            return None
    return binding


def tuple_matches(values: tuple, q: Atom) -> bool:
    """Fast ground-tuple variant of :func:`matches` (no binding returned)."""
    seen = {}
    for t, v in zip(q.args, values):
        if t.is_var:
            if seen.setdefault(t.name, v) != v:
                return False
        elif t.name != v:
            return False
    return True


# Generated predicate names ------------------------------------------------

DEMAND, COMPLEMENT, INTERMEDIATE, PROJECTION, EQUALITY = (
    "demand", "complement", "intermediate", "projection", "equality")

_INTERMEDIATE = re.compile(r"(r[0-9]+)_i([0-9]+)")
_INDEXED = re.compile(r"(.+)_(proj|eq)([0-9]+)")


@dataclass(frozen=True, slots=True)
class GeneratedName:
    """Name of a predicate introduced by a transformation.

    ``demand`` names carry a b/f ``pattern``; a demand on a complement is a
    demand whose base is itself a complement name (``d_n.p_bb``).
    Intermediate, projection and equality names carry an ``index``.
    """

    role: str
    base: str
    pattern: str = ""
    index: int = 0

    def render(self) -> str:
        if self.role == DEMAND:
            return f"d_{self.base}_{self.pattern}"
        if self.role == COMPLEMENT:
            return f"n.{self.base}"
        if self.role == INTERMEDIATE:
            return f"{self.base}_i{self.index}"
        if self.role == PROJECTION:
            return f"{self.base}_proj{self.index}"
        if self.role == EQUALITY:
            return f"{self.base}_eq{self.index}"
        raise ValueError(f"unknown role {self.role!r}")

    def __str__(self):
        return self.render()

    @property
    def is_demand_of_complement(self) -> bool:
        return self.role == DEMAND and self.base.startswith("n.")

    @classmethod
    def parse(cls, name: str) -> Optional["GeneratedName"]:
        m = _INTERMEDIATE.fullmatch(name)
        if m:
            return cls(INTERMEDIATE, m.group(1), index=int(m.group(2)))
        m = _INDEXED.fullmatch(name)
        if m:
            role = PROJECTION if m.group(2) == "proj" else EQUALITY
            return cls(role, m.group(1), index=int(m.group(3)))
        if name.startswith("d_"):
            base, sep, pattern = name[2:].rpartition("_")
            if sep and base and set(pattern) <= {"b", "f"}:
                return cls(DEMAND, base, pattern)
        if name.startswith("n.") and len(name) > 2:
            return cls(COMPLEMENT, name[2:])
        return None


def demand_name(pred: str, pattern: str) -> str:
    return GeneratedName(DEMAND, pred, pattern).render()


def complement_name(pred: str) -> str:
    return GeneratedName(COMPLEMENT, pred).render()


def is_generated(pred: str) -> bool:
    return GeneratedName.parse(pred) is not None
