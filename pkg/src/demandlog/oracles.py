"""Reference evaluators used to check the engine.

Neither shares code with the engine, the transformations or the analysis
module: stratification is recomputed here by plain iteration, the naive
evaluator grounds every rule by nested loops, and the top-down evaluator
keeps its own tables and agenda.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .model import FlounderingError, NotStratifiedError, Program, Query


def _local_strata(program: Program) -> dict:
    """Least stratum per predicate by fixpoint iteration: a conclusion sits at
    least as high as each positive hypothesis and above each negated one."""
    preds = set(program.predicates())
    level = {p: 0 for p in preds}
    limit = len(preds)
    changed = True
    while changed:
        changed = False
        for r in program.rules:
            h = r.head.pred
            for lit in r.body:
                need = level[lit.atom.pred] + (1 if lit.negated else 0)
                if level[h] < need:
                    level[h] = need
                    changed = True
                    if need > limit:
                        raise NotStratifiedError(
                            f"program is not stratified: {h} depends negatively on itself through recursion")
    return level


def _merge_facts(program: Program, facts) -> dict:
    db = {p: set() for p in program.predicates()}
    for f in program.facts:
        db.setdefault(f.pred, set()).add(tuple(t.name for t in f.args))
    for pred, rows in (facts or {}).items():
        db.setdefault(pred, set()).update(tuple(r) for r in rows)
    return db


def _unify(args, values, binding):
    """Extend ``binding`` so that ``args`` matches the ground tuple ``values``."""
    out = None
    for t, v in zip(args, values):
        if t.is_var:
            cur = binding.get(t.name) if out is None else out.get(t.name)
            if cur is None:
                if out is None:
                    out = dict(binding)
                out[t.name] = v
            elif cur != v:
                return None
        elif t.name != v:
            return None
    return binding if out is None else out


def _ground(args, binding):
    return tuple(binding[t.name] if t.is_var else t.name for t in args)


# Naive full-model evaluation ----------------------------------------------

def _rule_conclusions(r, db, domain):
    bindings = [{}]
    for lit in r.body:
        if lit.negated:
            continue
        rows = db.get(lit.atom.pred, ())
        bindings = [b2 for b in bindings for row in rows
                    if len(row) == lit.atom.arity and (b2 := _unify(lit.atom.args, row, b)) is not None]
        if not bindings:
            return
    for b in bindings:
        free = sorted({t.name for lit in r.body if lit.negated for t in lit.atom.args
                       if t.is_var and t.name not in b})
        # a variable seen only under negation ranges over the active domain
        for vals in product(sorted(domain), repeat=len(free)) if free else [()]:
            full = {**b, **dict(zip(free, vals))}
            if all(_ground(lit.atom.args, full) not in db.get(lit.atom.pred, ())
                   for lit in r.body if lit.negated):
                yield _ground(r.head.args, full)


def naive_stratified_evaluate(program: Program, facts=None) -> dict:
    """Standard model of a stratified program as ``pred -> set of tuples``.

    Strata are evaluated bottom up; within a stratum every rule is re-run
    over all facts until nothing changes.
    """
    level = _local_strata(program)
    db = _merge_facts(program, facts)
    domain = {v for rows in db.values() for row in rows for v in row}
    for r in program.rules:
        domain.update(t.name for lit in (r.head, *(l.atom for l in r.body)) for t in lit.args if not t.is_var)
    for s in sorted(set(level.values())):
        rules = [r for r in program.rules if level[r.head.pred] == s]
        changed = True
        while changed:
            changed = False
            for r in rules:
                new = set(_rule_conclusions(r, db, domain)) - db[r.head.pred]
                if new:
                    db[r.head.pred] |= new
                    changed = True
    return db


def filter_query(model: dict, query: Query) -> list:
    a = query.atom
    return sorted(v for v in model.get(a.pred, ())
                  if len(v) == a.arity and _unify(a.args, v, {}) is not None)


# Tabled top-down evaluation -----------------------------------------------

@dataclass
class SubqueryLog:
    """Subqueries met during tabled evaluation, keyed ``(pred, pattern, constants)``.

    A negated subquery ``not p(c)`` is logged as ``("n." + p, "b..b", c)``.
    """
    entries: dict = field(default_factory=dict)     # key -> answer set (None for negated)

    def add(self, key, answers=None) -> bool:
        if key in self.entries:
            return False
        self.entries[key] = answers
        return True

    def keys(self) -> list:
        return list(self.entries)

    def pairs(self) -> set:
        return {(p, c) for p, _, c in self.entries}

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def render(self) -> str:
        lines = []
        for (p, s, c), answers in self.entries.items():
            n = "-" if answers is None else str(len(answers))
            lines.append(f"{p}\t{s}\t{','.join(c)}\t{n}")
        return "".join(line + "\n" for line in lines)


class _Table:
    __slots__ = ("answers", "consumers")

    def __init__(self):
        self.answers = set()
        self.consumers = []


def _call_key(args, binding):
    pattern, consts = [], []
    for t in args:
        if not t.is_var:
            pattern.append("b")
            consts.append(t.name)
        elif t.name in binding:
            pattern.append("b")
            consts.append(binding[t.name])
        else:
            pattern.append("f")
    return "".join(pattern), tuple(consts)


def tabled_topdown_evaluate(program: Program, query: Query, facts=None):
    """Answers to ``query`` and the log of subqueries met on the way.

    Calls are tabled by predicate and bound constants.  Hypotheses are taken
    left to right; a consumer waiting on a table is resumed with every answer
    that arrives.  A ground negated hypothesis waits until the agenda is empty
    and is then decided, lowest stratum first, against the table of its
    subquery, which is complete at that point.
    """
    level = _local_strata(program)
    edb = _merge_facts(program, facts)
    idb = program.intensional()
    by_pred = {}
    for r in program.rules:
        by_pred.setdefault(r.head.pred, []).append(r)

    tables = {}
    log = SubqueryLog()
    agenda = deque()
    waits = []          # (pred, values, continuation)

    def call(pred, pattern, consts):
        key = (pred, pattern, consts)
        t = tables.get(key)
        if t is not None:
            return t
        t = tables[key] = _Table()
        log.add(key, t.answers)
        for r in by_pred.get(pred, ()):
            b, k = {}, 0
            for arg, c in zip(r.head.args, pattern):
                if c == "f":
                    continue
                b = _unify((arg,), (consts[k],), b)
                k += 1
                if b is None:
                    break
            if b is not None:
                agenda.append((t, r, 0, b))
        return t

    def step(owner, r, i, b):
        if i == len(r.body):
            v = _ground(r.head.args, b)
            if v not in owner.answers:
                owner.answers.add(v)
                for (t2, r2, i2, b2) in owner.consumers:
                    b3 = _unify(r2.body[i2].atom.args, v, b2)
                    if b3 is not None:
                        agenda.append((t2, r2, i2 + 1, b3))
            return
        a = r.body[i].atom
        if r.body[i].negated:
            if any(t.is_var and t.name not in b for t in a.args):
                raise FlounderingError(f"negated subquery not {a} reached with a free argument")
            v = _ground(a.args, b)
            log.add((f"n.{a.pred}", "b" * len(v), v))
            if a.pred in idb:
                call(a.pred, "b" * len(v), v)
                waits.append((a.pred, v, (owner, r, i, b)))
            elif v not in edb.get(a.pred, ()):
                agenda.append((owner, r, i + 1, b))
            return
        if a.pred not in idb:
            for row in edb.get(a.pred, ()):
                b2 = _unify(a.args, row, b)
                if b2 is not None:
                    agenda.append((owner, r, i + 1, b2))
            return
        t = call(a.pred, *_call_key(a.args, b))
        t.consumers.append((owner, r, i, b))
        for v in list(t.answers):
            b2 = _unify(a.args, v, b)
            if b2 is not None:
                agenda.append((owner, r, i + 1, b2))

    root = call(query.pred, *_call_key(query.atom.args, {}))
    while True:
        while agenda:
            step(*agenda.popleft())
        if not waits:
            break
        low = min(level[p] for p, _, _ in waits)
        ready = [w for w in waits if level[w[0]] == low]
        waits = [w for w in waits if level[w[0]] != low]
        for pred, v, (owner, r, i, b) in ready:
            if v not in tables[(pred, "b" * len(v), v)].answers:
                agenda.append((owner, r, i + 1, b))

    if query.pred in idb:
        answers = sorted(v for v in root.answers if _unify(query.atom.args, v, {}) is not None)
    else:
        answers = sorted(v for v in edb.get(query.pred, ())
                         if _unify(query.atom.args, v, {}) is not None)
    return answers, log
